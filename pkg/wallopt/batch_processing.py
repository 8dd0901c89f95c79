# wallopt/batch_processing.py - Seeded batches of independent optimizer runs

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from wallopt.config import settings

logger = logging.getLogger(__name__)


class RunStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class RunTask:
    id: int
    name: str
    seed: int
    status: RunStatus = RunStatus.PENDING
    created_at: datetime = field(default_factory=datetime.utcnow)
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    result: Optional[Any] = None
    error: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert task to dictionary for JSON serialization"""
        data = asdict(self)
        data['status'] = self.status.value
        data['created_at'] = self.created_at.isoformat()
        data['started_at'] = self.started_at.isoformat() if self.started_at else None
        data['completed_at'] = self.completed_at.isoformat() if self.completed_at else None
        data['result'] = self.result.to_dict() if hasattr(self.result, "to_dict") else self.result
        return data


def run_seed(root_seed: int, index: int) -> int:
    """Seed of run `index`, independent of how many runs exist or their order"""
    return int(np.random.SeedSequence([root_seed, index]).generate_state(1, dtype=np.uint32)[0])


class RunBatchManager:
    """Executes independent runs on a thread pool and returns results in run order"""

    def __init__(self, max_workers: int = None):
        self.max_workers = max_workers or settings.max_workers
        self.tasks: Dict[int, RunTask] = {}

    def create_tasks(self, name: str, runs: int, root_seed: int, metadata: Dict[str, Any] = None) -> List[RunTask]:
        tasks = []
        for index in range(runs):
            task = RunTask(id=index, name=f"{name}#{index}", seed=run_seed(root_seed, index),
                           metadata=dict(metadata or {}))
            self.tasks[index] = task
            tasks.append(task)
        return tasks

    def _execute(self, task: RunTask, func: Callable[[int], Any]) -> RunTask:
        task.status = RunStatus.RUNNING
        task.started_at = datetime.utcnow()
        try:
            task.result = func(task.seed)
            task.status = RunStatus.COMPLETED
        except Exception as e:
            task.status = RunStatus.FAILED
            task.error = str(e)
            logger.error(f"Run {task.name} failed: {e}")
        finally:
            task.completed_at = datetime.utcnow()
        return task

    def run(self, name: str, runs: int, root_seed: int, func: Callable[[int], Any],
            metadata: Dict[str, Any] = None) -> List[RunTask]:
        """Run func(seed) for every run index; the list is ordered by index"""
        tasks = self.create_tasks(name, runs, root_seed, metadata)
        if self.max_workers <= 1:
            for task in tasks:
                self._execute(task, func)
            return tasks

        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            futures = [pool.submit(self._execute, task, func) for task in tasks]
            for done, _ in enumerate(as_completed(futures), start=1):
                logger.debug(f"{name}: {done}/{runs} runs finished")
        return sorted(tasks, key=lambda t: t.id)

    def get_task(self, task_id: int) -> Optional[RunTask]:
        return self.tasks.get(task_id)

    def failed(self) -> List[RunTask]:
        return [t for t in self.tasks.values() if t.status == RunStatus.FAILED]
