# wallopt/monitoring.py - Logging setup and run timing

import logging
import sys
import threading
import time
from datetime import datetime
from functools import wraps
from typing import Any, Dict, List, Optional

from wallopt.config import settings


# Configure logging
def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """Setup logging configuration"""
    log_level = getattr(logging, (level or settings.log_level).upper(), logging.INFO)

    # Create formatter
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Avoid stacking handlers when the CLI is invoked repeatedly in one process
    for handler in list(root_logger.handlers):
        if getattr(handler, "_wallopt", False):
            root_logger.removeHandler(handler)

    # Console handler
    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    console_handler._wallopt = True
    root_logger.addHandler(console_handler)

    # File handler if log file is specified
    target = log_file or settings.log_file
    if target:
        file_handler = logging.FileHandler(target)
        file_handler.setFormatter(formatter)
        file_handler._wallopt = True
        root_logger.addHandler(file_handler)

    return root_logger


logger = logging.getLogger(__name__)


class PerformanceMonitor:
    """Performance monitoring and metrics collection"""

    def __init__(self, max_entries: int = 1000):
        self.metrics: Dict[str, List[Dict[str, Any]]] = {}
        self.enabled = settings.enable_performance_logging
        self.max_entries = max_entries
        self._lock = threading.Lock()

    def record_metric(self, metric_name: str, value: float, tags: Dict[str, Any] = None):
        """Record a performance metric"""
        if not self.enabled:
            return

        metric_data = {
            "value": value,
            "timestamp": datetime.utcnow().isoformat(),
            "tags": tags or {}
        }

        with self._lock:
            history = self.metrics.setdefault(metric_name, [])
            history.append(metric_data)
            if len(history) > self.max_entries:
                self.metrics[metric_name] = history[-self.max_entries:]

    def get_statistics(self, metric_name: str) -> Dict[str, float]:
        """Get statistical summary of a metric"""
        values = [m["value"] for m in self.metrics.get(metric_name, [])]
        if not values:
            return {}

        return {
            "count": len(values),
            "min": min(values),
            "max": max(values),
            "avg": sum(values) / len(values),
            "latest": values[-1]
        }

    def reset(self):
        with self._lock:
            self.metrics = {}


# Global performance monitor
performance_monitor = PerformanceMonitor()


def performance_timer(component: str = None):
    """Decorator to measure function execution time"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            component_name = component or f"{func.__module__}.{func.__name__}"

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                duration = time.perf_counter() - start_time
                performance_monitor.record_metric(
                    f"{component_name}.execution_time",
                    duration,
                    {"status": "error", "error": str(e)}
                )
                logger.error(f"{component_name} failed after {duration:.3f}s: {e}")
                raise

            duration = time.perf_counter() - start_time
            performance_monitor.record_metric(
                f"{component_name}.execution_time",
                duration,
                {"status": "success"}
            )
            logger.info(f"{component_name} executed in {duration:.3f}s")
            return result

        return wrapper
    return decorator
