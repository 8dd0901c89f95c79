# wallopt/wall_model.py - Design vector, site parameters, bounds, seismic cases and rebar catalog

import logging
import math
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from wallopt.errors import CatalogError, ConfigError

logger = logging.getLogger(__name__)

N_GEOMETRY = 8
N_REBAR = 4
N_VARIABLES = N_GEOMETRY + N_REBAR
CATALOG_SIZE = 223

# Bar diameters (mm) and counts whose distinct n*d^2 products give the 223-row catalog
BAR_DIAMETERS_MM = (10, 12, 14, 15, 16, 17, 18, 19, 20, 22, 24, 25, 26, 28, 30)
BAR_COUNTS = range(3, 19)

# (count, diameter) rows at both ends of the reference catalog
KNOWN_HEAD = ((3, 10), (4, 10), (3, 12), (5, 10), (4, 12))
KNOWN_TAIL = ((16, 30), (17, 30), (18, 30))


@dataclass(frozen=True)
class RebarChoice:
    count: int
    diameter: int  # mm
    area: float  # cm^2 per metre strip

    @property
    def area_mm2(self) -> float:
        return self.area * 100.0

    @property
    def area_m2(self) -> float:
        return self.area * 1e-4

    @property
    def diameter_m(self) -> float:
        return self.diameter / 1000.0

    def label(self) -> str:
        return f"{self.count}phi{self.diameter}"


def bar_area(count: int, diameter_mm: int) -> float:
    """Area in cm^2 of `count` bars of the given diameter"""
    return count * math.pi * (diameter_mm / 10.0) ** 2 / 4.0


@lru_cache(maxsize=1)
def build_catalog() -> Tuple[RebarChoice, ...]:
    """Build the ascending 223-entry reinforcement catalog.

    Candidates are all (n, d) pairs; pairs with the same n*d^2 have identical area,
    and the one with the smaller diameter (more bars) is kept.
    """
    by_key: Dict[int, Tuple[int, int]] = {}
    for diameter in BAR_DIAMETERS_MM:
        for count in BAR_COUNTS:
            key = count * diameter * diameter
            current = by_key.get(key)
            if current is None or diameter < current[1]:
                by_key[key] = (count, diameter)

    rows = [by_key[key] for key in sorted(by_key)]
    if len(rows) != CATALOG_SIZE:
        raise CatalogError(f"Catalog generation produced {len(rows)} rows, expected {CATALOG_SIZE}")
    if tuple(rows[:len(KNOWN_HEAD)]) != KNOWN_HEAD or tuple(rows[-len(KNOWN_TAIL):]) != KNOWN_TAIL:
        raise CatalogError("Catalog endpoints do not match the reference rows")

    catalog = tuple(RebarChoice(count, diameter, bar_area(count, diameter)) for count, diameter in rows)
    logger.debug(f"Built rebar catalog with {len(catalog)} entries")
    return catalog


def lookup(index: int) -> RebarChoice:
    """Catalog entry for a 1-based index"""
    if isinstance(index, bool) or int(index) != index:
        raise CatalogError(f"Rebar index must be an integer, got {index!r}")
    index = int(index)
    if not 1 <= index <= CATALOG_SIZE:
        raise CatalogError(f"Rebar index {index} outside 1..{CATALOG_SIZE}")
    return build_catalog()[index - 1]


@dataclass(frozen=True)
class SeismicCase:
    k_h: float
    k_v: float

    def __post_init__(self):
        if self.k_h < 0 or self.k_v < 0 or self.k_v >= 1:
            raise ValueError(f"Invalid seismic coefficients k_h={self.k_h}, k_v={self.k_v}")

    @property
    def is_static(self) -> bool:
        return self.k_h == 0 and self.k_v == 0


def seismic_cases() -> List[SeismicCase]:
    """The nine (k_h, k_v) combinations in 0.15 steps, k_h varying fastest"""
    steps = (0.0, 0.15, 0.3)
    return [SeismicCase(k_h, k_v) for k_v in steps for k_h in steps]


def seismic_case(number: int) -> SeismicCase:
    if not 1 <= number <= 9:
        raise ConfigError(f"Seismic case must be in 1..9, got {number}")
    return seismic_cases()[number - 1]


@dataclass(frozen=True)
class DesignParameters:
    H: float  # stem height (m)
    fy: float  # MPa
    fc: float  # MPa
    cover: float  # m
    rho_st: float
    q: float  # surcharge (kPa)
    slope: float  # backfill slope i (deg)
    phi: float  # retained soil friction (deg)
    phi_base: float  # base soil friction (deg)
    gamma_s: float  # kN/m^3
    gamma_base: float  # kN/m^3
    gamma_c: float  # kN/m^3
    c_base: float  # kPa
    D: float  # front soil depth (m)
    steel_cost: float  # $/kg
    concrete_cost: float  # $/m^3
    fs_overturning: float
    fs_sliding: float
    fs_bearing: float
    steel_emission: float  # kg CO2 / kg
    concrete_emission: float  # kg CO2 / m^3

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "slope":
                if value < 0:
                    raise ConfigError("Backfill slope must be >= 0")
            elif value <= 0:
                raise ConfigError(f"Design parameter '{f.name}' must be positive, got {value}")

    @property
    def delta(self) -> float:
        """Wall friction angle (deg)"""
        return 2.0 * self.phi / 3.0


EXAMPLE_PARAMETERS: Dict[int, DesignParameters] = {
    1: DesignParameters(
        H=3.0, fy=400.0, fc=21.0, cover=0.07, rho_st=0.002, q=20.0, slope=10.0,
        phi=36.0, phi_base=36.0, gamma_s=17.5, gamma_base=18.5, gamma_c=23.5,
        c_base=125.0, D=0.5, steel_cost=0.4, concrete_cost=40.0,
        fs_overturning=1.5, fs_sliding=1.5, fs_bearing=3.0,
        steel_emission=2.82, concrete_emission=224.94,
    ),
    2: DesignParameters(
        H=6.0, fy=400.0, fc=21.0, cover=0.07, rho_st=0.002, q=30.0, slope=0.0,
        phi=32.0, phi_base=32.0, gamma_s=20.0, gamma_base=18.0, gamma_c=23.5,
        c_base=100.0, D=1.0, steel_cost=0.4, concrete_cost=40.0,
        fs_overturning=1.5, fs_sliding=1.5, fs_bearing=3.0,
        steel_emission=2.82, concrete_emission=224.94,
    ),
}

# Config-file symbol -> DesignParameters field
PARAMETER_SYMBOLS = {
    "H": "H", "fy": "fy", "fc": "fc", "cover": "cover", "CC": "cover",
    "rho_st": "rho_st", "q": "q", "i": "slope", "slope": "slope",
    "phi": "phi", "phi_base": "phi_base", "gamma_s": "gamma_s",
    "gamma_base": "gamma_base", "gamma_c": "gamma_c", "c_base": "c_base",
    "c": "c_base", "D": "D", "Cs": "steel_cost", "Cc": "concrete_cost",
    "FS_O": "fs_overturning", "FS_S": "fs_sliding", "FS_B": "fs_bearing",
    "e_s": "steel_emission", "e_c": "concrete_emission",
}


def example_parameters(example: int, overrides: Mapping[str, float] = None) -> DesignParameters:
    """Preset parameters for example 1 or 2, optionally overridden by symbol name"""
    if example not in EXAMPLE_PARAMETERS:
        raise ConfigError(f"Unknown example {example}")
    params = EXAMPLE_PARAMETERS[example]
    if not overrides:
        return params

    changes = {}
    for symbol, value in overrides.items():
        if symbol not in PARAMETER_SYMBOLS:
            raise ConfigError(f"Unknown design parameter '{symbol}'")
        changes[PARAMETER_SYMBOLS[symbol]] = float(value)
    return replace(params, **changes)


@dataclass(frozen=True, eq=False)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != (N_VARIABLES,) or upper.shape != (N_VARIABLES,):
            raise ConfigError("Bounds must be 12-vectors")
        if np.any(lower > upper):
            raise ConfigError("Bounds require lower <= upper")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def span(self) -> np.ndarray:
        return self.upper - self.lower

    def clamp(self, position: Sequence[float]) -> np.ndarray:
        return np.clip(np.asarray(position, dtype=float), self.lower, self.upper)

    def contains(self, position: Sequence[float], tol: float = 1e-12) -> bool:
        p = np.asarray(position, dtype=float)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))


_REBAR_LOWER = [1.0] * N_REBAR
_REBAR_UPPER = [float(CATALOG_SIZE)] * N_REBAR

EXAMPLE_BOUNDS: Dict[int, Bounds] = {
    1: Bounds(
        lower=np.array([1.31, 0.44, 0.20, 0.20, 0.27, 1.31, 0.20, 0.20] + _REBAR_LOWER),
        upper=np.array([3.50, 0.78, 0.33, 0.33, 0.33, 3.50, 0.33, 0.33] + _REBAR_UPPER),
    ),
    2: Bounds(
        lower=np.array([2.60, 0.87, 0.30, 0.30, 0.54, 2.60, 0.30, 0.30] + _REBAR_LOWER),
        upper=np.array([5.50, 1.56, 0.67, 0.67, 0.67, 5.50, 0.67, 0.67] + _REBAR_UPPER),
    ),
}


def example_bounds(example: int) -> Bounds:
    if example not in EXAMPLE_BOUNDS:
        raise ConfigError(f"Unknown example {example}")
    return EXAMPLE_BOUNDS[example]


@dataclass(frozen=True)
class DesignVector:
    """X1..X8 in metres and catalog indices R1..R4 (stem, toe, heel, key)"""

    x: Tuple[float, ...]
    r: Tuple[int, ...]

    def __post_init__(self):
        if len(self.x) != N_GEOMETRY or len(self.r) != N_REBAR:
            raise ValueError("DesignVector needs 8 lengths and 4 rebar indices")
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "r", tuple(int(v) for v in self.r))
        for index in self.r:
            if not 1 <= index <= CATALOG_SIZE:
                raise CatalogError(f"Rebar index {index} outside 1..{CATALOG_SIZE}")

    @classmethod
    def from_position(cls, position: Sequence[float], bounds: Bounds = None) -> "DesignVector":
        """Decode a continuous 12-vector; rebar components are rounded to the nearest index"""
        p = np.asarray(position, dtype=float)
        if p.shape != (N_VARIABLES,):
            raise ValueError(f"Expected 12 values, got {p.shape}")
        if bounds is not None:
            p = bounds.clamp(p)
        rebar = np.clip(np.rint(p[N_GEOMETRY:]), 1, CATALOG_SIZE).astype(int)
        return cls(tuple(p[:N_GEOMETRY]), tuple(rebar))

    def to_array(self) -> np.ndarray:
        return np.array(list(self.x) + [float(v) for v in self.r])

    def within(self, bounds: Bounds, tol: float = 1e-9) -> bool:
        return bounds.contains(self.to_array(), tol)

    # Named accessors
    @property
    def base_width(self) -> float:
        return self.x[0]

    @property
    def toe_width(self) -> float:
        return self.x[1]

    @property
    def stem_bottom(self) -> float:
        return self.x[2]

    @property
    def stem_top(self) -> float:
        return self.x[3]

    @property
    def base_thickness(self) -> float:
        return self.x[4]

    @property
    def key_offset(self) -> float:
        return self.x[5]

    @property
    def key_width(self) -> float:
        return self.x[6]

    @property
    def key_height(self) -> float:
        return self.x[7]

    @property
    def heel_width(self) -> float:
        return max(self.x[0] - self.x[1] - self.x[2], 0.0)

    def rebar(self) -> Tuple[RebarChoice, RebarChoice, RebarChoice, RebarChoice]:
        return tuple(lookup(i) for i in self.r)
