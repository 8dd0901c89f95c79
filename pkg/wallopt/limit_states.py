# wallopt/limit_states.py - Geotechnical stability, section capacity and the 26 design constraints

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from wallopt.earth_pressure import PressureState
from wallopt.wall_model import DesignParameters, DesignVector, RebarChoice

logger = logging.getLogger(__name__)

N_CONSTRAINTS = 26
STRIP_WIDTH_MM = 1000.0
SEISMIC_BEARING_INCREASE = 1.33
PHI_SHEAR = 0.75
PHI_FLEXURE = 0.9

# Violation reported for a ratio check whose capacity or length is non-positive
INVALID_CAPACITY_VIOLATION = 1.0

SECTIONS = ("stem", "toe", "heel", "key")


@dataclass(frozen=True)
class StabilityReport:
    FS_O: float
    FS_S: float
    FS_B: float
    sum_MR: float
    sum_MO: float
    sum_FR: float
    sum_FD: float
    sum_V: float
    e: float
    q_max: float
    q_min: float
    q_a: float
    B: float
    q_toe: float
    q_heel: float

    def pressure_at(self, x: float) -> float:
        """Linear base pressure at distance x from the toe"""
        return self.q_toe + (self.q_heel - self.q_toe) * x / self.B


@dataclass(frozen=True)
class SectionCheck:
    section: str
    V_n: float
    V_u: float
    M_n: float
    M_u: float
    A_s: float  # cm^2/m
    A_s_min: float
    A_s_max: float
    l_db: float  # m
    l_dh: float
    twelve_db: float
    d: float  # m
    a: float  # mm
    valid: bool = True


@dataclass(frozen=True)
class SlabDemands:
    M_t: float
    V_t: float
    M_h: float
    V_h: float
    dt: float
    dh: float


@dataclass(frozen=True)
class ConstraintVector:
    g: Tuple[float, ...]

    def __post_init__(self):
        if len(self.g) != N_CONSTRAINTS:
            raise ValueError(f"Expected {N_CONSTRAINTS} constraint values, got {len(self.g)}")
        object.__setattr__(self, "g", tuple(float(v) for v in self.g))

    def __getitem__(self, number: int) -> float:
        """1-based access, g[1] .. g[26]"""
        return self.g[number - 1]

    @property
    def feasible(self) -> bool:
        return all(v <= 0 for v in self.g)

    @property
    def max_violation(self) -> float:
        return max(0.0, max(self.g))

    def violated(self, tol: float = 0.0) -> List[int]:
        return [j + 1 for j, v in enumerate(self.g) if v > tol]

    def as_array(self) -> np.ndarray:
        return np.array(self.g)

    @classmethod
    def all_violated(cls, value: float = INVALID_CAPACITY_VIOLATION) -> "ConstraintVector":
        return cls(tuple([value] * N_CONSTRAINTS))


# ------------------------- Wall weights ------------------------- #

def vertical_loads(design: DesignVector, params: DesignParameters) -> List[Tuple[str, float, float]]:
    """(name, force kN/m, lever arm from toe m) for every vertical load.

    The stem back face is vertical at x = X2 + X3; the front face is battered.
    With X4 > X3 the batter leans over the toe and its triangle sits above x = X2.
    """
    X1, X2, X3, X4, X5, X6, X7, X8 = design.x
    heel = design.heel_width
    back = X2 + X3
    narrow = min(X4, X3)
    taper = X3 - X4
    tan_i = math.tan(math.radians(params.slope))

    if taper >= 0.0:
        batter_arm = X2 + 2.0 * taper / 3.0
    else:
        batter_arm = X2 + taper / 3.0

    loads = [
        ("stem_rect", narrow * params.H * params.gamma_c, back - narrow / 2.0),
        ("stem_batter", 0.5 * abs(taper) * params.H * params.gamma_c, batter_arm),
        ("base", X1 * X5 * params.gamma_c, X1 / 2.0),
        ("key", X7 * X8 * params.gamma_c, X6 + X7 / 2.0),
        ("soil_heel", heel * params.H * params.gamma_s, back + heel / 2.0),
        ("soil_slope", 0.5 * heel * heel * tan_i * params.gamma_s, back + 2.0 * heel / 3.0),
        ("surcharge", params.q * heel, back + heel / 2.0),
        ("soil_toe", X2 * params.D * params.gamma_base, X2 / 2.0),
    ]
    return loads


# ------------------------- Geotechnical checks ------------------------- #

def base_pressures(sum_V: float, B: float, sum_MR: float, sum_MO: float) -> Tuple[float, float, float]:
    """Eccentricity and extreme base pressures (e, q_max, q_min)"""
    e = B / 2.0 - (sum_MR - sum_MO) / sum_V
    q_avg = sum_V / B
    q_1 = q_avg * (1.0 + 6.0 * e / B)
    q_2 = q_avg * (1.0 - 6.0 * e / B)
    return e, max(q_1, q_2), min(q_1, q_2)


def bearing_factors(phi: float) -> Tuple[float, float, float]:
    """Meyerhof factors (N_c, N_q, N_gamma) for a friction angle in degrees"""
    if phi <= 1e-9:
        return 2.0 + math.pi, 1.0, 0.0
    phi_r = math.radians(phi)
    N_q = math.exp(math.pi * math.tan(phi_r)) * math.tan(math.radians(45.0 + phi / 2.0)) ** 2
    N_c = (N_q - 1.0) / math.tan(phi_r)
    N_gamma = (N_q - 1.0) * math.tan(1.4 * phi_r)
    return N_c, N_q, N_gamma


def bearing_capacity(params: DesignParameters, design: DesignVector, eccentricity: float = 0.0) -> float:
    """Ultimate bearing capacity (kPa) from the general bearing equation with depth factors"""
    B = design.base_width
    B_eff = max(B - 2.0 * abs(eccentricity), 1e-6)
    phi = params.phi_base
    N_c, N_q, N_gamma = bearing_factors(phi)
    depth_ratio = min(params.D / B, 1.0)

    if phi <= 1e-9:
        F_qd = 1.0
        F_cd = 1.0 + 0.4 * depth_ratio
    else:
        phi_r = math.radians(phi)
        F_qd = 1.0 + 2.0 * math.tan(phi_r) * (1.0 - math.sin(phi_r)) ** 2 * depth_ratio
        F_cd = F_qd - (1.0 - F_qd) / (N_c * math.tan(phi_r))
    F_gd = 1.0

    overburden = params.gamma_base * params.D
    return (params.c_base * N_c * F_cd
            + overburden * N_q * F_qd
            + 0.5 * params.gamma_base * B_eff * N_gamma * F_gd)


def factors_of_safety(pressure: PressureState, design: DesignVector, params: DesignParameters) -> StabilityReport:
    """Overturning, sliding and bearing factors of safety"""
    B = design.base_width
    loads = vertical_loads(design, params)
    # Thrust is applied horizontally; its P_ae sin(delta) share never enters sum_V or sum_MR
    sum_V = sum(force for _, force, _ in loads)
    sum_MR = sum(force * arm for _, force, arm in loads)
    sum_MO = pressure.overturning_moment

    sum_FD = pressure.driving_force
    friction = math.tan(math.radians(2.0 * params.phi_base / 3.0))
    sum_FR = (sum_V * friction
              + 2.0 * B * params.c_base / 3.0
              + pressure.passive_resistance
              + pressure.P_k)

    e, q_max, q_min = base_pressures(sum_V, B, sum_MR, sum_MO)
    q_toe = sum_V / B * (1.0 + 6.0 * e / B)
    q_heel = sum_V / B * (1.0 - 6.0 * e / B)
    q_a = bearing_capacity(params, design, e)

    FS_O = sum_MR / sum_MO if sum_MO > 0 else math.inf
    FS_S = sum_FR / sum_FD if sum_FD > 0 else math.inf
    FS_B = SEISMIC_BEARING_INCREASE * q_a / q_max if q_max > 0 else math.inf

    return StabilityReport(
        FS_O=FS_O, FS_S=FS_S, FS_B=FS_B,
        sum_MR=sum_MR, sum_MO=sum_MO, sum_FR=sum_FR, sum_FD=sum_FD, sum_V=sum_V,
        e=e, q_max=q_max, q_min=q_min, q_a=q_a, B=B,
        q_toe=q_toe, q_heel=q_heel,
    )


# ------------------------- Structural checks ------------------------- #

def section_capacities(choice: RebarChoice, d: float, b: float, f_c: float, f_y: float) -> Tuple[float, float]:
    """Design shear and moment strength (kN, kN*m) of a singly reinforced strip.

    d and b are in mm. Returns M_n = 0 when the stress block does not fit in d.
    """
    if d <= 0 or b <= 0:
        raise ValueError("d and b must be positive")
    V_n = PHI_SHEAR * 0.17 * math.sqrt(f_c) * b * d / 1000.0
    A_s = choice.area_mm2
    a = A_s * f_y / (0.85 * f_c * b)
    if a >= d:
        return V_n, 0.0
    M_n = PHI_FLEXURE * A_s * f_y * (d - a / 2.0) / 1e6
    return V_n, M_n


def beta_1(f_c: float) -> float:
    if f_c <= 28.0:
        return 0.85
    return max(0.65, 0.85 - 0.05 * (f_c - 28.0) / 7.0)


def steel_limits(d: float, f_c: float, f_y: float, b: float = STRIP_WIDTH_MM) -> Tuple[float, float]:
    """(A_s_min, A_s_max) in cm^2 for effective depth d in mm"""
    rho_min = max(1.4 / f_y, math.sqrt(f_c) / (4.0 * f_y))
    rho_balanced = 0.85 * beta_1(f_c) * f_c / f_y * 600.0 / (600.0 + f_y)
    return rho_min * b * d / 100.0, 0.75 * rho_balanced * b * d / 100.0


def development_lengths(choice: RebarChoice, f_c: float, f_y: float) -> Tuple[float, float, float]:
    """(straight l_db, hooked l_dh, 12 d_b) in metres"""
    l_db = 0.24 * f_y / math.sqrt(f_c) * choice.diameter_m
    return l_db, 0.7 * l_db, 12.0 * choice.diameter_m


def slab_demands(stability: StabilityReport, design: DesignVector, params: DesignParameters) -> SlabDemands:
    """Factored toe and heel moments and shears at their critical sections"""
    X5 = design.base_thickness
    l_toe = design.toe_width
    l_heel = design.heel_width
    junction = design.toe_width + design.stem_bottom
    dt = dh = X5 - params.cover

    q_toe_end = stability.q_toe
    q_heel_end = stability.q_heel
    q_2 = stability.pressure_at(l_toe)
    q_dt = stability.pressure_at(max(l_toe - dt, 0.0))
    q_l = stability.pressure_at(junction)
    q_dh = stability.pressure_at(min(junction + dh, stability.B))

    tan_i = math.tan(math.radians(params.slope))
    W_bs = params.gamma_s * l_heel * tan_i
    W_bsdh = params.gamma_s * min(dh, l_heel) * tan_i

    toe_self = params.gamma_c * X5 + params.gamma_s * params.D
    M_t = (1.7 * (q_2 / 6.0 + q_toe_end / 3.0) - 0.9 * toe_self) * l_toe ** 2
    V_t = (1.7 * (q_dt + q_toe_end) / 2.0 - 0.9 * toe_self) * max(l_toe - dt, 0.0)

    heel_load = 1.7 * params.q + 1.4 * params.gamma_c * X5 + 1.4 * params.gamma_s * params.H
    M_h = (heel_load / 2.0 + 1.4 * W_bs / 3.0 - (q_l + 2.0 * q_heel_end) / 6.0) * l_heel ** 2
    V_h = (heel_load + 1.4 * (W_bs + W_bsdh) / 2.0
           - 0.9 * (q_dh + q_heel_end) / 2.0) * max(l_heel - dh, 0.0)

    return SlabDemands(M_t=M_t, V_t=V_t, M_h=M_h, V_h=V_h, dt=dt, dh=dh)


def stem_key_demands(pressure: PressureState, design: DesignVector,
                     params: DesignParameters) -> Tuple[float, float, float, float]:
    """Factored (M_stem, V_stem, M_key, V_key) at the stem base and key root"""
    K = pressure.lateral_coefficient
    H = params.H
    p_max = K * params.gamma_s * H
    p_q = K * params.q

    V_stem = 1.7 * (0.5 * p_max * H + p_q * H)
    M_stem = 1.7 * (p_max * H ** 2 / 6.0 + p_q * H ** 2 / 2.0)

    X8 = design.key_height
    p_top = pressure.k_p * params.gamma_base * params.D
    p_bottom = pressure.k_p * params.gamma_base * (params.D + X8)
    V_key = 1.7 * 0.5 * (p_top + p_bottom) * X8
    M_key = 1.7 * (p_top * X8 ** 2 / 2.0 + (p_bottom - p_top) * X8 ** 2 / 3.0)

    return M_stem, V_stem, M_key, V_key


def check_section(section: str, choice: RebarChoice, depth: float, M_u: float, V_u: float,
                  params: DesignParameters) -> SectionCheck:
    """Capacity, steel-limit and anchorage data for one member; depth is the member thickness in m"""
    d = depth - params.cover
    d_mm = d * 1000.0
    l_db, l_dh, twelve_db = development_lengths(choice, params.fc, params.fy)

    if d_mm <= 0:
        return SectionCheck(section, 0.0, V_u, 0.0, M_u, choice.area, math.inf, 0.0,
                            l_db, l_dh, twelve_db, d, math.inf, valid=False)

    V_n, M_n = section_capacities(choice, d_mm, STRIP_WIDTH_MM, params.fc, params.fy)
    a = choice.area_mm2 * params.fy / (0.85 * params.fc * STRIP_WIDTH_MM)
    A_s_min, A_s_max = steel_limits(d_mm, params.fc, params.fy)
    return SectionCheck(section, V_n, V_u, M_n, M_u, choice.area, A_s_min, A_s_max,
                        l_db, l_dh, twelve_db, d, a, valid=a < d_mm)


def check_sections(pressure: PressureState, stability: StabilityReport, design: DesignVector,
                   params: DesignParameters) -> Dict[str, SectionCheck]:
    slab = slab_demands(stability, design, params)
    M_stem, V_stem, M_key, V_key = stem_key_demands(pressure, design, params)
    stem_bar, toe_bar, heel_bar, key_bar = design.rebar()

    return {
        "stem": check_section("stem", stem_bar, design.stem_bottom, M_stem, V_stem, params),
        "toe": check_section("toe", toe_bar, design.base_thickness, slab.M_t, slab.V_t, params),
        "heel": check_section("heel", heel_bar, design.base_thickness, slab.M_h, slab.V_h, params),
        "key": check_section("key", key_bar, design.key_width, M_key, V_key, params),
    }


# ------------------------- Constraint assembly ------------------------- #

def _ratio(numerator: float, denominator: float) -> float:
    """numerator / denominator - 1, with a fixed violation for a non-positive denominator"""
    if denominator <= 0:
        return INVALID_CAPACITY_VIOLATION
    if math.isinf(denominator):
        return -1.0
    value = numerator / denominator - 1.0
    return value if math.isfinite(value) else INVALID_CAPACITY_VIOLATION


def _target_ratio(target: float, achieved: float) -> float:
    if math.isinf(achieved):
        return -1.0
    if achieved <= 0:
        return INVALID_CAPACITY_VIOLATION
    return target / achieved - 1.0


def assemble_constraints(stability: StabilityReport, sections: Dict[str, SectionCheck],
                         design: DesignVector, params: DesignParameters) -> ConstraintVector:
    """The 26 normalized constraints, g <= 0 meaning satisfied"""
    X1, X2, X3, X4, X5, X6, X7, X8 = design.x
    cover = params.cover
    g: List[float] = [
        _target_ratio(params.fs_overturning, stability.FS_O),
        _target_ratio(params.fs_sliding, stability.FS_S),
        _target_ratio(params.fs_bearing, stability.FS_B),
        -stability.q_min,
    ]

    ordered = [sections[name] for name in SECTIONS]
    for s in ordered:
        g.append(_ratio(s.M_u, s.M_n) if s.valid else INVALID_CAPACITY_VIOLATION)
    for s in ordered:
        g.append(_ratio(s.V_u, s.V_n) if s.valid else INVALID_CAPACITY_VIOLATION)
    for s in ordered:
        g.append(_ratio(s.A_s_min, s.A_s))
    for s in ordered:
        g.append(_ratio(s.A_s, s.A_s_max) if s.valid else INVALID_CAPACITY_VIOLATION)

    g.append((X2 + X3) / X1 - 1.0)
    g.append((X6 + X7) / X1 - 1.0)

    stem, toe, heel, key = ordered
    slab_depth = X5 - cover
    # Either anchorage mode may satisfy each check
    g.append(min(_ratio(stem.l_db, slab_depth), _ratio(stem.l_dh, slab_depth)))
    g.append(min(_ratio(toe.l_db, X1 - X2 - cover), _ratio(toe.twelve_db, slab_depth)))
    g.append(min(_ratio(heel.l_db, X2 + X3 - cover), _ratio(heel.twelve_db, slab_depth)))
    g.append(min(_ratio(key.l_db, slab_depth), _ratio(key.l_dh, slab_depth)))

    return ConstraintVector(tuple(g))
