# wallopt/earth_pressure.py - Mononobe-Okabe pressure coefficients and force resultants

import logging
import math
from dataclasses import dataclass
from typing import Tuple

from wallopt.errors import InfeasiblePressureError
from wallopt.wall_model import DesignParameters, DesignVector, SeismicCase

logger = logging.getLogger(__name__)

# Fraction of h at which the dynamic active increment acts
DYNAMIC_ARM_FRACTION = 0.6


@dataclass(frozen=True)
class PressureState:
    """Coefficients and resultants for one design under one seismic case.

    Forces are kN per metre of wall, heights in metres, theta in radians.
    """

    theta: float
    k_a: float
    k_ae: float
    k_p: float
    k_pe: float
    P_a: float
    P_ae: float
    dP_ae: float
    P_p: float
    P_pe: float
    dP_pe: float
    P_k: float
    P_q: float
    h_bar: float
    h: float
    k_v: float

    @property
    def lateral_coefficient(self) -> float:
        """Coefficient applied to gamma*z on the virtual back under this case"""
        return self.k_ae * (1.0 - self.k_v)

    @property
    def passive_resistance(self) -> float:
        """Front passive force after the seismic reduction"""
        return self.P_p - self.dP_pe

    @property
    def driving_force(self) -> float:
        return self.P_ae + self.P_q

    @property
    def overturning_moment(self) -> float:
        """Moment of the lateral thrust about the toe"""
        return self.P_ae * self.h_bar + self.P_q * self.h / 2.0


def seismic_inertia_angle(case: SeismicCase) -> float:
    """theta = atan(k_h / (1 - k_v)) in radians"""
    if case.k_v >= 1.0:
        raise ValueError("k_v must be < 1")
    return math.atan(case.k_h / (1.0 - case.k_v))


def _active(phi: float, delta: float, beta: float, slope: float, theta: float) -> float:
    if phi - theta - slope < 0:
        raise InfeasiblePressureError(
            f"No active wedge: phi - theta - i = {math.degrees(phi - theta - slope):.3f} deg < 0"
        )
    cos_dbt = math.cos(delta + beta + theta)
    cos_ib = math.cos(slope - beta)
    if cos_dbt <= 0 or cos_ib <= 0:
        raise InfeasiblePressureError("Invalid angle combination for active pressure")

    inner = math.sqrt(math.sin(phi + delta) * math.sin(phi - theta - slope) / (cos_dbt * cos_ib))
    numerator = math.cos(phi - theta - beta) ** 2
    denominator = math.cos(theta) * math.cos(beta) ** 2 * cos_dbt * (1.0 + inner) ** 2
    return numerator / denominator


def active_coefficients(phi: float, delta: float, beta: float, slope: float, theta: float) -> Tuple[float, float]:
    """Static and dynamic active coefficients (k_a, k_ae).

    phi, delta, beta and slope are in degrees, theta in radians. k_a is the
    dynamic expression evaluated at theta = 0.
    """
    phi_r, delta_r, beta_r, slope_r = (math.radians(v) for v in (phi, delta, beta, slope))
    k_a = _active(phi_r, delta_r, beta_r, slope_r, 0.0)
    k_ae = k_a if theta == 0 else _active(phi_r, delta_r, beta_r, slope_r, theta)
    return k_a, k_ae


def _passive(phi: float, delta: float, beta: float, theta: float) -> float:
    if phi - theta < 0:
        raise InfeasiblePressureError(
            f"No passive wedge: phi - theta = {math.degrees(phi - theta):.3f} deg < 0"
        )
    cos_dbt = math.cos(delta - beta + theta)
    cos_b = math.cos(beta)
    if cos_dbt <= 0:
        raise InfeasiblePressureError("Invalid angle combination for passive pressure")

    inner = math.sqrt(math.sin(phi + delta) * math.sin(phi - theta) / (cos_dbt * math.cos(-beta)))
    if inner >= 1.0:
        raise InfeasiblePressureError("Passive coefficient unbounded for these angles")
    numerator = math.cos(phi - theta + beta) ** 2
    denominator = math.cos(theta) * cos_b ** 2 * cos_dbt * (1.0 - inner) ** 2
    return numerator / denominator


def passive_coefficients(phi: float, delta: float, beta: float, theta: float) -> Tuple[float, float]:
    """Static and dynamic passive coefficients (k_p, k_pe) for level ground"""
    phi_r, delta_r, beta_r = (math.radians(v) for v in (phi, delta, beta))
    k_p = _passive(phi_r, delta_r, beta_r, 0.0)
    k_pe = k_p if theta == 0 else _passive(phi_r, delta_r, beta_r, theta)
    return k_p, k_pe


def acting_height(P_a: float, dP_ae: float, h: float) -> float:
    """Height above the base of the total active force"""
    total = P_a + dP_ae
    if total == 0:
        return h / 3.0
    return (P_a * h / 3.0 + dP_ae * DYNAMIC_ARM_FRACTION * h) / total


def pressure_height(design: DesignVector, params: DesignParameters) -> float:
    """Height from the base underside to the backfill surface at the heel end"""
    rise = design.heel_width * math.tan(math.radians(params.slope))
    return params.H + design.base_thickness + rise


def earth_forces(design: DesignVector, params: DesignParameters, case: SeismicCase) -> PressureState:
    """Active thrust on the virtual back, front passive force and key force"""
    theta = seismic_inertia_angle(case)
    h = pressure_height(design, params)

    k_a, k_ae = active_coefficients(params.phi, params.delta, 0.0, params.slope, theta)
    P_a = 0.5 * k_a * params.gamma_s * h ** 2
    P_ae = 0.5 * k_ae * params.gamma_s * h ** 2 * (1.0 - case.k_v)
    dP_ae = P_ae - P_a
    P_q = params.q * k_ae * (1.0 - case.k_v) * h

    # Passive side: level front soil, smooth interface
    k_p, k_pe = passive_coefficients(params.phi_base, 0.0, 0.0, theta)
    depth = params.D
    P_p = 0.5 * k_p * params.gamma_base * depth ** 2
    P_pe = 0.5 * k_pe * params.gamma_base * depth ** 2 * (1.0 - case.k_v)
    key_depth = depth + design.key_height
    P_k = 0.5 * k_p * params.gamma_base * (key_depth ** 2 - depth ** 2)

    return PressureState(
        theta=theta,
        k_a=k_a, k_ae=k_ae, k_p=k_p, k_pe=k_pe,
        P_a=P_a, P_ae=P_ae, dP_ae=dP_ae,
        P_p=P_p, P_pe=P_pe, dP_pe=P_p - P_pe,
        P_k=P_k, P_q=P_q,
        h_bar=acting_height(P_a, dP_ae, h),
        h=h,
        k_v=case.k_v,
    )
