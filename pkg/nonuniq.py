"""
Non-uniqueness on a warped product M1 x M2 with metric k g1 + g2.

The constant function 1 and the mountain-pass solution are told apart by
comparing I[1] with the energy S_c(k) of the standard half-space bubble built
from the k-dependent invariants R_g = R_g1/k + R_g2 and h_g = h_g1/sqrt(k).
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from errors import DomainError
from specfun import (
    DEFAULT_QUADRATURE,
    QuadratureResult,
    QuadratureSpec,
    beta,
    half_line_moment,
    quad_1d,
    quad_nested,
    radial_beta_moment,
    sphere_area,
)

logger = logging.getLogger("NONUNIQ")

VALID_OMEGA_CONVENTIONS = ["sphere_n", "sphere_n_minus_1"]

THRESHOLD_K_MAX = 1e12
THRESHOLD_GRID_RATIO = 1.1
THRESHOLD_REL_TOL = 1e-3


@dataclass(frozen=True)
class WarpedProductSpec:
    n1: int
    n2: int
    R_g1: float
    h_g1: float
    R_g2: float
    V1: float
    Vhat1: float
    V2: float

    def __post_init__(self):
        if self.n1 < 3 or self.n2 < 2:
            raise DomainError(f"Need n1 >= 3 and n2 >= 2, got n1={self.n1}, n2={self.n2}")
        for name in ("R_g1", "h_g1", "R_g2", "V1", "Vhat1", "V2"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def n(self) -> int:
        return self.n1 + self.n2


REFERENCE_SPEC = WarpedProductSpec(n1=3, n2=2, R_g1=6.0, h_g1=2.0, R_g2=2.0, V1=1.0, Vhat1=1.0, V2=1.0)


@dataclass(frozen=True)
class WarpedInvariants:
    R_g: float
    h_g: float
    T_c: float
    bubble_shift: float


def bubble_shift(R_g: float, h_g: float, n: int) -> float:
    """x_n-coordinate of the bubble centre, -h_g sqrt(n(n-1)/R_g)."""
    return -h_g * math.sqrt(n * (n - 1) / R_g)


def warped_invariants(spec: WarpedProductSpec, k: float) -> WarpedInvariants:
    """R_g = R_g1/k + R_g2, h_g = h_g1/sqrt(k), T_c = -h_g/2, plus the centre shift of the bubble."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    R_g = spec.R_g1 / k + spec.R_g2
    h_g = spec.h_g1 / math.sqrt(k)
    return WarpedInvariants(R_g, h_g, -h_g / 2.0, bubble_shift(R_g, h_g, spec.n))


def energy_of_one(spec: WarpedProductSpec, k: float) -> float:
    """I[1] = (2/n)(R_g1/k + R_g2) k^{n1/2} V1 V2 + 2 k^{-1/2} h_g1 k^{(n1-1)/2} Vhat1 V2."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    volume_term = 2.0 / spec.n * (spec.R_g1 / k + spec.R_g2) * k ** (spec.n1 / 2.0) * spec.V1 * spec.V2
    boundary_term = 2.0 * spec.h_g1 * k ** ((spec.n1 - 2) / 2.0) * spec.Vhat1 * spec.V2
    return volume_term + boundary_term


# ============================================================================
# Bubble energy
# ============================================================================

def _check_bubble_args(R_g: float, h_g: float, n: int) -> None:
    if n < 5:
        raise DomainError(f"Bubble energy needs n >= 5, got n={n}")
    if not R_g > 0:
        raise DomainError(f"R_g must be positive, got {R_g}")
    if h_g < 0:
        raise DomainError(f"h_g must be non-negative, got {h_g}")


def bubble_total_energy(R_g: float, h_g: float, n: int) -> float:
    """
    (2/n) R_g int W^{2n/(n-2)} + 2 h_g int_boundary W^{2(n-1)/(n-2)} for the bubble
    W = L^{(n-2)/4} (2/(1+|x - s e_n|^2))^{(n-2)/2}, L = n(n-1)/R_g, s = bubble_shift.

    With tau = -s >= 0 the volume integral is
        L^{n/2} 2^{n-1} |S^{n-2}| B((n-1)/2, (n+1)/2) I_{(n+1)/2}(tau)
    and the boundary integral is L^{(n-1)/2} 2^{n-1} |S^{n-2}| int rho^{n-2} (1+tau^2+rho^2)^{1-n}.
    """
    _check_bubble_args(R_g, h_g, n)
    L = n * (n - 1) / R_g
    tau = -bubble_shift(R_g, h_g, n)
    area = sphere_area(n - 1)
    volume = (L ** (n / 2.0) * 2.0 ** (n - 1) * area * beta((n - 1) / 2.0, (n + 1) / 2.0)
              * half_line_moment((n + 1) / 2.0, tau).value)
    boundary = (L ** ((n - 1) / 2.0) * 2.0 ** (n - 1) * area
                * radial_beta_moment(n - 2, n - 1, 1.0 + tau * tau))
    return 2.0 / n * R_g * volume + 2.0 * h_g * boundary


def bubble_total_energy_quadrature(R_g: float, h_g: float, n: int,
                                   inner: QuadratureSpec = DEFAULT_QUADRATURE.with_tolerances(rel_tol=1e-11),
                                   outer: QuadratureSpec = DEFAULT_QUADRATURE.with_tolerances(rel_tol=1e-10)
                                   ) -> QuadratureResult:
    """Same energy with both integrals done numerically in (rho, y_n) coordinates."""
    _check_bubble_args(R_g, h_g, n)
    L = n * (n - 1) / R_g
    tau = -bubble_shift(R_g, h_g, n)
    area = sphere_area(n - 1)

    def volume_density(rho: np.ndarray, yn: float) -> np.ndarray:
        return rho ** (n - 2) * (1.0 + yn * yn + rho * rho) ** (-n)

    vol = quad_nested(volume_density, (tau, math.inf), (0.0, math.inf), outer, inner)
    bdry = quad_1d(lambda rho: rho ** (n - 2) * (1.0 + tau * tau + rho * rho) ** (1 - n),
                   0.0, math.inf, inner)
    volume = L ** (n / 2.0) * 2.0 ** n * area * vol.value
    boundary = L ** ((n - 1) / 2.0) * 2.0 ** (n - 1) * area * bdry.value
    value = 2.0 / n * R_g * volume + 2.0 * h_g * boundary
    error = 2.0 / n * R_g * L ** (n / 2.0) * 2.0 ** n * area * vol.error_estimate \
        + 2.0 * h_g * L ** ((n - 1) / 2.0) * 2.0 ** (n - 1) * area * bdry.error_estimate
    return QuadratureResult(value, error, vol.converged and bdry.converged,
                            vol.subdivisions + bdry.subdivisions)


def bubble_boundary_residual(R_g: float, h_g: float, n: int, x_boundary) -> float:
    """
    Relative residual of -dW/dx_n = d_n h_g W^{n/(n-2)} at (x', 0), d_n = (n-2)/2,
    for the bubble centred at bubble_shift.
    """
    _check_bubble_args(R_g, h_g, n)
    if h_g == 0:
        raise DomainError("The boundary condition is trivial for h_g = 0")
    xb = np.asarray(x_boundary, dtype=float)
    L = n * (n - 1) / R_g
    s = bubble_shift(R_g, h_g, n)
    q = 1.0 + float(np.dot(xb, xb)) + s * s
    # d log W / dx_n at x_n = 0, where y_n = -s
    dlog = (n - 2) * s / q
    w_pow = math.sqrt(L) * 2.0 / q
    target = (n - 2) / 2.0 * h_g * w_pow
    return (-dlog - target) / target


def sc_of_k(spec: WarpedProductSpec, k: float) -> float:
    inv = warped_invariants(spec, k)
    return bubble_total_energy(inv.R_g, inv.h_g, spec.n)


def sc_infinity(spec: WarpedProductSpec) -> float:
    """R_g2 (n(n-1)/R_g2)^{n/2} omega_n / n with omega_n = |S^n|."""
    n = spec.n
    return spec.R_g2 * (n * (n - 1) / spec.R_g2) ** (n / 2.0) * sphere_area(n + 1) / n


def stereographic_volume_check(n: int, convention: str = "sphere_n",
                               spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """
    |int_{R^n_+} (2/(1+|x|^2))^n dx - omega_n/2| / (omega_n/2), the integral done radially.

    convention 'sphere_n' takes omega_n = |S^n|; 'sphere_n_minus_1' takes |S^{n-1}|
    and is expected to fail.
    """
    if convention not in VALID_OMEGA_CONVENTIONS:
        raise DomainError(
            f"Invalid convention '{convention}'. Valid conventions: {VALID_OMEGA_CONVENTIONS}"
        )
    if not 4 <= n <= 10:
        raise DomainError(f"Stereographic volume check runs for n in [4, 10], got n={n}")
    res = quad_1d(lambda r: r ** (n - 1) * (1.0 + r * r) ** (-n), 0.0, math.inf, spec)
    if not res.converged:
        logger.warning("Stereographic quadrature did not converge at n=%d", n)
    integral = 0.5 * sphere_area(n) * 2.0 ** n * res.value
    omega = sphere_area(n + 1) if convention == "sphere_n" else sphere_area(n)
    return abs(integral - omega / 2.0) / (omega / 2.0)


# ============================================================================
# Threshold
# ============================================================================

@dataclass(frozen=True)
class ThresholdReport:
    spec: WarpedProductSpec
    threshold_k: Optional[float]
    I1_at_threshold: Optional[float]
    Sck_at_threshold: Optional[float]
    Sc_infinity: float
    found: bool

    @property
    def margin(self) -> Optional[float]:
        if not self.found:
            return None
        return self.I1_at_threshold - self.Sck_at_threshold

    @property
    def exceeds_sc_infinity(self) -> bool:
        """I[1] > S_c(inf) + 1 at the threshold, the comparison in the inequality chain."""
        return self.found and self.I1_at_threshold > self.Sc_infinity + 1.0

    def to_json(self) -> str:
        return json.dumps({
            "spec": asdict(self.spec),
            "threshold_k": self.threshold_k,
            "I1_at_threshold": self.I1_at_threshold,
            "Sck_at_threshold": self.Sck_at_threshold,
            "Sc_infinity": self.Sc_infinity,
        }, indent=2)


def energy_gap(spec: WarpedProductSpec, k: float) -> float:
    """I[1] - S_c(k)."""
    return energy_of_one(spec, k) - sc_of_k(spec, k)


def _margin(spec: WarpedProductSpec, k: float) -> float:
    return energy_gap(spec, k) - 1.0


def _separated(spec: WarpedProductSpec, k: float, sc_inf: float) -> bool:
    """I[1] > S_c(k) + 1 and I[1] > S_c(inf) + 1."""
    return _margin(spec, k) > 0 and energy_of_one(spec, k) > sc_inf + 1.0


def threshold_k(spec: WarpedProductSpec, k_max: float = THRESHOLD_K_MAX) -> ThresholdReport:
    """
    Smallest k past which I[1] stays above both S_c(k) + 1 and S_c(inf) + 1.

    I[1] - S_c(k) is not monotone in k, so the whole geometric grid (ratio 1.1
    from k = 1 to k_max) is evaluated and the threshold sits after the last grid
    point that fails. The final grid step is refined by bisection to 1e-3 relative.
    """
    sc_inf = sc_infinity(spec)
    grid = []
    k = 1.0
    while k <= k_max:
        grid.append(k)
        k *= THRESHOLD_GRID_RATIO
    ok = [_separated(spec, k, sc_inf) for k in grid]
    failing = [i for i, passed in enumerate(ok) if not passed]
    last_fail = failing[-1] if failing else -1
    if last_fail == len(grid) - 1:
        logger.warning("No threshold below k=%.3g", k_max)
        return ThresholdReport(spec, None, None, None, sc_inf, False)

    k = grid[last_fail + 1]
    if last_fail >= 0:
        lo, hi = grid[last_fail], k
        while (hi - lo) / hi > THRESHOLD_REL_TOL:
            mid = math.sqrt(lo * hi)
            if _separated(spec, mid, sc_inf):
                hi = mid
            else:
                lo = mid
        k = hi
    report = ThresholdReport(spec, k, energy_of_one(spec, k), sc_of_k(spec, k), sc_inf, True)
    logger.info("Threshold k=%.6g: I[1]=%.6g S_c(k)=%.6g S_c(inf)=%.6g",
                k, report.I1_at_threshold, report.Sck_at_threshold, sc_inf)
    return report
