"""
Reduction polynomials and critical-dimension certificates.

The reduced energy at xi = 0 is governed by two one-variable polynomials,

    I(s) = sum_q c_q alpha_q s^{q+2} prod_{j<=q} (n-1+2j)/(n-5-2j)
    J(s) = sum_q c_q beta_q  s^{q+2} prod_{j<=q} (n+3+2j)/(n-5-2j)

where alpha_q, beta_q are the coefficients of (n+1)f^2 + 4sff' + 2s^2f'^2 and
2ff' + sf'^2 for the profile polynomial f, and c_q are half-line moments at -T_c.
With f(s) = a0 - s and a0 the larger root of p_n, the construction needs
I(1) > 0, I'(1) = 0, I''(1) < 0 and J(1) < 0.

The integer/rational sufficient conditions (q(n), P(n) and the I(1) bound) are
evaluated exactly; everything involving c_q is floating point and carried in
units of c_0 so that the verdicts survive underflow of the moments themselves.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
import sympy
from numpy.polynomial import Polynomial

from errors import ConfigError, DomainError, NoRealRootError
from specfun import DEFAULT_QUADRATURE, SERIES_SWITCHOVER, QuadratureSpec, c_q

logger = logging.getLogger("SCAN")

# alpha in P(n) = alpha (n+3)(n-9)(n-10) - (n+7)(n-8)^2; equals (9 - 36/65^2)/8.
P_CAL_ALPHA = Fraction(37989, 33800)

IPRIME_ZERO_TOL = 1e-10
SCAN_N_MIN, SCAN_N_MAX = 25, 500


# ============================================================================
# Profile polynomial
# ============================================================================

@dataclass(frozen=True)
class ReductionPolynomial:
    """f(s) = sum_i a_i s^i with a_0 first."""
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise DomainError("A profile polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def d(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def linear(cls, a0: float, a1: float = -1.0) -> "ReductionPolynomial":
        return cls((a0, a1))

    @classmethod
    def constant(cls, value: float = 1.0) -> "ReductionPolynomial":
        return cls((value,))

    def as_polynomial(self) -> Polynomial:
        return Polynomial(self.coeffs)

    def __call__(self, s):
        return self.as_polynomial()(s)

    def derivative(self, s):
        return self.as_polynomial().deriv()(s)

    def check_degree(self, n: int) -> None:
        """Enforce 0 <= d < (n-6)/4."""
        if not 4 * self.d < n - 6:
            raise ConfigError(
                f"Profile degree d={self.d} violates d < (n-6)/4 at n={n}"
            )


def _padded(poly: Polynomial, length: int) -> tuple[float, ...]:
    coef = np.zeros(length)
    src = poly.coef[:length]
    coef[: len(src)] = src
    return tuple(float(c) for c in coef)


def alpha_coeffs(f: ReductionPolynomial, n: int) -> tuple[float, ...]:
    """Coefficients alpha_0..alpha_{2d} of (n+1)f^2 + 4sff' + 2s^2 f'^2."""
    P = f.as_polynomial()
    dP = P.deriv()
    s = Polynomial([0.0, 1.0])
    expr = (n + 1) * P * P + 4 * s * P * dP + 2 * s * s * dP * dP
    return _padded(expr, 2 * f.d + 1)


def beta_coeffs(f: ReductionPolynomial) -> tuple[float, ...]:
    """Coefficients beta_0..beta_{2d-1} of 2ff' + sf'^2; empty for constant f."""
    if f.d == 0:
        return ()
    P = f.as_polynomial()
    dP = P.deriv()
    s = Polynomial([0.0, 1.0])
    return _padded(2 * P * dP + s * dP * dP, 2 * f.d)


def i_product(n: int, q: int) -> float:
    return math.prod((n - 1 + 2 * j) / (n - 5 - 2 * j) for j in range(q + 1))


def j_product(n: int, q: int) -> float:
    return math.prod((n + 3 + 2 * j) / (n - 5 - 2 * j) for j in range(q + 1))


# ============================================================================
# c_q in units of c_0
# ============================================================================

@dataclass(frozen=True)
class MomentRatios:
    """c_q / c_0 for q = 0..count-1, together with log c_0."""
    log_c0: float
    ratios: tuple[float, ...]

    @property
    def scale(self) -> float:
        return math.exp(self.log_c0)

    def actual(self, q: int) -> float:
        return self.ratios[q] * self.scale


def moment_ratios(n: int, T_c: float, count: int,
                  switchover: float = SERIES_SWITCHOVER,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> MomentRatios:
    moments = [c_q(n, T_c, q, switchover, spec) for q in range(count)]
    log_c0 = moments[0].log_value
    return MomentRatios(log_c0, tuple(math.exp(m.log_value - log_c0) for m in moments))


@dataclass(frozen=True)
class RatioBounds:
    """Two-sided bounds on c_{q+1}/c_q and on c_1^2/(c_0 c_2) at one (n, T_c)."""
    n: int
    T_c: float
    step_lower: tuple[float, ...]
    step_ratio: tuple[float, ...]
    step_upper: tuple[float, ...]
    cross_lower: float
    cross_ratio: float
    cross_upper: float

    def violation(self, slack: float = 1e-10) -> float:
        """Largest excursion outside the bounds relative to the ratio; <= 0 when they hold."""
        worst = -math.inf
        for lo, r, hi in zip(self.step_lower, self.step_ratio, self.step_upper):
            worst = max(worst, (lo - r) / r - slack, (r - hi) / r - slack)
        r = self.cross_ratio
        return max(worst, (self.cross_lower - r) / r - slack, (r - self.cross_upper) / r - slack)


def ratio_bounds(n: int, T_c: float, q_max: int = 2) -> RatioBounds:
    """
    (1+T_c^2)(n-2q-7)/(n-2q-8) <= c_{q+1}/c_q <= (1+T_c^2)(n-2q-6)/(n-2q-8) for q = 0..q_max,
    and (n-10)(n-7)/(n-8)^2 <= c_1^2/(c_0 c_2) <= (n-6)(n-10)/((n-8)(n-9)).

    Raises:
        DomainError: If n < 25
    """
    if n < SCAN_N_MIN:
        raise DomainError(f"Moment ratio bounds are stated for n >= {SCAN_N_MIN}, got n={n}")
    r = moment_ratios(n, T_c, q_max + 2)
    w = 1.0 + T_c * T_c
    qs = range(q_max + 1)
    return RatioBounds(
        n=n, T_c=T_c,
        step_lower=tuple(w * (n - 2 * q - 7) / (n - 2 * q - 8) for q in qs),
        step_ratio=tuple(r.ratios[q + 1] / r.ratios[q] for q in qs),
        step_upper=tuple(w * (n - 2 * q - 6) / (n - 2 * q - 8) for q in qs),
        cross_lower=(n - 10) * (n - 7) / (n - 8) ** 2,
        cross_ratio=r.ratios[1] ** 2 / (r.ratios[0] * r.ratios[2]),
        cross_upper=(n - 6) * (n - 10) / ((n - 8) * (n - 9)),
    )


def ratio_bounds_violation(n_values: Iterable[int], offsets: Sequence[float],
                           slack: float = 1e-10) -> float:
    """Worst RatioBounds.violation over n_values x {T_c = -a for a in offsets}."""
    worst = -math.inf
    for n in n_values:
        for a in offsets:
            worst = max(worst, ratio_bounds(n, -a).violation(slack))
    logger.debug("Moment ratio bounds: worst violation %.3g", worst)
    return worst


# ============================================================================
# I(s) and J(s)
# ============================================================================

def i_polynomial(n: int, T_c: float, f: ReductionPolynomial, normalized: bool = False,
                 switchover: float = SERIES_SWITCHOVER,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> Polynomial:
    """I(s) as a polynomial in s (degree 2d+2); normalized=True divides by c_0."""
    alphas = alpha_coeffs(f, n)
    ratios = moment_ratios(n, T_c, len(alphas), switchover, spec)
    scale = 1.0 if normalized else ratios.scale
    coef = np.zeros(len(alphas) + 2)
    for q, a_q in enumerate(alphas):
        coef[q + 2] = scale * ratios.ratios[q] * a_q * i_product(n, q)
    return Polynomial(coef)


def j_polynomial(n: int, T_c: float, f: ReductionPolynomial, normalized: bool = False,
                 switchover: float = SERIES_SWITCHOVER,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> Polynomial:
    """J(s) as a polynomial in s; identically zero for constant f."""
    betas = beta_coeffs(f)
    if not betas:
        return Polynomial([0.0])
    ratios = moment_ratios(n, T_c, len(betas), switchover, spec)
    scale = 1.0 if normalized else ratios.scale
    coef = np.zeros(len(betas) + 2)
    for q, b_q in enumerate(betas):
        coef[q + 2] = scale * ratios.ratios[q] * b_q * j_product(n, q)
    return Polynomial(coef)


def I_of_s(s, n: int, T_c: float, f: ReductionPolynomial, order: int = 0,
           normalized: bool = False):
    """I(s) or its derivative of the given order, differentiating s^{q+2} exactly."""
    poly = i_polynomial(n, T_c, f, normalized)
    return poly.deriv(order)(s) if order else poly(s)


def J_of_s(s, n: int, T_c: float, f: ReductionPolynomial, normalized: bool = False):
    return j_polynomial(n, T_c, f, normalized)(s)


def i_critical_points(n: int, T_c: float, f: ReductionPolynomial) -> list[float]:
    """Positive real roots of I'(s)/s in increasing order."""
    dpoly = i_polynomial(n, T_c, f, normalized=True).deriv()
    reduced = Polynomial(dpoly.coef[1:])
    roots = reduced.roots()
    return sorted(float(r.real) for r in roots if abs(r.imag) < 1e-12 and r.real > 0)


def local_max_sampling_check(n: int, T_c: float, f: ReductionPolynomial,
                             lower: float = 0.8, upper: float = 1.25,
                             samples: int = 91) -> bool:
    """True when I(1) strictly exceeds I(s) at every sampled s != 1 in [lower, upper]."""
    poly = i_polynomial(n, T_c, f, normalized=True)
    grid = np.linspace(lower, upper, samples)
    grid = grid[np.abs(grid - 1.0) > 1e-9]
    return bool(np.all(poly(grid) < poly(1.0)))


# ============================================================================
# a0, discriminant and the closed displays for f = a0 - s
# ============================================================================

def _q_factor(n: int) -> float:
    return (n + 3) * (n + 7) / ((n - 7) * (n - 9))


def _k_factor(n: int) -> float:
    return (n + 1) * (n - 1) / (n - 5)


def _radicand(n: int, r: MomentRatios) -> float:
    c0, c1, c2 = r.ratios[:3]
    return 9.0 - 8.0 * ((n + 7) * (n - 7) / ((n + 3) * (n - 9))) * c0 * c2 / (c1 * c1)


def a0_star(n: int, T_c: float) -> Optional[float]:
    """
    Larger root of p_n(a) = c0 a^2 - 3(n+3)/(n-7) c1 a + 2(n+3)(n+7)/((n-7)(n-9)) c2.

    Returns:
        a0, or None when the radicand is negative (no real root)
    """
    if n <= 9:
        raise DomainError(f"a0 is defined for n > 9, got n={n}")
    r = moment_ratios(n, T_c, 3)
    radicand = _radicand(n, r)
    if radicand < 0:
        return None
    return (n + 3) * r.ratios[1] / (2 * (n - 7) * r.ratios[0]) * (3.0 + math.sqrt(radicand))


def p_n_value(a: float, n: int, T_c: float, normalized: bool = True) -> float:
    r = moment_ratios(n, T_c, 3)
    c0, c1, c2 = r.ratios[:3]
    value = c0 * a * a - 3 * (n + 3) / (n - 7) * c1 * a + 2 * _q_factor(n) * c2
    return value if normalized else value * r.scale


def discriminant(n: int, T_c: float, normalized: bool = False) -> float:
    """
    d(p_n) = ((n+3)/(n-7))^2 [9 c1^2 - 8 ((n+7)(n-7)/((n+3)(n-9))) c0 c2].

    normalized=True divides by c0^2, which keeps the sign when c0 underflows.
    """
    if n <= 9:
        raise DomainError(f"The discriminant is defined for n > 9, got n={n}")
    r = moment_ratios(n, T_c, 3)
    c0, c1, c2 = r.ratios[:3]
    value = ((n + 3) / (n - 7)) ** 2 * (
        9 * c1 * c1 - 8 * ((n + 7) * (n - 7) / ((n + 3) * (n - 9))) * c0 * c2
    )
    return value if normalized else value * r.scale ** 2


def discriminant_lower_bound(n: int, T_c: float, normalized: bool = False) -> float:
    """((n+3)^2/(n-7)^2) c1^2 [9 - 8(n+7)(n-8)^2/((n+3)(n-9)(n-10))]."""
    r = moment_ratios(n, T_c, 2)
    c1 = r.ratios[1]
    value = ((n + 3) / (n - 7)) ** 2 * c1 * c1 * (
        9 - 8 * (n + 7) * (n - 8) ** 2 / ((n + 3) * (n - 9) * (n - 10))
    )
    return value if normalized else value * r.scale ** 2


def construct_f(n: int, T_c: float) -> ReductionPolynomial:
    """
    f(s) = a0 - s with a0 = a0_star(n, T_c), so that I'(1) = 0.

    Raises:
        NoRealRootError: If p_n has no real root at (n, T_c)
    """
    a0 = a0_star(n, T_c)
    if a0 is None:
        raise NoRealRootError(f"p_n has no real root at n={n}, T_c={T_c}")
    return ReductionPolynomial.linear(a0, -1.0)


def i1_closed_display(n: int, T_c: float, a0: float, normalized: bool = False) -> float:
    """I(1) = ((n+1)(n-1)/(3(n-5))) [c0 a0^2 - (n+3)(n+7)/((n-7)(n-9)) c2], valid when I'(1)=0."""
    r = moment_ratios(n, T_c, 3)
    c0, _, c2 = r.ratios[:3]
    value = _k_factor(n) / 3.0 * (c0 * a0 * a0 - _q_factor(n) * c2)
    return value if normalized else value * r.scale


def i1_lower_bound(n: int, T_c: float, normalized: bool = False) -> float:
    """(c2/3)((n+3)/(n-7)) [9(n+3)(n-10)/(4(n-8)^2) - (n+7)/(n-9)]."""
    r = moment_ratios(n, T_c, 3)
    c2 = r.ratios[2]
    value = c2 / 3.0 * (n + 3) / (n - 7) * (
        9 * (n + 3) * (n - 10) / (4 * (n - 8) ** 2) - (n + 7) / (n - 9)
    )
    return value if normalized else value * r.scale


def ipp1_closed_display(n: int, T_c: float, a0: float, normalized: bool = False) -> float:
    """I''(1) = (2(n+1)(n-1)/(n-5)) (c0 a0^2 - 6(n+3)/(n-7) c1 a0 + 6(n+3)(n+7)/((n-7)(n-9)) c2)."""
    r = moment_ratios(n, T_c, 3)
    c0, c1, c2 = r.ratios[:3]
    value = 2 * _k_factor(n) * (
        c0 * a0 * a0 - 6 * (n + 3) / (n - 7) * c1 * a0 + 6 * _q_factor(n) * c2
    )
    return value if normalized else value * r.scale


def ipp_minus_ip_display(n: int, T_c: float, a0: float, normalized: bool = False) -> float:
    """I''(1) - I'(1) = (2(n+1)(n-1)/(n-5)) (-3(n+3)/(n-7) c1 a0 + 4(n+3)(n+7)/((n-7)(n-9)) c2)."""
    r = moment_ratios(n, T_c, 3)
    _, c1, c2 = r.ratios[:3]
    value = 2 * _k_factor(n) * (-3 * (n + 3) / (n - 7) * c1 * a0 + 4 * _q_factor(n) * c2)
    return value if normalized else value * r.scale


def ipp_upper_bound(n: int, T_c: float, normalized: bool = False) -> float:
    """-((n-1)(n+1)/((n-5) c0)) d(p_n)."""
    disc = discriminant(n, T_c, normalized=True)
    r = moment_ratios(n, T_c, 1)
    value = -_k_factor(n) * disc / r.ratios[0]
    return value if normalized else value * r.scale


def j1_closed_display(n: int, T_c: float, normalized: bool = False) -> float:
    """J(1) = ((n+3) c1/((n-5)(n-7))) [6 - (n+3) sqrt(radicand)] for f = a0_star - s."""
    r = moment_ratios(n, T_c, 3)
    radicand = _radicand(n, r)
    if radicand < 0:
        raise NoRealRootError(f"p_n has no real root at n={n}, T_c={T_c}")
    value = (n + 3) * r.ratios[1] / ((n - 5) * (n - 7)) * (6 - (n + 3) * math.sqrt(radicand))
    return value if normalized else value * r.scale


# ============================================================================
# Exact certificates
# ============================================================================

def q_poly(n: int) -> int:
    """q(n) = 9(n+3)(n-9)(n-10) - 8(n-8)^2(n+7), exact."""
    return 9 * (n + 3) * (n - 9) * (n - 10) - 8 * (n - 8) ** 2 * (n + 7)


def q_poly_expanded(n: int) -> int:
    return n ** 3 - 72 * n ** 2 + 681 * n - 1154


def q_poly_symbolic() -> sympy.Poly:
    n = sympy.Symbol("n")
    return sympy.Poly(sympy.expand(9 * (n + 3) * (n - 9) * (n - 10) - 8 * (n - 8) ** 2 * (n + 7)), n)


def p_cal_symbolic() -> sympy.Poly:
    n = sympy.Symbol("n")
    alpha = sympy.Rational(P_CAL_ALPHA.numerator, P_CAL_ALPHA.denominator)
    return sympy.Poly(sympy.expand(alpha * (n + 3) * (n - 9) * (n - 10) - (n + 7) * (n - 8) ** 2), n)


def p_cal(n: int, derivative: int = 0) -> Fraction:
    """P(n) = alpha (n+3)(n-9)(n-10) - (n+7)(n-8)^2 with alpha = 37989/33800, or a derivative."""
    if derivative == 0:
        return P_CAL_ALPHA * (n + 3) * (n - 9) * (n - 10) - (n + 7) * (n - 8) ** 2
    poly = p_cal_symbolic()
    for _ in range(derivative):
        poly = poly.diff()
    rational = sympy.Rational(poly.eval(n))
    return Fraction(int(rational.p), int(rational.q))


def p_cal_second_derivative_formula(n: int) -> Fraction:
    return 6 * (P_CAL_ALPHA - 1) * n + 18 - 32 * P_CAL_ALPHA


def i1_bound_inequality(n: int) -> bool:
    """9(n+3)(n-10)(n-9) > 4(n+7)(n-8)^2."""
    return 9 * (n + 3) * (n - 10) * (n - 9) > 4 * (n + 7) * (n - 8) ** 2


def bound_certificate(n: int) -> bool:
    """The T_c-independent sufficient conditions, in exact arithmetic."""
    return q_poly(n) > 0 and p_cal(n) > 0 and i1_bound_inequality(n)


# ============================================================================
# Dimension scan
# ============================================================================

DIMENSION_COLUMNS = [
    "n", "T_c", "c0", "c1", "c2", "log_c0", "a0", "disc", "I1", "Iprime1", "Ipp1", "J1",
    "bound_certificate", "a0_real", "I1_pos", "Iprime1_zero", "Ipp1_neg", "J1_neg",
]


@dataclass(frozen=True)
class DimensionRow:
    n: int
    T_c: float
    c0: float
    c1: float
    c2: float
    log_c0: float
    a0: Optional[float]
    disc: float
    I1: float
    Iprime1: float
    Ipp1: float
    J1: float
    bound_certificate: bool
    a0_real: bool
    I1_pos: bool
    Iprime1_zero: bool
    Ipp1_neg: bool
    J1_neg: bool

    @property
    def direct_ok(self) -> bool:
        return self.a0_real and self.I1_pos and self.Iprime1_zero and self.Ipp1_neg and self.J1_neg


@dataclass
class ScanResult:
    rows: list[DimensionRow] = field(default_factory=list)
    minimal_certified_n: Optional[int] = None

    @property
    def all_direct_ok(self) -> bool:
        return all(row.direct_ok for row in self.rows)


def dimension_row(n: int, T_c: float) -> DimensionRow:
    """Certificate record for one (n, T_c); the verdicts use c_0-normalized values."""
    r = moment_ratios(n, T_c, 3)
    scale = r.scale
    disc_n = discriminant(n, T_c, normalized=True)
    a0 = a0_star(n, T_c)
    nan = float("nan")
    if a0 is None:
        I1n = Ip1n = Ipp1n = J1n = nan
        a0_real = I1_pos = Iprime1_zero = Ipp1_neg = J1_neg = False
    else:
        f = ReductionPolynomial.linear(a0, -1.0)
        poly = i_polynomial(n, T_c, f, normalized=True)
        I1n = float(poly(1.0))
        Ip1n = float(poly.deriv(1)(1.0))
        Ipp1n = float(poly.deriv(2)(1.0))
        J1n = float(j_polynomial(n, T_c, f, normalized=True)(1.0))
        a0_real = True
        I1_pos = I1n > 0
        Iprime1_zero = abs(Ip1n) <= IPRIME_ZERO_TOL * abs(I1n)
        Ipp1_neg = Ipp1n < 0
        J1_neg = J1n < 0
    return DimensionRow(
        n=n, T_c=T_c,
        c0=scale, c1=r.ratios[1] * scale, c2=r.ratios[2] * scale, log_c0=r.log_c0,
        a0=a0, disc=disc_n * scale * scale,
        I1=I1n * scale, Iprime1=Ip1n * scale, Ipp1=Ipp1n * scale, J1=J1n * scale,
        bound_certificate=bound_certificate(n),
        a0_real=a0_real, I1_pos=I1_pos, Iprime1_zero=Iprime1_zero,
        Ipp1_neg=Ipp1_neg, J1_neg=J1_neg,
    )


def minimal_certified_n(n_values: Iterable[int]) -> Optional[int]:
    certified = [n for n in n_values if bound_certificate(n)]
    return min(certified) if certified else None


def certificate_scan(n_range: Iterable[int], T_c_list: Sequence[float],
                     threads: Optional[int] = None) -> ScanResult:
    """
    Bound certificate and direct check over an (n, T_c) grid.

    Rows come back sorted by (n, T_c) whatever the worker schedule.

    Raises:
        DomainError: If the range leaves [25, 500] or a T_c is not negative
    """
    n_values = sorted(set(int(n) for n in n_range))
    if not n_values:
        raise DomainError("Empty dimension range")
    if n_values[0] < SCAN_N_MIN or n_values[-1] > SCAN_N_MAX:
        raise DomainError(
            f"Dimension range must lie in [{SCAN_N_MIN}, {SCAN_N_MAX}], "
            f"got [{n_values[0]}, {n_values[-1]}]"
        )
    tcs = sorted(float(t) for t in T_c_list)
    if not tcs or any(t >= 0 for t in tcs):
        raise DomainError(f"T_c values must be negative, got {list(T_c_list)}")

    grid = [(n, t) for n in n_values for t in tcs]
    logger.info("Scanning %d dimensions x %d T_c values", len(n_values), len(tcs))
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda item: dimension_row(*item), grid))
    else:
        rows = [dimension_row(n, t) for n, t in grid]

    result = ScanResult(rows=rows, minimal_certified_n=minimal_certified_n(n_values))
    failures = [row for row in rows if not row.direct_ok]
    logger.info("Minimal certified n: %s; direct-check failures: %d",
                result.minimal_certified_n, len(failures))
    return result
