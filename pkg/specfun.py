"""
Special functions and quadrature for the blow-up toolkit.

Provides:
- Beta function and sphere areas in log-space
- Half-line moments I_alpha(a) = int_a^inf (1+r^2)^(-alpha) dr by series,
  downward recursion and quadrature, and the c_q coefficients built from them
- Radial Beta moments and exact monomial moments over spheres
- A global adaptive Gauss-Kronrod (G7/K15) integrator with half-line transforms,
  used as the oracle for every closed form in the toolkit
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterator, Optional, Sequence

import numpy as np
from scipy.special import betaln, gammaln

from errors import DivergentMomentError, DomainError, SlowConvergenceError

logger = logging.getLogger("SPECFUN")

VALID_TRANSFORMS = ["none", "semi_infinite_rational", "semi_infinite_tan"]
VALID_METHODS = ["series", "recursion", "quadrature"]

# Below this offset the series ratio 1/(1+a^2) is too close to 1.
SERIES_SWITCHOVER = 0.05

# Kronrod abscissae on [-1, 1] (positive half, descending) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights aligned with _XGK; zero on the Kronrod-only nodes.
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])
_EPS = float(np.finfo(float).eps)
_TINY = float(np.finfo(float).tiny)

# Uniform bisections of every panel between breakpoints before adapting.
MIN_BISECTIONS = 2


# ============================================================================
# Types
# ============================================================================

@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and half-line transform for quad_1d."""
    abs_tol: float = 1e-14
    rel_tol: float = 1e-12
    max_subdivisions: int = 2000
    transform: str = "semi_infinite_rational"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError(
                f"Quadrature tolerances must be positive, got abs_tol={self.abs_tol}, "
                f"rel_tol={self.rel_tol}"
            )
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions must be >= 1, got {self.max_subdivisions}")
        if self.transform not in VALID_TRANSFORMS:
            raise DomainError(
                f"Invalid transform '{self.transform}'. Valid transforms: {VALID_TRANSFORMS}"
            )

    def with_tolerances(self, abs_tol: Optional[float] = None,
                        rel_tol: Optional[float] = None) -> "QuadratureSpec":
        return replace(
            self,
            abs_tol=self.abs_tol if abs_tol is None else abs_tol,
            rel_tol=self.rel_tol if rel_tol is None else rel_tol,
        )


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of an adaptive integration; unpacks as (value, error_estimate)."""
    value: float
    error_estimate: float
    converged: bool
    subdivisions: int

    def __iter__(self) -> Iterator[float]:
        yield self.value
        yield self.error_estimate


@dataclass(frozen=True)
class HalfLineMoment:
    """
    I_alpha(a) with provenance.

    value is exp(log_value) and underflows to 0.0 for very large alpha*log(1+a^2);
    log_value stays finite and is what downstream ratios use.
    """
    alpha: float
    a: float
    value: float
    method: str
    log_value: float

    def __post_init__(self):
        if self.method not in VALID_METHODS:
            raise DomainError(f"Invalid method '{self.method}'. Valid methods: {VALID_METHODS}")


# ============================================================================
# Gamma, Beta, sphere areas
# ============================================================================

def log_beta(p: float, q: float) -> float:
    if p <= 0 or q <= 0:
        raise DomainError(f"Beta arguments must be positive, got ({p}, {q})")
    return float(betaln(p, q))


def beta(p: float, q: float) -> float:
    """
    Euler Beta function B(p, q) = Gamma(p)Gamma(q)/Gamma(p+q), evaluated in log-space.

    Raises:
        DomainError: If p <= 0 or q <= 0
    """
    return math.exp(log_beta(p, q))


def log_sphere_area(m: int) -> float:
    if int(m) != m or m < 1:
        raise DomainError(f"Sphere area needs an integer ambient dimension m >= 1, got {m}")
    return math.log(2.0) + 0.5 * m * math.log(math.pi) - float(gammaln(0.5 * m))


def sphere_area(m: int) -> float:
    """Measure of the unit sphere S^{m-1} in R^m, 2 pi^{m/2} / Gamma(m/2)."""
    return math.exp(log_sphere_area(m))


# ============================================================================
# Adaptive Gauss-Kronrod quadrature
# ============================================================================

def _gk15(g: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float]:
    """K15 value and the QUADPACK error estimate on [a, b]."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre + half * _NODES
    fx = np.broadcast_to(np.asarray(g(x), dtype=float), x.shape)
    if not np.all(np.isfinite(fx)):
        raise DomainError(f"Integrand is not finite on [{a}, {b}]")
    resk = float(np.dot(_KRONROD_WEIGHTS, fx))
    kronrod = half * resk
    gauss = half * float(np.dot(_GAUSS_WEIGHTS, fx))
    resabs = abs(half) * float(np.dot(_KRONROD_WEIGHTS, np.abs(fx)))
    resasc = abs(half) * float(np.dot(_KRONROD_WEIGHTS, np.abs(fx - 0.5 * resk)))
    err = abs(kronrod - gauss)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _TINY / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    return kronrod, err


def _transformed(f, lower: float, upper: float, transform: str):
    """Map the integration domain onto a finite interval; return (g, u_lo, u_hi, to_u)."""
    if math.isfinite(upper):
        return f, lower, upper, (lambda t: t)

    if transform == "semi_infinite_rational":
        def g(u):
            w = 1.0 - u
            return f(lower + u / w) / (w * w)
        return g, 0.0, 1.0, (lambda t: (t - lower) / (1.0 + t - lower))

    if transform == "semi_infinite_tan":
        def g(u):
            theta = 0.5 * math.pi * u
            c = np.cos(theta)
            return f(lower + np.tan(theta)) * (0.5 * math.pi) / (c * c)
        return g, 0.0, 1.0, (lambda t: 2.0 / math.pi * math.atan(t - lower))

    raise DomainError("An infinite upper limit needs a semi-infinite transform, got 'none'")


def quad_1d(f: Callable[[np.ndarray], np.ndarray],
            lower: float,
            upper: float,
            spec: QuadratureSpec = DEFAULT_QUADRATURE,
            breakpoints: Sequence[float] = ()) -> QuadratureResult:
    """
    Integrate a vectorized integrand over [lower, upper] (upper may be +inf).

    Each panel between breakpoints is first bisected MIN_BISECTIONS times. Then
    global adaptive bisection on the G7/K15 pair splits the panel with the
    largest error estimate, resasc * min(1, (200|K15 - G7|/resasc)^1.5), until
    the summed estimate is below max(abs_tol, rel_tol*|value|) or
    max_subdivisions is reached.

    Args:
        f: Callable taking a numpy array of abscissae and returning values
        lower: Finite lower limit
        upper: Upper limit, finite or math.inf
        spec: Tolerances, subdivision cap and half-line transform
        breakpoints: Interior points where the integrand has kinks

    Returns:
        QuadratureResult; converged is False when the cap was hit
    """
    if not math.isfinite(lower):
        raise DomainError(f"Lower limit must be finite, got {lower}")
    if upper == lower:
        return QuadratureResult(0.0, 0.0, True, 0)
    if upper < lower:
        raise DomainError(f"Empty domain [{lower}, {upper}]")

    g, u_lo, u_hi, to_u = _transformed(f, lower, upper, spec.transform)
    cuts = sorted({to_u(b) for b in breakpoints if lower < b < upper})
    edges = [u_lo, *cuts, u_hi]

    heap: list[tuple[float, float, float, float]] = []
    total = 0.0
    total_err = 0.0
    pieces = 2 ** MIN_BISECTIONS
    panels = []
    for a, b in zip(edges[:-1], edges[1:]):
        grid = np.linspace(a, b, pieces + 1)
        panels.extend(zip(grid[:-1], grid[1:]))
    for a, b in panels:
        a, b = float(a), float(b)
        val, err = _gk15(g, a, b)
        heapq.heappush(heap, (-err, a, b, val))
        total += val
        total_err += err

    subdivisions = len(heap)
    converged = True
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if subdivisions >= spec.max_subdivisions:
            converged = False
            break
        neg_err, a, b, val = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if not a < mid < b:
            heapq.heappush(heap, (neg_err, a, b, val))
            converged = False
            break
        v1, e1 = _gk15(g, a, mid)
        v2, e2 = _gk15(g, mid, b)
        heapq.heappush(heap, (-e1, a, mid, v1))
        heapq.heappush(heap, (-e2, mid, b, v2))
        total += v1 + v2 - val
        total_err += e1 + e2 + neg_err
        subdivisions += 1

    value = math.fsum(item[3] for item in heap)
    error = math.fsum(-item[0] for item in heap)
    if not converged:
        logger.debug("quad_1d hit the subdivision cap: value=%r error=%r", value, error)
    return QuadratureResult(value, error, converged, subdivisions)


def quad_nested(f: Callable[[np.ndarray, float], np.ndarray],
                outer: tuple[float, float],
                inner: tuple[float, float],
                outer_spec: QuadratureSpec = DEFAULT_QUADRATURE,
                inner_spec: QuadratureSpec = DEFAULT_QUADRATURE,
                inner_breakpoints: Optional[Callable[[float], Sequence[float]]] = None,
                outer_breakpoints: Sequence[float] = ()) -> QuadratureResult:
    """
    Iterated integral of f(x, y) with x inner and y outer.

    converged is True only if the outer and every inner integration converged.
    """
    inner_ok = []

    def outer_integrand(ys: np.ndarray) -> np.ndarray:
        out = np.empty_like(ys)
        for idx, y in enumerate(ys):
            bps = inner_breakpoints(float(y)) if inner_breakpoints else ()
            res = quad_1d(lambda x: f(x, float(y)), inner[0], inner[1], inner_spec, bps)
            inner_ok.append(res.converged)
            out[idx] = res.value
        return out

    res = quad_1d(outer_integrand, outer[0], outer[1], outer_spec, outer_breakpoints)
    return QuadratureResult(res.value, res.error_estimate,
                            res.converged and all(inner_ok), res.subdivisions)


# ============================================================================
# Half-line moments
# ============================================================================

def _check_moment_args(alpha: float, a: float, allow_zero: bool = False) -> None:
    if alpha <= 0.5:
        raise DivergentMomentError(f"I_alpha(a) diverges for alpha <= 1/2, got alpha={alpha}")
    if a < 0 or (a == 0 and not allow_zero):
        raise DomainError(f"Half-line offset must be positive, got a={a}")


def half_line_moment_series(alpha: float, a: float) -> HalfLineMoment:
    """
    I_alpha(a) from the iterated integration-by-parts series

        a * sum_k (2alpha+2k-1)^{-1} prod_{i<k} (2alpha+2i)/(2alpha+2i-1) (1+a^2)^{-(alpha+k)},

    summed until a term drops below 1e-16 of the partial sum.

    Raises:
        SlowConvergenceError: If a <= SERIES_SWITCHOVER
        DivergentMomentError: If alpha <= 1/2
    """
    _check_moment_args(alpha, a)
    if a <= SERIES_SWITCHOVER:
        raise SlowConvergenceError(
            f"Series ratio 1/(1+a^2) too close to 1 at a={a}; use quadrature"
        )
    log_q = math.log1p(a * a)
    n_terms = int(math.ceil(40.0 / log_q)) + 2
    k = np.arange(n_terms, dtype=float)
    step = np.log(2 * alpha + 2 * k) - np.log(2 * alpha + 2 * k - 1)
    log_prod = np.concatenate([[0.0], np.cumsum(step[:-1])])
    terms = np.exp(log_prod - np.log(2 * alpha + 2 * k - 1) - k * log_q)
    partial = np.cumsum(terms)
    small = np.nonzero(terms < 1e-16 * partial)[0]
    if small.size == 0:
        raise SlowConvergenceError(f"Series did not settle within {n_terms} terms at a={a}")
    total = math.fsum(terms[: small[0] + 1])
    log_value = math.log(a) + math.log(total) - alpha * log_q
    return HalfLineMoment(alpha, a, math.exp(log_value), "series", log_value)


def half_line_moment_recursion(alpha: float, a: float) -> HalfLineMoment:
    """
    I_alpha(a) by downward iteration of
    I_b = (2b/(2b-1)) I_{b+1} + a(1+a^2)^{-b}/(2b-1), in the scaled form
    J_b = I_b (1+a^2)^b, started far above alpha where errors are damped by 1/(1+a^2).
    """
    _check_moment_args(alpha, a)
    if a <= SERIES_SWITCHOVER:
        raise SlowConvergenceError(
            f"Recursion damping 1/(1+a^2) too weak at a={a}; use quadrature"
        )
    q = 1.0 + a * a
    steps = int(math.ceil(40.0 / math.log1p(a * a))) + 1
    b = alpha + steps
    scaled = a / (2 * b - 1)
    for _ in range(steps):
        b -= 1.0
        scaled = (2 * b / (2 * b - 1)) * scaled / q + a / (2 * b - 1)
    log_value = math.log(scaled) - alpha * math.log1p(a * a)
    return HalfLineMoment(alpha, a, math.exp(log_value), "recursion", log_value)


def _scaled_quadrature(alpha: float, a: float, spec: QuadratureSpec) -> QuadratureResult:
    """int_a^inf ((1+t^2)/(1+a^2))^{-alpha} dt, which equals 1 at the lower limit."""
    log_q = math.log1p(a * a)
    return quad_1d(lambda t: np.exp(-alpha * (np.log1p(t * t) - log_q)), a, math.inf, spec)


def half_line_moment_quadrature(alpha: float, a: float,
                                spec: QuadratureSpec = DEFAULT_QUADRATURE) -> HalfLineMoment:
    """I_alpha(a) by adaptive quadrature of the scaled integrand; a = 0 is allowed."""
    _check_moment_args(alpha, a, allow_zero=True)
    res = _scaled_quadrature(alpha, a, spec)
    if not res.converged:
        logger.warning("Quadrature for I_%s(%s) did not converge (error %.3g)",
                       alpha, a, res.error_estimate)
    log_value = math.log(res.value) - alpha * math.log1p(a * a)
    return HalfLineMoment(alpha, a, math.exp(log_value), "quadrature", log_value)


@lru_cache(maxsize=8192)
def _cached_moment(alpha: float, a: float, switchover: float,
                   spec: QuadratureSpec) -> HalfLineMoment:
    if a > switchover:
        return half_line_moment_series(alpha, a)
    return half_line_moment_quadrature(alpha, a, spec)


def half_line_moment(alpha: float, a: float,
                     switchover: float = SERIES_SWITCHOVER,
                     spec: QuadratureSpec = DEFAULT_QUADRATURE) -> HalfLineMoment:
    """I_alpha(a) by series above the switchover offset, quadrature at or below it."""
    _check_moment_args(alpha, a, allow_zero=True)
    return _cached_moment(float(alpha), float(a), float(max(switchover, SERIES_SWITCHOVER)), spec)


def half_line_moment_recursion_check(alpha: float, a: float,
                                     spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """
    Residual |I_alpha - (2alpha/(2alpha-1)) I_{alpha+1} - a(1+a^2)^{-alpha}/(2alpha-1)|
    with both moments from quadrature. Should not exceed 1e-11 * I_alpha(a).
    """
    _check_moment_args(alpha, a)
    q = 1.0 + a * a
    lower = _scaled_quadrature(alpha, a, spec).value
    upper = _scaled_quadrature(alpha + 1.0, a, spec).value
    scaled = abs(lower - (2 * alpha / (2 * alpha - 1)) * upper / q - a / (2 * alpha - 1))
    return scaled * math.exp(-alpha * math.log1p(a * a))


def c_q(n: int, T_c: float, q: int,
        switchover: float = SERIES_SWITCHOVER,
        spec: QuadratureSpec = DEFAULT_QUADRATURE) -> HalfLineMoment:
    """
    c_q = int_0^inf (1+(t-T_c)^2)^{(5+2q-n)/2} dt = I_{(n-5-2q)/2}(-T_c).

    Raises:
        DivergentMomentError: If n - 5 - 2q <= 1
        DomainError: If T_c >= 0
    """
    if n - 5 - 2 * q <= 1:
        raise DivergentMomentError(f"c_{q} diverges at n={n}: need n - 5 - 2q > 1")
    if T_c >= 0:
        raise DomainError(f"T_c must be negative, got {T_c}")
    return half_line_moment((n - 5 - 2 * q) / 2.0, -T_c, switchover, spec)


# ============================================================================
# Radial and spherical moments
# ============================================================================

def log_radial_beta_moment(s: float, p: float, A: float) -> float:
    if s <= -1:
        raise DivergentMomentError(f"Radial moment diverges at the origin for s={s}")
    if p - (s + 1) / 2 <= 0:
        raise DivergentMomentError(f"Radial moment diverges at infinity for s={s}, p={p}")
    if A <= 0:
        raise DomainError(f"Radial moment offset must be positive, got A={A}")
    h = 0.5 * (s + 1)
    return -math.log(2.0) + (h - p) * math.log(A) + float(betaln(h, p - h))


def radial_beta_moment(s: float, p: float, A: float) -> float:
    """int_0^inf r^s (A+r^2)^{-p} dr = (1/2) A^{(s+1)/2-p} B((s+1)/2, p-(s+1)/2)."""
    return math.exp(log_radial_beta_moment(s, p, A))


def monomial_sphere_moments(m: int, exponents: np.ndarray) -> np.ndarray:
    """
    Vectorized exact moments over the unit sphere S^{m-1}.

    exponents has shape (..., m) with non-negative integers; entries with any odd
    exponent integrate to zero.
    """
    exps = np.asarray(exponents)
    if exps.shape[-1] != m:
        raise DomainError(f"Exponent vectors must have length m={m}, got {exps.shape[-1]}")
    if np.any(exps < 0):
        raise DomainError("Exponents must be non-negative")
    even = np.all(exps % 2 == 0, axis=-1)
    half = (exps + 1) / 2.0
    logs = (math.log(2.0) + np.sum(gammaln(half), axis=-1)
            - gammaln((m + np.sum(exps, axis=-1)) / 2.0))
    return np.where(even, np.exp(logs), 0.0)


def monomial_sphere_moment(m: int, exponents: Sequence[float], absolute: bool = False) -> float:
    """
    Exact integral of prod x_i^{alpha_i} over the unit sphere S^{m-1} in R^m.

    Zero if any exponent is odd; otherwise 2 prod Gamma((alpha_i+1)/2) / Gamma((m+sum alpha)/2).
    Multiply by r^{m-1+sum alpha} for the sphere of radius r. With absolute=True the
    integrand is prod |x_i|^{alpha_i} and real exponents are accepted.
    """
    if m < 2:
        raise DomainError(f"Sphere moments need m >= 2, got {m}")
    exps = np.asarray(exponents, dtype=float)
    if exps.shape != (m,):
        raise DomainError(f"Expected {m} exponents, got shape {exps.shape}")
    if np.any(exps < 0):
        raise DomainError("Exponents must be non-negative")
    if not absolute:
        if np.any(exps != np.round(exps)):
            raise DomainError("Signed monomial moments need integer exponents")
        if np.any(exps % 2 == 1):
            return 0.0
    log_val = (math.log(2.0) + float(np.sum(gammaln((exps + 1) / 2.0)))
               - float(gammaln((m + exps.sum()) / 2.0)))
    return math.exp(log_val)
