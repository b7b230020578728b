"""
The bubble family on the half-space and its kernel functions.

    u_(xi,eps)(x) = (eps / (eps^2 + (x_n - T_c eps)^2 + |x' - xi|^2))^{(n-2)/2}

Everything is evaluated through log u and the logarithmic derivatives
g = grad u / u and h = Hess u / u, so the residual checks stay O(1) at n = 62
where u itself ranges over hundreds of decades.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from errors import DomainError
from specfun import DEFAULT_QUADRATURE, QuadratureSpec, monomial_sphere_moment, quad_1d, quad_nested, sphere_area

logger = logging.getLogger("BUBBLE")

VALID_VARIANTS = ["interior", "boundary_hat"]

FD_SCALE = 1e-5


@dataclass(frozen=True)
class BubbleParams:
    n: int
    T_c: float
    xi: np.ndarray
    eps: float

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"Bubble dimension must be at least 3, got n={self.n}")
        if not self.T_c < 0:
            raise DomainError(f"T_c must be negative, got {self.T_c}")
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        xi = np.array(self.xi, dtype=float).reshape(-1)
        if xi.shape != (self.n - 1,):
            raise DomainError(f"xi must lie in R^{self.n - 1}, got shape {xi.shape}")
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)

    @classmethod
    def centred(cls, n: int, T_c: float, eps: float = 1.0) -> "BubbleParams":
        return cls(n, T_c, np.zeros(n - 1), eps)

    @property
    def peak(self) -> np.ndarray:
        """Centre (xi, T_c eps) of the full-space bubble, below the boundary."""
        return np.append(self.xi, self.T_c * self.eps)

    @property
    def exponent(self) -> float:
        return (self.n - 2) / 2.0


# ============================================================================
# Evaluation
# ============================================================================

def _offset(p: BubbleParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise DomainError(f"Expected a point in R^{p.n}, got shape {x.shape}")
    return x - p.peak


def _denominator(p: BubbleParams, y: np.ndarray) -> float:
    return p.eps ** 2 + float(np.dot(y, y))


def _log_u(p: BubbleParams, x) -> float:
    y = _offset(p, x)
    return p.exponent * (math.log(p.eps) - math.log(_denominator(p, y)))


def log_bubble(p: BubbleParams, x) -> float:
    x = np.asarray(x, dtype=float)
    if x[-1] < 0:
        raise DomainError(f"Point lies outside the half-space: x_n={x[-1]}")
    return _log_u(p, x)


def eval_bubble(p: BubbleParams, x) -> float:
    """u_(xi,eps)(x) for x_n >= 0, evaluated as exp(log u)."""
    return math.exp(log_bubble(p, x))


def log_gradient(p: BubbleParams, x) -> np.ndarray:
    """grad u / u = -(n-2) y / D with y = x - peak."""
    y = _offset(p, x)
    return -(p.n - 2) * y / _denominator(p, y)


def log_hessian(p: BubbleParams, x) -> np.ndarray:
    """Hess u / u = n(n-2) y y^T / D^2 - (n-2) I / D."""
    y = _offset(p, x)
    D = _denominator(p, y)
    return p.n * (p.n - 2) * np.outer(y, y) / D ** 2 - (p.n - 2) * np.eye(p.n) / D


def _fd_step(p: BubbleParams, x) -> float:
    return FD_SCALE * max(p.eps, float(np.linalg.norm(_offset(p, x))))


# ============================================================================
# Residuals
# ============================================================================

def interior_residual(p: BubbleParams, x) -> float:
    """
    (-Lap u - n(n-2) u^{(n+2)/(n-2)}) / (n(n-2) u^{(n+2)/(n-2)}).

    Lap u / u is assembled as |g|^2 + div g from the unsimplified pieces,
    and u^{4/(n-2)} = (eps/D)^2.
    """
    x = np.asarray(x, dtype=float)
    if not x[-1] > 0:
        raise DomainError(f"Interior residual needs x_n > 0, got {x[-1]}")
    y = _offset(p, x)
    D = _denominator(p, y)
    g = log_gradient(p, x)
    r2 = float(np.dot(y, y))
    div_g = -(p.n - 2) * (p.n / D - 2.0 * r2 / D ** 2)
    laplacian_over_u = float(np.dot(g, g)) + div_g
    target = p.n * (p.n - 2) * (p.eps / D) ** 2
    return (-laplacian_over_u - target) / target


def boundary_residual(p: BubbleParams, x_boundary) -> float:
    """Relative residual of du/dx_n = (n-2) T_c u^{n/(n-2)} at (x', 0)."""
    xb = np.asarray(x_boundary, dtype=float)
    if xb.shape != (p.n - 1,):
        raise DomainError(f"Expected a boundary point in R^{p.n - 1}, got shape {xb.shape}")
    x = np.append(xb, 0.0)
    dn_over_u = float(log_gradient(p, x)[-1])
    u_pow = math.exp(2.0 / (p.n - 2) * _log_u(p, x))
    target = (p.n - 2) * p.T_c * u_pow
    return (dn_over_u - target) / target


def c_n(n: int) -> float:
    """Conformal Laplacian constant (n-2)/(4(n-1))."""
    return (n - 2) / (4.0 * (n - 1))


def einstein_residual(p: BubbleParams, x) -> np.ndarray:
    """
    Traceless part of du du^T - c_n Hess(u^2), divided by u^2 and by max(|g|^2, |h|).

    The bracket is Einstein exactly when it is a multiple of the identity, so the
    returned matrix vanishes up to roundoff.
    """
    x = np.asarray(x, dtype=float)
    if not x[-1] > 0:
        raise DomainError(f"Einstein residual needs x_n > 0, got {x[-1]}")
    cn = c_n(p.n)
    g = log_gradient(p, x)
    h = log_hessian(p, x)
    gg = np.outer(g, g)
    lhs = (1.0 - 2.0 * cn) * gg - 2.0 * cn * h
    rhs = np.trace(lhs) / p.n * np.eye(p.n)
    scale = max(float(np.dot(g, g)), float(np.linalg.norm(h)))
    return (lhs - rhs) / scale


def derivative_check(p: BubbleParams, x) -> float:
    """
    Largest relative gap between analytic g, h and central differences.

    g is compared with differences of log u, h - g g^T with differences of g.
    """
    x = np.asarray(x, dtype=float)
    step = _fd_step(p, x)
    g = log_gradient(p, x)
    dg = log_hessian(p, x) - np.outer(g, g)
    fd_g = np.empty(p.n)
    fd_dg = np.empty((p.n, p.n))
    for c in range(p.n):
        e = np.zeros(p.n)
        e[c] = step
        fd_g[c] = (_log_u(p, x + e) - _log_u(p, x - e)) / (2 * step)
        fd_dg[c] = (log_gradient(p, x + e) - log_gradient(p, x - e)) / (2 * step)
    gap_g = np.linalg.norm(fd_g - g) / np.linalg.norm(g)
    gap_h = np.linalg.norm(fd_dg - dg) / np.linalg.norm(dg)
    return float(max(gap_g, gap_h))


def random_points(p: BubbleParams, count: int, seed: int) -> np.ndarray:
    """Seeded interior points at distance O(eps) from the peak."""
    rng = np.random.default_rng(seed)
    pts = np.empty((count, p.n))
    pts[:, :-1] = p.xi + 2.0 * p.eps * rng.standard_normal((count, p.n - 1))
    pts[:, -1] = p.eps * (2.0 * np.abs(rng.standard_normal(count)) + 1e-3)
    return pts


@dataclass(frozen=True)
class BubbleCheckReport:
    n: int
    T_c: float
    eps: float
    samples: int
    max_interior: float
    max_boundary: float
    max_einstein: float
    max_derivative: float

    def passed(self, tol: float = 1e-9) -> bool:
        return max(self.max_interior, self.max_boundary, self.max_einstein) <= tol \
            and self.max_derivative <= 1e-6


def bubble_check(n: int, T_c: float, eps: float = 1.0, samples: int = 100,
                 seed: int = 0) -> BubbleCheckReport:
    """Maxima of all residuals over seeded points, xi drawn at random as well."""
    rng = np.random.default_rng(seed)
    p = BubbleParams(n, T_c, rng.standard_normal(n - 1), eps)
    pts = random_points(p, samples, seed + 1)
    interior = max(abs(interior_residual(p, x)) for x in pts)
    boundary = max(abs(boundary_residual(p, x[:-1])) for x in pts)
    einstein = max(float(np.abs(einstein_residual(p, x)).max()) for x in pts)
    deriv = max(derivative_check(p, x) for x in pts[: min(samples, 20)])
    logger.debug("n=%d: interior %.2e boundary %.2e einstein %.2e fd %.2e",
                 n, interior, boundary, einstein, deriv)
    return BubbleCheckReport(n, T_c, eps, samples, interior, boundary, einstein, deriv)


# ============================================================================
# Kernel functions
# ============================================================================

def _check_kernel_index(p: BubbleParams, a: int, variant: str) -> None:
    if variant not in VALID_VARIANTS:
        raise DomainError(f"Invalid variant '{variant}'. Valid variants: {VALID_VARIANTS}")
    if not 1 <= a <= p.n:
        raise DomainError(f"Kernel index must lie in 1..{p.n}, got {a}")


def eval_kernel(p: BubbleParams, a: int, variant: str, x) -> float:
    """
    u_(xi,eps,a) (variant 'interior', power (n+2)/2) or its hatted version
    (variant 'boundary_hat', power n/2):

        a < n:  (eps/D)^power * 2 eps (x_a - xi_a) / D
        a = n:  (eps/D)^power * ((1+T_c^2) eps^2 - x_n^2 - |x'-xi|^2) / D

    a is 1-based.
    """
    _check_kernel_index(p, a, variant)
    y = _offset(p, x)
    x = np.asarray(x, dtype=float)
    D = _denominator(p, y)
    power = (p.n + 2) / 2.0 if variant == "interior" else p.n / 2.0
    prefactor = math.exp(power * (math.log(p.eps) - math.log(D)))
    if a < p.n:
        return prefactor * 2.0 * p.eps * (x[a - 1] - p.xi[a - 1]) / D
    tangential = x[:-1] - p.xi
    numerator = (1.0 + p.T_c ** 2) * p.eps ** 2 - x[-1] ** 2 - float(np.dot(tangential, tangential))
    return prefactor * numerator / D


def kernel_proportionality(p: BubbleParams, x, a: int) -> float:
    """
    Relative gap between u_(xi,eps,a) and (2eps/(n-2)) u^{4/(n-2)} d_{xi_a} u
    (a < n) or -(2eps/(n-2)) u^{4/(n-2)} d_eps u (a = n), differentiating
    log u by central differences in the parameters.
    """
    _check_kernel_index(p, a, "interior")
    x = np.asarray(x, dtype=float)
    log_u = _log_u(p, x)
    step = _fd_step(p, x)
    if a < p.n:
        shift = np.zeros(p.n - 1)
        shift[a - 1] = step
        plus = BubbleParams(p.n, p.T_c, p.xi + shift, p.eps)
        minus = BubbleParams(p.n, p.T_c, p.xi - shift, p.eps)
        sign = 1.0
    else:
        plus = BubbleParams(p.n, p.T_c, p.xi, p.eps + step)
        minus = BubbleParams(p.n, p.T_c, p.xi, p.eps - step)
        sign = -1.0
    dlog = (_log_u(plus, x) - _log_u(minus, x)) / (2 * step)
    predicted = sign * 2.0 * p.eps / (p.n - 2) * math.exp((p.n + 2) / (p.n - 2) * log_u) * dlog
    actual = eval_kernel(p, a, "interior", x)
    denom = max(abs(actual), abs(predicted))
    return 0.0 if denom == 0.0 else abs(actual - predicted) / denom


# ============================================================================
# Kernel norms
# ============================================================================

@dataclass(frozen=True)
class KernelNormReport:
    n: int
    T_c: float
    a: int
    params: list[tuple[tuple[float, ...], float]] = field(default_factory=list)
    interior_norms: list[float] = field(default_factory=list)
    boundary_norms: list[float] = field(default_factory=list)
    converged: bool = True

    @staticmethod
    def _spread(values: Sequence[float]) -> float:
        return (max(values) - min(values)) / max(values) if values else 0.0

    @property
    def interior_spread(self) -> float:
        return self._spread(self.interior_norms)

    @property
    def boundary_spread(self) -> float:
        return self._spread(self.boundary_norms)

    @property
    def max_spread(self) -> float:
        return max(self.interior_spread, self.boundary_spread)


def _interior_norm(p: BubbleParams, a: int, inner: QuadratureSpec, outer: QuadratureSpec):
    """
    ||u_(xi,eps,a)||_{L^{2n/(n+2)}(R^n_+)} in coordinates (rho = |x' - xi|, x_n).

    The angular factor is the absolute moment of |omega_a|^p over S^{n-2}
    (a < n) or the area of S^{n-2} (a = n).
    """
    n, eps, T_c = p.n, p.eps, p.T_c
    power = 2.0 * n / (n + 2)
    log_eps = math.log(eps)

    def density(rho: np.ndarray, xn: float) -> np.ndarray:
        D = eps ** 2 + (xn - T_c * eps) ** 2 + rho * rho
        with np.errstate(divide="ignore"):
            logs = n * log_eps - (n + power) * np.log(D) + (n - 2) * np.log(rho)
        if a < n:
            return np.exp(logs + power * np.log(2.0 * eps * rho))
        return np.exp(logs) * np.abs((1.0 + T_c ** 2) * eps ** 2 - xn * xn - rho * rho) ** power

    if a < n:
        exps = np.zeros(n - 1)
        exps[a - 1] = power
        angular = monomial_sphere_moment(n - 1, exps, absolute=True)
    else:
        angular = sphere_area(n - 1)

    def breakpoints(xn: float) -> list[float]:
        points = [eps]
        zero_sq = (1.0 + T_c ** 2) * eps ** 2 - xn * xn
        if a == n and zero_sq > 0:
            points.append(math.sqrt(zero_sq))
        return points

    res = quad_nested(density, (0.0, math.inf), (0.0, math.inf), outer, inner, breakpoints)
    return (angular * res.value) ** (1.0 / power), res.converged


def _boundary_norm(p: BubbleParams, a: int, spec: QuadratureSpec):
    """||u-hat_(xi,eps,a)||_{L^{2(n-1)/n}} on the boundary, by 1D quadrature in rho."""
    n, eps, T_c = p.n, p.eps, p.T_c
    power = 2.0 * (n - 1) / n
    A = (1.0 + T_c ** 2) * eps ** 2

    def density(rho: np.ndarray) -> np.ndarray:
        D = A + rho * rho
        with np.errstate(divide="ignore"):
            logs = (n - 1) * math.log(eps) - (n - 1 + power) * np.log(D) + (n - 2) * np.log(rho)
        if a < n:
            return np.exp(logs + power * np.log(2.0 * eps * rho))
        return np.exp(logs) * np.abs(A - rho * rho) ** power

    if a < n:
        exps = np.zeros(n - 1)
        exps[a - 1] = power
        angular = monomial_sphere_moment(n - 1, exps, absolute=True)
    else:
        angular = sphere_area(n - 1)
    res = quad_1d(density, 0.0, math.inf, spec, breakpoints=(eps, math.sqrt(A)))
    return (angular * res.value) ** (1.0 / power), res.converged


def kernel_norm_constancy(n: int, T_c: float,
                          params: Sequence[tuple[Sequence[float], float]],
                          a: int = 1,
                          inner: QuadratureSpec = DEFAULT_QUADRATURE.with_tolerances(rel_tol=1e-10),
                          outer: QuadratureSpec = DEFAULT_QUADRATURE.with_tolerances(rel_tol=1e-9)
                          ) -> KernelNormReport:
    """
    Interior norm of u_(xi,eps,a) and boundary norm of u-hat_(xi,eps,a) at each (xi, eps).

    Both norms are invariant under translation in xi and dilation in eps, so
    the report's spreads should be at quadrature accuracy.

    Raises:
        DomainError: If n < 5 or a is not in 1..n
    """
    if n < 5:
        raise DomainError(f"Kernel norms are checked for n >= 5, got n={n}")
    interior, boundary, recorded = [], [], []
    converged = True
    for xi, eps in params:
        p = BubbleParams(n, T_c, np.asarray(xi, dtype=float), eps)
        _check_kernel_index(p, a, "interior")
        value, ok_in = _interior_norm(p, a, inner, outer)
        bvalue, ok_bd = _boundary_norm(p, a, inner)
        interior.append(value)
        boundary.append(bvalue)
        recorded.append((tuple(float(v) for v in p.xi), float(eps)))
        converged = converged and ok_in and ok_bd
    report = KernelNormReport(n, T_c, a, recorded, interior, boundary, converged)
    logger.debug("Kernel a=%d norms: interior spread %.2e, boundary spread %.2e",
                 a, report.interior_spread, report.boundary_spread)
    return report
