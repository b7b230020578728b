"""
Reduced energy F(0, eps), its xi-Hessian, and the sphere moment identities feeding both.

The closed forms reduce every double integral over (r, t) in (0, inf)^2 to
radial Beta moments times half-line moments c_q; the quadrature routes
integrate the unreduced integrands directly and serve as the cross-check.
Indices p, q of the moment identities are 1-based.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from curvature import WeylLike, nondegeneracy_scalar, t_matrix
from errors import DomainError
from reduction import ReductionPolynomial, i_critical_points, i_polynomial, j_polynomial, moment_ratios
from specfun import (
    DEFAULT_QUADRATURE,
    QuadratureResult,
    QuadratureSpec,
    beta,
    log_beta,
    monomial_sphere_moments,
    quad_nested,
    sphere_area,
)

logger = logging.getLogger("ENERGY")

INNER_QUADRATURE = DEFAULT_QUADRATURE.with_tolerances(rel_tol=1e-9)
OUTER_QUADRATURE = DEFAULT_QUADRATURE.with_tolerances(rel_tol=1e-8)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ============================================================================
# Sphere moment identities
# ============================================================================

class IdentityCheck(NamedTuple):
    lhs: float
    rhs: float
    rel_err: float


@lru_cache(maxsize=64)
def _monomial_basis(m: int, degree: int) -> tuple[np.ndarray, dict[tuple[int, ...], int]]:
    exps = []
    for combo in combinations_with_replacement(range(m), degree):
        exps.append(np.bincount(combo, minlength=m))
    basis = np.array(exps, dtype=int).reshape(-1, m)
    return basis, {tuple(row): idx for idx, row in enumerate(basis)}


def _sphere_quadratic_form(coefs: np.ndarray, basis: np.ndarray, m: int, r: float,
                           weight: Optional[tuple[int, int]]) -> float:
    """
    sum over the field components of int_{S_r^{m-1}} P(x)^2 x_p x_q, exactly.

    coefs has shape (B, K): B monomials times K field components. The Gram
    matrix of the components is paired with exact monomial moments.
    """
    gram = coefs @ coefs.T
    exps = basis[:, None, :] + basis[None, :, :]
    if weight is not None:
        p, q = weight
        exps = exps.copy()
        exps[..., p] += 1
        exps[..., q] += 1
    moments = monomial_sphere_moments(m, exps)
    degrees = exps.sum(axis=-1)
    radial = np.power(float(r), m - 1 + degrees)
    return float(np.sum(gram * moments * radial))


def _dh_coefficients(W: WeylLike, f_value: float, fprime_value: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Monomial coefficients of d_l Hbar_ik = f d_l H_ik + 2 x_l f' H_ik on the sphere |x| = r,
    where f and f' are the constants f(r^2), f'(r^2). Linear monomials come first, then cubic.
    """
    m = W.m
    C = W.dense()
    lin_basis, lin_index = _monomial_basis(m, 1)
    cub_basis, cub_index = _monomial_basis(m, 3)
    coefs = np.zeros((len(lin_basis) + len(cub_basis), m, m, m))

    S = np.einsum("ilkb->iklb", C) + np.einsum("ibkl->iklb", C)
    for b in range(m):
        e = np.zeros(m, dtype=int)
        e[b] = 1
        coefs[lin_index[tuple(e)]] += f_value * S[..., b]

    if fprime_value != 0.0:
        offset = len(lin_basis)
        for a in range(m):
            for b in range(m):
                for l in range(m):
                    e = np.zeros(m, dtype=int)
                    e[a] += 1
                    e[b] += 1
                    e[l] += 1
                    coefs[offset + cub_index[tuple(e)], :, :, l] += 2.0 * fprime_value * C[:, a, :, b]
    basis = np.vstack([lin_basis, cub_basis])
    return coefs.reshape(len(basis), -1), basis


def _h_coefficients(W: WeylLike) -> tuple[np.ndarray, np.ndarray]:
    """Monomial coefficients of H_ik = W_iakb x_a x_b."""
    m = W.m
    C = W.dense()
    basis, index = _monomial_basis(m, 2)
    coefs = np.zeros((len(basis), m, m))
    for a in range(m):
        for b in range(m):
            e = np.zeros(m, dtype=int)
            e[a] += 1
            e[b] += 1
            coefs[index[tuple(e)]] += C[:, a, :, b]
    return coefs.reshape(len(basis), -1), basis


def _check_pq(W: WeylLike, p: int, q: int) -> tuple[int, int]:
    if not (1 <= p <= W.m and 1 <= q <= W.m):
        raise DomainError(f"Indices p, q must lie in 1..{W.m}, got ({p}, {q})")
    return p - 1, q - 1


def _relative(lhs: float, rhs: float, scale: float) -> IdentityCheck:
    denom = max(abs(rhs), abs(scale))
    err = abs(lhs - rhs) / denom if denom > 0 else abs(lhs - rhs)
    return IdentityCheck(lhs, rhs, err)


def moment_identity_A(W: WeylLike, r: float, p: int, q: int) -> IdentityCheck:
    """
    int_{S_r} sum (d_l H_ik)^2 x_p x_q
        = |S^{m-1}| r^{m+3} / (m(m+2)) (2 T_pq + N delta_pq),   N = sum (W_ijkl + W_ilkj)^2.
    """
    pi, qi = _check_pq(W, p, q)
    m = W.m
    coefs, basis = _dh_coefficients(W, 1.0, 0.0)
    lhs = _sphere_quadratic_form(coefs, basis, m, r, (pi, qi))
    pref = sphere_area(m) * r ** (m + 3) / (m * (m + 2))
    N = nondegeneracy_scalar(W)
    rhs = pref * (2.0 * t_matrix(W)[pi, qi] + (N if pi == qi else 0.0))
    return _relative(lhs, rhs, pref * N)


def moment_identity_B(W: WeylLike, r: float, p: int, q: int) -> IdentityCheck:
    """
    int_{S_r} sum H_ik^2 x_p x_q
        = |S^{m-1}| r^{m+5} / (m(m+2)(m+4)) (2 T_pq + (N/2) delta_pq).
    """
    pi, qi = _check_pq(W, p, q)
    m = W.m
    coefs, basis = _h_coefficients(W)
    lhs = _sphere_quadratic_form(coefs, basis, m, r, (pi, qi))
    pref = sphere_area(m) * r ** (m + 5) / (m * (m + 2) * (m + 4))
    N = nondegeneracy_scalar(W)
    rhs = pref * (2.0 * t_matrix(W)[pi, qi] + (0.5 * N if pi == qi else 0.0))
    return _relative(lhs, rhs, 0.5 * pref * N)


def _weights(f: ReductionPolynomial, r: float, m: int) -> tuple[float, float, float, float]:
    s = r * r
    fv = float(f(s))
    fp = float(f.derivative(s))
    n = m + 1
    tensor_weight = (n + 3) * fv * fv + 8 * s * fv * fp + 4 * s * s * fp * fp
    delta_weight = (n + 3) * fv * fv + 4 * s * fv * fp + 2 * s * s * fp * fp
    return fv, fp, tensor_weight, delta_weight


def moment_identity_C(W: WeylLike, f: ReductionPolynomial, r: float, p: int, q: int) -> IdentityCheck:
    """
    int_{S_r} sum (d_l Hbar_ik)^2 x_p x_q
        = {2 T_pq [(n+3)f^2 + 8r^2ff' + 4r^4f'^2] + N delta_pq [(n+3)f^2 + 4r^2ff' + 2r^4f'^2]}
          * |S^{m-1}| r^{m+3} / (m(m+2)(m+4)),   with n = m+1 and f = f(r^2).
    """
    pi, qi = _check_pq(W, p, q)
    m = W.m
    fv, fp, tensor_weight, delta_weight = _weights(f, r, m)
    coefs, basis = _dh_coefficients(W, fv, fp)
    lhs = _sphere_quadratic_form(coefs, basis, m, r, (pi, qi))
    pref = sphere_area(m) * r ** (m + 3) / (m * (m + 2) * (m + 4))
    N = nondegeneracy_scalar(W)
    rhs = pref * (2.0 * t_matrix(W)[pi, qi] * tensor_weight
                  + (N * delta_weight if pi == qi else 0.0))
    return _relative(lhs, rhs, pref * N * delta_weight)


def moment_identity_D(W: WeylLike, f: ReductionPolynomial, r: float) -> IdentityCheck:
    """
    int_{S_r} sum (d_l Hbar_ik)^2
        = |S^{m-1}| r^{m+1} / (m(m+2)) N [(n+1)f^2 + 4r^2ff' + 2r^4f'^2],   n = m+1.
    """
    m = W.m
    s = r * r
    fv = float(f(s))
    fp = float(f.derivative(s))
    coefs, basis = _dh_coefficients(W, fv, fp)
    lhs = _sphere_quadratic_form(coefs, basis, m, r, None)
    n = m + 1
    weight = (n + 1) * fv * fv + 4 * s * fv * fp + 2 * s * s * fp * fp
    rhs = sphere_area(m) * r ** (m + 1) / (m * (m + 2)) * nondegeneracy_scalar(W) * weight
    return _relative(lhs, rhs, rhs)


@dataclass(frozen=True)
class MomentRow:
    identity: str
    m: int
    seed: int
    r: float
    p: int
    q: int
    lhs: float
    rhs: float
    rel_err: float


MOMENT_COLUMNS = ["identity", "m", "seed", "r", "p", "q", "lhs", "rhs", "rel_err"]


def moment_rows(W: WeylLike, f: ReductionPolynomial, r: float, seed: int,
                p: int = 1, q: int = 1) -> list[MomentRow]:
    """One row per identity at (p, q); identity D has no p, q and reports 0, 0."""
    checks = [
        ("A", p, q, moment_identity_A(W, r, p, q)),
        ("B", p, q, moment_identity_B(W, r, p, q)),
        ("C", p, q, moment_identity_C(W, f, r, p, q)),
        ("D", 0, 0, moment_identity_D(W, f, r)),
    ]
    return [MomentRow(name, W.m, seed, r, pp, qq, *check) for name, pp, qq, check in checks]


# ============================================================================
# F(0, eps)
# ============================================================================

def _check_energy_args(eps: float, n: int, f: ReductionPolynomial) -> None:
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    if not n - 5 - 4 * f.d > 1:
        raise DomainError(f"F(0, eps) needs n - 5 - 4d > 1, got n={n}, d={f.d}")


def energy_constant(n: int, nondeg: float) -> float:
    """K in F(0, eps) = -K I(eps^2): (n-2)|S^{n-2}| B((n-1)/2, (n-3)/2) N / (32 (n-1)^2 (n+1))."""
    return ((n - 2) * sphere_area(n - 1) * beta((n - 1) / 2.0, (n - 3) / 2.0) * nondeg
            / (32.0 * (n - 1) ** 2 * (n + 1)))


def F0_closed(eps: float, n: int, T_c: float, nondeg: float, f: ReductionPolynomial) -> float:
    """F(0, eps) = -K I(eps^2)."""
    _check_energy_args(eps, n, f)
    if nondeg == 0.0:
        return 0.0
    return -energy_constant(n, nondeg) * float(i_polynomial(n, T_c, f)(eps * eps))


def F0_derivatives(eps: float, n: int, T_c: float, nondeg: float,
                   f: ReductionPolynomial) -> tuple[float, float, float]:
    """(F, dF/deps, d^2F/deps^2) with dF/deps = -2K eps I'(eps^2), d^2F = -K(2I' + 4 eps^2 I'')."""
    _check_energy_args(eps, n, f)
    K = energy_constant(n, nondeg)
    poly = i_polynomial(n, T_c, f)
    s = eps * eps
    d1 = float(poly.deriv(1)(s))
    d2 = float(poly.deriv(2)(s))
    return -K * float(poly(s)), -2.0 * K * eps * d1, -K * (2.0 * d1 + 4.0 * s * d2)


def weighted_double_integral(eps: float, n: int, T_c: float, power: float, r_power: float,
                             weight: Polynomial,
                             inner: QuadratureSpec = INNER_QUADRATURE,
                             outer: QuadratureSpec = OUTER_QUADRATURE) -> QuadratureResult:
    """
    int_0^inf int_0^inf eps^{n-2} (eps^2 + (t - T_c eps)^2 + r^2)^{-power} r^{r_power} weight(r^2) dr dt.

    r is integrated inside, t outside. The integrand is formed in log-space and
    normalized by the size of the answer, eps^{n-1} (eps^2(1+T_c^2))^{(r_power+1)/2 - power},
    which is restored at the end.
    """
    A0 = eps * eps * (1.0 + T_c * T_c)
    log_ref = (n - 1) * math.log(eps) + ((r_power + 1) / 2.0 - power) * math.log(A0)
    log_eps = math.log(eps)

    def integrand(r: np.ndarray, t: float) -> np.ndarray:
        A = eps * eps + (t - T_c * eps) ** 2
        logs = ((n - 2) * log_eps - power * np.log(A + r * r)
                + r_power * np.log(r) - log_ref)
        return np.exp(logs) * weight(r * r)

    # Inner peak at r* with relative width ~ 1/sqrt(2 power).
    spread = 3.0 / math.sqrt(2.0 * power)

    def breakpoints(t: float) -> list[float]:
        A = eps * eps + (t - T_c * eps) ** 2
        peak = math.sqrt(r_power * A / (2.0 * power - r_power))
        return [peak * (1.0 + k * spread) for k in (-1, 0, 1) if 1.0 + k * spread > 0]

    # Outer decay from t = max(0, T_c eps) on scales sqrt(A0)/sqrt(power) to sqrt(A0).
    t_peak = max(0.0, T_c * eps)
    ladder = [t_peak + math.sqrt(A0) * 2.0 ** k for k in range(-8, 5)]

    res = quad_nested(integrand, (0.0, math.inf), (0.0, math.inf), outer, inner,
                      breakpoints, ladder)
    scale = math.exp(log_ref)
    return QuadratureResult(res.value * scale, res.error_estimate * scale,
                            res.converged, res.subdivisions)


def _energy_weight(f: ReductionPolynomial, n: int) -> Polynomial:
    P = f.as_polynomial()
    dP = P.deriv()
    s = Polynomial([0.0, 1.0])
    return (n + 1) * P * P + 4 * s * P * dP + 2 * s * s * dP * dP


def F0_quadrature(eps: float, n: int, T_c: float, nondeg: float, f: ReductionPolynomial,
                  inner: QuadratureSpec = INNER_QUADRATURE,
                  outer: QuadratureSpec = OUTER_QUADRATURE) -> QuadratureResult:
    """
    -c_n |S^{n-2}| eps^{n-2} N / (4(n-1)(n+1))
        * int int (eps^2 + (t - T_c eps)^2 + r^2)^{2-n} r^n [(n+1)f^2 + 4r^2ff' + 2r^4f'^2] dr dt.
    """
    _check_energy_args(eps, n, f)
    cn = (n - 2) / (4.0 * (n - 1))
    factor = -cn * sphere_area(n - 1) * nondeg / (4.0 * (n - 1) * (n + 1))
    res = weighted_double_integral(eps, n, T_c, n - 2, n, _energy_weight(f, n), inner, outer)
    if not res.converged:
        logger.warning("F0 quadrature did not converge at eps=%s n=%d", eps, n)
    return QuadratureResult(factor * res.value, abs(factor) * res.error_estimate,
                            res.converged, res.subdivisions)


# ============================================================================
# Profile
# ============================================================================

@dataclass(frozen=True)
class EnergySample:
    eps: float
    F_closed: float
    F_quadrature: float
    rel_diff: float
    converged: bool


ENERGY_COLUMNS = ["eps", "F_closed", "F_quadrature", "rel_diff", "converged"]


@dataclass
class EnergyProfile:
    n: int
    T_c: float
    nondeg: float
    f: ReductionPolynomial
    samples: list[EnergySample] = field(default_factory=list)

    @property
    def max_rel_diff(self) -> float:
        return max((s.rel_diff for s in self.samples), default=0.0)

    def local_min_at(self, eps: float) -> bool:
        """True when the sample at eps is below both grid neighbours."""
        values = [s.eps for s in self.samples]
        idx = int(np.argmin(np.abs(np.asarray(values) - eps)))
        if idx == 0 or idx == len(values) - 1:
            return False
        F = [s.F_closed for s in self.samples]
        return F[idx] < F[idx - 1] and F[idx] < F[idx + 1]


def _sample(eps: float, n: int, T_c: float, nondeg: float, f: ReductionPolynomial,
            quadrature: bool, inner: QuadratureSpec, outer: QuadratureSpec) -> EnergySample:
    closed = F0_closed(eps, n, T_c, nondeg, f)
    if not quadrature:
        return EnergySample(eps, closed, float("nan"), 0.0, True)
    res = F0_quadrature(eps, n, T_c, nondeg, f, inner, outer)
    rel = abs(res.value - closed) / abs(closed) if closed != 0.0 else abs(res.value)
    return EnergySample(eps, closed, res.value, rel, res.converged)


def energy_profile(n: int, T_c: float, nondeg: float, f: ReductionPolynomial,
                   eps_values: Sequence[float], quadrature: bool = True,
                   threads: Optional[int] = None,
                   inner: QuadratureSpec = INNER_QUADRATURE,
                   outer: QuadratureSpec = OUTER_QUADRATURE) -> EnergyProfile:
    """F(0, eps) on a grid of eps, closed form against quadrature; samples keep grid order."""
    def work(eps: float) -> EnergySample:
        return _sample(float(eps), n, T_c, nondeg, f, quadrature, inner, outer)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(work, eps_values))
    else:
        samples = [work(eps) for eps in eps_values]
    profile = EnergyProfile(n, T_c, nondeg, f, samples)
    logger.info("Energy profile n=%d T_c=%s: %d samples, max rel diff %.2e",
                n, T_c, len(samples), profile.max_rel_diff)
    return profile


# ============================================================================
# xi-Hessian
# ============================================================================

@dataclass(frozen=True)
class HessianReport:
    """
    matrix = term_A_scalar * T(W) + (term_B_scalar + term_C_scalar) * I.

    The J- and f'^2-integrals are kept in both closed and quadrature form.
    """
    eps: float
    matrix: np.ndarray
    term_A_scalar: float
    term_B_scalar: float
    term_C_scalar: float
    min_eigenvalue: float
    j_integral_closed: float
    fprime_integral_closed: float
    j_integral_quadrature: Optional[float] = None
    fprime_integral_quadrature: Optional[float] = None
    converged: bool = True

    @staticmethod
    def _rel(a: float, b: Optional[float]) -> Optional[float]:
        if b is None:
            return None
        return abs(a - b) / abs(a) if a != 0.0 else abs(b)

    @property
    def j_rel_diff(self) -> Optional[float]:
        return self._rel(self.j_integral_closed, self.j_integral_quadrature)

    @property
    def fprime_rel_diff(self) -> Optional[float]:
        return self._rel(self.fprime_integral_closed, self.fprime_integral_quadrature)


def _fprime_squared(f: ReductionPolynomial) -> Polynomial:
    dP = f.as_polynomial().deriv()
    return dP * dP


def _j_weight(f: ReductionPolynomial) -> Polynomial:
    P = f.as_polynomial()
    dP = P.deriv()
    return 2 * P * dP + Polynomial([0.0, 1.0]) * dP * dP


def j_integral_closed(eps: float, n: int, T_c: float, f: ReductionPolynomial) -> float:
    """int int eps^{n-2} D^{-n} r^{n+4}(2ff' + r^2f'^2) = (1/2) B((n+3)/2, (n-3)/2) J(eps^2)."""
    return 0.5 * beta((n + 3) / 2.0, (n - 3) / 2.0) * float(j_polynomial(n, T_c, f)(eps * eps))


def fprime_integral_closed(eps: float, n: int, T_c: float, f: ReductionPolynomial) -> float:
    """
    int int eps^{n-2} D^{1-n} r^{n+4} f'^2
        = (1/2) sum_q gamma_q c_{q+1} eps^{2q+6} B((n+5+2q)/2, (n-7-2q)/2),
    gamma_q the coefficients of f'^2.
    """
    gammas = _fprime_squared(f).coef
    if f.d == 0:
        return 0.0
    ratios = moment_ratios(n, T_c, len(gammas) + 1)
    total = 0.0
    for q, g_q in enumerate(gammas):
        if g_q == 0.0:
            continue
        log_term = (math.log(0.5) + ratios.log_c0 + math.log(ratios.ratios[q + 1])
                    + (2 * q + 6) * math.log(eps)
                    + log_beta((n + 5 + 2 * q) / 2.0, (n - 7 - 2 * q) / 2.0))
        total += g_q * math.exp(log_term)
    return total


def hessian_coefficients(n: int) -> tuple[float, float, float]:
    """Prefactors of the T-term, the J delta-term and the f'^2 delta-term."""
    area = sphere_area(n - 1)
    sq = (n - 2) ** 2
    a_T = -2.0 * sq * area / ((n - 1) * (n + 1) * (n + 3))
    b = -sq * area / (2.0 * (n - 1) * (n + 1) * (n + 3))
    c = sq * area / (4.0 * (n - 1) ** 2 * (n + 1))
    return a_T, b, c


def hessian_xi(eps: float, n: int, T_c: float, W: WeylLike, f: ReductionPolynomial,
               quadrature: bool = True,
               inner: QuadratureSpec = INNER_QUADRATURE,
               outer: QuadratureSpec = OUTER_QUADRATURE) -> HessianReport:
    """
    d^2 F / d xi_p d xi_q at (0, eps) as an (n-1) x (n-1) matrix.

    Raises:
        DomainError: If n <= 9 or W does not live in R^{n-1}
    """
    if n <= 9:
        raise DomainError(f"The xi-Hessian is evaluated for n > 9, got n={n}")
    if W.m != n - 1:
        raise DomainError(f"W must live in R^{n - 1}, got m={W.m}")
    _check_energy_args(eps, n, f)
    N = nondegeneracy_scalar(W)
    T = t_matrix(W)
    a_T, b, c = hessian_coefficients(n)
    jj = j_integral_closed(eps, n, T_c, f)
    kk = fprime_integral_closed(eps, n, T_c, f)
    term_A = a_T * jj
    term_B = b * jj * N
    term_C = c * kk * N
    matrix = term_A * T + (term_B + term_C) * np.eye(n - 1)
    min_eig = float(np.linalg.eigvalsh(matrix).min())

    jj_q = kk_q = None
    converged = True
    if quadrature and f.d > 0:
        res_j = weighted_double_integral(eps, n, T_c, n, n + 4, _j_weight(f), inner, outer)
        res_k = weighted_double_integral(eps, n, T_c, n - 1, n + 4, _fprime_squared(f), inner, outer)
        jj_q, kk_q = res_j.value, res_k.value
        converged = res_j.converged and res_k.converged
    logger.debug("Hessian n=%d eps=%s: A=%.4g B=%.4g C=%.4g min eig=%.4g",
                 n, eps, term_A, term_B, term_C, min_eig)
    return HessianReport(eps, matrix, term_A, term_B, term_C, min_eig,
                         jj, kk, jj_q, kk_q, converged)


# ============================================================================
# Local minimum at (0, 1)
# ============================================================================

def golden_section_minimize(func: Callable[[float], float], lower: float, upper: float,
                            tol: float = 1e-9, max_iter: int = 200) -> tuple[float, float, int]:
    """
    Golden-section search for a unimodal function on [lower, upper].

    Returns:
        (argmin, min value, iterations)
    """
    if not lower < upper:
        raise DomainError(f"Empty bracket [{lower}, {upper}]")
    a, b = lower, upper
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = func(x1), func(x2)
    iterations = 0
    while b - a > tol and iterations < max_iter:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = func(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = func(x2)
        iterations += 1
    x = 0.5 * (a + b)
    return x, func(x), iterations


@dataclass(frozen=True)
class LocalMinReport:
    n: int
    T_c: float
    F0_at_1: float
    dF_deps: float
    d2F_deps2: float
    hessian_min_eigenvalue: float
    minimizer: float
    bracket: tuple[float, float]

    @property
    def stationary(self) -> bool:
        return abs(self.dF_deps) <= 1e-9 * abs(self.F0_at_1)

    @property
    def convex(self) -> bool:
        return self.d2F_deps2 > 0

    @property
    def xi_definite(self) -> bool:
        return self.hessian_min_eigenvalue > 0

    @property
    def minimizer_at_1(self) -> bool:
        return abs(self.minimizer - 1.0) <= 1e-6

    @property
    def passed(self) -> bool:
        return self.stationary and self.convex and self.xi_definite and self.minimizer_at_1


LOCAL_MIN_BRACKET = (0.5, 2.0)


def local_min_check(n: int, T_c: float, W: WeylLike, f: ReductionPolynomial,
                    quadrature: bool = False) -> LocalMinReport:
    """
    Verdicts for a strict local minimum of F at (0, 1).

    F0 = -K I(eps^2) with K > 0 is unimodal on (0, sqrt(s2)), s2 > 1 being the
    other critical point of I, so the golden-section search runs on
    [0.5, min(2, sqrt(s2))] over -I(eps^2).
    """
    N = nondegeneracy_scalar(W)
    if N == 0.0:
        raise DomainError("The local minimum check needs a nonzero Weyl tensor")
    F, dF, d2F = F0_derivatives(1.0, n, T_c, N, f)
    hess = hessian_xi(1.0, n, T_c, W, f, quadrature=quadrature)

    upper = LOCAL_MIN_BRACKET[1]
    crit = [s for s in i_critical_points(n, T_c, f) if s > 1.0 + 1e-9]
    if crit:
        upper = min(upper, math.sqrt(crit[0]))
    poly = i_polynomial(n, T_c, f, normalized=True)
    lower = LOCAL_MIN_BRACKET[0]
    minimizer, _, _ = golden_section_minimize(lambda e: -float(poly(e * e)), lower, upper)
    report = LocalMinReport(n, T_c, F, dF, d2F, hess.min_eigenvalue, minimizer, (lower, upper))
    logger.info("n=%d T_c=%s: dF=%.3g d2F=%.3g min eig=%.3g argmin=%.9f on [%.3f, %.3f]",
                n, T_c, dF, d2F, hess.min_eigenvalue, minimizer, lower, upper)
    return report
