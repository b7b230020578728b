"""
Algebraic Weyl tensors and the metric perturbation fields built from them.

Conventions: the boundary has dimension m = n - 1 and points of the closed
half-space are arrays of length n whose last entry is x_n >= 0. A WeylLike
stores a dense block of components on a coordinate subset (its support) and is
zero elsewhere; zero-extension of an algebraic Weyl tensor is again one, so the
block form also serves m = 61 without a 61^4 array.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from errors import ConfigError, DegenerateDimensionError, DomainError
from reduction import ReductionPolynomial

logger = logging.getLogger("CURVATURE")

INDEX_ORDER = "W[i][j][k][l] over the support block, row-major (l fastest)"


# ============================================================================
# Weyl-like tensors
# ============================================================================

@dataclass(frozen=True, eq=False)
class WeylLike:
    """Rank-4 form on R^m, dense on `support` and zero outside it."""
    m: int
    components: np.ndarray
    support: tuple[int, ...] = ()

    def __post_init__(self):
        comps = np.array(self.components, dtype=float)
        if comps.ndim != 4 or len(set(comps.shape)) != 1:
            raise DomainError(f"Components must be a k x k x k x k array, got shape {comps.shape}")
        if self.m < 4:
            raise DegenerateDimensionError(
                f"Algebraic Weyl tensors vanish for m <= 3, got m={self.m}"
            )
        k = comps.shape[0]
        support = tuple(int(i) for i in self.support) if self.support else tuple(range(k))
        if len(support) != k or len(set(support)) != k or min(support) < 0 or max(support) >= self.m:
            raise DomainError(f"Support {support} does not index a {k}-block inside R^{self.m}")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "support", support)

    @property
    def block_dim(self) -> int:
        return self.components.shape[0]

    def dense(self) -> np.ndarray:
        full = np.zeros((self.m,) * 4)
        idx = np.ix_(self.support, self.support, self.support, self.support)
        full[idx] = self.components
        return full

    def negated(self) -> "WeylLike":
        return WeylLike(self.m, -self.components, self.support)

    def to_json(self) -> str:
        return json.dumps({
            "m": self.m,
            "support": list(self.support),
            "block_dim": self.block_dim,
            "index_order": INDEX_ORDER,
            "components": [float(v) for v in self.components.ravel()],
        })

    @classmethod
    def from_json(cls, text: str) -> "WeylLike":
        data = json.loads(text)
        k = int(data["block_dim"])
        comps = np.asarray(data["components"], dtype=float).reshape((k,) * 4)
        return cls(int(data["m"]), comps, tuple(data["support"]))


@dataclass(frozen=True)
class WeylInvariantReport:
    max_symmetry_violation: float
    max_trace: float
    nondegeneracy_scalar: float


def _kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    return (np.einsum("ik,jl->ijkl", h, k) + np.einsum("jl,ik->ijkl", h, k)
            - np.einsum("il,jk->ijkl", h, k) - np.einsum("jk,il->ijkl", h, k))


def random_weyl(m: int, seed: int) -> WeylLike:
    """
    Seeded random algebraic Weyl tensor on R^m, normalized to unit Frobenius norm.

    A Gaussian rank-4 array is projected onto the Riemann symmetries (pair
    antisymmetry, pair interchange, first Bianchi) and its Ricci part is removed
    with the Kulkarni-Nomizu product of the Schouten tensor.

    Raises:
        DegenerateDimensionError: If m < 4
    """
    if m < 4:
        raise DegenerateDimensionError(f"Algebraic Weyl tensors vanish for m <= 3, got m={m}")
    rng = np.random.default_rng(seed)
    R = rng.standard_normal((m,) * 4)
    R = R - np.einsum("jikl->ijkl", R)
    R = R - np.einsum("ijlk->ijkl", R)
    R = R + np.einsum("klij->ijkl", R)
    bianchi = R + np.einsum("iklj->ijkl", R) + np.einsum("iljk->ijkl", R)
    R = R - bianchi / 3.0

    g = np.eye(m)
    ricci = np.einsum("ijil->jl", R)
    scalar = np.trace(ricci)
    schouten = (ricci - scalar / (2.0 * (m - 1)) * g) / (m - 2)
    W = R - _kulkarni_nomizu(schouten, g)
    W = W / np.linalg.norm(W)
    return WeylLike(m, W)


def block_weyl(m: int, seed: int, block_dim: int = 4) -> WeylLike:
    """Random Weyl tensor on the first block_dim coordinates of R^m, zero elsewhere."""
    block = random_weyl(block_dim, seed)
    return WeylLike(m, block.components, tuple(range(block_dim)))


def _symmetrized(C: np.ndarray) -> np.ndarray:
    """S_ijkl = W_ijkl + W_ilkj."""
    return C + np.einsum("ilkj->ijkl", C)


def nondegeneracy_scalar(W: WeylLike) -> float:
    """sum (W_ijkl + W_ilkj)^2, equal to sum (W_ikjl + W_iljk)^2."""
    S = _symmetrized(W.components)
    return float(np.sum(S * S))


def t_matrix(W: WeylLike) -> np.ndarray:
    """T_pq = sum_{i,k,l} (W_ipkl + W_ilkp)(W_iqkl + W_ilkq) as an m x m matrix."""
    S = _symmetrized(W.components)
    block = np.einsum("ipkl,iqkl->pq", S, S)
    T = np.zeros((W.m, W.m))
    T[np.ix_(W.support, W.support)] = block
    return T


def weyl_invariant_check(W: WeylLike) -> WeylInvariantReport:
    C = W.components
    violations = [
        np.abs(C + np.einsum("jikl->ijkl", C)),
        np.abs(C + np.einsum("ijlk->ijkl", C)),
        np.abs(C - np.einsum("klij->ijkl", C)),
        np.abs(C + np.einsum("iklj->ijkl", C) + np.einsum("iljk->ijkl", C)),
    ]
    trace = np.einsum("ijil->jl", C)
    return WeylInvariantReport(
        max_symmetry_violation=float(max(v.max() for v in violations)),
        max_trace=float(np.abs(trace).max()),
        nondegeneracy_scalar=nondegeneracy_scalar(W),
    )


# ============================================================================
# Quadratic fields
# ============================================================================

def _check_point(x: np.ndarray, W: WeylLike) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (W.m + 1,):
        raise DomainError(f"Expected a point in R^{W.m + 1}, got shape {x.shape}")
    return x


def h_field(x, W: WeylLike) -> np.ndarray:
    """
    H_ij(x) = W_ikjl x_k x_l on tangential indices and H_na = 0.

    Depends on x' only; returns an n x n symmetric matrix.
    """
    x = _check_point(x, W)
    xs = x[list(W.support)]
    block = np.einsum("ikjl,k,l->ij", W.components, xs, xs)
    H = np.zeros((W.m + 1, W.m + 1))
    H[np.ix_(W.support, W.support)] = block
    return H


def hbar_field(x, W: WeylLike, f: ReductionPolynomial) -> np.ndarray:
    """
    f(|x'|^2) H(x).

    Raises:
        ConfigError: If deg f violates d < (n-6)/4 with n = m+1
    """
    f.check_degree(W.m + 1)
    x = _check_point(x, W)
    return float(f(np.dot(x[:-1], x[:-1]))) * h_field(x, W)


def cutoff_chi(t: float) -> float:
    """C^2 monotone cutoff: 1 for t <= 1, 0 for t >= 2, quintic smoothstep between."""
    if t <= 1.0:
        return 1.0
    if t >= 2.0:
        return 0.0
    s = t - 1.0
    return 1.0 - s ** 3 * (10.0 - 15.0 * s + 6.0 * s * s)


@dataclass(frozen=True)
class PerturbationSpec:
    W: WeylLike
    f: ReductionPolynomial
    mu: float
    lam: float
    rho: float

    def __post_init__(self):
        if not 0 < self.mu <= 1:
            raise ConfigError(f"mu must lie in (0, 1], got {self.mu}")
        if not 0 < self.lam <= self.rho <= 1:
            raise ConfigError(
                f"Need 0 < lambda <= rho <= 1, got lambda={self.lam}, rho={self.rho}"
            )
        self.f.check_degree(self.W.m + 1)

    @property
    def outer_radius(self) -> float:
        return min(2.0 * self.rho, 1.0)


def radial_bump(r: float, rho: float) -> float:
    """1 on r <= rho, 0 on r >= min(2 rho, 1), C^2 in between."""
    outer = min(2.0 * rho, 1.0)
    if r <= rho:
        return 1.0
    if r >= outer:
        return 0.0
    return cutoff_chi(1.0 + (r - rho) / (outer - rho))


def perturbation_h(x, spec: PerturbationSpec) -> np.ndarray:
    """mu lambda^{2d} f(lambda^{-2}|x'|^2) H(x) on B_rho, cut off radially to vanish outside B_{min(2rho,1)}."""
    x = _check_point(x, spec.W)
    bump = radial_bump(float(np.linalg.norm(x)), spec.rho)
    if bump == 0.0:
        return np.zeros((spec.W.m + 1, spec.W.m + 1))
    d = spec.f.d
    s = np.dot(x[:-1], x[:-1]) / spec.lam ** 2
    scale = spec.mu * spec.lam ** (2 * d) * float(spec.f(s)) * bump
    return scale * h_field(x, spec.W)


def perturbation_bound_constant(spec: PerturbationSpec, samples: int = 400, seed: int = 0) -> float:
    """Largest observed |h(x)| / (mu (lambda + |x|)^{2d+2}) over seeded points of the unit half-ball."""
    n = spec.W.m + 1
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        direction = rng.standard_normal(n)
        direction[-1] = abs(direction[-1])
        radius = 10.0 ** rng.uniform(-4.0, 0.0)
        x = radius * direction / np.linalg.norm(direction)
        value = np.linalg.norm(perturbation_h(x, spec))
        worst = max(worst, value / (spec.mu * (spec.lam + radius) ** (2 * spec.f.d + 2)))
    return float(worst)


def analytic_bound_constant(spec: PerturbationSpec) -> float:
    """|W|_F max_i |a_i|, which dominates |h(x)| / (mu (lambda + |x|)^{2d+2}) everywhere."""
    return float(np.linalg.norm(spec.W.components)) * max(abs(a) for a in spec.f.coeffs)


def log_sup_h_bound(spec: PerturbationSpec) -> float:
    """
    log of mu lambda^{2d} sup |f(lambda^{-2} r^2)| |W|_F r^2 over r <= R, R the outer support radius.

    Uses |H(x)| <= |W|_F |x'|^2 and lambda^{2d} |f(lambda^{-2} r^2)| <= sum_i |a_i| lambda^{2d-2i} r^{2i}.
    """
    d = spec.f.d
    R = spec.outer_radius
    terms = [math.log(abs(a)) + 2 * (d - i) * math.log(spec.lam) + 2 * i * math.log(R)
             for i, a in enumerate(spec.f.coeffs) if a != 0.0]
    top = max(terms)
    profile = top + math.log(math.fsum(math.exp(t - top) for t in terms))
    return (math.log(spec.mu) + profile
            + math.log(float(np.linalg.norm(spec.W.components))) + 2 * math.log(R))


# ============================================================================
# Glued field
# ============================================================================

def support_radius(N: int, cutoff_scale: float) -> Fraction:
    """Radius 2/(kappa N^2) outside which chi(kappa N^2 |x - x_N|) vanishes."""
    return Fraction(2) / (Fraction(cutoff_scale) * N * N)


def support_overlaps(N0: int, N_max: int, cutoff_scale: float = 5.0) -> list[tuple[int, int]]:
    """
    Neighbouring pairs (N, N+1) whose open support balls intersect, in exact arithmetic.

    Centres x_N = (1/N, 0, ..., 0) are collinear and the radii shrink like 1/N^2,
    so only neighbours can meet.
    """
    overlaps = []
    for N in range(N0, N_max):
        gap = Fraction(1, N) - Fraction(1, N + 1)
        if support_radius(N, cutoff_scale) + support_radius(N + 1, cutoff_scale) > gap:
            overlaps.append((N, N + 1))
    return overlaps


def dyadic_profile(f: ReductionPolynomial, N: int, s: float) -> float:
    """2^{-N} f(2^N s) = sum_i a_i 2^{N(i-1)} s^i, each power of two applied by ldexp."""
    return math.fsum(math.ldexp(a * s ** i, N * (i - 1)) for i, a in enumerate(f.coeffs))


def glued_field(x, W: WeylLike, f: ReductionPolynomial, N0: int,
                cutoff_scale: float = 5.0) -> np.ndarray:
    """
    sum_{N >= N0} chi(kappa N^2 |x - x_N|) 2^{-N} f(2^N |x' - x_N|^2) H(x - x_N), x_N = (1/N, 0, ..., 0).

    kappa = 4 is the classical choice, whose transition annuli meet; the default
    kappa = 5 keeps the supports pairwise disjoint for N >= 2.

    Raises:
        ConfigError: If N0 < 2 or two supports overlap
    """
    if N0 < 2:
        raise ConfigError(f"N0 must be at least 2, got {N0}")
    if support_overlaps(N0, N0 + 1, cutoff_scale):
        raise ConfigError(
            f"Supports of neighbouring terms overlap for N0={N0}, cutoff scale {cutoff_scale}"
        )
    x = _check_point(x, W)
    n = W.m + 1
    total = np.zeros((n, n))
    if x[0] <= 1e-12:
        return total
    guess = int(round(1.0 / x[0]))
    for N in range(max(N0, guess - 2), max(N0, guess + 3)):
        centre = np.zeros(n)
        centre[0] = 1.0 / N
        offset = x - centre
        t = cutoff_scale * N * N * float(np.linalg.norm(offset))
        if t >= 2.0:
            continue
        s = float(np.dot(offset[:-1], offset[:-1]))
        total += cutoff_chi(t) * dyadic_profile(f, N, s) * h_field(offset, W)
    return total


# ============================================================================
# Smallness quantities
# ============================================================================

def glued_parameters(N: int) -> tuple[float, float, float]:
    """(lambda, rho, mu) = (2^{-N/2}, (2N)^{-2}, 2^{-N})."""
    return 2.0 ** (-N / 2.0), (2.0 * N) ** -2, 2.0 ** (-N)


def smallness_exponent(mu: float, lam: float, rho: float, n: int) -> float:
    """Natural log of mu^{-2} lambda^{n-10} rho^{2-n}."""
    if min(mu, lam, rho) <= 0:
        raise DomainError("mu, lambda and rho must be positive")
    return -2.0 * math.log(mu) + (n - 10) * math.log(lam) + (2 - n) * math.log(rho)


@dataclass(frozen=True)
class SmallnessReport:
    sup_h: float
    sup_dh: float
    sup_d2h: float
    log_smallness: float
    log_sup_h_bound: float

    @property
    def sup_total(self) -> float:
        return self.sup_h + self.sup_dh + self.sup_d2h

    @property
    def log10_smallness(self) -> float:
        return self.log_smallness / math.log(10.0)

    @property
    def within_bound(self) -> bool:
        """Sampled sup |h| sits under the analytic bound."""
        return self.sup_h == 0.0 or math.log(self.sup_h) <= self.log_sup_h_bound + 1e-12


def smallness_report(spec: PerturbationSpec, n: Optional[int] = None,
                     samples: int = 64, seed: int = 0) -> SmallnessReport:
    """
    Sampled sup of |h|, |dh| and |d^2 h| over the support, the analytic log bound on
    sup |h| and log(mu^{-2} lambda^{n-10} rho^{2-n}).

    First derivatives use full central-difference gradients; second derivatives
    use the pure second differences along every axis.

    Raises:
        ConfigError: If deg f != 1
    """
    if spec.f.d != 1:
        raise ConfigError(f"The smallness report is defined for d = 1, got d={spec.f.d}")
    dim = spec.W.m + 1
    n = dim if n is None else n
    rng = np.random.default_rng(seed)
    step = 1e-3 * spec.rho
    sup_h = sup_dh = sup_d2h = 0.0
    for _ in range(samples):
        direction = rng.standard_normal(dim)
        direction[-1] = abs(direction[-1])
        x = spec.outer_radius * rng.uniform() ** (1.0 / dim) * direction / np.linalg.norm(direction)
        centre = perturbation_h(x, spec)
        sup_h = max(sup_h, float(np.linalg.norm(centre)))
        grad_sq = 0.0
        hess_sq = 0.0
        for c in range(dim):
            e = np.zeros(dim)
            e[c] = step
            plus = perturbation_h(x + e, spec)
            minus = perturbation_h(x - e, spec)
            grad_sq += float(np.sum(((plus - minus) / (2 * step)) ** 2))
            hess_sq += float(np.sum(((plus - 2 * centre + minus) / step ** 2) ** 2))
        sup_dh = max(sup_dh, math.sqrt(grad_sq))
        sup_d2h = max(sup_d2h, math.sqrt(hess_sq))
    log_small = smallness_exponent(spec.mu, spec.lam, spec.rho, n)
    logger.debug("Smallness: sup|h|=%.3g sup|dh|=%.3g sup|d2h|=%.3g log=%.3f",
                 sup_h, sup_dh, sup_d2h, log_small)
    bound = log_sup_h_bound(spec)
    if sup_h > 0.0 and math.log(sup_h) > bound + 1e-12:
        logger.warning("Sampled sup|h|=%.3g exceeds the analytic bound %.3g", sup_h, math.exp(bound))
    return SmallnessReport(sup_h, sup_dh, sup_d2h, log_small, bound)
