"""
Node definitions for the verification suite graph.

Contains node functions for:
- Exact critical-dimension certificates and routing
- Direct construction check over the (n, T_c) grid
- Reduced energy, xi-Hessian and local minimum at (0, 1)
- Sphere moment identities
- Bubble residuals and kernel norms
- Warped-product non-uniqueness example
"""
import logging
import math
from typing import Dict

import numpy as np

from bubble import bubble_check, kernel_norm_constancy
from curvature import block_weyl, random_weyl
from energy import F0_closed, F0_quadrature, hessian_xi, local_min_check, moment_rows
from nonuniq import (
    REFERENCE_SPEC,
    energy_gap,
    sc_infinity,
    sc_of_k,
    stereographic_volume_check,
    threshold_k,
)
from reduction import (
    ReductionPolynomial,
    certificate_scan,
    construct_f,
    i_polynomial,
    ipp1_closed_display,
    ipp_upper_bound,
    j1_closed_display,
    j_polynomial,
    minimal_certified_n,
    q_poly,
    ratio_bounds_violation,
)
from state import CheckRecord, VerificationState

logger = logging.getLogger("SUITE")

CRITICAL_DIMENSION = 62
CERTIFICATE_RANGE = range(25, 201)


def _record(stage: str, check: str, value: float, passed: bool) -> CheckRecord:
    status = "ok" if passed else "FAILED"
    logger.info("%s: %s = %.6g [%s]", stage, check, value, status)
    return {"stage": stage, "check": check, "value": float(value), "passed": bool(passed)}


# ============================================================================
# Certificates and routing
# ============================================================================

def certificates_node(state: VerificationState) -> Dict:
    """
    Runs the exact bound certificate over n in [25, 200] and the c_q ratio bounds.
    """
    certified = minimal_certified_n(CERTIFICATE_RANGE)
    checks = [
        _record("certificates", "q(62)", q_poly(62), q_poly(62) == 2628),
        _record("certificates", "q(61)", q_poly(61), q_poly(61) == -544),
        _record("certificates", "minimal certified n",
                certified if certified is not None else math.nan,
                certified == CRITICAL_DIMENSION),
    ]
    if state.get("quick"):
        n_values, offsets = (25, 62, 200), np.logspace(-2, 2, 5)
    else:
        n_values, offsets = CERTIFICATE_RANGE, np.logspace(-2, 2, 20)
    worst = ratio_bounds_violation(n_values, offsets)
    checks.append(_record("certificates", "moment ratio bounds worst excess", worst, worst <= 0.0))
    return {"certified_n": certified, "checks": checks}


def certificate_router(state: VerificationState) -> str:
    """
    Routes to the construction stages only when the certificate lands on n = 62.
    """
    if state.get("certified_n") == CRITICAL_DIMENSION:
        return "construction"
    logger.warning("Certificate did not find n=%d; skipping construction stages", CRITICAL_DIMENSION)
    return "moments"


# ============================================================================
# Construction, energy, Hessian
# ============================================================================

def construction_node(state: VerificationState) -> Dict:
    """
    Direct check a0 real, I(1) > 0, I'(1) = 0, I''(1) < 0, J(1) < 0 on the grid,
    plus the n = 62 second-variation displays against the reduced polynomials.
    """
    low, high = state["n_range"]
    if state.get("quick"):
        high = min(high, low + 8)
    result = certificate_scan(range(low, high + 1), state["tc_list"], state.get("threads"))
    checks = []
    for t in sorted(set(row.T_c for row in result.rows)):
        failures = sum(1 for row in result.rows if row.T_c == t and not row.direct_ok)
        checks.append(_record("construction", f"direct failures at T_c={t:g}", failures, failures == 0))
    checks.extend(_second_variation_checks(state["tc_list"][:1] if state.get("quick") else state["tc_list"]))
    return {"checks": checks}


def _second_variation_checks(tc_values) -> list:
    """I''(1) and J(1) at n = 62 from the closed displays against the reduced polynomials."""
    n = CRITICAL_DIMENSION
    worst_ipp = worst_j1 = 0.0
    bound_slack = math.inf
    for t in tc_values:
        f = construct_f(n, t)
        a0 = f.coeffs[0]
        poly = i_polynomial(n, t, f, normalized=True)
        direct = float(poly.deriv(2)(1.0))
        closed = ipp1_closed_display(n, t, a0, normalized=True)
        worst_ipp = max(worst_ipp, abs(closed - direct) / abs(direct))
        bound_slack = min(bound_slack, ipp_upper_bound(n, t, normalized=True) - closed)
        j_direct = float(j_polynomial(n, t, f, normalized=True)(1.0))
        worst_j1 = max(worst_j1, abs(j1_closed_display(n, t, normalized=True) - j_direct) / abs(j_direct))
    return [
        _record("construction", "I''(1) closed vs polynomial n=62", worst_ipp, worst_ipp <= 1e-11),
        _record("construction", "I''(1) upper bound slack n=62", bound_slack, bound_slack >= 0.0),
        _record("construction", "J(1) closed vs polynomial n=62", worst_j1, worst_j1 <= 1e-10),
    ]


def energy_node(state: VerificationState) -> Dict:
    """
    F(0, eps) closed form against quadrature at n in {13, 62}, T_c = -1.
    """
    eps_values = (1.0,) if state.get("quick") else (0.5, 1.0, 2.0)
    cases = [
        (13, ReductionPolynomial.linear(1.0)),
        (CRITICAL_DIMENSION, construct_f(CRITICAL_DIMENSION, -1.0)),
    ]
    checks = []
    for n, f in cases:
        worst = 0.0
        converged = True
        for eps in eps_values:
            closed = F0_closed(eps, n, -1.0, 1.0, f)
            res = F0_quadrature(eps, n, -1.0, 1.0, f)
            worst = max(worst, abs(res.value - closed) / abs(closed))
            converged = converged and res.converged
        checks.append(_record("energy", f"F0 closed vs quadrature n={n}", worst,
                              worst <= 1e-6 and converged))
    return {"checks": checks}


def hessian_node(state: VerificationState) -> Dict:
    """
    Strict local minimum at (0, 1) for n = 62 with a seeded block Weyl tensor.
    """
    n = CRITICAL_DIMENSION
    W = block_weyl(n - 1, state["seed"])
    tcs = (-1.0,) if state.get("quick") else (-0.1, -1.0, -10.0)
    checks = []
    for T_c in tcs:
        f = construct_f(n, T_c)
        report = local_min_check(n, T_c, W, f)
        checks.append(_record("hessian", f"local minimum at (0,1), T_c={T_c:g}",
                              report.hessian_min_eigenvalue, report.passed))
    if not state.get("quick"):
        hess = hessian_xi(1.0, n, -1.0, W, construct_f(n, -1.0), quadrature=True)
        worst = max(hess.j_rel_diff, hess.fprime_rel_diff)
        checks.append(_record("hessian", "Hessian scalars closed vs quadrature", worst,
                              worst <= 1e-6 and hess.converged))
    return {"checks": checks}


# ============================================================================
# Moments, bubble, non-uniqueness
# ============================================================================

def _index_pairs(m: int) -> list[tuple[int, int]]:
    return [(1, 1), (1, 2), (2, 3), (2, 4), (3, 3), (1, m), (m - 1, m), (m, m)]


def moments_node(state: VerificationState) -> Dict:
    """
    Sphere moment identities A-D at m in {4, 5, 6} over diagonal and off-diagonal (p, q)
    with mixed parities.
    """
    seeds = range(2) if state.get("quick") else range(10)
    radii = (1.0,) if state.get("quick") else (0.5, 1.0, 2.0)
    f = ReductionPolynomial.linear(2.0)
    checks = []
    for m in (4, 5, 6):
        worst = 0.0
        for seed in seeds:
            W = random_weyl(m, state["seed"] + seed)
            for r in radii:
                for p, q in _index_pairs(m):
                    rows = moment_rows(W, f, r, seed, p, q)
                    worst = max(worst, max(row.rel_err for row in rows))
        checks.append(_record("moments", f"identity max rel err m={m}", worst, worst <= 1e-10))
    return {"checks": checks}


def bubble_node(state: VerificationState) -> Dict:
    """
    Interior, boundary and Einstein residuals; kernel-norm constancy at n = 13.
    """
    samples = 20 if state.get("quick") else 100
    checks = []
    for n in (5, 13, CRITICAL_DIMENSION):
        report = bubble_check(n, -1.0, 1.0, samples, state["seed"])
        worst = max(report.max_interior, report.max_boundary, report.max_einstein)
        checks.append(_record("bubble", f"residual max n={n}", worst, report.passed()))
    if not state.get("quick"):
        params = [((0.0,) * 12, 1.0), ((0.3,) * 12, 3.0), ((0.0,) * 12, 0.5)]
        for a in (1, 13):
            norms = kernel_norm_constancy(13, -1.0, params, a)
            checks.append(_record("bubble", f"kernel norm spread a={a}", norms.max_spread,
                                  norms.max_spread <= 1e-6 and norms.converged))
    return {"checks": checks}


def nonuniq_node(state: VerificationState) -> Dict:
    """
    Stereographic volume identity, convention falsification and threshold k.
    """
    checks = []
    for n in (5, 6):
        err = stereographic_volume_check(n)
        checks.append(_record("nonuniq", f"stereographic volume n={n}", err, err <= 1e-8))
    wrong = stereographic_volume_check(5, convention="sphere_n_minus_1")
    checks.append(_record("nonuniq", "omega_n = |S^(n-1)| falsified", wrong, wrong > 0.1))

    report = threshold_k(REFERENCE_SPEC)
    checks.append(_record("nonuniq", "threshold k", report.threshold_k or math.nan,
                          report.found and report.margin > 1.0 and report.exceeds_sc_infinity))
    if report.found:
        gap10 = energy_gap(REFERENCE_SPEC, 10.0 * report.threshold_k)
        checks.append(_record("nonuniq", "I[1] - S_c(k) at 10x threshold", gap10,
                              gap10 > report.margin))
    limit = sc_infinity(REFERENCE_SPEC)
    gap = abs(sc_of_k(REFERENCE_SPEC, 1e6) - limit) / limit
    checks.append(_record("nonuniq", "S_c(1e6) gap to S_c(inf)", gap, gap <= 0.01))
    return {"checks": checks}
