"""
Blow-up Verification Toolkit

Command-line entry point. Every verification is a subcommand that writes a
machine-readable report; the suite subcommand runs all of them through a
LangGraph state graph.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""
import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import pandas as pd
from dotenv import load_dotenv
from langgraph.graph import END, StateGraph

from bubble import bubble_check
from config import load_toolkit_config, resolve_threads
from curvature import (
    PerturbationSpec,
    analytic_bound_constant,
    block_weyl,
    glued_parameters,
    nondegeneracy_scalar,
    perturbation_bound_constant,
    random_weyl,
    smallness_exponent,
    smallness_report,
    support_overlaps,
)
from energy import ENERGY_COLUMNS, MOMENT_COLUMNS, energy_profile, hessian_xi, moment_rows
from errors import ConfigError, DomainError, NoRealRootError
from nodes import (
    CERTIFICATE_RANGE,
    CRITICAL_DIMENSION,
    bubble_node,
    certificate_router,
    certificates_node,
    construction_node,
    energy_node,
    hessian_node,
    moments_node,
    nonuniq_node,
)
from nonuniq import (
    REFERENCE_SPEC,
    energy_gap,
    sc_infinity,
    sc_of_k,
    stereographic_volume_check,
    threshold_k,
)
from reduction import (
    DIMENSION_COLUMNS,
    ReductionPolynomial,
    certificate_scan,
    construct_f,
    minimal_certified_n,
)
from reports import format_table, render_report, write_report, rows_to_frame
from specfun import SERIES_SWITCHOVER, QuadratureSpec, c_q, half_line_moment_quadrature, half_line_moment_recursion
from state import VerificationState

logger = logging.getLogger("CLI")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

SUBCOMMANDS = ["scan", "cq", "energy-profile", "hessian", "moments", "bubble-check",
               "nonuniq", "glued", "suite"]

DEFAULT_TOLERANCES = {
    "scan": 1e-10,
    "cq": 1e-10,
    "energy-profile": 1e-6,
    "hessian": 1e-6,
    "moments": 1e-10,
    "bubble-check": 1e-9,
    "nonuniq": 1e-8,
    "glued": 0.0,
    "suite": 0.0,
}


# ============================================================================
# Argument parsing
# ============================================================================

def parse_n_values(text: str) -> list[int]:
    """'62', '60..70' or '5,13,62'."""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
            if low > high:
                raise ConfigError(f"Empty dimension range '{text}'")
            return list(range(low, high + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"Cannot parse dimensions '{text}'; use a, a..b or a,b,c") from None


def parse_tc_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"Cannot parse T_c list '{text}'") from None
    if not values or any(v >= 0 for v in values):
        raise ConfigError(f"T_c values must be negative, got '{text}'")
    return values


def parse_eps_grid(text: str) -> list[float]:
    """'a:b:step', inclusive of b up to rounding; values rounded to 12 decimals."""
    try:
        low, high, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise ConfigError(f"Cannot parse eps grid '{text}'; use a:b:step") from None
    if not (0 < low <= high and step > 0):
        raise ConfigError(f"Need 0 < a <= b and step > 0 in eps grid, got '{text}'")
    count = int(math.floor((high - low) / step + 1e-9)) + 1
    return [round(low + i * step, 12) for i in range(count)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blowup-toolkit", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--config", default="toolkit_config.json", help="Path to the JSON config")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    for name in SUBCOMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--n", "--n-range", dest="n", help="Dimension, a..b range or comma list")
        cmd.add_argument("--tc", help="Comma-separated negative T_c values")
        cmd.add_argument("--seed", type=int, help="Seed for random Weyl tensors and sample points")
        cmd.add_argument("--rel-tol", type=float, help="Override the pass tolerance")
        cmd.add_argument("--out", help="Write the report here instead of stdout")
        cmd.add_argument("--format", choices=["csv", "json"], help="Report format")
        if name == "energy-profile":
            cmd.add_argument("--eps", default="0.5:2:0.05", help="Grid a:b:step")
        if name == "hessian":
            cmd.add_argument("--eps", default="1:1:1", help="Grid a:b:step")
        if name == "moments":
            cmd.add_argument("--m", type=int, default=4, help="Boundary dimension of W")
            cmd.add_argument("--r", type=float, default=1.0, help="Sphere radius")
        if name == "suite":
            cmd.add_argument("--quick", action="store_true", help="Reduced grids")
    return parser


@dataclass
class RunConfig:
    subcommand: str
    n_values: list[int]
    tc_list: list[float]
    seed: int
    rel_tol: float
    out: Optional[str]
    fmt: str
    threads: Optional[int]
    settings: dict[str, Any] = field(default_factory=dict)
    eps: list[float] = field(default_factory=list)
    m: int = 4
    r: float = 1.0
    quick: bool = False

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(**self.settings["quadrature"])

    @property
    def energy_specs(self) -> tuple[QuadratureSpec, QuadratureSpec]:
        base = self.quadrature
        eq = self.settings["energy_quadrature"]
        return (base.with_tolerances(rel_tol=eq["inner_rel_tol"]),
                base.with_tolerances(rel_tol=eq["outer_rel_tol"]))


DEFAULT_N = {
    "cq": [62],
    "energy-profile": [62],
    "hessian": [62],
    "bubble-check": [5, 13, 62],
}


def make_run_config(args: argparse.Namespace, settings: dict[str, Any]) -> RunConfig:
    """
    Merge parsed flags over the loaded configuration.

    Raises:
        ConfigError: If a flag cannot be parsed or violates a precondition
    """
    name = args.subcommand
    if args.n is not None:
        n_values = parse_n_values(args.n)
    elif name == "scan":
        low, high = settings["scan"]["n_range"]
        n_values = list(range(low, high + 1))
    else:
        n_values = list(DEFAULT_N.get(name, [62]))
    tc_list = parse_tc_list(args.tc) if args.tc else list(settings["scan"]["tc_list"])
    rel_tol = args.rel_tol if args.rel_tol is not None else DEFAULT_TOLERANCES[name]
    if rel_tol < 0:
        raise ConfigError(f"--rel-tol must be non-negative, got {rel_tol}")
    cfg = RunConfig(
        subcommand=name,
        n_values=n_values,
        tc_list=tc_list,
        seed=args.seed if args.seed is not None else settings["seed"],
        rel_tol=rel_tol,
        out=args.out,
        fmt=args.format or settings["output_format"],
        threads=resolve_threads(settings),
        settings=settings,
    )
    if getattr(args, "eps", None):
        cfg.eps = parse_eps_grid(args.eps)
    if name == "moments":
        if args.m < 4:
            raise ConfigError(f"--m must be at least 4, got {args.m}")
        if not args.r > 0:
            raise ConfigError(f"--r must be positive, got {args.r}")
        cfg.m, cfg.r = args.m, args.r
    cfg.quick = bool(getattr(args, "quick", False))
    return cfg


def _emit(frame: pd.DataFrame, cfg: RunConfig) -> None:
    if cfg.out:
        path = write_report(frame, cfg.out, cfg.fmt)
        print(format_table(frame))
        logger.info("Report written to %s", path)
    else:
        sys.stdout.write(render_report(frame, cfg.fmt))


# ============================================================================
# Subcommands
# ============================================================================

def cmd_scan(cfg: RunConfig) -> int:
    """Rows for the requested grid; the threshold verdict always starts the certificate at n = 25."""
    result = certificate_scan(cfg.n_values, cfg.tc_list, cfg.threads)
    _emit(rows_to_frame(result.rows, DIMENSION_COLUMNS), cfg)
    stop = max(max(cfg.n_values), CERTIFICATE_RANGE.stop - 1)
    certified = minimal_certified_n(range(CERTIFICATE_RANGE.start, stop + 1))
    ok = certified == CRITICAL_DIMENSION and result.all_direct_ok
    if not ok:
        logger.error("Minimal certified n=%s, all direct checks ok=%s",
                     certified, result.all_direct_ok)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_cq(cfg: RunConfig) -> int:
    spec = cfg.quadrature
    switchover = cfg.settings["series_switchover"]
    rows = []
    ok = True
    for n in cfg.n_values:
        for t in cfg.tc_list:
            for q in range(3):
                moment = c_q(n, t, q, switchover, spec)
                alpha = (n - 5 - 2 * q) / 2.0
                recursion = half_line_moment_recursion(alpha, -t) if -t > SERIES_SWITCHOVER else None
                quadrature = half_line_moment_quadrature(alpha, -t, spec)
                rel_rec = abs(math.expm1(recursion.log_value - moment.log_value)) if recursion else 0.0
                rel_quad = abs(math.expm1(quadrature.log_value - moment.log_value))
                ok = ok and max(rel_rec, rel_quad) <= cfg.rel_tol
                rows.append({"n": n, "T_c": t, "q": q, "alpha": alpha, "value": moment.value,
                             "log_value": moment.log_value, "method": moment.method,
                             "rel_diff_recursion": rel_rec, "rel_diff_quadrature": rel_quad})
    _emit(rows_to_frame(rows), cfg)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_energy_profile(cfg: RunConfig) -> int:
    inner, outer = cfg.energy_specs
    frames = []
    ok = True
    for n in cfg.n_values:
        nondeg = nondegeneracy_scalar(block_weyl(n - 1, cfg.seed))
        for t in cfg.tc_list:
            f = construct_f(n, t)
            profile = energy_profile(n, t, nondeg, f, cfg.eps, threads=cfg.threads,
                                     inner=inner, outer=outer)
            frame = rows_to_frame(profile.samples, ENERGY_COLUMNS)
            frame.insert(0, "T_c", t)
            frame.insert(0, "n", n)
            frames.append(frame)
            ok = ok and profile.max_rel_diff <= cfg.rel_tol \
                and all(s.converged for s in profile.samples)
            if any(abs(e - 1.0) < 1e-12 for e in cfg.eps[1:-1]):
                ok = ok and profile.local_min_at(1.0)
    _emit(pd.concat(frames, ignore_index=True), cfg)
    return EXIT_OK if ok else EXIT_FAILED


HESSIAN_COLUMNS = [
    "n", "T_c", "eps", "term_A_scalar", "term_B_scalar", "term_C_scalar", "min_eigenvalue",
    "j_integral_closed", "j_integral_quadrature", "fprime_integral_closed",
    "fprime_integral_quadrature", "j_rel_diff", "fprime_rel_diff", "converged",
]


def cmd_hessian(cfg: RunConfig) -> int:
    inner, outer = cfg.energy_specs
    rows = []
    ok = True
    for n in cfg.n_values:
        W = block_weyl(n - 1, cfg.seed)
        for t in cfg.tc_list:
            f = construct_f(n, t)
            for eps in cfg.eps:
                rep = hessian_xi(eps, n, t, W, f, quadrature=True, inner=inner, outer=outer)
                rows.append({
                    "n": n, "T_c": t, "eps": eps,
                    "term_A_scalar": rep.term_A_scalar, "term_B_scalar": rep.term_B_scalar,
                    "term_C_scalar": rep.term_C_scalar, "min_eigenvalue": rep.min_eigenvalue,
                    "j_integral_closed": rep.j_integral_closed,
                    "j_integral_quadrature": rep.j_integral_quadrature,
                    "fprime_integral_closed": rep.fprime_integral_closed,
                    "fprime_integral_quadrature": rep.fprime_integral_quadrature,
                    "j_rel_diff": rep.j_rel_diff, "fprime_rel_diff": rep.fprime_rel_diff,
                    "converged": rep.converged,
                })
                ok = ok and rep.converged and rep.min_eigenvalue > 0 \
                    and max(rep.j_rel_diff, rep.fprime_rel_diff) <= cfg.rel_tol
    _emit(rows_to_frame(rows, HESSIAN_COLUMNS), cfg)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_moments(cfg: RunConfig) -> int:
    W = random_weyl(cfg.m, cfg.seed)
    rows = moment_rows(W, ReductionPolynomial.linear(2.0), cfg.r, cfg.seed)
    _emit(rows_to_frame(rows, MOMENT_COLUMNS), cfg)
    return EXIT_OK if all(row.rel_err <= cfg.rel_tol for row in rows) else EXIT_FAILED


def cmd_bubble_check(cfg: RunConfig) -> int:
    reports = [bubble_check(n, t, 1.0, 100, cfg.seed) for n in cfg.n_values for t in cfg.tc_list[:1]]
    _emit(rows_to_frame(reports), cfg)
    return EXIT_OK if all(r.passed(cfg.rel_tol) for r in reports) else EXIT_FAILED


def cmd_nonuniq(cfg: RunConfig) -> int:
    rows = []
    for n in (5, 6):
        err = stereographic_volume_check(n)
        rows.append({"quantity": f"stereographic_rel_err_n{n}", "value": err, "passed": err <= cfg.rel_tol})
    wrong = stereographic_volume_check(5, convention="sphere_n_minus_1")
    rows.append({"quantity": "falsified_convention_rel_err_n5", "value": wrong, "passed": wrong > 0.1})
    report = threshold_k(REFERENCE_SPEC)
    limit = sc_infinity(REFERENCE_SPEC)
    gap = abs(sc_of_k(REFERENCE_SPEC, 1e6) - limit) / limit
    nan = float("nan")
    gap10 = energy_gap(REFERENCE_SPEC, 10.0 * report.threshold_k) if report.found else nan
    rows += [
        {"quantity": "threshold_k", "value": report.threshold_k or nan, "passed": report.found},
        {"quantity": "I1_at_threshold", "value": report.I1_at_threshold or nan, "passed": report.found},
        {"quantity": "Sck_at_threshold", "value": report.Sck_at_threshold or nan, "passed": report.found},
        {"quantity": "I1_exceeds_Sc_infinity", "value": report.I1_at_threshold or nan,
         "passed": report.exceeds_sc_infinity},
        {"quantity": "gap_at_10x_threshold", "value": gap10, "passed": report.found and gap10 > report.margin},
        {"quantity": "Sc_infinity", "value": limit, "passed": True},
        {"quantity": "Sc_gap_at_1e6", "value": gap, "passed": gap <= 0.01},
    ]
    _emit(rows_to_frame(rows), cfg)
    return EXIT_OK if all(row["passed"] for row in rows) else EXIT_FAILED


def cmd_glued(cfg: RunConfig) -> int:
    """
    Support overlaps of the glued field for N0 = 2..10^4, the smallness exponent at N = 20,
    and the measured constant C in |h| <= C mu (lambda + |x|)^{2d+2} at N = 30 on R^12.
    """
    scale = cfg.settings["glued_cutoff_scale"]
    overlaps = support_overlaps(2, 10 ** 4, scale)
    lam, rho, mu = glued_parameters(20)
    lam30, rho30, mu30 = glued_parameters(30)
    spec = PerturbationSpec(random_weyl(11, cfg.seed), ReductionPolynomial.linear(2.0),
                            mu=mu30, lam=lam30, rho=rho30)
    measured = perturbation_bound_constant(spec, seed=cfg.seed)
    analytic = analytic_bound_constant(spec)
    report = smallness_report(spec, samples=16, seed=cfg.seed)
    rows = [
        {"quantity": "cutoff_scale", "value": scale, "passed": True},
        {"quantity": "overlapping_pairs", "value": len(overlaps), "passed": not overlaps},
        {"quantity": "log_smallness_N20_n62", "value": smallness_exponent(mu, lam, rho, 62), "passed": True},
        {"quantity": "bound_constant_measured_N30", "value": measured,
         "passed": 0.0 < measured <= analytic * (1 + 1e-12)},
        {"quantity": "bound_constant_analytic_N30", "value": analytic, "passed": True},
        {"quantity": "log_sup_h_sampled_N30", "value": math.log(report.sup_h) if report.sup_h > 0 else math.nan,
         "passed": report.within_bound},
        {"quantity": "log_sup_h_bound_N30", "value": report.log_sup_h_bound, "passed": True},
    ]
    _emit(rows_to_frame(rows), cfg)
    ok = all(row["passed"] for row in rows)
    return EXIT_OK if ok else EXIT_FAILED


def build_suite_graph():
    """
    certificates -> (construction -> energy -> hessian | skip) -> moments -> bubble -> nonuniq -> END
    """
    workflow = StateGraph(VerificationState)

    workflow.add_node("certificates", certificates_node)
    workflow.add_node("construction", construction_node)
    workflow.add_node("energy", energy_node)
    workflow.add_node("hessian", hessian_node)
    workflow.add_node("moments", moments_node)
    workflow.add_node("bubble", bubble_node)
    workflow.add_node("nonuniq", nonuniq_node)

    workflow.set_entry_point("certificates")
    workflow.add_conditional_edges("certificates", certificate_router, ["construction", "moments"])
    workflow.add_edge("construction", "energy")
    workflow.add_edge("energy", "hessian")
    workflow.add_edge("hessian", "moments")
    workflow.add_edge("moments", "bubble")
    workflow.add_edge("bubble", "nonuniq")
    workflow.add_edge("nonuniq", END)
    return workflow.compile()


def cmd_suite(cfg: RunConfig) -> int:
    app = build_suite_graph()
    low, high = cfg.settings["scan"]["n_range"]
    initial: VerificationState = {
        "checks": [],
        "seed": cfg.seed,
        "threads": cfg.threads,
        "quick": cfg.quick,
        "n_range": [low, high],
        "tc_list": cfg.tc_list,
        "certified_n": None,
    }
    final = app.invoke(initial)
    frame = rows_to_frame(final["checks"], ["stage", "check", "value", "passed"])
    _emit(frame, cfg)
    return EXIT_OK if all(c["passed"] for c in final["checks"]) else EXIT_FAILED


COMMANDS = {
    "scan": cmd_scan,
    "cq": cmd_cq,
    "energy-profile": cmd_energy_profile,
    "hessian": cmd_hessian,
    "moments": cmd_moments,
    "bubble-check": cmd_bubble_check,
    "nonuniq": cmd_nonuniq,
    "glued": cmd_glued,
    "suite": cmd_suite,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="[%(name)s] %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        settings = load_toolkit_config(args.config)
        cfg = make_run_config(args, settings)
        logger.info("Running %s (seed=%d, threads=%s)", cfg.subcommand, cfg.seed, cfg.threads)
        return COMMANDS[cfg.subcommand](cfg)
    except (ConfigError, DomainError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except NoRealRootError as e:
        logger.error("%s", e)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
