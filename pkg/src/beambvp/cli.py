"""Command-line front end.

Subcommands:

* ``verify-lemmas``: grid checks of the kernel inequalities plus cone
  checks on random nonnegative loads; exit 0 iff everything holds.
* ``solve FILE``: Picard solve cross-checked against the collocation
  oracle; writes a solution CSV and prints a summary block.
* ``analyze FILE``: growth-limit estimates and existence-criterion
  certificates for the problem's nonlinearity.
* ``reproduce-examples``: runs analyze + solve for the two bundled
  example problems and prints a combined report.

Exit codes: 0 ok, 1 lemma violation, 2 hypothesis violation,
3 parse error, 4 solver non-convergence.

Problem files are flat ``key = value`` text with ``#`` comments; keys
are f, a, theta, grid_n, quad_panels, tol, max_iter, u0.  All reals in
CSV output carry 17 significant digits and reruns are bit-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import hypotheses, kernel, solver
from .errors import HypothesisViolation, NumericError
from .exprlang import ExpressionFn, ExprEvalError, ExprSyntaxError, parse
from .grid import GridFunction
from .kernel import KernelContext
from .linear import cone_ratio, solve_linear
from .quadrature import QuadratureSettings
from .solver import SolveConfig

EXIT_OK = 0
EXIT_LEMMA = 1
EXIT_HYPOTHESIS = 2
EXIT_PARSE = 3
EXIT_NONCONVERGENCE = 4

_RNG_SEED = 20240801
_DEFAULT_THETAS = (0.1, 0.25, 0.4)


class ProblemError(ValueError):
    """Malformed problem file (unknown key, bad literal, missing field)."""


@dataclass(frozen=True)
class ProblemFile:
    f: ExpressionFn
    a: ExpressionFn
    theta: float = 0.25
    grid_n: int = 800
    quad_panels: int = 200
    tol: float = 1e-10
    max_iter: int = 500
    u0: Union[str, float] = "zero"

    @property
    def quad(self) -> QuadratureSettings:
        return QuadratureSettings(panels=self.quad_panels)

    def config(self, u0_override: Optional[str] = None) -> SolveConfig:
        u0 = parse_u0(u0_override) if u0_override is not None else self.u0
        return SolveConfig(
            n=self.grid_n, tol=self.tol, max_iter=self.max_iter, u0=u0
        )


def parse_u0(descriptor: str) -> Union[str, float]:
    """Initial-guess descriptor: "zero" or "constant <c>"."""
    words = descriptor.split()
    if words == ["zero"]:
        return "zero"
    if len(words) == 2 and words[0] == "constant":
        try:
            value = float(words[1])
        except ValueError:
            raise ProblemError(f"bad constant in u0 descriptor {descriptor!r}") from None
        if value < 0:
            raise ProblemError(f"u0 constant must be >= 0, got {value}")
        return value
    raise ProblemError(f"unknown u0 descriptor {descriptor!r} (use 'zero' or 'constant <c>')")


def parse_problem(text: str, origin: str = "<problem>") -> ProblemFile:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ProblemError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in raw:
            raise ProblemError(f"{origin}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    for required in ("f", "a"):
        if required not in raw:
            raise ProblemError(f"{origin}: missing required key {required!r}")

    def take_float(key: str, default: float) -> float:
        if key not in raw:
            return default
        try:
            return float(raw.pop(key))
        except ValueError:
            raise ProblemError(f"{origin}: bad numeric value for {key!r}") from None

    def take_int(key: str, default: int) -> int:
        if key not in raw:
            return default
        try:
            return int(raw.pop(key))
        except ValueError:
            raise ProblemError(f"{origin}: bad integer value for {key!r}") from None

    try:
        f = parse(raw.pop("f"), "u")
        a = parse(raw.pop("a"), "t")
    except ExprSyntaxError as exc:
        raise ProblemError(f"{origin}: {exc}") from exc
    problem = ProblemFile(
        f=f,
        a=a,
        theta=take_float("theta", 0.25),
        grid_n=take_int("grid_n", 800),
        quad_panels=take_int("quad_panels", 200),
        tol=take_float("tol", 1e-10),
        max_iter=take_int("max_iter", 500),
        u0=parse_u0(raw.pop("u0")) if "u0" in raw else "zero",
    )
    if raw:
        raise ProblemError(f"{origin}: unknown keys {sorted(raw)}")
    if not 0.0 < problem.theta < 0.5:
        raise ProblemError(f"{origin}: theta must lie in (0, 1/2), got {problem.theta}")
    if problem.grid_n < 20 or problem.grid_n % 2 != 0:
        raise ProblemError(f"{origin}: grid_n must be even and >= 20, got {problem.grid_n}")
    if problem.quad_panels < 1:
        raise ProblemError(f"{origin}: quad_panels must be >= 1")
    if not problem.tol > 0 or problem.max_iter < 1:
        raise ProblemError(f"{origin}: tol must be > 0 and max_iter >= 1")
    return problem


def load_problem(path: str) -> ProblemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ProblemError(f"cannot read problem file {path}: {exc}") from exc
    return parse_problem(text, origin=path)


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(cell) for cell in row) + "\n")


# ---------------------------------------------------------------------------
# verify-lemmas


def _kernel_grid_checks(thetas: Sequence[float], n: int, sign: float) -> list[dict]:
    """Grid checks of kernel nonnegativity, two-sided bound, boundary identity.

    ``sign`` = -1 flips the kernel (test hook for exercising the failure
    path); every check then reports its violation honestly.
    """
    ts = np.linspace(0.0, 1.0, n + 1)
    g_mat = sign * kernel.green_matrix(ts, ts)  # rows t, cols s
    g_env = ts * (1.0 - ts) ** 2 / 6.0
    results = []

    worst = int(np.argmin(g_mat))
    wi, wj = np.unravel_index(worst, g_mat.shape)
    value = float(g_mat[wi, wj])
    results.append(
        dict(check="nonnegativity", theta=None, value=value, limit=-1e-14,
             ok=value >= -1e-14, t=float(ts[wi]), s=float(ts[wj]))
    )

    for theta in thetas:
        inner = (ts >= theta - 1e-12) & (ts <= 1.0 - theta + 1e-12)
        block = g_mat[inner, :]
        lower_gap = block - (theta**3) * g_env[None, :]
        upper_gap = g_env[None, :] - block
        for name, gap in (("lower-bound", lower_gap), ("upper-bound", upper_gap)):
            worst = int(np.argmin(gap))
            wi, wj = np.unravel_index(worst, gap.shape)
            value = float(gap[wi, wj])
            results.append(
                dict(check=name, theta=theta, value=value, limit=-1e-12,
                     ok=value >= -1e-12, t=float(ts[inner][wi]), s=float(ts[wj]))
            )

    boundary_gap = float(np.max(np.abs(g_mat[-1, :] - g_env)))
    wj = int(np.argmax(np.abs(g_mat[-1, :] - g_env)))
    results.append(
        dict(check="boundary-identity", theta=None, value=boundary_gap, limit=1e-14,
             ok=boundary_gap < 1e-14, t=1.0, s=float(ts[wj]))
    )
    return results


def _random_nonneg_poly(rng: np.random.Generator, degree: int) -> np.ndarray:
    """Coefficients of a polynomial >= 0.05 on [0, 1]."""
    coeffs = rng.uniform(-1.0, 1.0, degree + 1)
    xs = np.linspace(0.0, 1.0, 512)
    low = float(np.min(np.polynomial.polynomial.polyval(xs, coeffs)))
    coeffs[0] += 0.05 - low
    return coeffs


def _cone_checks(thetas: Sequence[float], n: int) -> list[dict]:
    """Lemma check: solutions of the linear problem for random nonnegative
    loads stay nonnegative and satisfy the cone inequality."""
    rng = np.random.default_rng(_RNG_SEED)
    a = parse("t^2", "t")
    results = []
    loads = [_random_nonneg_poly(rng, 4) for _ in range(20)]
    for theta in thetas:
        ctx = kernel.make_context(a, theta=theta)
        worst_margin, worst_min, worst_case = np.inf, np.inf, -1
        for case, coeffs in enumerate(loads):
            y = GridFunction(n, np.polynomial.polynomial.polyval(
                np.linspace(0.0, 1.0, n + 1), coeffs))
            u = solve_linear(y, ctx)
            check = cone_ratio(u, ctx)
            margin = check.min_inner - check.threshold * check.norm
            if margin < worst_margin:
                worst_margin, worst_case = margin, case
            worst_min = min(worst_min, u.min())
        results.append(
            dict(check="cone-inequality", theta=theta, value=worst_margin, limit=-1e-10,
                 ok=worst_margin >= -1e-10, t=None, s=float(worst_case))
        )
        results.append(
            dict(check="solution-nonneg", theta=theta, value=worst_min, limit=-1e-10,
                 ok=worst_min >= -1e-10, t=None, s=None)
        )
    return results


def cmd_verify_lemmas(args) -> int:
    thetas = args.theta or list(_DEFAULT_THETAS)
    sign = -1.0 if args.corrupt_kernel else 1.0
    results = _kernel_grid_checks(thetas, args.grid, sign)
    results += _cone_checks(thetas, min(args.grid * 2, 400))
    print(f"kernel inequality checks on a {args.grid + 1} point grid, "
          f"thetas {', '.join(_fmt(t) for t in thetas)}")
    failed = False
    for res in results:
        status = "ok " if res["ok"] else "FAIL"
        where = ""
        if res["t"] is not None:
            where = f" at (t={_fmt(res['t'])}, s={_fmt(res['s'])}, theta={_fmt(res['theta'])})"
        print(f"  [{status}] {res['check']:<18} worst {_fmt(res['value'])}"
              f" (limit {_fmt(res['limit'])}){where}")
        failed = failed or not res["ok"]
    if args.report:
        _write_csv(
            args.report,
            ["check", "theta", "worst", "limit", "ok", "t", "s"],
            [[r["check"], r["theta"], r["value"], r["limit"], r["ok"], r["t"], r["s"]]
             for r in results],
        )
        print(f"report written to {args.report}")
    print("verify-lemmas:", "FAIL" if failed else "PASS")
    return EXIT_LEMMA if failed else EXIT_OK


# ---------------------------------------------------------------------------
# solve


def _solution_csv_rows(
    u: GridFunction, f: ExpressionFn, ctx: KernelContext
) -> list[list[float]]:
    n = u.n
    try:
        au = solver.apply_A(u, f, ctx).values
    except (HypothesisViolation, NumericError, ValueError):
        au = np.full(n + 1, np.nan)
    residual = np.full(n + 1, np.nan)
    try:
        fvals = np.array([f(max(float(x), 0.0)) for x in u.values])
        residual[2:-2] = np.abs(solver.fourth_difference(u.values, u.h) + fvals[2:-2])
    except (ExprEvalError, OverflowError):
        pass  # diverged iterates can overflow f; leave the column as nan
    ts = u.ts
    return [[float(ts[i]), float(u.values[i]), float(au[i]), float(residual[i])]
            for i in range(n + 1)]


def _solve_problem(problem: ProblemFile, u0_override: Optional[str]) -> dict:
    """Shared by cmd_solve and cmd_reproduce_examples."""
    h1h2 = hypotheses.check_h1_h2(problem.f, problem.a, problem.quad)
    ctx = kernel.make_context(problem.a, theta=problem.theta, quad=problem.quad)
    config = problem.config(u0_override)
    report = solver.picard_solve(problem.f, ctx, config)
    colloc = solver.collocation_oracle(problem.f, ctx, config)
    agreement = float(np.max(np.abs(report.solution.values - colloc.solution.values)))
    bound_at_start = solver.norm_bound_check(config.initial_guess(), problem.f, ctx)
    return dict(
        h1h2=h1h2, ctx=ctx, config=config, report=report, colloc=colloc,
        agreement=agreement, bound_at_start=bound_at_start,
    )


def _print_solve_summary(problem: ProblemFile, outcome: dict) -> None:
    ctx: KernelContext = outcome["ctx"]
    report = outcome["report"]
    colloc = outcome["colloc"]
    h1h2 = outcome["h1h2"]
    tol_interior = solver.interior_tolerance(problem.grid_n, report.solution.sup_norm())
    lines = [
        ("f", problem.f.source),
        ("a", problem.a.source),
        ("theta", ctx.theta),
        ("grid_n", problem.grid_n),
        ("alpha", ctx.alpha),
        ("beta", ctx.beta),
        ("hypothesis_h1", h1h2.h1),
        ("hypothesis_h2", h1h2.h2),
        ("status", report.status),
        ("iterations", report.iterations),
        ("final_delta", report.delta_trace[-1] if report.delta_trace else None),
        ("solution_sup_norm", report.solution.sup_norm()),
        ("trivial_fixed_point", report.trivial),
        ("residual_integral", report.residual_integral),
        ("residual_ode_interior", report.residual_ode.interior),
        ("residual_ode_interior_tol", tol_interior),
        ("residual_ode_bc", report.residual_ode.bc),
        ("cone_min_inner", report.cone.min_inner),
        ("cone_threshold_x_norm", report.cone.threshold * report.cone.norm),
        ("cone_ratio", report.cone.ratio),
        ("cone_satisfied", report.cone.satisfied),
        ("norm_bound_final", report.norm_bound),
        ("norm_bound_at_initial_guess", outcome["bound_at_start"].bound),
        ("collocation_status", colloc.status),
        ("collocation_newton_iterations", colloc.iterations),
        ("collocation_residual", colloc.residual),
        ("oracle_agreement_sup", outcome["agreement"]),
    ]
    for key, value in lines:
        print(f"{key} = {_fmt(value)}")


def cmd_solve(args) -> int:
    problem = load_problem(args.file)
    outcome = _solve_problem(problem, args.u0)
    report = outcome["report"]

    out_path = args.out or (Path(args.file).stem + ".solution.csv")
    rows = _solution_csv_rows(report.solution, problem.f, outcome["ctx"])
    _write_csv(out_path, ["t", "u", "Au", "fourth_diff_residual"], rows)
    if args.plot_data:
        _write_csv(args.plot_data, ["t", "u"], [row[:2] for row in rows])

    _print_solve_summary(problem, outcome)
    print(f"solution written to {out_path}")

    if not (outcome["h1h2"].h1 and outcome["h1h2"].h2):
        return EXIT_HYPOTHESIS
    if report.status != "converged" or outcome["colloc"].status != "converged":
        return EXIT_NONCONVERGENCE
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze


def _print_analysis(problem: ProblemFile, h1h2, report: hypotheses.HypothesisReport) -> list[str]:
    def estimate_line(name, est):
        if est.divergent:
            return f"{name} = divergent"
        flag = "converged" if est.converged else "not converged"
        return f"{name} = {_fmt(est.value)} ({flag})"

    superlinear = report.f0_zero_applicable and report.finf_estimate.divergent
    sublinear = report.f0_estimate.divergent and report.finf_zero_applicable
    lines = [
        f"f = {problem.f.source}",
        f"a = {problem.a.source}",
        f"hypothesis_h1 = {_fmt(h1h2.h1)}",
        f"hypothesis_h2 = {_fmt(h1h2.h2)}",
        f"alpha = {_fmt(report.alpha)}",
        f"beta = {_fmt(report.beta)}",
        estimate_line("f0", report.f0_estimate),
        estimate_line("finf", report.finf_estimate),
        f"epsilon = {_fmt(report.epsilon)}",
        f"criterion_f0_zero_applicable = {_fmt(report.f0_zero_applicable)}",
        f"rho1 = {_fmt(report.rho1)}",
        f"criterion_finf_zero_applicable = {_fmt(report.finf_zero_applicable)}",
        f"bounded_case = {_fmt(report.bounded_case)}",
        f"L = {_fmt(report.L)}",
        f"eta = {_fmt(report.eta)}",
        f"rho2 = {_fmt(report.rho2)}",
        f"sigma = {_fmt(report.sigma)}",
        f"rho_hat2 = {_fmt(report.rho_hat2)}",
        f"predecessor_superlinear_applicable = {_fmt(superlinear)}  # needs f0 = 0 and finf divergent",
        f"predecessor_sublinear_applicable = {_fmt(sublinear)}  # needs f0 divergent and finf = 0",
    ]
    for line in lines:
        print(line)
    return lines


def cmd_analyze(args) -> int:
    problem = load_problem(args.file)
    h1h2 = hypotheses.check_h1_h2(problem.f, problem.a, problem.quad)
    if not h1h2.h2:
        print(f"hypothesis H2 fails: alpha = {_fmt(h1h2.alpha)} or negative weight")
        return EXIT_HYPOTHESIS
    ctx = kernel.make_context(problem.a, theta=problem.theta, quad=problem.quad)
    report = hypotheses.build_report(problem.f, ctx)
    lines = _print_analysis(problem, h1h2, report)
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
        print(f"analysis written to {args.out}")
    if not h1h2.h1:
        return EXIT_HYPOTHESIS
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce-examples


def bundled_problem(name: str) -> ProblemFile:
    text = resources.files("beambvp.fixtures").joinpath(f"{name}.problem").read_text()
    return parse_problem(text, origin=f"<bundled:{name}>")


def cmd_reproduce_examples(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    exit_code = EXIT_OK
    for name in ("example_a", "example_b"):
        problem = bundled_problem(name)
        if args.theta is not None:
            problem = dataclasses.replace(problem, theta=args.theta)
        if args.grid is not None:
            problem = dataclasses.replace(problem, grid_n=args.grid)
        print(f"=== {name}: f = {problem.f.source}, a = {problem.a.source} ===")
        ctx = kernel.make_context(problem.a, theta=problem.theta, quad=problem.quad)
        h1h2 = hypotheses.check_h1_h2(problem.f, problem.a, problem.quad)
        hyp_report = hypotheses.build_report(problem.f, ctx)
        _print_analysis(problem, h1h2, hyp_report)

        outcome = _solve_problem(problem, None)
        report = outcome["report"]
        _print_solve_summary(problem, outcome)
        csv_path = out_dir / f"{name}.solution.csv"
        _write_csv(csv_path, ["t", "u", "Au", "fourth_diff_residual"],
                   _solution_csv_rows(report.solution, problem.f, outcome["ctx"]))
        print(f"solution written to {csv_path}")

        # contrast the certified criterion with the computed fixed point
        applicable = hyp_report.f0_zero_applicable or hyp_report.finf_zero_applicable
        ratio_sup = max(r for _, r in hyp_report.f0_estimate.samples + hyp_report.finf_estimate.samples)
        contraction = ratio_sup * (1.0 / 72.0) / (1.0 - ctx.alpha)
        print(f"criterion_certified = {_fmt(applicable)}")
        print(f"computed_fixed_point_norm = {_fmt(report.solution.sup_norm())}")
        if contraction < 1.0 and report.trivial:
            print(
                "note: a certified criterion asserts existence of a positive solution, "
                "while the computed fixed point is trivial. With f(u)/u <= "
                f"{_fmt(ratio_sup)} on the probe grid, every fixed point obeys "
                f"||u|| <= {_fmt(contraction)} * ||u||, so the iteration can only "
                "reach u = 0; both facts are reported here without adjudication."
            )
        print()
        if report.status != "converged" or outcome["colloc"].status != "converged":
            exit_code = exit_code or EXIT_NONCONVERGENCE
        if not (h1h2.h1 and h1h2.h2):
            exit_code = exit_code or EXIT_HYPOTHESIS
    return exit_code


# ---------------------------------------------------------------------------


def _theta_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad theta list {text!r}") from None
    if not values or not all(0.0 < t < 0.5 for t in values):
        raise argparse.ArgumentTypeError("thetas must lie in (0, 1/2)")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beambvp",
        description="Solve and verify a fourth-order beam problem with an "
        "integral boundary condition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify-lemmas", help="grid checks of the kernel inequalities")
    p_verify.add_argument("--theta", type=_theta_list, default=None,
                          help="comma-separated thetas in (0, 1/2)")
    p_verify.add_argument("--grid", type=int, default=200, help="grid intervals (default 200)")
    p_verify.add_argument("--report", default=None, help="optional CSV report path")
    p_verify.add_argument("--corrupt-kernel", action="store_true", help=argparse.SUPPRESS)
    p_verify.set_defaults(func=cmd_verify_lemmas)

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("file")
    p_solve.add_argument("--u0", default=None, help="initial guess: 'zero' or 'constant <c>'")
    p_solve.add_argument("--out", default=None, help="solution CSV path")
    p_solve.add_argument("--plot-data", default=None, help="optional (t, u) CSV path")
    p_solve.set_defaults(func=cmd_solve)

    p_analyze = sub.add_parser("analyze", help="growth analysis of a problem file")
    p_analyze.add_argument("file")
    p_analyze.add_argument("--out", default=None, help="optional report path")
    p_analyze.set_defaults(func=cmd_analyze)

    p_repro = sub.add_parser("reproduce-examples", help="run the bundled example problems")
    p_repro.add_argument("--theta", type=float, default=None)
    p_repro.add_argument("--grid", type=int, default=None)
    p_repro.add_argument("--out-dir", default=".", help="directory for CSV output")
    p_repro.set_defaults(func=cmd_reproduce_examples)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HypothesisViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ProblemError, ExprSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
