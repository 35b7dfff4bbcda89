"""Command-line front door: scenario files, task dispatch, report emission.

A scenario JSON file declares a dimension, an operator family, a generator
(either per-axis kernel problems or an explicit series literal) and a list
of tasks.  Tasks run in order and each one emits a report (JSON by default;
CSV where the report has a tabular profile) to stdout or to ``--out``.

Exit codes: 0 all pass-type tasks passed, 1 a task failed or raised,
2 scenario/format errors, 3 internal errors.  Output is bytewise
reproducible for equal scenario + seed.
"""

from __future__ import annotations

import argparse
import sys
import json
import math
import warnings
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Sequence, TextIO

from .completeness import (
    derivative_span,
    approximate_target,
    rank_report,
    sample_box,
    translate_span,
)
from .fhc import LadderVector, convergence_report
from .kernel import AxisKernelProblem, joint_kernel, verify_kernel
from .operators import CROperator, verify_commutation
from .orbit import iterate_orbit, measure_visits
from .serialize import (
    cr_operator_from_json,
    problem_from_json,
    report_to_csv,
    report_to_dict,
    series_from_json,
    series_to_json,
    to_json_text,
)
from .series import (
    ApproximationWarning,
    SemiNormSpec,
    TruncatedSeries,
    with_cutoff,
    zero_series,
)

EXIT_OK = 0
EXIT_TASK_FAILED = 1
EXIT_PARSE = 2
EXIT_INTERNAL = 3

TASK_KINDS = ("verify-cr", "kernel", "complete", "approximate", "fhc", "orbit")

BUNDLED = ("gaussian1d", "gaussian2d", "airy2d", "remark3", "mixed")

DENSITY_DISCLAIMER = (
    "density_proxy is a finite-horizon PROXY: no finite run can certify a "
    "positive lower density of hitting times"
)


class ScenarioError(ValueError):
    """Scenario file does not parse or violates the schema."""


@dataclass
class Scenario:
    dimension: int
    truncation: int
    tolerance: float
    rng_seed: int
    operators: list[CROperator]
    kernel_problems: list[AxisKernelProblem] | None
    explicit_generator: TruncatedSeries | None
    tasks: list[dict]


def _require(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        raise ScenarioError(f"missing key {key!r} in {where}")
    return obj[key]


def parse_scenario(obj: Any) -> Scenario:
    if not isinstance(obj, dict):
        raise ScenarioError("scenario must be a JSON object")
    try:
        dimension = int(_require(obj, "dimension", "scenario"))
        truncation = int(_require(obj, "truncation", "scenario"))
        tolerance = float(obj.get("tolerance", 1e-8))
        rng_seed = int(obj.get("rng_seed", 0))
        ops = [cr_operator_from_json(o) for o in _require(obj, "operators", "scenario")]
        generator = _require(obj, "generator", "scenario")
        tasks = list(_require(obj, "tasks", "scenario"))
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc

    for op in ops:
        if op.dim != dimension:
            raise ScenarioError(
                f"operator on axis {op.axis} has dim {op.dim}, scenario "
                f"declares {dimension}"
            )
    kernel_problems: list[AxisKernelProblem] | None = None
    explicit: TruncatedSeries | None = None
    if "kernel" in generator:
        try:
            kernel_problems = [problem_from_json(p) for p in generator["kernel"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"malformed kernel generator: {exc}") from exc
        if len(kernel_problems) != dimension:
            raise ScenarioError(
                f"kernel generation needs one axis problem per coordinate: "
                f"got {len(kernel_problems)} for dimension {dimension}"
            )
        axes_covered = sorted(op.axis for op in ops)
        if axes_covered != list(range(1, dimension + 1)):
            raise ScenarioError(
                "kernel generation needs one operator per axis, got axes "
                f"{axes_covered}"
            )
    elif "explicit" in generator:
        try:
            explicit = series_from_json(generator["explicit"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"malformed explicit generator: {exc}") from exc
        if explicit.dim != dimension:
            raise ScenarioError(
                f"explicit generator has dim {explicit.dim}, scenario "
                f"declares {dimension}"
            )
    else:
        raise ScenarioError('generator must contain "kernel" or "explicit"')
    for i, task in enumerate(tasks):
        if not isinstance(task, dict) or "task" not in task:
            raise ScenarioError(f'task {i} must be an object with a "task" key')
        if task["task"] not in TASK_KINDS:
            raise ScenarioError(
                f"unknown task kind {task['task']!r}; expected one of {TASK_KINDS}"
            )
    return Scenario(
        dimension=dimension,
        truncation=truncation,
        tolerance=tolerance,
        rng_seed=rng_seed,
        operators=ops,
        kernel_problems=kernel_problems,
        explicit_generator=explicit,
        tasks=tasks,
    )


def load_scenario(source: str) -> Scenario:
    """Load from a filesystem path or a bundled scenario name.

    Bare names (``gaussian2d``) and ``scenarios/<name>.json`` paths fall
    back to the files shipped inside the package.
    """
    path = Path(source)
    text: str | None = None
    if path.is_file():
        text = path.read_text()
    else:
        name = path.stem if path.suffix == ".json" else source
        if name in BUNDLED:
            text = (
                resources.files("entireops")
                .joinpath(f"scenarios/{name}.json")
                .read_text()
            )
    if text is None:
        raise ScenarioError(
            f"scenario {source!r} not found (bundled names: {', '.join(BUNDLED)})"
        )
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    return parse_scenario(obj)


def generator_series(scn: Scenario, degree: int) -> TruncatedSeries:
    """The scenario generator, exact out to the requested degree."""
    if scn.kernel_problems is not None:
        return joint_kernel([replace(p, degree=degree) for p in scn.kernel_problems])
    f = scn.explicit_generator
    assert f is not None
    if not f.is_polynomial and f.exact_degree < degree:
        raise ScenarioError(
            f"explicit generator is exact to degree {f.exact_degree} but the "
            f"task needs {degree}"
        )
    return with_cutoff(f, degree) if f.cutoff != degree else f


def _series_argument(scn: Scenario, value: Any, degree: int) -> TruncatedSeries:
    if value == "generator" or value is None:
        return generator_series(scn, degree)
    if value == "zero":
        return zero_series(scn.dimension, degree)
    return series_from_json(value)


# ---------------------------------------------------------------------------
# task runners: each returns (report object, payload dict, passed)
# ---------------------------------------------------------------------------


def _run_verify_cr(scn: Scenario, task: dict, ctx: dict):
    probe = int(task.get("probe_degree", 8))
    threshold = float(task.get("max_residual", 1e-12))
    report = verify_commutation(scn.operators, probe, tolerance=threshold)
    return report, report_to_dict(report), report.passed


def _run_kernel(scn: Scenario, task: dict, ctx: dict):
    if scn.kernel_problems is None:
        raise ScenarioError("kernel task needs a kernel generator")
    degree = int(task.get("degree", scn.truncation))
    f = generator_series(scn, degree)
    threshold = float(task.get("max_residual", 1e-12))
    report = verify_kernel(scn.operators, f, tolerance=threshold)
    payload = report_to_dict(report)
    payload["series"] = series_to_json(f)
    return report, payload, report.passed


def _run_complete(scn: Scenario, task: dict, ctx: dict):
    trunc = int(_require(task, "truncation", "complete task"))
    max_order = int(task.get("max_order", trunc))
    tolerance = ctx["tolerance"] if ctx["tolerance"] is not None else float(
        task.get("tolerance", scn.tolerance)
    )
    mode = task.get("mode", "derivative")
    if mode == "derivative":
        f = generator_series(scn, trunc + max_order)
        span = derivative_span(f, trunc, max_order)
    elif mode == "translate":
        f = generator_series(scn, trunc)
        ambient = math.comb(trunc + scn.dimension, scn.dimension)
        count = int(task.get("samples", 3 * ambient))
        low, high = task.get("box", (-1.0, 1.0))
        samples = sample_box(scn.dimension, count, ctx["seed"], low, high)
        with warnings.catch_warnings():
            # asking for translate mode on a truncation accepts approximate rows
            warnings.simplefilter("ignore", ApproximationWarning)
            span = translate_span(f, trunc, samples)
    else:
        raise ScenarioError(f"unknown completeness mode {mode!r}")
    report = rank_report(span, tolerance)
    payload = report_to_dict(report)
    if "trajectory" in task:
        offset = max_order - trunc
        rows = []
        for n in task["trajectory"]:
            n = int(n)
            fn = generator_series(scn, 2 * n + offset)
            rep_n = rank_report(derivative_span(fn, n, n + offset), tolerance)
            rows.append(
                {
                    "N": n,
                    "rank": rep_n.rank,
                    "ambient": rep_n.ambient_dim,
                    "complete_at_truncation": rep_n.complete_at_truncation,
                }
            )
        payload["trajectory"] = rows
    passed = True
    if "expect_complete" in task:
        passed = report.complete_at_truncation == bool(task["expect_complete"])
    if "expect_rank" in task:
        passed = passed and report.rank == int(task["expect_rank"])
    return report, payload, passed


def _run_approximate(scn: Scenario, task: dict, ctx: dict):
    target = series_from_json(_require(task, "target", "approximate task"))
    trunc = int(task.get("truncation", target.cutoff))
    max_order = int(task.get("max_order", trunc))
    f = generator_series(scn, trunc + max_order)
    result = approximate_target(f, target, trunc, max_order)
    threshold = float(task.get("max_residual", 1e-10))
    return result, report_to_dict(result), result.residual <= threshold


def _run_fhc(scn: Scenario, task: dict, ctx: dict):
    if scn.kernel_problems is None:
        raise ScenarioError("fhc task needs a kernel generator")
    problems = tuple(scn.kernel_problems)
    if "terms" in task:
        terms = {
            tuple(t["idx"]): complex(t["re"], t.get("im", 0.0))
            for t in task["terms"]
        }
    else:
        terms = {(0,) * scn.dimension: 1.0}
    x = LadderVector(problems, terms)
    axis = int(task.get("axis", 1))
    default_eps = 2.0 * max(1.0 / abs(a) for a in x.ladder_constants)
    spec = SemiNormSpec(
        m=int(task.get("m", 1)),
        epsilon=float(task.get("epsilon", default_eps)),
    )
    kmax = int(task.get("kmax", 12))
    degree = int(task.get("realization_degree", 6))
    report = convergence_report(x, axis, spec, kmax, degree)
    passed = report.stable
    if "max_kth_root" in task:
        passed = passed and report.kth_roots[-1] <= float(task["max_kth_root"])
    return report, report_to_dict(report), passed


def _run_orbit(scn: Scenario, task: dict, ctx: dict):
    axis = int(task.get("axis", 1))
    candidates = [op for op in scn.operators if op.axis == axis]
    if not candidates:
        raise ScenarioError(f"no operator on axis {axis} for orbit task")
    op = candidates[0]
    degree = int(task.get("degree", scn.truncation))
    x = _series_argument(scn, task.get("initial", "generator"), degree)
    steps = int(task.get("steps", 5))
    record = iterate_orbit(op, x, steps)
    spec = SemiNormSpec(
        m=int(task.get("m", 1)), epsilon=float(task.get("epsilon", 2.0))
    )
    delta = float(task.get("delta", 0.1))
    target = _series_argument(scn, task.get("target", "zero"), x.cutoff)
    annotated = measure_visits(record, target, delta, spec)
    payload = report_to_dict(annotated)
    payload["note"] = DENSITY_DISCLAIMER
    passed = True
    if "min_density" in task:
        passed = annotated.density_proxy >= float(task["min_density"])
    if "max_density" in task:
        passed = passed and annotated.density_proxy <= float(task["max_density"])
    return annotated, payload, passed


_RUNNERS = {
    "verify-cr": _run_verify_cr,
    "kernel": _run_kernel,
    "complete": _run_complete,
    "approximate": _run_approximate,
    "fhc": _run_fhc,
    "orbit": _run_orbit,
}


def execute_tasks(
    scn: Scenario,
    tasks: Sequence[dict],
    *,
    fmt: str = "json",
    tolerance: float | None = None,
    seed: int | None = None,
) -> tuple[int, list[tuple[str, str]]]:
    """Run tasks in order; returns (exit code, [(task name, report text)])."""
    if fmt not in ("json", "csv"):
        raise ScenarioError(f"unsupported format {fmt!r}")
    outputs: list[tuple[str, str]] = []
    all_passed = True
    for i, task in enumerate(tasks):
        name = task["task"]
        ctx = {
            "tolerance": tolerance,
            "seed": (seed if seed is not None else scn.rng_seed) + i,
        }
        try:
            report, payload, passed = _RUNNERS[name](scn, task, ctx)
        except ScenarioError:
            raise
        except (ValueError, OverflowError) as exc:
            outputs.append(
                (
                    name,
                    to_json_text({"task": name, "passed": False, "error": str(exc)}),
                )
            )
            all_passed = False
            continue
        if fmt == "csv":
            text = report_to_csv(report)  # raises ValueError for unsupported kinds
        else:
            text = to_json_text({"task": name, "passed": passed, **payload})
        outputs.append((name, text))
        all_passed = all_passed and passed
    return (EXIT_OK if all_passed else EXIT_TASK_FAILED), outputs


def run_scenario(
    source: str,
    *,
    fmt: str = "json",
    out: str | None = None,
    tolerance: float | None = None,
    seed: int | None = None,
    stream: TextIO | None = None,
) -> int:
    """Load a scenario, run every task, and emit one report per task."""
    stream = stream if stream is not None else sys.stdout
    scn = load_scenario(source)
    code, outputs = execute_tasks(
        scn, scn.tasks, fmt=fmt, tolerance=tolerance, seed=seed
    )
    _emit(outputs, fmt, out, stream)
    return code


def _emit(
    outputs: list[tuple[str, str]], fmt: str, out: str | None, stream: TextIO
) -> None:
    ext = "json" if fmt == "json" else "csv"
    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for i, (name, text) in enumerate(outputs):
            (out_dir / f"{i:02d}_{name}.{ext}").write_text(text)
        return
    for _, text in outputs:
        stream.write(text)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", help="scenario path or bundled name")
    parser.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )
    parser.add_argument("--out", default=None, help="write reports into a directory")
    parser.add_argument(
        "--tolerance", type=float, default=None, help="override rank tolerance"
    )
    parser.add_argument("--seed", type=int, default=None, help="override rng seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entireops",
        description=(
            "operator calculus on truncated entire-function series: "
            "commutation checks, joint kernels, completeness ranks, "
            "convergence diagnostics and orbit statistics"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run every task of a scenario file")
    _add_common(p)

    p = sub.add_parser("verify-cr", help="commutator residuals on monomials")
    _add_common(p)
    p.add_argument("--probe-degree", type=int, default=8)
    p.add_argument("--max-residual", type=float, default=1e-12)

    p = sub.add_parser("kernel", help="solve and verify the joint kernel")
    _add_common(p)
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--max-residual", type=float, default=1e-12)

    p = sub.add_parser("complete", help="derivative/translate span rank")
    _add_common(p)
    p.add_argument("--truncation", type=int, default=4)
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--mode", choices=("derivative", "translate"), default="derivative")
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("approximate", help="least-squares derivative combination")
    _add_common(p)
    p.add_argument(
        "--target-monomial",
        required=True,
        help="comma-separated exponents of the target monomial, e.g. 1 or 1,0",
    )
    p.add_argument("--truncation", type=int, default=3)
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--max-residual", type=float, default=1e-10)

    p = sub.add_parser("fhc", help="ladder convergence diagnostics")
    _add_common(p)
    p.add_argument("--axis", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--kmax", type=int, default=12)
    p.add_argument("--realization-degree", type=int, default=6)
    p.add_argument("--max-kth-root", type=float, default=None)

    p = sub.add_parser("orbit", help="iterate an operator and report visits")
    _add_common(p)
    p.add_argument("--axis", type=int, default=1)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=2.0)
    p.add_argument("--degree", type=int, default=None)

    return parser


def _task_from_args(args: argparse.Namespace) -> dict:
    kind = args.command
    task: dict[str, Any] = {"task": kind}
    if kind == "verify-cr":
        task["probe_degree"] = args.probe_degree
        task["max_residual"] = args.max_residual
    elif kind == "kernel":
        if args.degree is not None:
            task["degree"] = args.degree
        task["max_residual"] = args.max_residual
    elif kind == "complete":
        task["truncation"] = args.truncation
        if args.max_order is not None:
            task["max_order"] = args.max_order
        task["mode"] = args.mode
        if args.samples is not None:
            task["samples"] = args.samples
    elif kind == "approximate":
        idx = [int(e) for e in args.target_monomial.split(",")]
        task["target"] = {
            "dim": len(idx),
            "cutoff": max(sum(idx), args.truncation),
            "polynomial": True,
            "coeffs": [{"idx": idx, "re": 1.0, "im": 0.0}],
        }
        task["truncation"] = args.truncation
        if args.max_order is not None:
            task["max_order"] = args.max_order
        task["max_residual"] = args.max_residual
    elif kind == "fhc":
        task["axis"] = args.axis
        task["m"] = args.m
        if args.epsilon is not None:
            task["epsilon"] = args.epsilon
        task["kmax"] = args.kmax
        task["realization_degree"] = args.realization_degree
        if args.max_kth_root is not None:
            task["max_kth_root"] = args.max_kth_root
    elif kind == "orbit":
        task["axis"] = args.axis
        task["steps"] = args.steps
        task["delta"] = args.delta
        task["m"] = args.m
        task["epsilon"] = args.epsilon
        if args.degree is not None:
            task["degree"] = args.degree
    return task


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_scenario(
                args.scenario,
                fmt=args.format,
                out=args.out,
                tolerance=args.tolerance,
                seed=args.seed,
            )
        scn = load_scenario(args.scenario)
        task = _task_from_args(args)
        code, outputs = execute_tasks(
            scn,
            [task],
            fmt=args.format,
            tolerance=args.tolerance,
            seed=args.seed,
        )
        _emit(outputs, args.format, args.out, sys.stdout)
        return code
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        # unsupported format / report kind surfaces as a usage error
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:  # noqa: BLE001 - report and exit 3
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
