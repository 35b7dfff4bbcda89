"""JSON wire formats and deterministic report emission.

Emission rules: stable field ordering (keys are written in insertion
order, and every builder here inserts them in a fixed order), floats
printed with 17 significant digits, index lists graded-lex sorted.  The
emitted text is therefore bytewise reproducible for equal inputs.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Sequence

from .completeness import ApproximationResult, CompletenessReport
from .fhc import ConvergenceReport
from .kernel import AxisKernelProblem, KernelReport
from .operators import CommutationReport, ConvolutionSymbol, CROperator, WeylOperator
from .orbit import OrbitRecord
from .series import TruncatedSeries, graded_key, make_series


# ---------------------------------------------------------------------------
# value forms
# ---------------------------------------------------------------------------


def _pair(c: complex) -> list[float]:
    c = complex(c)
    return [c.real, c.imag]


def _coeff_entries(table: Mapping, keys: Sequence) -> list[dict]:
    out = []
    for idx in sorted(keys, key=graded_key):
        c = complex(table[idx])
        out.append({"idx": list(idx), "re": c.real, "im": c.imag})
    return out


def series_to_json(f: TruncatedSeries) -> dict:
    return {
        "dim": f.dim,
        "cutoff": f.cutoff,
        "polynomial": f.is_polynomial,
        "coeffs": _coeff_entries(f.coeffs, list(f.coeffs)),
    }


def series_from_json(obj: Mapping) -> TruncatedSeries:
    entries = [
        (tuple(e["idx"]), complex(e["re"], e.get("im", 0.0)))
        for e in obj["coeffs"]
    ]
    return make_series(
        int(obj["dim"]), int(obj["cutoff"]), entries, bool(obj["polynomial"])
    )


def symbol_to_json(sym: ConvolutionSymbol) -> list[dict]:
    return _coeff_entries(sym.bcoeffs, list(sym.bcoeffs))


def symbol_from_json(dim: int, entries: Sequence[Mapping]) -> ConvolutionSymbol:
    coeffs = {
        tuple(e["idx"]): complex(e["re"], e.get("im", 0.0)) for e in entries
    }
    return ConvolutionSymbol(dim, coeffs)


def cr_operator_to_json(op: CROperator) -> dict:
    return {
        "dim": op.dim,
        "axis": op.axis,
        "a": _pair(op.a),
        "symbol": symbol_to_json(op.conv),
    }


def cr_operator_from_json(obj: Mapping) -> CROperator:
    dim = int(obj["dim"])
    a = obj["a"]
    return CROperator(
        dim=dim,
        axis=int(obj["axis"]),
        a=complex(a[0], a[1]),
        conv=symbol_from_json(dim, obj["symbol"]),
    )


def weyl_operator_to_json(op: WeylOperator) -> dict:
    terms = []
    for zpow, dpow in op.sorted_keys():
        c = op.terms[(zpow, dpow)]
        terms.append(
            {"zpow": list(zpow), "dpow": list(dpow), "re": c.real, "im": c.imag}
        )
    return {"dim": op.dim, "terms": terms}


def weyl_operator_from_json(obj: Mapping) -> WeylOperator:
    dim = int(obj["dim"])
    return WeylOperator.from_terms(
        dim,
        [
            (complex(t["re"], t.get("im", 0.0)), tuple(t["zpow"]), tuple(t["dpow"]))
            for t in obj["terms"]
        ],
    )


def problem_to_json(p: AxisKernelProblem) -> dict:
    return {
        "charpoly": [_pair(c) for c in p.charpoly],
        "a": _pair(p.a),
        "seeds": [_pair(s) for s in p.seeds],
        "degree": p.degree,
    }


def problem_from_json(obj: Mapping) -> AxisKernelProblem:
    return AxisKernelProblem(
        charpoly=tuple(complex(c[0], c[1]) for c in obj["charpoly"]),
        a=complex(obj["a"][0], obj["a"][1]),
        seeds=tuple(complex(s[0], s[1]) for s in obj["seeds"]),
        degree=int(obj["degree"]),
    )


# ---------------------------------------------------------------------------
# report payloads
# ---------------------------------------------------------------------------


def report_to_dict(report: Any) -> dict:
    """Fixed-key-order payload for each report type."""
    if isinstance(report, CommutationReport):
        pairs = [
            {"op_axis": j, "partial_axis": k, "residual": r}
            for (j, k), r in sorted(report.residuals.items())
        ]
        return {
            "probe_degree": report.probe_degree,
            "residuals": pairs,
            "max_residual": report.max_residual,
            "tolerance": report.tolerance,
            "passed": report.passed,
        }
    if isinstance(report, KernelReport):
        return {
            "axes": list(report.axes),
            "residuals": list(report.residuals),
            "max_residual": report.max_residual,
            "tolerance": report.tolerance,
            "passed": report.passed,
        }
    if isinstance(report, CompletenessReport):
        return {
            "rank": report.rank,
            "ambient": report.ambient_dim,
            "complete_at_truncation": report.complete_at_truncation,
            "N": report.truncation,
            "max_order": report.max_order,
            "tolerance": report.tolerance,
            "diagnostics": list(report.singular_values),
        }
    if isinstance(report, ApproximationResult):
        return {
            "orders": [list(n) for n in report.orders],
            "coefficients": [_pair(c) for c in report.coefficients],
            "residual": report.residual,
        }
    if isinstance(report, ConvergenceReport):
        return {
            "axis": report.axis,
            "m": report.m,
            "epsilon": report.epsilon,
            "bound": report.bound,
            "u": list(report.u),
            "ratios": list(report.ratios),
            "kth_roots": list(report.kth_roots),
            "partial_sums": list(report.partial_sums),
            "stable": report.stable,
        }
    if isinstance(report, OrbitRecord):
        return {
            "steps": report.steps,
            "hits": list(report.hits) if report.hits is not None else [],
            "density_proxy": report.density_proxy,
            "distances": list(report.distances) if report.distances is not None else [],
        }
    raise TypeError(f"no JSON payload defined for {type(report).__name__}")


def report_to_csv(report: Any) -> str:
    """CSV body for the report kinds that have a tabular profile."""
    if isinstance(report, CompletenessReport):
        lines = ["index,singular_value"]
        for i, s in enumerate(report.singular_values):
            lines.append(f"{i},{_fmt_float(s)}")
        return "\n".join(lines) + "\n"
    if isinstance(report, ConvergenceReport):
        lines = ["k,u,ratio"]
        for k, u in enumerate(report.u):
            ratio = "" if k == 0 or report.ratios[k - 1] is None else _fmt_float(
                report.ratios[k - 1]
            )
            lines.append(f"{k},{_fmt_float(u)},{ratio}")
        return "\n".join(lines) + "\n"
    if isinstance(report, OrbitRecord):
        raise ValueError("csv unsupported for complex series")
    raise ValueError(f"csv unsupported for {type(report).__name__}")


# ---------------------------------------------------------------------------
# deterministic JSON text
# ---------------------------------------------------------------------------


def _fmt_float(v: float) -> str:
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite float {v} cannot be serialized")
    return format(v, ".17g")


def to_json_text(value: Any, indent: int = 2) -> str:
    """Serialize with insertion-order keys and 17-significant-digit floats."""
    out: list[str] = []
    _write_json(value, out, 0, indent)
    out.append("\n")
    return "".join(out)


def _write_json(value: Any, out: list[str], level: int, indent: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(repr(value))
    elif isinstance(value, float):
        out.append(_fmt_float(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(value.items()):
            if not isinstance(k, str):
                raise TypeError(f"JSON object keys must be strings, got {k!r}")
            out.append(f"{pad}{json.dumps(k)}: ")
            _write_json(v, out, level + 1, indent)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(f"{close_pad}}}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        flat = all(
            isinstance(v, (int, float, str, bool, type(None))) for v in value
        )
        if flat:
            parts = []
            for v in value:
                sub: list[str] = []
                _write_json(v, sub, 0, indent)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(value):
            out.append(pad)
            _write_json(v, out, level + 1, indent)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(f"{close_pad}]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")
