"""Rendering command results as JSON, CSV or markdown.

JSON and CSV carry every number at full precision and nothing that varies
between runs, so identical config and seed give byte-identical files.
Markdown is the human view: values are rounded and wall-clock times shown.
"""

from __future__ import annotations

import csv
import io
import json

import jsonschema

from .commands import SCHEMA_VERSION, CommandResult
from .config import RunConfig

RESULT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "kind", "command", "config", "records"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"const": "nearopt-result"},
        "command": {"enum": ["scenario", "near-optimality", "bounds", "plan", "reproduce"]},
        "config": {"type": "object", "required": ["command"]},
        "records": {
            "type": "array",
            "items": {"type": "object", "required": ["schema_version"],
                      "properties": {"schema_version": {"const": SCHEMA_VERSION}}},
        },
        "comparisons": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["schema_version", "table", "cell", "reference", "computed",
                             "deviation", "tolerance", "passed"],
                "properties": {"passed": {"type": "boolean"},
                               "schema_version": {"const": SCHEMA_VERSION}},
            },
        },
        "passed": {"type": "boolean"},
    },
}


def result_document(result: CommandResult) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": "nearopt-result",
           "command": result.command, "config": result.config.to_dict(),
           "records": result.records}
    if result.comparisons:
        doc["comparisons"] = result.comparisons
        doc["passed"] = result.passed
    return doc


def to_json(result: CommandResult) -> str:
    doc = result_document(result)
    jsonschema.validate(doc, RESULT_SCHEMA)
    return json.dumps(doc, indent=2) + "\n"


def load_result(text: str) -> tuple[RunConfig, list[dict], list[dict]]:
    """Parse and validate a JSON result document."""
    doc = json.loads(text)
    jsonschema.validate(doc, RESULT_SCHEMA)
    return (RunConfig.from_dict(doc["config"], "<result>"), doc["records"],
            doc.get("comparisons", []))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def to_csv(result: CommandResult) -> str:
    """One row per record; for ``reproduce`` one row per compared cell."""
    rows = result.comparisons if result.command == "reproduce" else result.records
    buf = io.StringIO()
    if not rows:
        return ""
    cols = [c for c in rows[0] if c != "stages"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


# markdown --------------------------------------------------------------------


def _fmt(v, digits=4):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{digits}f}"
    return str(v)


def _vec(v, digits=4, pct=False):
    if v is None:
        return ""
    if pct:
        return ", ".join(f"{100 * x:.2f}%" for x in v)
    return ", ".join(f"{x:.{digits}f}" for x in v)


def _table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines)


def to_markdown(result: CommandResult) -> str:
    recs = result.records
    secs = result.seconds or [None] * len(recs)
    out = [f"## {result.command}", ""]
    if result.command == "scenario" or (result.command == "reproduce"
                                         and result.config.table in (1, 3)):
        rows = [[r["rule_label"], _vec(r["design"], 0), _vec(r["mortality"], 3),
                 _vec(r["prescription"], pct=True), _vec(r["per_arm_loss"], 3),
                 _vec(r["weighted_loss"]), _fmt(r["expected_loss"]), r["method"]]
                for r in recs]
        out.append(_table(["rule", "design", "mortality", "% prescribed", "loss per arm",
                           "probability x loss", "expected loss", "method"], rows))
    elif result.command in ("near-optimality", "reproduce"):
        rows = [[r["rule_label"], ":".join(map(str, r["design"])), _fmt(r["value"]),
                 _vec(r["argmax_mortality"], 4), _fmt(r["error_probability"], 3),
                 r["method"], "" if s is None else f"{s:.1f}"] for r, s in zip(recs, secs)]
        out.append(_table(["rule", "design", "near-optimality", "argmax mortality",
                           "error prob.", "method", "seconds"], rows))
    elif result.command == "bounds":
        rows = [[_fmt(r["V"], 3), str(r["L"]), str(r["n"]), _fmt(r["prop1"], 5),
                 _fmt(r["prop2"], 5), _fmt(r["value"], 5), r["which"]] for r in recs]
        out.append(_table(["V", "L", "n", "prop1", "prop2", "best", "selected"], rows))
        out += [""] + [f"- L={r['L']}, n={r['n']}: {r['rationale']}" for r in recs]
    elif result.command == "plan":
        rows = [[r["rule"], ":".join(map(str, r["shape"])), _fmt(r["target"]), str(r["n"]),
                 ":".join(map(str, r["arm_sizes"])), _fmt(r["value"], 5),
                 f"{r['bracket'][0]}..{r['bracket'][1]}", "yes" if r["monotone"] else "NO"]
                for r in recs]
        out.append(_table(["rule", "shape", "target", "n", "arm sizes", "near-optimality",
                           "bracket", "monotone"], rows))
        for r in recs:
            ev = ", ".join(f"{k}: {v:.5f}" for k, v in r["evaluations"])
            out += ["", f"- {r['rule']} evaluations: {ev}"]
    if result.comparisons:
        rows = [[c["cell"], f"{c['reference']:.4f}", f"{c['computed']:.5f}",
                 f"{c['deviation']:+.5f}", f"{c['tolerance']:g}",
                 "pass" if c["passed"] else "FAIL"] for c in result.comparisons]
        n_ok = sum(c["passed"] for c in result.comparisons)
        out += ["", f"### comparison with reference values ({n_ok}/{len(rows)} within tolerance)",
                "", _table(["cell", "reference", "computed", "deviation", "tolerance", ""], rows)]
    return "\n".join(out) + "\n"


def render(result: CommandResult, fmt: str) -> str:
    if fmt == "json":
        return to_json(result)
    if fmt == "csv":
        return to_csv(result)
    return to_markdown(result)
