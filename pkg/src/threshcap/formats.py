"""Text and JSON formats: point files, network documents, truth tables, reports."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import fields, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import Architecture, LayeredNetwork, PointSet, ThresholdMap, ThresholdUnit, TruthTable
from .reports import Bound, CapacityReport


class FormatError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"not an integer or p/q rational: {text!r}") from None
    return value


def format_rational(value) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def parse_points(text: str) -> PointSet:
    points, seen = [], {}
    dim = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            point = tuple(parse_rational(tok) for tok in line.split())
        except FormatError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if dim is None:
            dim = len(point)
        elif len(point) != dim:
            raise FormatError(f"line {lineno}: expected {dim} coordinates, got {len(point)}")
        if point in seen:
            raise FormatError(f"line {lineno}: duplicate of the point on line {seen[point]}")
        seen[point] = lineno
        points.append(point)
    if not points:
        raise FormatError("no points found")
    return PointSet(tuple(points), dim)


def load_point_set(source: str) -> PointSet:
    """``cube:n`` for ``H^n``, otherwise a path to a points file."""
    if source.startswith("cube:"):
        try:
            n = int(source[5:])
        except ValueError:
            raise FormatError(f"bad cube shorthand {source!r}") from None
        if n < 1:
            raise FormatError("cube dimension must be positive")
        return PointSet.cube(n)
    path = Path(source)
    if not path.is_file():
        raise FormatError(f"no such points file: {source}")
    return parse_points(path.read_text(encoding="utf-8"))


def parse_architecture(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError:
        raise FormatError(f"bad architecture {text!r}; expected e.g. 3,2,1") from None
    if not sizes or any(s < 1 for s in sizes):
        raise FormatError(f"bad architecture {text!r}")
    return sizes


def unit_to_json(u: ThresholdUnit) -> dict:
    return {"weights": [format_rational(w) for w in u.weights], "bias": format_rational(u.bias)}


def unit_from_json(doc: dict) -> ThresholdUnit:
    try:
        return ThresholdUnit(tuple(parse_rational(str(w)) for w in doc["weights"]), parse_rational(str(doc["bias"])))
    except (KeyError, TypeError):
        raise FormatError("a unit needs 'weights' and 'bias'") from None


def network_to_json(net: LayeredNetwork) -> dict:
    return {
        "architecture": list(net.architecture.sizes),
        "layers": [{"units": [unit_to_json(u) for u in layer.units]} for layer in net.layers],
    }


def network_from_json(doc: dict) -> LayeredNetwork:
    try:
        layers = tuple(ThresholdMap(tuple(unit_from_json(u) for u in layer["units"])) for layer in doc["layers"])
    except (KeyError, TypeError):
        raise FormatError("a network needs 'layers', each with 'units'") from None
    arch = doc.get("architecture")
    return LayeredNetwork(layers, Architecture(tuple(arch)) if arch is not None else None)


def load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise FormatError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def truth_table_to_json(t: TruthTable) -> dict:
    return {"n": t.n, "m": t.m, "values": [list(v) for v in t.values]}


def truth_table_from_json(doc: dict) -> TruthTable:
    try:
        return TruthTable(int(doc["n"]), int(doc["m"]), tuple(tuple(v) for v in doc["values"]))
    except (KeyError, TypeError):
        raise FormatError("a truth table needs 'n', 'm' and 'values'") from None


def plain(value: Any) -> Any:
    """JSON-safe form: big integers as decimal strings, rationals as ``p/q``."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        # keep small integers numeric; big ones would lose precision in JSON readers
        return value if abs(value) < 2 ** 53 else str(value)
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, CapacityReport):
        return report_to_dict(value)
    if isinstance(value, Bound):
        return bound_to_dict(value)
    if isinstance(value, LayeredNetwork):
        return network_to_json(value)
    if is_dataclass(value):
        return {f.name: plain(getattr(value, f.name)) for f in fields(value)}
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return str(value)


def bound_to_dict(b: Bound, count: int | None = None) -> dict:
    out = {
        "name": b.name,
        "kind": b.kind,
        "scale": b.scale,
        "value": str(b.value) if isinstance(b.value, int) else plain(b.value),
        "anchor": b.anchor,
        "hypotheses_hold": b.hypotheses_hold,
        "note": b.note,
    }
    if count is not None:
        out["holds"] = b.holds_for_count(count)
    return out


def report_to_dict(r: CapacityReport) -> dict:
    return {
        "subject": r.subject,
        "exact_count": None if r.exact_count is None else str(r.exact_count),
        "log2_exact": None if r.exact_count is None else f"{r.log2_exact:.12f}",
        "bounds": [bound_to_dict(b, r.exact_count) for b in r.bounds],
        "notes": list(r.notes),
    }


def _flatten(prefix: str, value: Any, rows: list) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(value, list) and value and all(isinstance(v, (dict, list)) for v in value):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, json.dumps(value) if isinstance(value, list) else ("" if value is None else str(value))))


BOUND_FIELDS = ["name", "kind", "scale", "value", "anchor", "hypotheses_hold", "note", "holds"]


def emit_report(payload: Any, fmt: str = "json") -> str:
    """Serialize a report (or any result) deterministically as json, csv or table text."""
    doc = plain(payload)
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    is_report = isinstance(doc, dict) and "bounds" in doc and "subject" in doc
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        if is_report:
            writer.writerow(BOUND_FIELDS)
            if doc["exact_count"] is not None:
                writer.writerow(["exact_count", "exact", "count", doc["exact_count"], "", "True", doc["subject"], ""])
            for b in doc["bounds"]:
                writer.writerow([b.get(f, "") for f in BOUND_FIELDS])
        else:
            rows: list = []
            _flatten("", doc, rows)
            writer.writerow(["key", "value"])
            writer.writerows(rows)
        return buf.getvalue()
    if fmt == "table":
        if is_report:
            buf.write(f"{doc['subject']}\n")
            if doc["exact_count"] is not None:
                buf.write(f"  exact count: {doc['exact_count']}  (log2 {doc['log2_exact']})\n")
            header = ["bound", "kind", "scale", "value", "valid", "holds"]
            rows = [[b["name"], b["kind"], b["scale"], str(b["value"]), "yes" if b["hypotheses_hold"] else "no",
                     {True: "yes", False: "NO"}.get(b.get("holds"), "-")] for b in doc["bounds"]]
            widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
            for r in [header] + rows:
                buf.write("  " + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
            for b in doc["bounds"]:
                buf.write(f"  [{b['name']}] {b['anchor']}" + (f"; {b['note']}" if b["note"] else "") + "\n")
            for note in doc["notes"]:
                buf.write(f"  note: {note}\n")
        else:
            rows = []
            _flatten("", doc, rows)
            width = max((len(k) for k, _ in rows), default=0)
            for k, v in rows:
                buf.write(f"{k.ljust(width)}  {v}\n")
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")
