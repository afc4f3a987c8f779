"""JSON file formats (complex numbers as ``[re, im]``, floats with 17 significant digits)."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from tfq.errors import DomainError, ParseError, ShapeError
from tfq.groups import FiniteAbelianGroup, Subgroup, make_group, parse_subgroup
from tfq.transforms import Signal, ZakArray
from tfq.windows import Lattice, Window, WHCoefficients, check_window, window_from_rational_phases


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    return format(x, ".17g")


def dumps(obj, indent=0) -> str:
    """Deterministic JSON with fixed float formatting.

    Dicts keep insertion order; nested arrays are broken across lines only in
    the top two levels.
    """
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        inner = [dumps(v, indent + 1) for v in obj]
        if indent < 2 and any(isinstance(v, (list, tuple, dict)) for v in obj):
            return "[\n" + ",\n".join(f"{pad}  {s}" for s in inner) + "\n" + pad + "]"
        return "[" + ", ".join(inner) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write(doc, path=None) -> str:
    text = dumps(doc) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def complex_list(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=np.complex128).reshape(-1)]


def complex_array(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ShapeError("complex values must be a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def _group(doc) -> FiniteAbelianGroup:
    try:
        return make_group(doc["group"])
    except KeyError as exc:
        raise ParseError("document has no 'group' field") from exc


def signal_to_json(signal: Signal, **extra) -> dict:
    return {"group": list(signal.group.moduli), **extra, "values": complex_list(signal.values)}


def signal_from_json(doc) -> Signal:
    return Signal(_group(doc), complex_array(doc["values"]))


def zak_to_json(zak: ZakArray) -> dict:
    return {
        "group": list(zak.group.moduli),
        "subgroup": zak.subgroup.spec,
        "domain": zak.domain,
        "shape": list(zak.values.shape),
        "values": complex_list(zak.values),
    }


def zak_from_json(doc) -> ZakArray:
    group = _group(doc)
    sub = parse_subgroup(group, doc["subgroup"])
    return ZakArray(sub.tables, doc.get("domain", "T"), complex_array(doc["values"]))


def window_to_json(window: Window) -> dict:
    return signal_to_json(window.g, kind="signal", subgroup=window.lattice.subgroup.spec)


def window_from_json(doc, subgroup: Subgroup | None = None, tol: float = 1e-8) -> Window:
    """Build a window from either file kind; ``subgroup`` overrides the file's."""
    group = _group(doc)
    kind = doc.get("kind", "signal")
    if subgroup is not None and subgroup.parent != group:
        raise DomainError(f"window on {group}, subgroup of {subgroup.parent}")
    named = parse_subgroup(group, doc["subgroup"]) if "subgroup" in doc else None
    if kind == "phases":
        if named is None and subgroup is None:
            raise ParseError("phase windows need a subgroup")
        if named is not None and subgroup is not None and not named.same_as(subgroup):
            raise DomainError(f"phase table is for {named.spec}, not {subgroup.spec}")
        return window_from_rational_phases(doc["phases"], subgroup or named, tol)
    if kind != "signal":
        raise ParseError(f"unknown window kind {kind!r}")
    sub = subgroup or named
    if sub is None:
        raise ParseError("window needs a subgroup (file field or --subgroup)")
    return check_window(signal_from_json(doc), sub, tol)


def coefficients_to_json(alpha: WHCoefficients) -> dict:
    b, s = alpha.lattice.points()
    return {
        "group": list(alpha.lattice.group.moduli),
        "subgroup": alpha.lattice.subgroup.spec,
        "delta": [[bb.tolist(), ss.tolist()] for bb, ss in zip(b, s)],
        "values": complex_list(alpha.flat),
    }


def coefficients_from_json(doc) -> WHCoefficients:
    group = _group(doc)
    sub = parse_subgroup(group, doc["subgroup"])
    return WHCoefficients(Lattice(sub), complex_array(doc["values"]))


def matrix_to_json(U) -> list:
    return [complex_list(row) for row in np.asarray(U)]


def pipeline_to_json(pipeline, include_matrix=True, report=None) -> dict:
    t = pipeline.tables
    stages = []
    for st in pipeline.stages:
        desc = {
            "name": st.name,
            "kind": st.kind,
            "dim": st.dim,
            "in": list(st.in_tags),
            "out": list(st.out_tags),
            "params": st.params(),
        }
        if include_matrix:
            desc["matrix"] = matrix_to_json(st.matrix())
        stages.append(desc)
    doc = {
        "pipeline": pipeline.name,
        "group": list(t.group.moduli),
        "subgroup": t.subgroup.spec,
        "stages": stages,
    }
    if include_matrix:
        doc["matrix"] = matrix_to_json(pipeline.matrix())
    if report is not None:
        doc["verification"] = report.as_dict()
    return doc


def state_to_json(pipeline, amplitudes) -> dict:
    layout = pipeline.out_layout
    labels = layout.labels()
    t = pipeline.tables
    return {
        "pipeline": pipeline.name,
        "group": list(t.group.moduli),
        "subgroup": t.subgroup.spec,
        "registers": list(layout.tags),
        "labels": [[reg[k].tolist() for reg in labels] for k in range(layout.dim)],
        "values": complex_list(amplitudes),
    }
