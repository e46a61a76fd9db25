"""JSON encodings of points, structures and triangulations.

Complex numbers are two-element arrays ``[re, im]``.
"""

from __future__ import annotations

import json
import math
from typing import Dict, List, Optional, Tuple

from .crgeom import INFINITY_POINT, HeisenbergPoint
from .crstruct import CrossRatioStructure
from .errors import StructuralError
from .pentad import FivePointCoordinates, derive_dependent
from .triangulation import FacePairing, Tetrahedron, Triangulation, geometric_assignment

__all__ = [
    "complex_to_json",
    "complex_from_json",
    "point_to_json",
    "point_from_json",
    "points_from_json",
    "structure_to_json",
    "structure_from_json",
    "triangulation_from_json",
    "triangulation_to_json",
    "coordinates_to_json",
    "coordinates_from_json",
    "dumps",
]


class SchemaError(StructuralError):
    """Input document does not follow the expected schema."""


def _real(x, what) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SchemaError(f"{what}: expected a number, got {x!r}")
    return float(x)


def complex_to_json(w) -> List[float]:
    w = complex(w)
    return [w.real, w.imag]


def complex_from_json(x, what="value") -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise SchemaError(f"{what}: complex numbers are [re, im], got {x!r}")
        return complex(_real(x[0], what), _real(x[1], what))
    return complex(_real(x, what), 0.0)


def point_to_json(p: HeisenbergPoint, pid=None) -> dict:
    out = {} if pid is None else {"id": pid}
    if p.at_infinity:
        out["at"] = "infinity"
    else:
        out["z"] = complex_to_json(p.z)
        out["t"] = p.t
    return out


def point_from_json(doc) -> HeisenbergPoint:
    if not isinstance(doc, dict):
        raise SchemaError(f"point must be an object, got {doc!r}")
    if doc.get("at") == "infinity":
        return INFINITY_POINT
    if "at" in doc:
        raise SchemaError(f"unknown point location {doc['at']!r}")
    try:
        return HeisenbergPoint(complex_from_json(doc["z"], "z"), _real(doc["t"], "t"))
    except KeyError as exc:
        raise SchemaError(f"point is missing field {exc.args[0]!r}") from None


def points_from_json(doc) -> List[Tuple[str, HeisenbergPoint]]:
    if not isinstance(doc, dict) or not isinstance(doc.get("points"), list):
        raise SchemaError('points file must be {"points": [...]}')
    out = []
    for k, entry in enumerate(doc["points"]):
        pid = entry.get("id", f"p{k + 1}") if isinstance(entry, dict) else None
        out.append((str(pid), point_from_json(entry)))
    return out


FREE_NAMES = ("z12", "z21", "z34", "z43")


def structure_to_json(s: CrossRatioStructure) -> dict:
    return {name: complex_to_json(w) for name, w in zip(FREE_NAMES, s.free)}


def structure_from_json(doc) -> CrossRatioStructure:
    if not isinstance(doc, dict):
        raise SchemaError("invariants must be an object with z12, z21, z34, z43")
    try:
        return CrossRatioStructure(*(complex_from_json(doc[n], n) for n in FREE_NAMES))
    except KeyError as exc:
        raise SchemaError(f"invariants missing {exc.args[0]!r}") from None


def coordinates_to_json(c: FivePointCoordinates) -> dict:
    return {
        "x": [complex_to_json(w) for w in (c.x1, c.x2, c.x3, c.x4)],
        "y1": complex_to_json(c.y1),
        "y2": complex_to_json(c.y2),
        "y4": complex_to_json(c.y4),
    }


def coordinates_from_json(doc) -> FivePointCoordinates:
    """Free coordinates ``{"x": [4 values], "y1", "y2", "y4"}``; the rest is derived."""
    if not isinstance(doc, dict) or not isinstance(doc.get("x"), list) or len(doc["x"]) != 4:
        raise SchemaError('coordinates must be {"x": [4 values], "y1", "y2", "y4"}')
    try:
        x = [complex_from_json(v, f"x{k + 1}") for k, v in enumerate(doc["x"])]
        y = [complex_from_json(doc[n], n) for n in ("y1", "y2", "y4")]
    except KeyError as exc:
        raise SchemaError(f"coordinates missing {exc.args[0]!r}") from None
    return derive_dependent(*x, *y)


def _tet_from_json(entry) -> Tetrahedron:
    if not isinstance(entry, dict):
        raise SchemaError(f"tetrahedron must be an object, got {entry!r}")
    try:
        return Tetrahedron(str(entry["id"]), tuple(entry["vertices"]), int(entry.get("sign", 1)))
    except KeyError as exc:
        raise SchemaError(f"tetrahedron missing {exc.args[0]!r}") from None


def _pairing_from_json(entry) -> FacePairing:
    try:
        return FacePairing(
            str(entry["tet_a"]), tuple(str(v) for v in entry["face_a"]),
            str(entry["tet_b"]), tuple(str(v) for v in entry["face_b"]),
        )
    except (KeyError, TypeError):
        raise SchemaError(
            'pairing must be {"tet_a", "face_a", "tet_b", "face_b"}, got ' + repr(entry)
        ) from None


def triangulation_from_json(doc):
    """Returns ``(triangulation, assignment, positions)``.

    Tetrahedra without ``invariants`` take them from ``positions``.
    """
    if not isinstance(doc, dict) or not isinstance(doc.get("tetrahedra"), list):
        raise SchemaError('triangulation file must be {"tetrahedra": [...]}')
    tets = [_tet_from_json(e) for e in doc["tetrahedra"]]
    pairings = doc.get("pairings")
    if pairings is not None:
        if not isinstance(pairings, list):
            raise SchemaError("pairings must be a list")
        pairings = [_pairing_from_json(p) for p in pairings]
    t = Triangulation.from_tetrahedra(tets, pairings)

    positions: Optional[Dict[str, HeisenbergPoint]] = None
    if doc.get("positions") is not None:
        if not isinstance(doc["positions"], dict):
            raise SchemaError("positions must map vertex labels to points")
        positions = {str(k): point_from_json(v) for k, v in doc["positions"].items()}

    assignment = {}
    missing = []
    for entry, tet in zip(doc["tetrahedra"], tets):
        if "invariants" in entry:
            assignment[tet.id] = structure_from_json(entry["invariants"])
        else:
            missing.append(tet)
    if missing:
        if positions is None:
            raise SchemaError(f"tetrahedron {missing[0].id} has no invariants and no positions are given")
        sub = Triangulation(tuple(missing), (), explicit=True)
        assignment.update(geometric_assignment(sub, positions))
    return t, assignment, positions


def triangulation_to_json(t: Triangulation, a, positions=None) -> dict:
    doc = {
        "tetrahedra": [
            {
                "id": tet.id,
                "vertices": list(tet.vertices),
                "sign": tet.sign,
                "invariants": structure_to_json(a[tet.id]),
            }
            for tet in t.tetrahedra
        ]
    }
    if positions:
        used = {v for tet in t.tetrahedra for v in tet.vertices}
        doc["positions"] = {k: point_to_json(p) for k, p in positions.items() if k in used}
    if t.explicit:
        doc["pairings"] = [
            {"tet_a": p.tet_a, "face_a": list(p.face_a), "tet_b": p.tet_b, "face_b": list(p.face_b)}
            for p in t.pairings
        ]
    return doc


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, complex):
        return [_finite(obj.real), _finite(obj.imag)]
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj) -> str:
    """Strict JSON; floats are written with the shortest round-trip repr."""
    return json.dumps(_finite(obj), allow_nan=False, indent=2)
