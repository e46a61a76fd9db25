"""Cross-ratio structures on configurations of five points.

The five four-point subconfigurations are arranged in columns

    [[u1 u2 u3 u4]] - [[u1 u2 u3 u5]] + [[u1 u2 u4 u5]] - [[u1 u3 u4 u5]] + [[u2 u3 u4 u5]]

each column holding the free parameters (z12, z21, z34, z43) of its
subsimplex with vertices taken in increasing order.  The quadruple invariant
``(ijkl)`` of any four distinct labels is read from the column that omits the
fifth label (see :func:`quad_invariant`).

Edge relations ``(ijkl) = (ijkm)(ijml)`` cut the 20 column parameters down to a
10-dimensional family; adding the face relations
``(ijkl)(ljik)(kjli) = (imkl)(lmik)(kmli)`` leaves 7 free coordinates
``x1, x2, x3, x4, y1, y2, y4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from itertools import combinations, permutations
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .crstruct import CrossRatioStructure, invariant, volume
from .dilog import D
from .errors import DegenerateConfigurationError, DomainError

__all__ = [
    "COLUMN_VERTICES",
    "COLUMN_SIGNS",
    "FivePointCoordinates",
    "ColumnQuintuple",
    "derive_dependent",
    "assemble_columns",
    "prop1_assemble",
    "quad_invariant",
    "edge_compatibility_defect",
    "face_compatibility_defect",
    "five_term_volume_defect",
    "theorem_reduction",
    "from_five_points",
    "coordinates_from_columns",
    "edge_equations",
    "face_equations",
    "jacobian_nullity",
]

COLUMN_VERTICES = ((1, 2, 3, 4), (1, 2, 3, 5), (1, 2, 4, 5), (1, 3, 4, 5), (2, 3, 4, 5))
COLUMN_SIGNS = (1, -1, 1, -1, 1)
LABELS = (1, 2, 3, 4, 5)

# |denominator| below this is a degenerate coordinate chart
DENOMINATOR_TOL = 1e-12
# values closer than this to 0 or 1 are inadmissible
ADMISSIBLE_TOL = 1e-12


def _shared_polynomial(x1, x2, y1, y2):
    return -y1 * x1 * y2 - x1 * x2 + y1 * x1 * x2 + x1 + y1 * y2 - y1


def _nonzero(value, factor):
    if abs(value) < DENOMINATOR_TOL:
        raise DegenerateConfigurationError(f"degenerate coordinates: factor {factor} vanishes")


def _admissible(name, value):
    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    if abs(value) < ADMISSIBLE_TOL or abs(value - 1) < ADMISSIBLE_TOL:
        raise DegenerateConfigurationError(f"{name} = {value!r} is in {{0, 1}}")
    return value


@dataclass(frozen=True)
class FivePointCoordinates:
    """Seven free coordinates and the five values they determine."""

    x1: complex
    x2: complex
    x3: complex
    x4: complex
    y1: complex
    y2: complex
    y4: complex
    y3: complex
    z3: complex
    w3: complex
    z4: complex
    w4: complex
    q: complex

    @property
    def free(self) -> Tuple[complex, ...]:
        return (self.x1, self.x2, self.x3, self.x4, self.y1, self.y2, self.y4)

    @property
    def dependent(self) -> Tuple[complex, ...]:
        return (self.y3, self.z3, self.w3, self.z4, self.w4)

    def as_dict(self) -> Dict[str, complex]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def derive_dependent(x1, x2, x3, x4, y1, y2, y4) -> FivePointCoordinates:
    """Solve the face relations for ``y3, z3, w3, z4, w4``."""
    free = {"x1": x1, "x2": x2, "x3": x3, "x4": x4, "y1": y1, "y2": y2, "y4": y4}
    free = {k: _admissible(k, v) for k, v in free.items()}
    x1, x2, x3, x4 = free["x1"], free["x2"], free["x3"], free["x4"]
    y1, y2, y4 = free["y1"], free["y2"], free["y4"]

    _nonzero(x1 - y1, "x1 - y1")
    _nonzero(x2 - y2, "x2 - y2")
    q = _shared_polynomial(x1, x2, y1, y2)
    _nonzero(q, "Q")

    y3 = y1 * x3 * (y2 - 1) * (x1 - 1) / (x1 * (y1 - 1) * (x2 - 1))
    z3 = x4 * q / (y1 * (x4 - 1) * (x2 - y2) * (x1 - 1))
    w3 = q / ((x4 - 1) * (x1 - y1) * (x2 - 1))
    z4 = x1 * (y4 - 1) * (y1 - 1) * (x2 - y2) / (y4 * q)
    w4 = (y4 - 1) * (y2 - 1) * (x1 - y1) / q
    for name, value in (("y3", y3), ("z3", z3), ("w3", w3), ("z4", z4), ("w4", w4)):
        _admissible(name, value)
    return FivePointCoordinates(x1, x2, x3, x4, y1, y2, y4, y3, z3, w3, z4, w4, q)


@dataclass(frozen=True)
class ColumnQuintuple:
    """The five signed columns of a five-point configuration."""

    columns: Tuple[CrossRatioStructure, ...]

    @property
    def signs(self) -> Tuple[int, ...]:
        return COLUMN_SIGNS

    def volumes(self) -> List[float]:
        return [volume(c) for c in self.columns]

    def quad(self, ordering) -> complex:
        return quad_invariant(self, ordering)


def _columns_from_entries(entries) -> ColumnQuintuple:
    built = []
    for col, values in enumerate(entries, start=1):
        for row, value in enumerate(values, start=1):
            try:
                _admissible(f"column {col} row {row}", value)
            except DegenerateConfigurationError as exc:
                raise DegenerateConfigurationError(f"column {col}, row {row}: {exc}") from None
        built.append(CrossRatioStructure(*values))
    return ColumnQuintuple(tuple(built))


def _column_entries(x1, x2, x3, x4, y1, y2, y3, y4, z3, z4, w3, w4):
    return (
        (x1, x2, x3, x4),
        (y1, y2, y3, y4),
        (y1 / x1, y2 / x2, w3 / z3, w4 / z4),
        ((1 - y1) / (1 - x1), (1 - y3) / (1 - x3), w3, w4),
        (x2 * (1 - y2) / (y2 * (1 - x2)), x3 * (1 - y3) / (y3 * (1 - x3)), z3, z4),
    )


def assemble_columns(c: FivePointCoordinates) -> ColumnQuintuple:
    return _columns_from_entries(
        _column_entries(c.x1, c.x2, c.x3, c.x4, c.y1, c.y2, c.y3, c.y4, c.z3, c.z4, c.w3, c.w4)
    )


def prop1_assemble(x1, x2, x3, y1, y2, y3, z3, z4, w3, w4) -> ColumnQuintuple:
    """Columns of an edge-compatible configuration in the 10 edge-only coordinates."""
    params = {
        "x1": x1, "x2": x2, "x3": x3, "y1": y1, "y2": y2,
        "y3": y3, "z3": z3, "z4": z4, "w3": w3, "w4": w4,
    }
    p = {k: _admissible(k, v) for k, v in params.items()}
    x4 = p["z3"] * (1 - p["w3"]) / (p["w3"] * (1 - p["z3"]))
    y4 = (1 - p["w4"]) / (1 - p["z4"])
    return _columns_from_entries(
        _column_entries(
            p["x1"], p["x2"], p["x3"], x4, p["y1"], p["y2"], p["y3"], y4,
            p["z3"], p["z4"], p["w3"], p["w4"],
        )
    )


def _locate(ordering):
    ordering = tuple(ordering)
    if len(ordering) != 4 or len(set(ordering)) != 4 or not set(ordering) <= set(LABELS):
        raise DomainError(f"need four distinct labels from 1..5, got {ordering!r}")
    (missing,) = set(LABELS) - set(ordering)
    col = 5 - missing  # omitting 5 -> column 0, ..., omitting 1 -> column 4
    verts = COLUMN_VERTICES[col]
    local = tuple(verts.index(v) + 1 for v in ordering)
    return col, local


def quad_invariant(q: ColumnQuintuple, ordering) -> complex:
    """``(ijkl)`` for four distinct labels out of 1..5."""
    col, local = _locate(ordering)
    return invariant(q.columns[col], local)


def _relative(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _edge_instances():
    for i, j in permutations(LABELS, 2):
        rest = [v for v in LABELS if v not in (i, j)]
        for k, l, m in permutations(rest):
            yield i, j, k, l, m


def _face_instances():
    """One oriented face triple (i, k, l) per unordered pair {j, m} of apexes."""
    for j, m in combinations(LABELS, 2):
        i, k, l = [v for v in LABELS if v not in (j, m)]
        yield i, j, k, l, m


def edge_compatibility_defect(q: ColumnQuintuple) -> float:
    """Largest relative defect of ``(ijkl) = (ijkm)(ijml)`` over all instances."""
    worst = 0.0
    for i, j, k, l, m in _edge_instances():
        lhs = quad_invariant(q, (i, j, k, l))
        rhs = quad_invariant(q, (i, j, k, m)) * quad_invariant(q, (i, j, m, l))
        worst = max(worst, _relative(lhs, rhs))
    return worst


def _face_sides(q, i, j, k, l, m):
    left = quad_invariant(q, (i, j, k, l)) * quad_invariant(q, (l, j, i, k)) * quad_invariant(q, (k, j, l, i))
    right = quad_invariant(q, (i, m, k, l)) * quad_invariant(q, (l, m, i, k)) * quad_invariant(q, (k, m, l, i))
    return left, right


def face_compatibility_defect(q: ColumnQuintuple) -> float:
    """Largest relative defect of the face relation over the 10 apex pairs."""
    worst = 0.0
    for i, j, k, l, m in _face_instances():
        left, right = _face_sides(q, i, j, k, l, m)
        worst = max(worst, _relative(left, right))
    return worst


def five_term_volume_defect(c) -> float:
    """``|V1 - V2 + V3 - V4 + V5|`` over the column volumes.

    Accepts coordinates or an already assembled quintuple.
    """
    q = c if isinstance(c, ColumnQuintuple) else assemble_columns(c)
    return abs(math.fsum(s * v for s, v in zip(COLUMN_SIGNS, q.volumes())))


def _five_term(x, y):
    return math.fsum(
        (D(x), -D(y), D(y / x), -D((1 - y) / (1 - x)), D((1 - 1 / y) / (1 - 1 / x)))
    )


def theorem_reduction(c: FivePointCoordinates) -> Dict[str, object]:
    """Bookkeeping of the reduction of the volume relation to one five-term
    relation in ``a = (1 - 1/y1)/(1 - 1/x1)``, ``b = (1 - y2)/(1 - x2)``.

    ``partial_sum`` is the alternating column sum minus the six auxiliary
    five-term relations (in ``(x_r, y_r)`` for r = 1..4 and in ``(z3, w3)``,
    ``(z4, w4)``); ``ab_expression`` is minus the five-term expression in
    ``(a, b)``.  The leftover arguments are paired with those of ``(a, b)``.
    """
    q = assemble_columns(c)
    alternating = math.fsum(s * v for s, v in zip(COLUMN_SIGNS, q.volumes()))
    relations = [
        _five_term(c.x1, c.y1),
        _five_term(c.x2, c.y2),
        _five_term(c.x3, c.y3),
        _five_term(c.x4, c.y4),
        _five_term(c.z3, c.w3),
        _five_term(c.z4, c.w4),
    ]
    a = (1 - 1 / c.y1) / (1 - 1 / c.x1)
    b = (1 - c.y2) / (1 - c.x2)
    leftover = (
        c.y3 / c.x3,
        (1 - c.w3) / (1 - c.z3),
        (1 - 1 / c.w4) / (1 - 1 / c.z4),
    )
    ab_args = (b / a, (1 - b) / (1 - a), (1 - 1 / b) / (1 - 1 / a))
    return {
        "partial_sum": alternating - math.fsum(relations),
        "ab_expression": -_five_term(a, b),
        "a": a,
        "b": b,
        "leftover_arguments": leftover,
        "ab_arguments": ab_args,
        "argument_defect": max(_relative(u, v) for u, v in zip(leftover, ab_args)),
    }


def coordinates_from_columns(q: ColumnQuintuple) -> FivePointCoordinates:
    """Read the seven free coordinates from columns 1 and 2 and re-derive the rest."""
    x1, x2, x3, x4 = q.columns[0].free
    y1, y2, _, y4 = q.columns[1].free
    return derive_dependent(x1, x2, x3, x4, y1, y2, y4)


def from_five_points(p1, p2, p3, p4, p5):
    """Coordinates and columns of five points of S^3.

    Columns are computed directly from the points; the coordinates are read
    from columns 1 and 2 and the remaining values derived from them.
    """
    from .crgeom import cross_ratio_structure_of

    points = (p1, p2, p3, p4, p5)
    columns = tuple(
        cross_ratio_structure_of(*(points[v - 1] for v in verts)).structure
        for verts in COLUMN_VERTICES
    )
    q = ColumnQuintuple(columns)
    return coordinates_from_columns(q), q


# --- equation systems used for the dimension counts -------------------------


def _quintuple_from_vector(v) -> ColumnQuintuple:
    return ColumnQuintuple(tuple(CrossRatioStructure(*v[4 * c: 4 * c + 4]) for c in range(5)))


def edge_equations(v) -> np.ndarray:
    """Edge relations ``(ijkm)(ijml)/(ijkl) - 1`` as functions of the 20 column parameters."""
    q = _quintuple_from_vector(v)
    out = []
    for i, j, k, l, m in _edge_instances():
        lhs = quad_invariant(q, (i, j, k, l))
        rhs = quad_invariant(q, (i, j, k, m)) * quad_invariant(q, (i, j, m, l))
        out.append(rhs / lhs - 1)
    return np.array(out, dtype=complex)


def face_equations(v) -> np.ndarray:
    q = _quintuple_from_vector(v)
    out = []
    for inst in _face_instances():
        left, right = _face_sides(q, *inst)
        out.append(right / left - 1)
    return np.array(out, dtype=complex)


def _holomorphic_jacobian(f: Callable, v, radius=1e-3, nodes=8) -> np.ndarray:
    """Complex Jacobian of a holomorphic map by the Cauchy integral formula."""
    v = np.asarray(v, dtype=complex)
    roots = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    columns = []
    for idx in range(v.size):
        acc = 0
        for w in roots:
            shifted = v.copy()
            shifted[idx] += radius * w
            acc = acc + f(shifted) / w
        columns.append(acc / (nodes * radius))
    return np.column_stack(columns)


def jacobian_nullity(q: ColumnQuintuple, include_faces: bool, rel_threshold: float = 1e-8) -> int:
    """Numerical nullity of the edge (and optionally face) system at ``q``."""
    v = np.array([w for c in q.columns for w in c.free], dtype=complex)
    if include_faces:
        def system(u):
            return np.concatenate([edge_equations(u), face_equations(u)])
    else:
        system = edge_equations
    jac = _holomorphic_jacobian(system, v)
    sv = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(sv > rel_threshold * sv[0]))
    return v.size - rank
