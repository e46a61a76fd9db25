"""Ideal triangulations carrying cross-ratio structures.

A triangulation is a list of tetrahedra, each an ordered 4-tuple of vertex
labels with an orientation sign, plus face pairings.  Pairings are derived by
matching vertex-label triples unless given explicitly; an explicit pairing
lists the two faces with their vertices in corresponding order, which also
covers self-identifications.

The assignment maps each tetrahedron id to a :class:`CrossRatioStructure`
expressed in that tetrahedron's own vertex order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .crstruct import CrossRatioStructure, invariant, parity, reorder, volume
from .errors import DegenerateConfigurationError, MoveRefusedError, StructuralError
from .pentad import derive_dependent

__all__ = [
    "Tetrahedron",
    "FacePairing",
    "Triangulation",
    "ComplianceReport",
    "validate_edge_compatibility",
    "validate_face_compatibility",
    "total_volume",
    "pachner_23",
    "pachner_32",
    "geometric_assignment",
    "local_quad",
]

DEFAULT_TOL = 1e-9
# relative mismatch above which two tetrahedra are not treated as one five-point configuration
CONSISTENCY_TOL = 1e-8

CrossRatioAssignment = Dict[str, CrossRatioStructure]


@dataclass(frozen=True)
class Tetrahedron:
    id: str
    vertices: Tuple[str, str, str, str]
    sign: int = 1

    def __post_init__(self):
        verts = tuple(str(v) for v in self.vertices)
        if len(verts) != 4:
            raise StructuralError(f"tetrahedron {self.id}: needs 4 vertices, got {len(verts)}")
        if len(set(verts)) != 4:
            raise StructuralError(f"tetrahedron {self.id}: vertex labels must be distinct")
        if self.sign not in (1, -1):
            raise StructuralError(f"tetrahedron {self.id}: sign must be +1 or -1")
        object.__setattr__(self, "vertices", verts)

    def local(self, label: str) -> int:
        return self.vertices.index(label)


@dataclass(frozen=True)
class FacePairing:
    """Face ``face_a`` of ``tet_a`` glued to ``face_b`` of ``tet_b``, vertex by vertex."""

    tet_a: str
    face_a: Tuple[str, str, str]
    tet_b: str
    face_b: Tuple[str, str, str]


# a face side is (tet id, local index of the opposite vertex)
_Side = Tuple[str, int]


@dataclass
class Triangulation:
    tetrahedra: Tuple[Tetrahedron, ...]
    pairings: Tuple[FacePairing, ...] = ()
    explicit: bool = False
    _by_id: Dict[str, Tetrahedron] = field(init=False, repr=False)
    # side -> (other side, local vertex map of this tet -> other tet)
    _glue: Dict[_Side, Tuple[_Side, Dict[int, int]]] = field(init=False, repr=False)

    def __post_init__(self):
        self.tetrahedra = tuple(self.tetrahedra)
        self._by_id = {}
        for tet in self.tetrahedra:
            if tet.id in self._by_id:
                raise StructuralError(f"duplicate tetrahedron id {tet.id!r}")
            self._by_id[tet.id] = tet
        if not self.explicit:
            self.pairings = _derive_pairings(self.tetrahedra)
        self.pairings = tuple(self.pairings)
        self._glue = {}
        for p in self.pairings:
            self._add_pairing(p)

    @classmethod
    def from_tetrahedra(cls, tetrahedra: Sequence[Tetrahedron], pairings=None) -> "Triangulation":
        if pairings is None:
            return cls(tuple(tetrahedra))
        return cls(tuple(tetrahedra), tuple(pairings), explicit=True)

    def tet(self, tet_id: str) -> Tetrahedron:
        try:
            return self._by_id[tet_id]
        except KeyError:
            raise StructuralError(f"unknown tetrahedron {tet_id!r}") from None

    def _side(self, tet_id, face):
        tet = self.tet(tet_id)
        face = tuple(str(v) for v in face)
        if len(face) != 3 or len(set(face)) != 3 or not set(face) <= set(tet.vertices):
            raise StructuralError(f"face {face} is not a face of tetrahedron {tet_id}")
        (opp,) = set(range(4)) - {tet.local(v) for v in face}
        return (tet_id, opp), [tet.local(v) for v in face]

    def _add_pairing(self, p: FacePairing):
        side_a, loc_a = self._side(p.tet_a, p.face_a)
        side_b, loc_b = self._side(p.tet_b, p.face_b)
        if side_a == side_b:
            raise StructuralError(f"face {p.face_a} of {p.tet_a} is paired with itself")
        for side in (side_a, side_b):
            if side in self._glue:
                raise StructuralError(f"face opposite local vertex {side[1]} of {side[0]} is paired twice")
        self._glue[side_a] = (side_b, dict(zip(loc_a, loc_b)))
        self._glue[side_b] = (side_a, dict(zip(loc_b, loc_a)))

    def glued(self, side: _Side):
        return self._glue.get(side)

    def face_label(self, side: _Side) -> str:
        tet = self.tet(side[0])
        labels = [tet.vertices[k] for k in range(4) if k != side[1]]
        return f"{side[0]}:" + ",".join(labels)


def _derive_pairings(tetrahedra) -> Tuple[FacePairing, ...]:
    faces: Dict[Tuple[str, ...], List[str]] = {}
    for tet in tetrahedra:
        for k in range(4):
            key = tuple(sorted(v for i, v in enumerate(tet.vertices) if i != k))
            faces.setdefault(key, []).append(tet.id)
    pairings = []
    for key, owners in faces.items():
        if len(owners) > 2:
            raise StructuralError(f"face {key} is shared by {len(owners)} tetrahedra")
        if len(owners) == 2:
            if owners[0] == owners[1]:
                raise StructuralError(f"face {key} occurs twice in tetrahedron {owners[0]}")
            pairings.append(FacePairing(owners[0], key, owners[1], key))
    return tuple(pairings)


def local_quad(s: CrossRatioStructure, i: int, j: int, k: int, l: int) -> complex:
    """Invariant of the local (0-based) ordering ``(i, j, k, l)``."""
    return invariant(s, (i + 1, j + 1, k + 1, l + 1))


@dataclass
class ComplianceReport:
    kind: str
    tolerance: float
    residuals: Dict[str, float] = field(default_factory=dict)
    skipped: List[str] = field(default_factory=list)
    extra: Dict[str, float] = field(default_factory=dict)

    @property
    def worst(self) -> Optional[str]:
        every = {**self.residuals, **self.extra}
        if not every:
            return None
        return max(every, key=every.get)

    @property
    def max_residual(self) -> float:
        every = list(self.residuals.values()) + list(self.extra.values())
        return max(every, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "worst": self.worst,
            "residuals": dict(self.residuals),
            "oriented_residuals": dict(self.extra),
            "skipped": list(self.skipped),
        }


def _structure(a: Mapping[str, CrossRatioStructure], tet_id: str) -> CrossRatioStructure:
    try:
        return a[tet_id]
    except KeyError:
        raise StructuralError(f"no cross-ratio structure for tetrahedron {tet_id!r}") from None


def _edge_step(t: Triangulation, state):
    """Cross the face opposite ``k`` from ``(tet, i, j, k, l)``."""
    tet_id, i, j, k, l = state
    hit = t.glued((tet_id, k))
    if hit is None:
        return None
    (other, opp), vmap = hit
    return (other, vmap[i], vmap[j], vmap[l], opp)


def _edge_step_back(t: Triangulation, state):
    tet_id, i, j, k, l = state
    hit = t.glued((tet_id, l))
    if hit is None:
        return None
    (other, opp), vmap = hit
    return (other, vmap[i], vmap[j], opp, vmap[k])


def _edge_cycles(t: Triangulation):
    """Yield ``(name, states, closed)`` once per edge class."""
    seen = set()
    for tet in t.tetrahedra:
        for i, j in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
            if (tet.id, frozenset((i, j))) in seen:
                continue
            k, l = [v for v in range(4) if v not in (i, j)]
            start = (tet.id, i, j, k, l)
            states = [start]
            closed = False
            state = start
            while True:
                state = _edge_step(t, state)
                if state is None:
                    break
                if state == start:
                    closed = True
                    break
                if (state[0], frozenset(state[1:3])) == (tet.id, frozenset((i, j))) and state[1] != i:
                    raise StructuralError(
                        f"edge {tet.vertices[i]}-{tet.vertices[j]} of {tet.id} is glued to itself reversed"
                    )
                if len(states) > 24 * len(t.tetrahedra):
                    raise StructuralError(f"edge star of {tet.vertices[i]}-{tet.vertices[j]} is not a cycle")
                states.append(state)
            if not closed:
                state = start
                while True:
                    state = _edge_step_back(t, state)
                    if state is None:
                        break
                    states.append(state)
            for st in states:
                seen.add((st[0], frozenset(st[1:3])))
            name = f"{tet.vertices[i]}-{tet.vertices[j]}@{tet.id}"
            yield name, states, closed


def validate_edge_compatibility(t: Triangulation, a: Mapping[str, CrossRatioStructure], tol: float = DEFAULT_TOL) -> ComplianceReport:
    """``|prod X(p_i, p_j, p_m, p_m') - 1|`` around every interior edge."""
    report = ComplianceReport("edge", tol)
    for name, states, closed in _edge_cycles(t):
        if not closed:
            report.skipped.append(name)
            continue
        product = 1 + 0j
        for tet_id, i, j, k, l in states:
            product *= local_quad(_structure(a, tet_id), i, j, k, l)
        report.residuals[name] = abs(product - 1)
    return report


def _face_product(s, opp, face):
    j, k, l = face
    i = opp
    return local_quad(s, j, i, k, l) * local_quad(s, k, i, l, j) * local_quad(s, l, i, j, k)


def _apex_product(s, opp, face):
    """``z_{v, opp}`` multiplied over the face vertices."""
    out = 1 + 0j
    for v in face:
        out *= s.table[(v + 1, opp + 1)]
    return out


def validate_face_compatibility(t: Triangulation, a: Mapping[str, CrossRatioStructure], tol: float = DEFAULT_TOL) -> ComplianceReport:
    """Triple products across every paired face.

    When the two tetrahedra induce opposite orientations on the face, the
    product form ``z_il z_jl z_kl w_i'l' w_j'l' w_k'l' = 1`` is reported too.
    """
    report = ComplianceReport("face", tol)
    done = set()
    for (tet_id, opp), ((other, opp2), vmap) in t._glue.items():
        if (tet_id, opp) in done:
            continue
        done.add((tet_id, opp))
        done.add((other, opp2))
        face = [v for v in range(4) if v != opp]
        image = [vmap[v] for v in face]
        s = _structure(a, tet_id)
        w = _structure(a, other)
        left = _face_product(s, opp, face)
        right = _face_product(w, opp2, image)
        name = t.face_label((tet_id, opp))
        report.residuals[name] = abs(left - right) / max(1.0, abs(left), abs(right))
        own = parity(tuple(v + 1 for v in [opp] + face))
        theirs = parity(tuple(v + 1 for v in [opp2] + image))
        if own != theirs:
            product = _apex_product(s, opp, face) * _apex_product(w, opp2, image)
            report.extra[name] = abs(product - 1)
    return report


def total_volume(t: Triangulation, a: Mapping[str, CrossRatioStructure]) -> float:
    """Signed sum of the tetrahedron volumes, in tetrahedron order."""
    return math.fsum(tet.sign * volume(_structure(a, tet.id)) for tet in t.tetrahedra)


def geometric_assignment(t: Triangulation, positions) -> CrossRatioAssignment:
    """Structures induced by placing the vertices at points of S^3."""
    from .crgeom import cross_ratio_structure_of

    out = {}
    for tet in t.tetrahedra:
        try:
            pts = [positions[v] for v in tet.vertices]
        except KeyError as exc:
            raise StructuralError(f"tetrahedron {tet.id}: no position for vertex {exc.args[0]!r}") from None
        try:
            out[tet.id] = cross_ratio_structure_of(*pts).structure
        except DegenerateConfigurationError as exc:
            raise DegenerateConfigurationError(f"tetrahedron {tet.id}: {exc}") from None
    return out


# --- Pachner moves ----------------------------------------------------------


def _canonical(tet: Tetrahedron, s: CrossRatioStructure, labels):
    """Structure on ``labels`` (in that order) and the orientation it carries."""
    order = tuple(tet.local(v) + 1 for v in labels)
    return reorder(s, order), tet.sign * parity(order)


def _rel(u, v):
    return abs(u - v) / max(1.0, abs(u), abs(v))


def _find_face(t: Triangulation, face):
    face = tuple(str(v) for v in face)
    hits, seen = [], set()
    for side, (other_side, vmap) in t._glue.items():
        tet = t.tet(side[0])
        labels = {tet.vertices[k] for k in range(4) if k != side[1]}
        if labels != set(face) or other_side in seen:
            continue
        seen.add(side)
        hits.append((side, other_side, vmap))
    if not hits:
        raise StructuralError(f"face {face} is not an interior face")
    if len(hits) > 1:
        raise StructuralError(f"face {face} is ambiguous ({len(hits)} pairings)")
    return hits[0]


def _rebuild(t: Triangulation, removed, added: Sequence[Tetrahedron]) -> Triangulation:
    kept = [tet for tet in t.tetrahedra if tet.id not in removed]
    tets = kept + list(added)
    if not t.explicit:
        return Triangulation(tuple(tets))
    new_by_faces = {}
    for tet in added:
        for k in range(4):
            key = frozenset(v for i, v in enumerate(tet.vertices) if i != k)
            new_by_faces.setdefault(key, []).append(tet.id)
    pairings = []
    for p in t.pairings:
        ends = []
        for tet_id, face in ((p.tet_a, p.face_a), (p.tet_b, p.face_b)):
            if tet_id in removed:
                owners = new_by_faces.get(frozenset(face), [])
                if len(owners) != 1:
                    ends = None
                    break
                tet_id = owners[0]
            ends.append((tet_id, face))
        if ends is None:
            continue  # face interior to the move
        pairings.append(FacePairing(ends[0][0], ends[0][1], ends[1][0], ends[1][1]))
    for key, owners in new_by_faces.items():
        if len(owners) == 2:
            face = tuple(sorted(key))
            pairings.append(FacePairing(owners[0], face, owners[1], face))
    return Triangulation(tuple(tets), tuple(pairings), explicit=True)


def pachner_23(t: Triangulation, a: Mapping[str, CrossRatioStructure], face, new_ids=None):
    """Replace the two tetrahedra sharing ``face`` by three sharing an edge.

    The two tetrahedra are read as the columns ``[[u1 u2 u3 u4]]`` and
    ``[[u2 u3 u4 u5]]`` of a five-point configuration (``u1``, ``u5`` the
    apexes); the three new columns come from the seven coordinates of that
    configuration.  Returns ``(triangulation, assignment)``.
    """
    (ta, opp_a), (tb, opp_b), vmap = _find_face(t, face)
    if ta == tb:
        raise MoveRefusedError(f"face {tuple(face)} joins a tetrahedron to itself")
    tet_a, tet_b = t.tet(ta), t.tet(tb)
    face_a = [k for k in range(4) if k != opp_a]
    if any(tet_b.vertices[vmap[k]] != tet_a.vertices[k] for k in face_a):
        raise MoveRefusedError("face pairing does not match vertex labels")
    u1, u5 = tet_a.vertices[opp_a], tet_b.vertices[opp_b]
    if u1 == u5:
        raise MoveRefusedError("the two apexes coincide; the union does not span five vertices")
    u2, u3, u4 = sorted(tet_a.vertices[k] for k in face_a)

    col1, s_a = _canonical(tet_a, _structure(a, ta), (u1, u2, u3, u4))
    col5, s_b = _canonical(tet_b, _structure(a, tb), (u2, u3, u4, u5))
    if s_a != s_b:
        raise MoveRefusedError("tetrahedra induce the same orientation on the shared face")

    x1, x2, x3, x4 = col1.free
    c51, c52, c53, c54 = col5.free
    try:
        y2 = x2 / (c51 * (1 - x2) + x2)
        y3 = x3 / (c52 * (1 - x3) + x3)
        y1 = y3 * x1 * (x2 - 1) / (y3 * x1 * (x2 - 1) - x3 * (y2 - 1) * (x1 - 1))
        q = -y1 * x1 * y2 - x1 * x2 + y1 * x1 * x2 + x1 + y1 * y2 - y1
        kk = x1 * (y1 - 1) * (x2 - y2)
        y4 = kk / (kk - c54 * q)
        coords = derive_dependent(x1, x2, x3, x4, y1, y2, y4)
    except ZeroDivisionError:
        raise MoveRefusedError("degenerate five-point coordinates: division by zero") from None
    except DegenerateConfigurationError as exc:
        raise MoveRefusedError(f"move refused: {exc}") from None
    if _rel(coords.z3, c53) > CONSISTENCY_TOL:
        raise MoveRefusedError(
            f"tetrahedra {ta} and {tb} are not face-compatible (mismatch {_rel(coords.z3, c53):.3g})"
        )

    from .pentad import assemble_columns

    try:
        cols = assemble_columns(coords).columns
    except DegenerateConfigurationError as exc:
        raise MoveRefusedError(f"move refused: {exc}") from None
    ids = new_ids or (f"{ta}.{tb}.1", f"{ta}.{tb}.2", f"{ta}.{tb}.3")
    new_tets = (
        Tetrahedron(ids[0], (u1, u2, u3, u5), s_a),
        Tetrahedron(ids[1], (u1, u2, u4, u5), -s_a),
        Tetrahedron(ids[2], (u1, u3, u4, u5), s_a),
    )
    new_t = _rebuild(t, {ta, tb}, new_tets)
    new_a = {k: v for k, v in a.items() if k not in (ta, tb)}
    new_a.update({ids[0]: cols[1], ids[1]: cols[2], ids[2]: cols[3]})
    return new_t, new_a


def pachner_32(t: Triangulation, a: Mapping[str, CrossRatioStructure], edge, new_ids=None):
    """Inverse of :func:`pachner_23`: three tetrahedra around ``edge`` become two."""
    u, v = (str(x) for x in edge)
    around = [tet for tet in t.tetrahedra if u in tet.vertices and v in tet.vertices]
    if len(around) != 3:
        raise MoveRefusedError(f"edge {u}-{v} lies in {len(around)} tetrahedra, need 3")
    link = sorted({x for tet in around for x in tet.vertices} - {u, v})
    if len(link) != 3:
        raise MoveRefusedError(f"edge {u}-{v}: link has {len(link)} vertices, need 3")

    by_set = {frozenset(tet.vertices): tet for tet in around}
    for u1, u5 in ((u, v), (v, u)):
        for u2, u3, u4 in permutations(link):
            wanted = ((u1, u2, u3, u5), (u1, u2, u4, u5), (u1, u3, u4, u5))
            tets = [by_set.get(frozenset(w)) for w in wanted]
            if any(x is None for x in tets):
                raise MoveRefusedError(f"tetrahedra around {u}-{v} do not form a 3-cycle")
            canon = [_canonical(tet, _structure(a, tet.id), w) for tet, w in zip(tets, wanted)]
            s = canon[0][1]
            if (canon[1][1], canon[2][1]) == (-s, s):
                break
        else:
            continue
        break
    else:
        raise MoveRefusedError(f"tetrahedra around {u}-{v} are not coherently oriented")

    col2, col3, col4 = (c[0] for c in canon)
    y1, y2, y3, y4 = col2.free
    try:
        x1 = y1 / col3.z12
        x2 = y2 / col3.z21
        x3 = 1 - (1 - y3) / col4.z21
        w3 = col4.z34
        z3 = w3 / col3.z34
        x4 = z3 * (1 - w3) / (w3 * (1 - z3))
        coords = derive_dependent(x1, x2, x3, x4, y1, y2, y4)
    except ZeroDivisionError:
        raise MoveRefusedError("degenerate five-point coordinates: division by zero") from None
    except DegenerateConfigurationError as exc:
        raise MoveRefusedError(f"move refused: {exc}") from None

    from .pentad import assemble_columns

    cols = assemble_columns(coords).columns
    mismatch = max(
        _rel(p, q) for given, derived in zip((col2, col3, col4), cols[1:4])
        for p, q in zip(given.free, derived.free)
    )
    if mismatch > CONSISTENCY_TOL:
        raise MoveRefusedError(f"tetrahedra around {u}-{v} are not compatible (mismatch {mismatch:.3g})")
    ids = new_ids or (f"{tets[0].id}.{tets[1].id}.{tets[2].id}.a", f"{tets[0].id}.{tets[1].id}.{tets[2].id}.b")
    new_tets = (
        Tetrahedron(ids[0], (u1, u2, u3, u4), s),
        Tetrahedron(ids[1], (u2, u3, u4, u5), s),
    )
    removed = {tet.id for tet in tets}
    new_t = _rebuild(t, removed, new_tets)
    new_a = {k: val for k, val in a.items() if k not in removed}
    new_a.update({ids[0]: cols[0], ids[1]: cols[4]})
    return new_t, new_a
