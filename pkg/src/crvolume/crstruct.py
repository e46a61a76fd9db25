"""Cross-ratio structures on a single tetrahedron.

A structure assigns ``X(p_i, p_j, p_k, p_l)`` in C minus {0, 1} to each of the
24 orderings of four vertices, subject to

* inversion:   ``X(i, j, k, l) = 1 / X(i, j, l, k)``
* similarity:  ``X(i, j, k, l) = 1 / (1 - X(i, l, j, k))``.

Each ordered pair ``(i, j)`` has exactly one even completion ``(i, j, k, l)``;
its value is written ``z_ij``.  At every vertex the three values ``z_ij`` form
a triangle shape, so the structure is fixed by ``(z12, z21, z34, z43)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations
from typing import Dict, NamedTuple, Tuple

from .dilog import D, lobachevsky
from .errors import DomainError

__all__ = [
    "CrossRatioStructure",
    "TriangleShape",
    "BranchClass",
    "EVEN_ORDERINGS",
    "FREE_ORDERINGS",
    "parity",
    "even_completion",
    "from_free_params",
    "invariant",
    "volume",
    "volume_angle_form",
    "hyperbolic_lift",
    "diagonal_structure",
    "classify_branch",
    "edge_products",
    "vertex_triangle",
    "reorder",
    "triangle_from_z1",
    "all_orderings",
    "branch_residuals",
]

# Closer than this to 0 or 1 counts as the excluded value.
DEGENERACY_TOL = 1e-12
DEFAULT_BRANCH_TOL = 1e-9

# z_ij  ->  even ordering whose value it is
EVEN_ORDERINGS: Dict[Tuple[int, int], Tuple[int, int, int, int]] = {
    (1, 2): (1, 2, 3, 4),
    (1, 3): (1, 3, 4, 2),
    (1, 4): (1, 4, 2, 3),
    (2, 1): (2, 1, 4, 3),
    (2, 4): (2, 4, 3, 1),
    (2, 3): (2, 3, 1, 4),
    (3, 4): (3, 4, 1, 2),
    (3, 1): (3, 1, 2, 4),
    (3, 2): (3, 2, 4, 1),
    (4, 3): (4, 3, 2, 1),
    (4, 2): (4, 2, 1, 3),
    (4, 1): (4, 1, 3, 2),
}

# the [[u1, u2, u3, u4]] column: z12, z21, z34, z43
FREE_ORDERINGS = ((1, 2, 3, 4), (2, 1, 4, 3), (3, 4, 1, 2), (4, 3, 2, 1))

# at each vertex, z_ij -> z_ik -> z_il with z_next = 1 / (1 - z_prev)
_VERTEX_CYCLES = {
    1: (2, 3, 4),
    2: (1, 4, 3),
    3: (4, 1, 2),
    4: (3, 2, 1),
}


def parity(ordering) -> int:
    """+1 for an even permutation of (1, 2, 3, 4), -1 for an odd one."""
    ordering = tuple(ordering)
    if sorted(ordering) != [1, 2, 3, 4]:
        raise DomainError(f"not an ordering of the vertices 1..4: {ordering!r}")
    sign = 1
    seq = list(ordering)
    for i in range(4):
        while seq[i] != i + 1:
            j = seq[i] - 1
            seq[i], seq[j] = seq[j], seq[i]
            sign = -sign
    return sign


def even_completion(i: int, j: int) -> Tuple[int, int, int, int]:
    return EVEN_ORDERINGS[(i, j)]


class TriangleShape(NamedTuple):
    """Similarity class of a triangle: ``z2 = 1/(1-z1)``, ``z3 = 1/(1-z2)``."""

    z1: complex
    z2: complex
    z3: complex


def triangle_from_z1(z1: complex) -> TriangleShape:
    z2 = 1 / (1 - z1)
    return TriangleShape(z1, z2, 1 / (1 - z2))


class BranchClass(Enum):
    HYPERBOLIC = "HyperbolicBranch"
    DIAGONAL = "DiagonalBranch"
    BOTH = "BothDegenerate"
    NEITHER = "Neither"


def _check_param(name, value):
    try:
        value = complex(value)
    except TypeError:
        raise DomainError(f"{name} is not a complex number: {value!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    if abs(value) < DEGENERACY_TOL:
        raise DomainError(f"{name} = {value!r} is (numerically) 0")
    if abs(value - 1) < DEGENERACY_TOL:
        raise DomainError(f"{name} = {value!r} is (numerically) 1")
    return value


@dataclass(frozen=True)
class CrossRatioStructure:
    """Cross-ratio structure on an ordered simplex ``[p1, p2, p3, p4]``.

    Built from the four free parameters; the other eight ``z_ij`` are derived
    once in ``__post_init__`` and read through :meth:`z` or :attr:`table`.
    """

    z12: complex
    z21: complex
    z34: complex
    z43: complex
    table: Dict[Tuple[int, int], complex] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        free = {}
        for name in ("z12", "z21", "z34", "z43"):
            value = _check_param(name, getattr(self, name))
            object.__setattr__(self, name, value)
            free[name] = value
        table = {}
        for v, start in ((1, free["z12"]), (2, free["z21"]), (3, free["z34"]), (4, free["z43"])):
            a, b, c = _VERTEX_CYCLES[v]
            table[(v, a)] = start
            table[(v, b)] = 1 / (1 - start)
            table[(v, c)] = 1 / (1 - table[(v, b)])
        for key, value in table.items():
            _check_param(f"z{key[0]}{key[1]}", value)
        object.__setattr__(self, "table", table)

    @property
    def free(self) -> Tuple[complex, complex, complex, complex]:
        return (self.z12, self.z21, self.z34, self.z43)

    def z(self, i: int, j: int) -> complex:
        return self.table[(i, j)]

    def invariant(self, ordering) -> complex:
        return invariant(self, ordering)

    def conjugate(self) -> "CrossRatioStructure":
        return CrossRatioStructure(*(w.conjugate() for w in self.free))


def from_free_params(z12, z21, z34, z43) -> CrossRatioStructure:
    return CrossRatioStructure(z12, z21, z34, z43)


def invariant(s: CrossRatioStructure, ordering) -> complex:
    """``X(p_i, p_j, p_k, p_l)`` for any ordering of the four vertices."""
    ordering = tuple(ordering)
    sign = parity(ordering)
    value = s.table[(ordering[0], ordering[1])]
    return value if sign > 0 else 1 / value


def reorder(s: CrossRatioStructure, ordering) -> CrossRatioStructure:
    """The same structure seen on the simplex ``[p_o1, p_o2, p_o3, p_o4]``.

    Vertex ``k`` of the result is vertex ``ordering[k-1]`` of ``s``.  For an odd
    ordering all invariants are inverted relative to the even ones, so the
    volume changes sign.
    """
    o = tuple(ordering)
    parity(o)
    return CrossRatioStructure(*(invariant(s, tuple(o[k - 1] for k in f)) for f in FREE_ORDERINGS))


def volume(s: CrossRatioStructure) -> float:
    """``D(z12) + D(z21) + D(z34) + D(z43)``."""
    return math.fsum(D(w) for w in s.free)


def volume_angle_form(s: CrossRatioStructure) -> float:
    """Volume through the Lobachevsky function of all twelve ``arg z_ij``."""
    return math.fsum(lobachevsky(cmath.phase(w)) for w in s.table.values())


def hyperbolic_lift(z12, z21) -> CrossRatioStructure:
    """Point of the hyperbolic branch over ``(z12, z21)``."""
    z12 = _check_param("z12", z12)
    z21 = _check_param("z21", z21)
    z34 = -z12 * (1 - z21) / (1 - z12)
    z43 = -z21 * (1 - z12) / (1 - z21)
    return CrossRatioStructure(z12, z21, z34, z43)


def diagonal_structure(z) -> CrossRatioStructure:
    """Point of the diagonal branch ``z12 = z21 = z34 = z43 = z``."""
    z = _check_param("z", z)
    return CrossRatioStructure(z, z, z, z)


def edge_products(s: CrossRatioStructure) -> Tuple[complex, complex, complex]:
    """``(z12 z21, z31 z13, z14 z41)``."""
    t = s.table
    return (t[1, 2] * t[2, 1], t[3, 1] * t[1, 3], t[1, 4] * t[4, 1])


def _rel(a, b, scale):
    return abs(a - b) / max(1.0, abs(scale))


def branch_residuals(s: CrossRatioStructure) -> Dict[str, float]:
    """Scale-normalized residuals used by :func:`classify_branch`."""
    t = s.table
    pairs = (((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3)))
    variety = 0.0
    for (i, j), (k, l) in pairs:
        left = t[i, j] * t[j, i]
        right = t[k, l] * t[l, k]
        variety = max(variety, _rel(left, right, max(abs(left), abs(right))))
    z12, z21, z34, z43 = s.free
    h34 = -z12 * (1 - z21) / (1 - z12)
    h43 = -z21 * (1 - z12) / (1 - z21)
    hyperbolic = max(_rel(z34, h34, z34), _rel(z43, h43, z43))
    diagonal = max(_rel(z21, z12, z12), _rel(z34, z12, z12), _rel(z43, z12, z12))
    return {"variety": variety, "hyperbolic": hyperbolic, "diagonal": diagonal}


def classify_branch(s: CrossRatioStructure, tol: float = DEFAULT_BRANCH_TOL) -> BranchClass:
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    res = branch_residuals(s)
    if res["variety"] > tol:
        return BranchClass.NEITHER
    on_hyp = res["hyperbolic"] <= tol
    on_diag = res["diagonal"] <= tol
    if on_hyp and on_diag:
        return BranchClass.BOTH
    if on_hyp:
        return BranchClass.HYPERBOLIC
    if on_diag:
        return BranchClass.DIAGONAL
    return BranchClass.NEITHER


def vertex_triangle(s: CrossRatioStructure, v: int) -> TriangleShape:
    """The triangle seen from vertex ``v``, in similarity order."""
    if v not in _VERTEX_CYCLES:
        raise DomainError(f"vertex label must be in 1..4, got {v!r}")
    a, b, c = _VERTEX_CYCLES[v]
    return TriangleShape(s.table[v, a], s.table[v, b], s.table[v, c])


def all_orderings():
    return list(permutations((1, 2, 3, 4)))
