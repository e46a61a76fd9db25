"""CR geometry of configurations on S^3 = Heisenberg group + {infinity}.

Points are lifted to null vectors of C^{2,1} for the Hermitian form
``<u, w> = w^* J u`` with J the antidiagonal matrix; ``(z, t)`` lifts to
``[(-|z|^2 + i t)/2, z, 1]`` and infinity to ``[1, 0, 0]``.  Every invariant
here is a ratio of brackets in which each lift appears equally often in the
numerator and the denominator, so none depends on the choice of lifts.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from .crstruct import EVEN_ORDERINGS, CrossRatioStructure
from .dilog import D
from .errors import DegenerateConfigurationError, DomainError

__all__ = [
    "J",
    "HeisenbergPoint",
    "INFINITY_POINT",
    "CRConfiguration",
    "lift",
    "herm",
    "cartan_invariant",
    "kr_cross_ratio",
    "polar_vector",
    "falbel_invariant",
    "cross_ratio_structure_of",
    "face_cochain",
    "coboundary_terms",
    "coboundary_defect",
    "angle_decomposition",
    "normalize_to_standard",
    "apply_transformation",
    "point_from_vector",
    "heisenberg_product",
    "cr_residuals",
    "kr_from_falbel_formula",
]

J = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)

# A bracket is treated as zero below this fraction of the product of norms.
BRACKET_TOL = 1e-12
# Triples with |cos A| below this are treated as lying on a C-circle.
CCIRCLE_TOL = 1e-10


@dataclass(frozen=True)
class HeisenbergPoint:
    """A point ``(z, t)`` of the Heisenberg group, or the point at infinity."""

    z: complex = 0j
    t: float = 0.0
    at_infinity: bool = False

    def __post_init__(self):
        if self.at_infinity:
            object.__setattr__(self, "z", 0j)
            object.__setattr__(self, "t", 0.0)
            return
        z = complex(self.z)
        t = float(self.t)
        if not (math.isfinite(z.real) and math.isfinite(z.imag) and math.isfinite(t)):
            raise DomainError(f"Heisenberg coordinates must be finite, got z={z!r}, t={t!r}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", t)

    @classmethod
    def infinity(cls) -> "HeisenbergPoint":
        return cls(at_infinity=True)

    def __repr__(self):
        if self.at_infinity:
            return "HeisenbergPoint.infinity()"
        return f"HeisenbergPoint(z={self.z!r}, t={self.t!r})"


INFINITY_POINT = HeisenbergPoint.infinity()


def heisenberg_product(p: HeisenbergPoint, q: HeisenbergPoint) -> HeisenbergPoint:
    """Group law ``(z, t)(z', t') = (z + z', t + t' + 2 Im(z conj(z')))``."""
    if p.at_infinity or q.at_infinity:
        raise DomainError("infinity is not an element of the Heisenberg group")
    return HeisenbergPoint(p.z + q.z, p.t + q.t + 2 * (p.z * q.z.conjugate()).imag)


def lift(p: HeisenbergPoint) -> np.ndarray:
    if p.at_infinity:
        return np.array([1, 0, 0], dtype=complex)
    z = p.z
    return np.array([(-abs(z) ** 2 + 1j * p.t) / 2, z, 1], dtype=complex)


def herm(u, w) -> complex:
    """``<u, w> = w^* J u``: linear in ``u``, conjugate-linear in ``w``."""
    return complex(u[0] * w[2].conjugate() + u[1] * w[1].conjugate() + u[2] * w[0].conjugate())


def point_from_vector(v) -> HeisenbergPoint:
    """Heisenberg coordinates of the null line through ``v``."""
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise DomainError("zero vector does not define a point")
    if abs(v[2]) <= BRACKET_TOL * norm:
        return INFINITY_POINT
    v = v / v[2]
    return HeisenbergPoint(v[1], 2 * v[0].imag)


def _bracket(u, w, what):
    value = herm(u, w)
    if abs(value) < BRACKET_TOL * np.linalg.norm(u) * np.linalg.norm(w):
        raise DegenerateConfigurationError(f"bracket <{what}> vanishes")
    return value


def _lifts(points):
    return [lift(p) for p in points]


def _require_distinct(points, names):
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            if points[a] == points[b]:
                raise DomainError(f"points {names[a]} and {names[b]} coincide")


def cartan_invariant(p1: HeisenbergPoint, p2: HeisenbergPoint, p3: HeisenbergPoint) -> float:
    """Cartan's angular invariant ``arg(-<p1,p2><p2,p3><p3,p1>)``."""
    _require_distinct((p1, p2, p3), ("p1", "p2", "p3"))
    u1, u2, u3 = _lifts((p1, p2, p3))
    try:
        product = -_bracket(u1, u2, "p1,p2") * _bracket(u2, u3, "p2,p3") * _bracket(u3, u1, "p3,p1")
    except DegenerateConfigurationError as exc:
        raise DomainError(f"coincident points: {exc}") from None
    return cmath.phase(product)


def kr_cross_ratio(p1, p2, p3, p4) -> complex:
    """Koranyi-Reimann cross-ratio ``<p4,p2><p3,p1> / (<p3,p2><p4,p1>)``."""
    _require_distinct((p1, p2, p3, p4), ("p1", "p2", "p3", "p4"))
    u1, u2, u3, u4 = _lifts((p1, p2, p3, p4))
    den = _bracket(u3, u2, "p3,p2") * _bracket(u4, u1, "p4,p1")
    return herm(u4, u2) * herm(u3, u1) / den


def polar_vector(u, w) -> np.ndarray:
    """A vector J-orthogonal to both ``u`` and ``w``: ``J conj(u x w)``."""
    u = np.asarray(u, dtype=complex)
    w = np.asarray(w, dtype=complex)
    cross = np.cross(u, w)
    if np.linalg.norm(cross) <= BRACKET_TOL * np.linalg.norm(u) * np.linalg.norm(w):
        raise DomainError("vectors are proportional; their span is not a plane")
    return J @ cross.conj()


def _check_not_c_circle(p1, p2, p3, label):
    angle = cartan_invariant(p1, p2, p3)
    if abs(math.cos(angle)) < CCIRCLE_TOL:
        raise DegenerateConfigurationError(f"points {label} lie on a common C-circle")


def falbel_invariant(p1, p2, p3, p4) -> complex:
    """Cross-ratio at ``p1`` of the complex lines towards ``p2, p3, p4`` and
    the line tangent to S^3 at ``p1``.

    ``<p4, c12><p3, p1> / (<p3, c12><p4, p1>)`` with ``c12`` polar to the
    complex line through ``p1`` and ``p2``.  Normalized so that
    ``(inf, 0, 1 + i s, w + i s') -> w``.
    """
    _require_distinct((p1, p2, p3, p4), ("p1", "p2", "p3", "p4"))
    u1, u2, u3, u4 = _lifts((p1, p2, p3, p4))
    c12 = polar_vector(u1, u2)
    den = _bracket(u3, c12, "p3,c12") * _bracket(u4, u1, "p4,p1")
    num = _bracket(u4, c12, "p4,c12") * _bracket(u3, u1, "p3,p1")
    return num / den


@dataclass(frozen=True)
class CRConfiguration:
    """Four points of S^3 with their cross-ratio structure.

    ``direct`` keeps all twelve invariants computed from the points, so the
    similarity relations can be checked against ``structure.table``.
    """

    points: Tuple[HeisenbergPoint, HeisenbergPoint, HeisenbergPoint, HeisenbergPoint]
    structure: CrossRatioStructure
    direct: Dict[Tuple[int, int], complex] = field(repr=False, compare=False)

    def similarity_residual(self) -> float:
        return max(
            abs(self.direct[k] - v) / max(1.0, abs(v)) for k, v in self.structure.table.items()
        )


def cross_ratio_structure_of(p1, p2, p3, p4) -> CRConfiguration:
    points = (p1, p2, p3, p4)
    _require_distinct(points, ("p1", "p2", "p3", "p4"))
    for a, b, c in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        _check_not_c_circle(points[a], points[b], points[c], f"p{a + 1}, p{b + 1}, p{c + 1}")
    direct = {}
    for (i, j), order in EVEN_ORDERINGS.items():
        direct[(i, j)] = falbel_invariant(*(points[k - 1] for k in order))
    structure = CrossRatioStructure(direct[1, 2], direct[2, 1], direct[3, 4], direct[4, 3])
    return CRConfiguration(points, structure, direct)


def cr_residuals(s: CrossRatioStructure) -> Dict[str, float]:
    """Residuals of ``z_ij z_ji = conj(z_kl z_lk)`` and of the reduced
    equations in ``(z12, z21, z34, z43)``."""
    t = s.table
    pairs = (((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3)))
    full = max(
        abs(t[i, j] * t[j, i] - (t[k, l] * t[l, k]).conjugate()) for (i, j), (k, l) in pairs
    )
    a, b, c, d = s.free
    reduced = max(
        abs(a * b - (c * d).conjugate()),
        abs(1 / ((1 - a) * (1 - c)) - 1 / ((1 - b.conjugate()) * (1 - d.conjugate()))),
        abs((1 - 1 / a) * (1 - 1 / d) - (1 - 1 / c.conjugate()) * (1 - 1 / b.conjugate())),
    )
    return {"cr": full, "reduced": reduced}


def face_cochain(p1, p2, p3) -> float:
    """``D(-exp(2 i A(p1, p2, p3))) / 2``."""
    angle = cartan_invariant(p1, p2, p3)
    return 0.5 * D(-cmath.exp(2j * angle))


def coboundary_terms(points: Sequence[HeisenbergPoint]) -> Dict[str, float]:
    """Both sides of the coboundary identity for one ordered quadruple.

    ``cochain`` is the alternating sum over faces of the face cochain,
    ``c(p2,p3,p4) - c(p1,p3,p4) + c(p1,p2,p4) - c(p1,p2,p3)``; ``volume`` is
    the volume of the cross-ratio structure.  ``face_products`` lists the
    triples ``z21 z41 z31, z12 z32 z42, z13 z23 z43, z14 z24 z34``.
    """
    from .crstruct import volume

    p = tuple(points)
    faces = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))
    signs = (1, -1, 1, -1)
    cochain = math.fsum(s * face_cochain(*(p[k] for k in f)) for s, f in zip(signs, faces))
    config = cross_ratio_structure_of(*p)
    t = config.structure.table
    products = [
        t[2, 1] * t[4, 1] * t[3, 1],
        t[1, 2] * t[3, 2] * t[4, 2],
        t[1, 3] * t[2, 3] * t[4, 3],
        t[1, 4] * t[2, 4] * t[3, 4],
    ]
    return {
        "cochain": cochain,
        "volume": volume(config.structure),
        "face_sum": 0.5 * math.fsum(D(w) for w in products),
        "face_products": products,
    }


def coboundary_defect(p1, p2, p3, p4) -> float:
    terms = coboundary_terms((p1, p2, p3, p4))
    return abs(terms["cochain"] - terms["volume"])


def angle_decomposition(s: CrossRatioStructure) -> Dict[str, object]:
    """Polar form ``z_ij = r_ij exp(i theta_ij)`` with the residuals of the
    angle and modulus equations satisfied by CR configurations."""
    t = s.table
    theta = {k: cmath.phase(v) for k, v in t.items()}
    r = {k: abs(v) for k, v in t.items()}

    vertex = 0.0
    for i in range(1, 5):
        total = sum(theta[i, j] for j in range(1, 5) if j != i)
        vertex = max(vertex, min(abs(total - math.pi), abs(total + math.pi)))

    pairs = (((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3)))
    angle_sum = 0.0
    modulus = 0.0
    for (i, j), (k, l) in pairs:
        total = theta[i, j] + theta[j, i] + theta[k, l] + theta[l, k]
        angle_sum = max(angle_sum, abs(math.remainder(total, 2 * math.pi)))
        modulus = max(modulus, abs(r[i, j] * r[j, i] - r[k, l] * r[l, k]))

    sn = {k: math.sin(v) for k, v in theta.items()}
    sine_1 = abs(
        (sn[1, 3] / sn[1, 4]) * (sn[2, 4] / sn[2, 3]) - (sn[3, 1] / sn[3, 2]) * (sn[4, 2] / sn[4, 1])
    )
    sine_2 = abs(
        (sn[1, 4] / sn[1, 2]) * (sn[3, 2] / sn[3, 4]) - (sn[2, 3] / sn[2, 1]) * (sn[4, 1] / sn[4, 3])
    )
    sine_3 = abs(
        (sn[1, 2] / sn[1, 3]) * (sn[4, 3] / sn[4, 2]) - (sn[2, 1] / sn[2, 4]) * (sn[3, 4] / sn[3, 1])
    )
    # modulus at a vertex from the law of sines of its triangle
    law_of_sines = max(
        abs(r[1, 2] - abs(sn[1, 3] / sn[1, 4])),
        abs(r[2, 1] - abs(sn[2, 4] / sn[2, 3])),
        abs(r[3, 4] - abs(sn[3, 1] / sn[3, 2])),
        abs(r[4, 3] - abs(sn[4, 2] / sn[4, 1])),
    )
    return {
        "theta": theta,
        "r": r,
        "residuals": {
            "vertex_sum": vertex,
            "angle_sum": angle_sum,
            "modulus": modulus,
            "sine_1": sine_1,
            "sine_2": sine_2,
            "sine_3": sine_3,
            "law_of_sines": law_of_sines,
        },
    }


def kr_from_falbel_formula(p1, p2, p3, p4) -> complex:
    """The rational expression of the invariant at ``p1`` through five KR values.

    Used only as a consistency check against :func:`falbel_invariant`.
    """
    kr = kr_cross_ratio
    num = kr(p1, p2, p3, p4) * kr(p1, p3, p4, p2) * kr(p2, p3, p1, p4) + 1
    den = 1 + kr(p1, p4, p2, p3) * (kr(p4, p2, p1, p3) - 1)
    return num / den


def apply_transformation(matrix, p: HeisenbergPoint) -> HeisenbergPoint:
    return point_from_vector(np.asarray(matrix) @ lift(p))


def normalize_to_standard(p1, p2, p3, *others):
    """A U(2,1) matrix taking ``p1 -> inf``, ``p2 -> (0, 0)``, ``p3 -> (1, s3)``.

    Returns ``(matrix, s3, images)`` where ``images`` are the images of
    ``others``.  The matrix preserves J exactly up to rounding.
    """
    _require_distinct((p1, p2, p3), ("p1", "p2", "p3"))
    _check_not_c_circle(p1, p2, p3, "p1, p2, p3")
    a, b = lift(p1), lift(p2)
    ab = herm(a, b)
    b = b / ab.conjugate()  # now <a, b> = 1
    c = polar_vector(a, b)
    c = c / math.sqrt(herm(c, c).real)
    frame = np.column_stack([a, c, b])  # e0 -> a, e1 -> c, e2 -> b
    g = J @ frame.conj().T @ J  # inverse of a J-unitary frame
    image = g @ lift(p3)
    image = image / image[2]
    x1 = image[1]
    gamma = abs(x1)
    rescale = np.diag([1 / gamma, gamma / x1, gamma]).astype(complex)
    g = rescale @ g
    s3 = point_from_vector(g @ lift(p3)).t
    images = tuple(apply_transformation(g, q) for q in others)
    return g, s3, images
