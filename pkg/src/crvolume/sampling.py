"""Seeded random generators for points, transformations and coordinates.

Every function takes an explicit ``numpy.random.Generator`` so results are
reproducible from a seed.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

from .crgeom import INFINITY_POINT, J, HeisenbergPoint, cartan_invariant
from .errors import DegenerateConfigurationError, DomainError
from .pentad import FivePointCoordinates, assemble_columns, derive_dependent

__all__ = [
    "random_complex",
    "random_point",
    "random_points",
    "random_generic_points",
    "random_j_unitary",
    "random_coordinates",
]

# sampled values stay this far from 0 and 1, with modulus in [R_MIN, R_MAX]
EXCLUSION = 0.05
R_MIN, R_MAX = 0.2, 5.0
# columns with entries closer than this to 0 or 1 are resampled
CONDITIONING = 1e-3
# keep sampled triples away from C-circles (|A| = pi/2)
CARTAN_MARGIN = 1e-3


def random_complex(rng: np.random.Generator) -> complex:
    """Log-uniform modulus in the annulus, uniform argument, away from 1."""
    while True:
        r = math.exp(rng.uniform(math.log(R_MIN), math.log(R_MAX)))
        w = complex(r * np.exp(1j * rng.uniform(-math.pi, math.pi)))
        if abs(w - 1) > EXCLUSION:
            return w


def random_point(rng: np.random.Generator, infinity_prob: float = 0.0) -> HeisenbergPoint:
    if infinity_prob > 0 and rng.random() < infinity_prob:
        return INFINITY_POINT
    z = complex(rng.normal(), rng.normal())
    return HeisenbergPoint(z, float(rng.normal()))


def _generic(points) -> bool:
    n = len(points)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                try:
                    angle = cartan_invariant(points[a], points[b], points[c])
                except DomainError:
                    return False
                if abs(angle) > math.pi / 2 - CARTAN_MARGIN:
                    return False
    return True


def random_points(rng: np.random.Generator, n: int, infinity_prob: float = 0.0):
    """``n`` points, at most one of them at infinity."""
    out = []
    for _ in range(n):
        p = random_point(rng, infinity_prob if INFINITY_POINT not in out else 0.0)
        out.append(p)
    return out


def random_generic_points(rng: np.random.Generator, n: int, infinity_prob: float = 0.0):
    """``n`` points with no three on or near a common C-circle."""
    while True:
        pts = random_points(rng, n, infinity_prob)
        if _generic(pts):
            return pts


def random_j_unitary(rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """``expm(J A)`` with ``A`` anti-Hermitian, so that ``g^* J g = J``."""
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    anti = scale * (m - m.conj().T) / 2
    return expm(J @ anti)


def random_coordinates(rng: np.random.Generator, max_tries: int = 1000) -> FivePointCoordinates:
    """Admissible seven-coordinate point with well-conditioned columns."""
    for _ in range(max_tries):
        free = [random_complex(rng) for _ in range(7)]
        try:
            coords = derive_dependent(*free)
            cols = assemble_columns(coords)
        except DegenerateConfigurationError:
            continue
        entries = [w for c in cols.columns for w in c.table.values()]
        if all(CONDITIONING < abs(w) < 1 / CONDITIONING and abs(w - 1) > CONDITIONING for w in entries):
            return coords
    raise DegenerateConfigurationError("no admissible coordinates found")
