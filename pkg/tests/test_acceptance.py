"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that pytest prints in the terminal
summary; running this file directly prints the same lines.
"""

import cmath
import math
from itertools import combinations

import numpy as np

from conftest import ACCEPTANCE_LINES
from crvolume.crgeom import (
    angle_decomposition,
    apply_transformation,
    cartan_invariant,
    coboundary_defect,
    cr_residuals,
    cross_ratio_structure_of,
    falbel_invariant,
    kr_cross_ratio,
)
from crvolume.crstruct import CrossRatioStructure, hyperbolic_lift, reorder, volume
from crvolume.dilog import D, bloch_wigner, five_term_defect
from crvolume.errors import DegenerateConfigurationError, DomainError
from crvolume.pentad import (
    assemble_columns,
    five_term_volume_defect,
    from_five_points,
    jacobian_nullity,
    prop1_assemble,
)
from crvolume.sampling import random_complex, random_coordinates, random_generic_points, random_j_unitary
from crvolume.triangulation import (
    Tetrahedron,
    Triangulation,
    geometric_assignment,
    pachner_23,
    pachner_32,
    total_volume,
)
from oracles import d_series


def record(number, name, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {number:2d} {name}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert passed, detail


def rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def pair_triangulation(signs=(1, 1)):
    return Triangulation.from_tetrahedra(
        [Tetrahedron("A", ("1", "2", "3", "4"), signs[0]), Tetrahedron("B", ("2", "3", "4", "5"), signs[1])]
    )


def test_01_dilog_anchors():
    anchors = [(1j, 0.915965594177219), (cmath.exp(1j * math.pi / 3), 1.014941606409653)]
    worst_anchor = max(abs(bloch_wigner(z).value - v) for z, v in anchors)
    worst_oracle = max(abs(d_series(z) - v) for z, v in anchors)
    record(
        1,
        "dilogarithm anchors",
        worst_anchor <= 1e-12 and worst_oracle <= 1e-12,
        f"|D - anchor| = {worst_anchor:.2e}, |series - anchor| = {worst_oracle:.2e} (tol 1e-12)",
    )


def test_02_five_term_relation():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        x, y = (complex(*rng.uniform(-5, 5, size=2)) for _ in range(2))
        worst = max(worst, five_term_defect(x, y))
    record(2, "five-term relation, 1000 pairs", worst <= 1e-11, f"max defect {worst:.2e} (tol 1e-11)")


def test_03_five_term_volume():
    rng = np.random.default_rng(3)
    abstract = max(five_term_volume_defect(random_coordinates(rng)) for _ in range(1000))
    geometric = max(five_term_volume_defect(from_five_points(*random_generic_points(rng, 5, 0.1))[1]) for _ in range(100))
    record(
        3,
        "five-term volume, 1000 coordinates + 100 configurations",
        max(abstract, geometric) <= 1e-9,
        f"max defect {abstract:.2e} abstract, {geometric:.2e} geometric (tol 1e-9)",
    )


def test_04_hyperbolic_volume_identity():
    rng = np.random.default_rng(4)
    worst = 0.0
    done = 0
    while done < 500:
        a, b = random_complex(rng), random_complex(rng)
        try:
            s = hyperbolic_lift(a, b)
        except DomainError:
            continue
        worst = max(worst, abs(D(a * b) - volume(s)))
        done += 1
    record(4, "hyperbolic branch volume, 500 samples", worst <= 1e-11, f"max |D(z12 z21) - Vol| {worst:.2e} (tol 1e-11)")


def test_05_cr_variety():
    rng = np.random.default_rng(5)
    cr = angles = 0.0
    for _ in range(500):
        s = cross_ratio_structure_of(*random_generic_points(rng, 4, 0.1)).structure
        cr = max(cr, *cr_residuals(s).values())
        angles = max(angles, *angle_decomposition(s)["residuals"].values())
    record(
        5,
        "CR variety equations, 500 quadruples",
        cr <= 1e-9 and angles <= 1e-8,
        f"max CR residual {cr:.2e} (tol 1e-9), max angle residual {angles:.2e} (tol 1e-8)",
    )


def test_06_coboundary():
    rng = np.random.default_rng(6)
    worst = max(coboundary_defect(*random_generic_points(rng, 4, 0.1)) for _ in range(500))
    record(6, "coboundary, 500 quadruples", worst <= 1e-9, f"max defect {worst:.2e} (tol 1e-9)")


def test_07_cartan_kr_identities():
    rng = np.random.default_rng(7)
    kr = table = 0.0
    for _ in range(500):
        p1, p2, p3, p4 = random_generic_points(rng, 4, 0.1)
        phase = cmath.exp(2j * cartan_invariant(p2, p3, p4))
        prod = kr_cross_ratio(p1, p2, p3, p4) * kr_cross_ratio(p1, p4, p2, p3) * kr_cross_ratio(p1, p3, p4, p2)
        kr = max(kr, abs(prod - phase))
        t = cross_ratio_structure_of(p1, p2, p3, p4).structure.table
        table = max(table, abs(phase + t[2, 1] * t[4, 1] * t[3, 1]))
    record(
        7,
        "Cartan and KR identities, 500 samples",
        kr <= 1e-10 and table <= 1e-9,
        f"KR product {kr:.2e} (tol 1e-10), -z21 z41 z31 {table:.2e} (tol 1e-9)",
    )


def test_08_dimension_counts():
    rng = np.random.default_rng(8)
    prop1, prop2 = [], []
    while len(prop1) < 20:
        try:
            q = prop1_assemble(*(random_complex(rng) for _ in range(10)))
        except DegenerateConfigurationError:
            continue
        prop1.append(jacobian_nullity(q, include_faces=False))
    for _ in range(20):
        prop2.append(jacobian_nullity(assemble_columns(random_coordinates(rng)), include_faces=True))
    record(
        8,
        "Jacobian nullities at 20 points",
        set(prop1) == {10} and set(prop2) == {7},
        f"edge system {sorted(set(prop1))} (want 10), edge+face system {sorted(set(prop2))} (want 7)",
    )


def _round_trip_error(t, a):
    t3, a3 = pachner_32(*pachner_23(t, a, ("2", "3", "4")), ("1", "5"))
    worst = 0.0
    for tet in t3.tetrahedra:
        src = t.tet("A") if set(tet.vertices) == set("1234") else t.tet("B")
        want = reorder(a[src.id], tuple(src.local(v) + 1 for v in tet.vertices))
        worst = max(worst, *(rel(u, v) for u, v in zip(a3[tet.id].free, want.free)))
    return worst


def test_09_pachner_invariance():
    rng = np.random.default_rng(9)
    geometric = abstract = trip = 0.0
    for _ in range(100):
        t = pair_triangulation()
        a = geometric_assignment(t, dict(zip("12345", random_generic_points(rng, 5, 0.1))))
        t2, a2 = pachner_23(t, a, ("2", "3", "4"))
        geometric = max(geometric, abs(total_volume(t2, a2) - total_volume(t, a)))
        trip = max(trip, _round_trip_error(t, a))
    for _ in range(100):
        cols = assemble_columns(random_coordinates(rng)).columns
        t = pair_triangulation()
        a = {"A": cols[0], "B": cols[4]}
        t2, a2 = pachner_23(t, a, ("2", "3", "4"))
        abstract = max(abstract, abs(total_volume(t2, a2) - total_volume(t, a)))
        trip = max(trip, _round_trip_error(t, a))
    record(
        9,
        "Pachner 2-3 invariance, 100 geometric + 100 abstract",
        max(geometric, abstract) <= 1e-9 and trip <= 1e-10,
        f"max |dVol| {geometric:.2e} geometric, {abstract:.2e} abstract (tol 1e-9), round trip {trip:.2e} (tol 1e-10)",
    )


def _invariants(p):
    out = [cartan_invariant(*tri) for tri in combinations(p, 3)]
    out += [kr_cross_ratio(*p), falbel_invariant(*p)]
    out += list(cross_ratio_structure_of(*p).structure.table.values())
    return out


def test_10_unitary_invariance():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        p = random_generic_points(rng, 4, 0.1)
        g = random_j_unitary(rng)
        moved = [apply_transformation(g, x) for x in p]
        worst = max(worst, *(rel(u, v) for u, v in zip(_invariants(moved), _invariants(p))))
    record(10, "invariance under 100 J-unitary maps", worst <= 1e-9, f"max relative change {worst:.2e} (tol 1e-9)")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
