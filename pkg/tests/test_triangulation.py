import numpy as np
import pytest

from crvolume.crgeom import INFINITY_POINT, HeisenbergPoint
from crvolume.crstruct import CrossRatioStructure, hyperbolic_lift, reorder, volume
from crvolume.errors import DegenerateConfigurationError, MoveRefusedError, StructuralError
from crvolume.pentad import assemble_columns
from crvolume.sampling import random_complex, random_coordinates, random_generic_points
from crvolume.triangulation import (
    FacePairing,
    Tetrahedron,
    Triangulation,
    geometric_assignment,
    pachner_23,
    pachner_32,
    total_volume,
    validate_edge_compatibility,
    validate_face_compatibility,
)

RHO = complex(np.exp(1j * np.pi / 6))


def double(rng):
    pos = dict(zip("abcd", random_generic_points(rng, 4)))
    t = Triangulation.from_tetrahedra(
        [Tetrahedron("T1", ("a", "b", "c", "d")), Tetrahedron("T2", ("a", "b", "d", "c"))]
    )
    return t, geometric_assignment(t, pos)


def pair(rng, infinity_prob=0.0):
    pos = dict(zip("12345", random_generic_points(rng, 5, infinity_prob)))
    t = Triangulation.from_tetrahedra(
        [Tetrahedron("A", ("1", "2", "3", "4")), Tetrahedron("B", ("2", "3", "4", "5"))]
    )
    return t, geometric_assignment(t, pos), pos


def abstract_pair(rng):
    cols = assemble_columns(random_coordinates(rng)).columns
    t = Triangulation.from_tetrahedra(
        [Tetrahedron("A", ("1", "2", "3", "4")), Tetrahedron("B", ("2", "3", "4", "5"))]
    )
    return t, {"A": cols[0], "B": cols[4]}


def bump(s, index, eps):
    free = list(s.free)
    free[index] += eps
    return CrossRatioStructure(*free)


class TestStructure:
    def test_derived_pairings(self, rng):
        t, _ = double(rng)
        assert len(t.pairings) == 4

    def test_tetrahedron_invariants(self):
        with pytest.raises(StructuralError):
            Tetrahedron("T", ("a", "a", "b", "c"))
        with pytest.raises(StructuralError):
            Tetrahedron("T", ("a", "b", "c", "d"), 0)

    def test_face_in_three_tetrahedra(self):
        tets = [Tetrahedron(f"T{k}", ("a", "b", "c", v)) for k, v in enumerate("def")]
        with pytest.raises(StructuralError, match="shared by 3"):
            Triangulation.from_tetrahedra(tets)

    def test_duplicate_ids(self):
        with pytest.raises(StructuralError):
            Triangulation.from_tetrahedra([Tetrahedron("T", "abcd"), Tetrahedron("T", "abce")])

    def test_explicit_pairing_checks(self):
        tets = [Tetrahedron("T", ("a", "b", "c", "d")), Tetrahedron("U", ("e", "f", "g", "h"))]
        with pytest.raises(StructuralError, match="not a face"):
            Triangulation.from_tetrahedra(tets, [FacePairing("T", ("a", "b", "e"), "U", ("e", "f", "g"))])
        twice = [
            FacePairing("T", ("a", "b", "c"), "U", ("e", "f", "g")),
            FacePairing("T", ("c", "b", "a"), "U", ("f", "g", "h")),
        ]
        with pytest.raises(StructuralError, match="twice"):
            Triangulation.from_tetrahedra(tets, twice)

    def test_reversed_edge_is_structural_error(self, rng):
        t = Triangulation.from_tetrahedra(
            [Tetrahedron("T", ("a", "b", "c", "d"))],
            [FacePairing("T", ("a", "b", "c"), "T", ("b", "a", "d"))],
        )
        a = {"T": hyperbolic_lift(2 + 1j, 0.5 - 1j)}
        with pytest.raises(StructuralError, match="reversed"):
            validate_edge_compatibility(t, a)

    def test_missing_structure(self, rng):
        t, a = double(rng)
        del a["T2"]
        with pytest.raises(StructuralError, match="T2"):
            validate_edge_compatibility(t, a)


class TestValidation:
    def test_double_is_compatible(self, rng):
        for _ in range(20):
            t, a = double(rng)
            edges = validate_edge_compatibility(t, a)
            faces = validate_face_compatibility(t, a)
            assert len(edges.residuals) == 6 and not edges.skipped
            assert edges.passed and edges.max_residual <= 1e-9
            assert faces.passed and faces.max_residual <= 1e-9
            assert len(faces.extra) == 4

    def test_perturbation_flags_edges_at_vertex(self, rng):
        t, a = double(rng)
        a["T1"] = bump(a["T1"], 0, 1e-3)
        report = validate_edge_compatibility(t, a)
        hit = {name.split("@")[0] for name, r in report.residuals.items() if r >= 1e-4}
        assert hit == {"a-b", "a-c", "a-d"}
        assert not report.passed
        assert report.worst.split("@")[0] in hit

    def test_any_single_perturbation_is_caught(self, rng):
        t, a = double(rng)
        for tet in ("T1", "T2"):
            for k in range(4):
                b = dict(a)
                b[tet] = bump(a[tet], k, 1e-3 * np.exp(1j * rng.uniform(0, 2 * np.pi)))
                worst = max(validate_edge_compatibility(t, b).max_residual, validate_face_compatibility(t, b).max_residual)
                assert worst >= 1e-4

    def test_single_tetrahedron_is_vacuous(self):
        t = Triangulation.from_tetrahedra([Tetrahedron("T", ("a", "b", "c", "d"))])
        a = {"T": hyperbolic_lift(RHO, RHO)}
        edges = validate_edge_compatibility(t, a)
        assert edges.passed and not edges.residuals and len(edges.skipped) == 6
        assert validate_face_compatibility(t, a).passed

    def test_pair_faces_and_oriented_form(self, rng):
        for _ in range(20):
            t, a, _ = pair(rng, 0.1)
            faces = validate_face_compatibility(t, a)
            assert faces.max_residual <= 1e-9
            assert list(faces.extra) == ["A:2,3,4"]
            assert faces.extra["A:2,3,4"] <= 1e-9
            assert len(validate_edge_compatibility(t, a).skipped) == 9

    def test_random_assignment_fails_with_face_name(self, rng):
        t, _, _ = pair(rng)
        a = {tid: CrossRatioStructure(*(random_complex(rng) for _ in range(4))) for tid in ("A", "B")}
        faces = validate_face_compatibility(t, a)
        assert not faces.passed
        assert faces.worst == "A:2,3,4"

    def test_explicit_pairings_match_derived(self, rng):
        t, a = double(rng)
        relabeled = Triangulation.from_tetrahedra(
            [Tetrahedron("T1", ("a", "b", "c", "d")), Tetrahedron("T2", ("A", "B", "D", "C"))],
            [
                FacePairing("T1", tuple(f), "T2", tuple(f.upper()))
                for f in ("abc", "abd", "acd", "bcd")
            ],
        )
        e1 = validate_edge_compatibility(t, a)
        e2 = validate_edge_compatibility(relabeled, a)
        assert sorted(e1.residuals.values()) == sorted(e2.residuals.values())
        assert validate_face_compatibility(relabeled, a).passed

    def test_report_json(self, rng):
        t, a = double(rng)
        doc = validate_edge_compatibility(t, a, 1e-9).to_json()
        assert doc["passed"] is True and doc["tolerance"] == 1e-9
        assert set(doc) >= {"residuals", "skipped", "worst", "max_residual"}


class TestVolume:
    def test_single_hyperbolic(self):
        t = Triangulation.from_tetrahedra([Tetrahedron("T", ("a", "b", "c", "d"))])
        assert abs(total_volume(t, {"T": hyperbolic_lift(RHO, RHO)}) - 1.014941606409653) < 1e-12

    def test_mirror_pair_cancels(self, rng):
        s = CrossRatioStructure(*(random_complex(rng) for _ in range(4)))
        t = Triangulation.from_tetrahedra([Tetrahedron("T", "abcd"), Tetrahedron("U", "efgh")])
        assert abs(total_volume(t, {"T": s, "U": s.conjugate()})) < 1e-12

    def test_sign_flip_is_exact(self, rng):
        s = CrossRatioStructure(*(random_complex(rng) for _ in range(4)))
        plus = Triangulation.from_tetrahedra([Tetrahedron("T", "abcd", 1)])
        minus = Triangulation.from_tetrahedra([Tetrahedron("T", "abcd", -1)])
        assert total_volume(minus, {"T": s}) == -total_volume(plus, {"T": s})

    def test_deterministic(self, rng):
        t, a, _ = pair(rng)
        values = {total_volume(t, a) for _ in range(5)}
        assert len(values) == 1

    def test_double_volume_vanishes(self, rng):
        t, a = double(rng)
        assert abs(total_volume(t, a)) < 1e-12


class TestGeometricAssignment:
    def test_c_circle_names_simplex(self):
        pos = {
            "a": INFINITY_POINT,
            "b": HeisenbergPoint(0, 0),
            "c": HeisenbergPoint(0, 1.5),
            "d": HeisenbergPoint(1 + 0.5j, -0.25),
            "e": HeisenbergPoint(2, 1),
        }
        t = Triangulation.from_tetrahedra([Tetrahedron("good", ("b", "c", "d", "e")), Tetrahedron("bad", ("a", "b", "c", "d"))])
        with pytest.raises(DegenerateConfigurationError, match="tetrahedron bad"):
            geometric_assignment(t, pos)

    def test_missing_position(self, rng):
        t = Triangulation.from_tetrahedra([Tetrahedron("T", ("a", "b", "c", "z"))])
        with pytest.raises(StructuralError, match="'z'"):
            geometric_assignment(t, dict(zip("abc", random_generic_points(rng, 3))))

    def test_even_relabeling_keeps_volume(self, rng):
        pos = dict(zip("abcd", random_generic_points(rng, 4)))
        base = Triangulation.from_tetrahedra([Tetrahedron("T", ("a", "b", "c", "d"))])
        v = total_volume(base, geometric_assignment(base, pos))
        for order in (("b", "a", "d", "c"), ("c", "a", "b", "d"), ("d", "c", "b", "a")):
            t = Triangulation.from_tetrahedra([Tetrahedron("T", order)])
            assert abs(total_volume(t, geometric_assignment(t, pos)) - v) < 1e-12


class TestPachner:
    def test_geometric_volume_invariance(self, rng):
        for _ in range(30):
            t, a, _ = pair(rng, 0.1)
            t2, a2 = pachner_23(t, a, ("2", "3", "4"))
            assert len(t2.tetrahedra) == 3
            assert [x.sign for x in t2.tetrahedra] == [1, -1, 1]
            assert abs(total_volume(t2, a2) - total_volume(t, a)) <= 1e-9
            assert validate_edge_compatibility(t2, a2).max_residual <= 1e-9
            assert validate_face_compatibility(t2, a2).max_residual <= 1e-9

    def test_abstract_volume_invariance(self, rng):
        for _ in range(30):
            t, a = abstract_pair(rng)
            t2, a2 = pachner_23(t, a, ("4", "3", "2"))
            assert abs(total_volume(t2, a2) - total_volume(t, a)) <= 1e-9

    def test_new_tetrahedra_match_geometry(self, rng):
        t, a, pos = pair(rng)
        t2, a2 = pachner_23(t, a, ("2", "3", "4"))
        direct = geometric_assignment(t2, pos)
        for tid, s in a2.items():
            assert max(abs(u - v) / max(1, abs(v)) for u, v in zip(s.free, direct[tid].free)) < 1e-9

    def test_round_trip(self, rng):
        for _ in range(20):
            t, a, _ = pair(rng, 0.1)
            t3, a3 = pachner_32(*pachner_23(t, a, ("2", "3", "4")), ("1", "5"))
            assert len(t3.tetrahedra) == 2
            for tet in t3.tetrahedra:
                src = t.tet("A") if set(tet.vertices) == set("1234") else t.tet("B")
                want = reorder(a[src.id], tuple(src.local(v) + 1 for v in tet.vertices))
                got = a3[tet.id]
                assert max(abs(u - v) / max(1, abs(v)) for u, v in zip(got.free, want.free)) <= 1e-10
                assert abs(tet.sign * volume(got) - src.sign * volume(a[src.id])) <= 1e-10

    def test_permuted_vertex_orders(self, rng):
        pos = dict(zip("12345", random_generic_points(rng, 5)))
        t = Triangulation.from_tetrahedra(
            [Tetrahedron("A", ("2", "1", "3", "4"), -1), Tetrahedron("B", ("3", "2", "4", "5"), -1)]
        )
        a = geometric_assignment(t, pos)
        t2, a2 = pachner_23(t, a, ("2", "3", "4"))
        assert abs(total_volume(t2, a2) - total_volume(t, a)) <= 1e-9

    def test_incoherent_orientation_refused(self, rng):
        pos = dict(zip("12345", random_generic_points(rng, 5)))
        t = Triangulation.from_tetrahedra(
            [Tetrahedron("A", ("1", "2", "3", "4")), Tetrahedron("B", ("3", "2", "4", "5"))]
        )
        with pytest.raises(MoveRefusedError, match="orientation"):
            pachner_23(t, geometric_assignment(t, pos), ("2", "3", "4"))

    def test_incompatible_pair_refused(self, rng):
        t, _ = abstract_pair(rng)
        a = {tid: CrossRatioStructure(*(random_complex(rng) for _ in range(4))) for tid in ("A", "B")}
        with pytest.raises(MoveRefusedError):
            pachner_23(t, a, ("2", "3", "4"))

    def test_boundary_face(self, rng):
        t, a, _ = pair(rng)
        with pytest.raises(StructuralError, match="not an interior face"):
            pachner_23(t, a, ("1", "2", "3"))

    def test_degree_check_for_3_2(self, rng):
        t, a, _ = pair(rng)
        with pytest.raises(MoveRefusedError, match="lies in 2"):
            pachner_32(t, a, ("2", "3"))

    def test_rest_of_triangulation_kept(self, rng):
        pos = dict(zip("123456", random_generic_points(rng, 6)))
        t = Triangulation.from_tetrahedra(
            [
                Tetrahedron("A", ("1", "2", "3", "4")),
                Tetrahedron("B", ("2", "3", "4", "5")),
                Tetrahedron("C", ("1", "2", "3", "6"), -1),
            ]
        )
        a = geometric_assignment(t, pos)
        t2, a2 = pachner_23(t, a, ("2", "3", "4"))
        assert "C" in a2 and len(t2.tetrahedra) == 4
        assert abs(total_volume(t2, a2) - total_volume(t, a)) <= 1e-9
        assert validate_face_compatibility(t2, a2).max_residual <= 1e-9

    def test_explicit_pairings_carried_over(self, rng):
        pos = dict(zip("123456", random_generic_points(rng, 6)))
        tets = [
            Tetrahedron("A", ("1", "2", "3", "4")),
            Tetrahedron("B", ("2", "3", "4", "5")),
            Tetrahedron("C", ("1", "2", "3", "6"), -1),
        ]
        pairings = [
            FacePairing("A", ("2", "3", "4"), "B", ("2", "3", "4")),
            FacePairing("A", ("1", "2", "3"), "C", ("1", "2", "3")),
        ]
        t = Triangulation.from_tetrahedra(tets, pairings)
        a = geometric_assignment(t, pos)
        t2, a2 = pachner_23(t, a, ("2", "3", "4"))
        assert t2.explicit
        outer = [p for p in t2.pairings if "C" in (p.tet_a, p.tet_b)]
        assert len(outer) == 1 and set(outer[0].face_a) == {"1", "2", "3"}
        assert len(t2.pairings) == 1 + 3
        assert validate_face_compatibility(t2, a2).max_residual <= 1e-9
