"""Per-family congruence classes, configuration predicates, and the
aggregate real-classification label."""

import random

import pytest

from tricong.classify import (
    CongruenceClass,
    NoMatch,
    Report,
    Unclassifiable,
    analyze,
    classify_family,
)
from tricong.congruence import biquadratic_param
from tricong.exact import proportional
from tricong.maps import TrilinearMap, special_planes

from _gen import (
    random_conjugation,
    random_map_111,
    random_map_112,
    random_map_122_conjugate,
    random_map_122_real,
    random_map_222,
)

F112 = ["s1*t0*u1", "s0*t1*u1", "s0*t0*u1", "s0*t0*u0 - s1*t1*u0"]
F222 = ["s1*t0*u0 + s0*t1*u0 + s0*t0*u1", "s0*t1*u1", "s1*t0*u1", "s1*t1*u0"]
TENSOR = ["s0*t0*u0", "s1*t0*u0", "s0*t1*u0", "s0*t0*u1"]


def draw_until(gen, rng, want_label, attempts=40, args=()):
    for _ in range(attempts):
        m = gen(rng, *args)
        if m is None:
            continue
        try:
            rep = analyze(m)
        except (NoMatch, Unclassifiable, ValueError):
            continue
        if rep.theorem_d_label == want_label:
            return m, rep
    raise AssertionError(f"no draw reached {want_label} in {attempts} attempts")


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


class TestDataTypes:
    def test_congruence_class_label_guard(self):
        with pytest.raises(ValueError):
            CongruenceClass("bogus", ())

    def test_report_fields(self, corpus_reports):
        rep = corpus_reports["example_b1"]
        assert isinstance(rep, Report)
        assert rep.map_type.triple == (1, 2, 2)
        assert set(rep.per_family) == {"S", "T", "U"}
        assert isinstance(rep.predicates, dict)
        assert isinstance(rep.warnings, list)


# ---------------------------------------------------------------------------
# Worked example and hand-built maps
# ---------------------------------------------------------------------------


class TestFixedMaps:
    def test_example_label(self, corpus_reports):
        rep = corpus_reports["example_b1"]
        assert rep.theorem_d_label == "(1,2,2) class b.1"
        assert rep.per_family["S"].label == "A2_elliptic"
        assert rep.per_family["T"].label == "A1_hyperbolic"
        assert rep.per_family["U"].label == "A1_hyperbolic"
        assert rep.predicates["series"] == "b"
        assert rep.warnings == []

    def test_tensor_label_and_focal_points(self, corpus_reports):
        rep = corpus_reports["tensor_class4"]
        assert rep.theorem_d_label == "(1,1,1) class 4"
        assert all(rep.per_family[f].label == "C_degenerate" for f in "STU")
        pts = {
            fam: tuple(rep.per_family[fam].focal[0].point.coords)
            for fam in "STU"
        }
        assert proportional(pts["S"], (0, 1, 0, 0))
        assert proportional(pts["T"], (0, 0, 1, 0))
        assert proportional(pts["U"], (0, 0, 0, 1))
        p = rep.predicates
        assert p["coplanar"] is True
        assert p["concurrent"] is False
        assert p["pairing_ab"] == 0 and p["pairing_ac"] == 0 and p["pairing_bc"] == 0
        assert rep.warnings  # degenerate plane data is reported

    def test_112_class1(self, corpus_reports):
        rep = corpus_reports["t112_class1"]
        assert rep.theorem_d_label == "(1,1,2) class 1"
        labels = {f: rep.per_family[f].label for f in "STU"}
        assert labels == {
            "S": "B_quadratic",
            "T": "B_quadratic",
            "U": "C_degenerate",
        }
        p = rep.predicates
        assert proportional(tuple(p["O"]), (0, 0, 0, 1))
        assert p["O_on_conic"] is False
        assert p["conic_rank"] == 3

    def test_222_class1(self, corpus_reports):
        rep = corpus_reports["t222_class1"]
        assert rep.theorem_d_label == "(2,2,2) class 1"
        assert all(rep.per_family[f].label == "B_quadratic" for f in "STU")
        p = rep.predicates
        assert proportional(tuple(p["P"]), (1, 0, 0, 0))
        assert p["D_at_P"] != 0
        assert p["P_on_conic"] is False

    def test_122_a1(self, corpus_reports):
        rep = corpus_reports["t122_a1"]
        assert rep.theorem_d_label == "(1,2,2) class a.1"
        assert all(rep.per_family[f].label == "A1_hyperbolic" for f in "STU")
        assert rep.predicates["series"] == "a"
        assert rep.predicates["pairing_bc"] != 0

    def test_block_permutation_keeps_label(self, corpus_reports):
        # Same map as t112_class1 with the s- and u-blocks exchanged; the
        # degenerate family follows the permutation.
        rep = corpus_reports["t112_perm"]
        assert rep.theorem_d_label == "(1,1,2) class 1"
        labels = {f: rep.per_family[f].label for f in "STU"}
        assert labels == {
            "S": "C_degenerate",
            "T": "B_quadratic",
            "U": "B_quadratic",
        }


# ---------------------------------------------------------------------------
# classify_family in isolation
# ---------------------------------------------------------------------------


class TestClassifyFamily:
    def test_span4_linear_classes(self):
        phi = TrilinearMap.from_strings([
            "s0*t0*u1 + s1*t0*u1 + s0*t1*u1",
            "s1*t0*u1 + s0*t1*u1 + 2*s1*t1*u1",
            "-s0*t1*u0 - s1*t1*u0 + s0*t0*u1 + s1*t0*u1",
            "-s1*t1*u0 + s1*t0*u1",
        ])
        assert classify_family(biquadratic_param(phi, "S")).label == "A2_elliptic"
        assert classify_family(biquadratic_param(phi, "T")).label == "A1_hyperbolic"

    def test_span3_degenerate(self):
        ten = TrilinearMap.from_strings(TENSOR)
        cls = classify_family(biquadratic_param(ten, "S"))
        assert cls.label == "C_degenerate"

    def test_span5_needs_plane_data(self):
        m = TrilinearMap.from_strings(F222)
        data = special_planes(m)
        cls = classify_family(biquadratic_param(m, "S"), data)
        assert cls.label == "B_quadratic"
        kinds = [type(F).__name__ for F in cls.focal]
        assert "Conic" in kinds


# ---------------------------------------------------------------------------
# Generated maps: one per constructible class
# ---------------------------------------------------------------------------


class TestGeneratedClasses:
    @pytest.mark.parametrize("cls", [1, 2, 3, 4])
    def test_111_classes(self, cls):
        rng = random.Random(1000 + cls)
        _, rep = draw_until(
            random_map_111, rng, f"(1,1,1) class {cls}", args=(cls,)
        )
        labels = sorted(rep.per_family[f].label for f in "STU")
        if cls == 1:
            assert labels == ["A1_hyperbolic"] * 3
        elif cls == 4:
            assert labels == ["C_degenerate"] * 3

    def test_112_class1(self):
        rng = random.Random(1100)
        draw_until(random_map_112, rng, "(1,1,2) class 1")

    def test_122_real_series(self):
        rng = random.Random(1200)
        _, rep = draw_until(random_map_122_real, rng, "(1,2,2) class a.1")
        assert rep.predicates["series"] == "a"

    def test_122_conjugate_series(self):
        rng = random.Random(1300)
        _, rep = draw_until(random_map_122_conjugate, rng, "(1,2,2) class b.1")
        assert rep.per_family["S"].label == "A2_elliptic"
        assert rep.predicates["series"] == "b"

    def test_222_class1(self):
        rng = random.Random(1400)
        draw_until(random_map_222, rng, "(2,2,2) class 1")


# ---------------------------------------------------------------------------
# Invariance smoke test (the acceptance suite runs the full battery)
# ---------------------------------------------------------------------------


class TestInvariance:
    def test_label_stable_under_conjugation(self, corpus_maps):
        rng = random.Random(77)
        by_name = {name: (phi, label) for name, phi, label in corpus_maps}
        for name in ("example_b1", "t222_class1"):
            phi, label = by_name[name]
            for _ in range(3):
                conj = random_conjugation(rng, phi)
                assert analyze(conj).theorem_d_label == label
