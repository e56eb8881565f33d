"""Trilinear maps: evaluation, syzygies, type detection, structured special
planes, closed-form inverses, sampled verification, and fiber solving."""

import random

import pytest

from tricong import _linalg
from tricong._ground import rat
from tricong.exact import proportional
from tricong.maps import (
    BasePoint,
    DegenerateConfiguration,
    NotBirational,
    TrilinearMap,
    composition_residuals,
    detect_type,
    eval_map,
    extract_inverse,
    fiber_solve,
    special_planes,
    syzygy_space,
    verify_birational,
)
from tricong.mpoly import SIG_X, parse_poly

from _gen import maps_from_pencils, random_conjugation

# Worked example: type (1,2,2), elliptic s-family.
EXAMPLE = [
    "s0*t0*u1 + s1*t0*u1 + s0*t1*u1",
    "s1*t0*u1 + s0*t1*u1 + 2*s1*t1*u1",
    "-s0*t1*u0 - s1*t1*u0 + s0*t0*u1 + s1*t0*u1",
    "-s1*t1*u0 + s1*t0*u1",
]

# Independently checked inverse of the example map (degrees 1, 2, 2).
EXAMPLE_INVERSE = [
    ("x2 - x3", "x3"),
    ("x0*x2 - x1*x2 + x0*x3 + x1*x3", "x1*x2 - x0*x3"),
    ("x0*x2 - x1*x2 - x2^2 + x0*x3 + x1*x3 - x3^2", "x1*x2 - x0*x3"),
]

F112 = ["s1*t0*u1", "s0*t1*u1", "s0*t0*u1", "s0*t0*u0 - s1*t1*u0"]
F222 = ["s1*t0*u0 + s0*t1*u0 + s0*t0*u1", "s0*t1*u1", "s1*t0*u1", "s1*t1*u0"]
TENSOR = ["s0*t0*u0", "s1*t0*u0", "s0*t1*u0", "s0*t0*u1"]
INVOLUTION = [
    "s0*t0*u0 + s1*t1*u1",
    "s0*t0*u1 + s1*t1*u0",
    "s0*t1*u0 + s1*t0*u1",
    "s0*t1*u1 + s1*t0*u0",
]


@pytest.fixture(scope="module")
def phi():
    return TrilinearMap.from_strings(EXAMPLE)


@pytest.fixture(scope="module")
def phi_data(phi):
    return special_planes(phi)


@pytest.fixture(scope="module")
def phi_inverse(phi, phi_data):
    return extract_inverse(phi, phi_data)


def pt(*vals):
    return tuple(rat(v) for v in vals)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class TestEvaluation:
    def test_eval_map(self, phi):
        img = eval_map(phi, (pt(1, 0), pt(0, 1), pt(1, 1)))
        assert proportional(tuple(img.coords), (1, 1, -1, 0))

    def test_base_point_raises(self, phi):
        with pytest.raises(BasePoint):
            eval_map(phi, (pt(1, 0), pt(1, 0), pt(1, 0)))


# ---------------------------------------------------------------------------
# Syzygies and type detection
# ---------------------------------------------------------------------------


class TestDetection:
    def test_unit_syzygy_dimensions(self, phi):
        dims = tuple(
            len(syzygy_space(phi, d)) for d in ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        )
        assert dims == (1, 0, 0)

    def test_detect_type_example(self, phi):
        det = detect_type(phi)
        tri, perm = det
        assert tri == (1, 2, 2) and perm == ("s", "t", "u")
        assert det.degrees_by_factor == {"s": 1, "t": 2, "u": 2}

    def test_detect_type_other_types(self):
        assert detect_type(TrilinearMap.from_strings(F112)).triple == (1, 1, 2)
        assert detect_type(TrilinearMap.from_strings(F222)).triple == (2, 2, 2)
        assert detect_type(TrilinearMap.from_strings(TENSOR)).triple == (1, 1, 1)

    def test_detect_type_nontrivial_permutation(self):
        # F112 with the s- and u-blocks exchanged: degrees arrive (2,1,1).
        swapped = TrilinearMap.from_strings([
            "s1*t0*u1", "s1*t1*u0", "s1*t0*u0", "s0*t0*u0 - s0*t1*u1",
        ])
        det = detect_type(swapped)
        assert det.triple == (1, 1, 2)
        assert det.permutation != ("s", "t", "u")
        assert det.degrees_by_factor == {"s": 2, "t": 1, "u": 1}

    def test_involution_not_birational(self):
        with pytest.raises(NotBirational):
            detect_type(TrilinearMap.from_strings(INVOLUTION))

    def test_detection_invariant_under_conjugation(self, phi):
        rng = random.Random(2024)
        for _ in range(5):
            conj = random_conjugation(rng, phi)
            assert detect_type(conj).triple == (1, 2, 2)


# ---------------------------------------------------------------------------
# Structured special planes
# ---------------------------------------------------------------------------


class TestSpecialPlanes:
    def test_example_structure(self, phi_data):
        assert phi_data.map_type == (1, 2, 2)
        assert phi_data.ext_d == -1  # conjugate-pencil series
        assert phi_data.general
        assert sorted(phi_data.planes) == ["A0", "A1", "B0", "B1", "C0", "C1"]
        assert phi_data.residual is not None

    def test_112_planes_are_coordinate_covectors(self):
        data = special_planes(TrilinearMap.from_strings(F112))
        assert data.map_type == (1, 1, 2)
        assert proportional(data.planes["A"], (1, 0, 0, 0))
        assert proportional(data.planes["B"], (0, 1, 0, 0))
        assert proportional(data.planes["C0"], (0, 0, 1, 0))
        assert proportional(data.planes["C1"], (0, 0, 0, 1))

    def test_222_planes_and_weights(self):
        data = special_planes(TrilinearMap.from_strings(F222))
        assert data.map_type == (2, 2, 2)
        assert proportional(data.planes["A"], (0, 1, 0, 0))
        assert proportional(data.planes["B"], (0, 0, 1, 0))
        assert proportional(data.planes["C"], (0, 0, 0, 1))
        assert proportional(data.planes["D"], (1, 0, 0, 0))
        assert all(w != 0 for w in data.weights)

    def test_tensor_degenerate_with_partial_data(self):
        with pytest.raises(DegenerateConfiguration) as exc:
            special_planes(TrilinearMap.from_strings(TENSOR))
        partial = exc.value.partial
        assert partial is not None and partial.map_type == (1, 1, 1)


# ---------------------------------------------------------------------------
# Inverse extraction
# ---------------------------------------------------------------------------


class TestInverse:
    def test_degrees_and_composition(self, phi, phi_inverse):
        assert phi_inverse.degrees == (1, 2, 2)
        res = composition_residuals(phi, phi_inverse)
        assert all(r.is_zero() for r in res)

    def test_inverse_matches_reference_up_to_pair_basis(self, phi_inverse):
        # Each factor's polynomial pair spans the same rank-2 space as the
        # reference pair; the 2x2 change of basis must be invertible.
        for (r0s, r1s), (m0, m1) in zip(EXAMPLE_INVERSE, phi_inverse.components):
            r0 = parse_poly(r0s, SIG_X)
            r1 = parse_poly(r1s, SIG_X)
            monos = sorted(
                set(r0.terms) | set(r1.terms) | set(m0.terms) | set(m1.terms),
                reverse=True,
            )
            rows = [
                [p.terms.get(m, rat(0)) for p in (r0, r1, m0, m1)] for m in monos
            ]
            red, piv = _linalg.rref(rows)
            assert piv == [0, 1]
            n00, n01 = red[0][2], red[0][3]
            n10, n11 = red[1][2], red[1][3]
            assert n00 * n11 - n01 * n10 != 0

    def test_verify_birational(self, phi, phi_inverse):
        rep = verify_birational(phi, phi_inverse, 25, 42)
        assert rep.ok and rep.passed == 25

    def test_inverse_other_types(self):
        for comps, degrees in ((F112, (1, 1, 2)), (F222, (2, 2, 2))):
            m = TrilinearMap.from_strings(comps)
            inv = extract_inverse(m, special_planes(m))
            assert inv.degrees == degrees
            assert all(r.is_zero() for r in composition_residuals(m, inv))

    def test_inverse_from_partial_degenerate_data(self):
        ten = TrilinearMap.from_strings(TENSOR)
        with pytest.raises(DegenerateConfiguration) as exc:
            special_planes(ten)
        inv = extract_inverse(ten, exc.value.partial)
        assert inv.degrees == (1, 1, 1)
        assert all(r.is_zero() for r in composition_residuals(ten, inv))


# ---------------------------------------------------------------------------
# Fibers
# ---------------------------------------------------------------------------


class TestFibers:
    def test_single_fiber_matches_input(self, phi):
        tgt = eval_map(phi, (pt(2, 3), pt(1, 4), pt(5, 1)))
        fib = fiber_solve(phi, tuple(tgt.coords))
        assert len(fib) == 1 and fib.nonrational_count == 0
        s, t, u = fib[0]
        assert proportional(s, (2, 3))
        assert proportional(t, (1, 4))
        assert proportional(u, (5, 1))

    def test_involution_has_two_point_fibers(self):
        invo = TrilinearMap.from_strings(INVOLUTION)
        tgt = invo.evaluate(pt(1, 2), pt(1, 3), pt(1, 5))
        fib = fiber_solve(invo, tgt)
        assert len(fib) >= 2


# ---------------------------------------------------------------------------
# Pencil-prescribed construction
# ---------------------------------------------------------------------------


class TestPencilConstruction:
    def test_general_position_pencils_give_birational_map(self):
        cands = maps_from_pencils(
            ((rat(1), rat(0), rat(0), rat(0)), (rat(0), rat(1), rat(0), rat(0))),
            ((rat(0), rat(0), rat(1), rat(0)), (rat(0), rat(0), rat(0), rat(1))),
            ((rat(1), rat(1), rat(1), rat(1)), (rat(1), rat(2), rat(3), rat(4))),
        )
        assert len(cands) == 1
        m = cands[0]
        assert detect_type(m).triple == (1, 1, 1)
        data = special_planes(m)
        inv = extract_inverse(m, data)
        assert all(r.is_zero() for r in composition_residuals(m, inv))
        # The prescribed pencils come back (projectively) in the plane data.
        assert proportional(data.planes["A0"], (1, 0, 0, 0))
        assert proportional(data.planes["A1"], (0, 1, 0, 0))
        assert proportional(data.planes["C0"], (1, 1, 1, 1))
