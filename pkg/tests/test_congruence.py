"""The three parametric line congruences: biquadratic and syzygy routes,
spans, focal lines/conics/points, incidence certificates."""

import pytest

from tricong import _linalg
from tricong._ground import rat
from tricong.congruence import (
    Conic,
    ConjugateLinePair,
    DegenerateFamily,
    DependentSyzygies,
    FocalPoint,
    NotDegenerate,
    NotLinear,
    RealLine,
    WrongType,
    biquadratic_param,
    conic_restricted_matrix,
    focal_conic,
    focal_lines_linear,
    focal_point,
    incidence_certificate,
    params_agree,
    pencil_to_focal,
    select_syzygy_param,
    span,
    syzygy_param,
)
from tricong.exact import QuadExtElem, conjugate_seq, proportional
from tricong.maps import TrilinearMap, special_planes, syzygy_space
from tricong.pluecker import (
    Elliptic,
    Hyperbolic,
    PluLine,
    klein_quadratic,
    line_from_planes,
)

EXAMPLE = [
    "s0*t0*u1 + s1*t0*u1 + s0*t1*u1",
    "s1*t0*u1 + s0*t1*u1 + 2*s1*t1*u1",
    "-s0*t1*u0 - s1*t1*u0 + s0*t0*u1 + s1*t0*u1",
    "-s1*t1*u0 + s1*t0*u1",
]
F112 = ["s1*t0*u1", "s0*t1*u1", "s0*t0*u1", "s0*t0*u0 - s1*t1*u0"]
F222 = ["s1*t0*u0 + s0*t1*u0 + s0*t0*u1", "s0*t1*u1", "s1*t0*u1", "s1*t1*u0"]
TENSOR = ["s0*t0*u0", "s1*t0*u0", "s0*t1*u0", "s0*t0*u1"]


@pytest.fixture(scope="module")
def phi():
    return TrilinearMap.from_strings(EXAMPLE)


@pytest.fixture(scope="module")
def params(phi):
    return {fam: biquadratic_param(phi, fam) for fam in "STU"}


# ---------------------------------------------------------------------------
# Parameterizations
# ---------------------------------------------------------------------------


class TestBiquadraticParam:
    def test_bidegrees_and_blocks(self, params):
        assert params["S"].bidegree == (2, 2)
        assert params["T"].bidegree == (2, 1)
        assert params["U"].bidegree == (2, 1)
        assert params["S"].blocks == ("t", "u")
        assert params["T"].blocks == ("s", "u")
        assert params["U"].blocks == ("s", "t")

    def test_klein_form_vanishes_identically(self, params):
        for C in params.values():
            assert klein_quadratic(list(C.coeffs)).is_zero()

    def test_degenerate_family_rejected(self):
        deg = TrilinearMap.from_strings(
            ["s0*t0*u0", "2*s0*t0*u0", "3*s0*t0*u0", "s1*t0*u0"]
        )
        with pytest.raises(DegenerateFamily):
            biquadratic_param(deg, "T")


class TestSyzygyRoute:
    def test_agrees_with_biquadratic_route(self, phi, params):
        for fam in "STU":
            C2 = select_syzygy_param(phi, fam)
            assert params_agree(params[fam], C2)

    def test_syzygy_param_rejects_family_block(self, phi):
        alpha = syzygy_space(phi, (1, 0, 0))[0]
        beta = syzygy_space(phi, (1, 0, 1))[0]
        with pytest.raises(ValueError):
            syzygy_param(alpha, beta, "S")  # both involve the s-block

    def test_dependent_syzygies_raise(self, phi):
        sp = syzygy_space(phi, (0, 1, 1))
        with pytest.raises(DependentSyzygies):
            syzygy_param(sp[0], sp[0], "S")

    def test_params_agree_rejects_different_families(self, params):
        assert not params_agree(params["T"], params["U"])

    def test_params_agree_detects_difference(self, params):
        # Same family, different map: genuinely different line families.
        other = TrilinearMap.from_strings(F112)
        assert not params_agree(params["T"], biquadratic_param(other, "T"))


# ---------------------------------------------------------------------------
# Spans and linear focal lines
# ---------------------------------------------------------------------------


class TestFocalLines:
    def test_span_dimensions(self, params):
        assert all(len(span(C)) == 4 for C in params.values())

    def test_hyperbolic_t_lines(self, params):
        cls = focal_lines_linear(params["T"])
        assert isinstance(cls, Hyperbolic) and cls.d == 1
        got = [tuple(l) for l in cls.lines]
        for want in ((1, 0, 0, 0, 0, 0), (1, 0, 1, 1, 0, -1)):
            assert any(proportional(want, g) for g in got)

    def test_hyperbolic_u_lines(self, params):
        cls = focal_lines_linear(params["U"])
        assert isinstance(cls, Hyperbolic) and cls.d == 1
        got = [tuple(l) for l in cls.lines]
        for want in ((1, 0, 0, 0, 0, 0), (0, 0, 0, 1, 0, 0)):
            assert any(proportional(want, g) for g in got)

    def test_elliptic_s_pair(self, params):
        cls = focal_lines_linear(params["S"])
        assert isinstance(cls, Elliptic) and cls.d == -1
        # The representative is the intersection line of the planes
        # i*x0 - x1 = 0 and i*x2 - x3 = 0 (or its conjugate).
        i = QuadExtElem(0, 1, -1)
        ref = line_from_planes(
            (i, rat(-1), rat(0), rat(0)), (rat(0), rat(0), i, rat(-1))
        )
        refc = tuple(ref) if not isinstance(ref, PluLine) else tuple(ref.p)
        got = tuple(cls.representative)
        assert proportional(refc, got) or proportional(conjugate_seq(refc), got)

    def test_not_linear_on_degenerate_span(self):
        ten = TrilinearMap.from_strings(TENSOR)
        C = biquadratic_param(ten, "S")
        with pytest.raises(NotLinear):
            focal_lines_linear(C)


# ---------------------------------------------------------------------------
# Incidence certificates
# ---------------------------------------------------------------------------


class TestIncidence:
    def test_certificates_hold_for_all_focal_lines(self, params):
        for fam in "STU":
            cls = focal_lines_linear(params[fam])
            for F in pencil_to_focal(cls):
                cert = incidence_certificate(params[fam], F)
                assert cert.holds and cert.witness is None

    def test_wrong_line_yields_witness(self, params):
        cert = incidence_certificate(params["T"], (0, 0, 0, 1, 0, 0))
        assert not cert.holds
        assert cert.witness is not None

    def test_conjugate_pair_certificate(self, params):
        cls = focal_lines_linear(params["S"])
        (pair,) = pencil_to_focal(cls)
        assert isinstance(pair, ConjugateLinePair)
        assert incidence_certificate(params["S"], pair).holds


# ---------------------------------------------------------------------------
# Focal points (degenerate families)
# ---------------------------------------------------------------------------


class TestFocalPoints:
    def test_tensor_focal_points(self):
        ten = TrilinearMap.from_strings(TENSOR)
        CS = biquadratic_param(ten, "S")
        CU = biquadratic_param(ten, "U")
        assert len(span(CS)) == 3 and len(span(CU)) == 3
        pS = focal_point(CS)
        pU = focal_point(CU)
        assert proportional(tuple(pS.coords), (0, 1, 0, 0))
        assert proportional(tuple(pU.coords), (0, 0, 0, 1))
        assert incidence_certificate(CS, pS).holds
        assert incidence_certificate(CU, pU).holds

    def test_focal_point_requires_degenerate_span(self, params):
        with pytest.raises(NotDegenerate):
            focal_point(params["S"])


# ---------------------------------------------------------------------------
# Focal conics (quadratic families)
# ---------------------------------------------------------------------------


class TestFocalConics:
    def test_112_conic(self):
        m = TrilinearMap.from_strings(F112)
        data = special_planes(m)
        con = focal_conic(data, "S")
        assert proportional(tuple(con.plane.coords), (0, 0, 0, 1))
        assert _linalg.rank(conic_restricted_matrix(con)) == 3
        CS = biquadratic_param(m, "S")
        CT = biquadratic_param(m, "T")
        assert incidence_certificate(CS, con).holds
        assert incidence_certificate(CT, con).holds

    def test_112_third_family_is_degenerate(self):
        m = TrilinearMap.from_strings(F112)
        data = special_planes(m)
        with pytest.raises(WrongType):
            focal_conic(data, "U")
        CU = biquadratic_param(m, "U")
        assert len(span(CU)) == 3
        O = focal_point(CU)
        assert proportional(tuple(O.coords), (0, 0, 0, 1))

    def test_222_conics_for_all_families(self):
        m = TrilinearMap.from_strings(F222)
        data = special_planes(m)
        con = focal_conic(data, "S")
        assert proportional(tuple(con.plane.coords), (1, 0, 0, 0))
        assert _linalg.rank(conic_restricted_matrix(con)) == 3
        for fam in "STU":
            C = biquadratic_param(m, fam)
            assert len(span(C)) == 5
            assert incidence_certificate(C, focal_conic(data, fam)).holds

    def test_linear_type_has_no_conic(self, phi):
        with pytest.raises(WrongType):
            focal_conic(special_planes(phi), "S")
