"""Multihomogeneous polynomials: parser, arithmetic, content removal,
flattenings, resultants, and dense binary forms."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tricong._ground import rat
from tricong.exact import QuadExtElem
from tricong.mpoly import (
    AllZero,
    BlockSignature,
    DegreeMismatch,
    Indecomposable,
    MPoly,
    NotHomogeneous,
    PolySyntaxError,
    SIG_STU,
    SIG_STUX,
    SIG_X,
    UnknownVariable,
    WrongDegree,
    ZeroInput,
    bin_deriv_z0,
    bin_div,
    bin_eval,
    bin_gcd,
    bin_is_zero,
    bin_mul,
    bin_squarefree,
    binary_roots,
    content_free,
    exact_divide,
    flattening,
    monomials,
    parse_poly,
    split_rank_one,
    sylvester_resultant,
)

S = lambda text: parse_poly(text, SIG_STU)  # noqa: E731
X = lambda text: parse_poly(text, SIG_X)  # noqa: E731

coefs = st.integers(min_value=-9, max_value=9)
fracs = st.fractions(
    min_value=-6, max_value=6, max_denominator=5
)


def random_trilinear(draw_coeffs):
    terms = {}
    for e, c in zip(monomials(SIG_STU, (1, 1, 1)), draw_coeffs):
        if c != 0:
            terms[e] = rat(c.numerator) / c.denominator if hasattr(c, "denominator") else rat(c)
    return MPoly(SIG_STU, terms, (1, 1, 1))


# ---------------------------------------------------------------------------
# Signatures and monomials
# ---------------------------------------------------------------------------


class TestSignature:
    def test_builtin_signatures(self):
        assert SIG_STU.block_names == ("s", "t", "u")
        assert SIG_X.block_names == ("x",)
        assert SIG_STUX.block_names == ("s", "t", "u", "x")
        assert SIG_STU.var_names == ("s0", "s1", "t0", "t1", "u0", "u1")
        assert SIG_X.var_names == ("x0", "x1", "x2", "x3")

    def test_var_slice(self):
        assert SIG_STU.var_slice("t") == (2, 4)
        assert SIG_X.var_slice("x") == (0, 4)

    def test_without(self):
        red = SIG_STU.without("s")
        assert red.block_names == ("t", "u")

    def test_monomials_count_and_order(self):
        ms = monomials(SIG_STU, (1, 1, 1))
        assert len(ms) == 8
        assert ms[0] > ms[1]  # descending lexicographic
        ms2 = monomials(SIG_X, (0,) * 0 + (2,))
        assert len(ms2) == 10  # quadrics in four variables


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------


class TestParse:
    def test_round_trip_fixed(self):
        for text in (
            "s0*t0*u1 + s1*t0*u1 + s0*t1*u1",
            "-s1*t1*u0 + s1*t0*u1",
            "x0*x2 - x1*x2 - x2^2 + x0*x3 + x1*x3 - x3^2",
            "1/2*s0*t0*u0 - 3/4*s1*t1*u1",
        ):
            sig = SIG_X if text.startswith("x") else SIG_STU
            p = parse_poly(text, sig)
            assert parse_poly(str(p), sig) == p

    def test_parentheses_and_powers(self):
        assert X("(x0 + x1)*(x0 - x1)") == X("x0^2 - x1^2")
        assert X("x0^2*x1^0") == X("x0^2")

    def test_syntax_error_carries_position(self):
        with pytest.raises(PolySyntaxError, match="position"):
            S("s0 + + t0")

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            S("y0*t0*u0")

    def test_not_homogeneous(self):
        with pytest.raises(NotHomogeneous):
            S("s0 + s0*t0")

    @given(st.lists(fracs, min_size=8, max_size=8))
    @settings(max_examples=60, deadline=None)
    def test_round_trip_property(self, cs):
        if all(c == 0 for c in cs):
            return
        p = random_trilinear(cs)
        assert parse_poly(str(p), SIG_STU) == p


# ---------------------------------------------------------------------------
# Arithmetic and evaluation
# ---------------------------------------------------------------------------


class TestArithmetic:
    def test_add_requires_same_multidegree(self):
        with pytest.raises(DegreeMismatch):
            S("s0") + S("t0")

    def test_ring_identities(self):
        p, q = S("s0 + s1"), S("s0 - s1")
        assert p * q == S("s0^2 - s1^2")
        assert p * rat(0) == MPoly.zero(SIG_STU, (1, 0, 0))
        assert (p + (-p)).is_zero()

    def test_scalar_extension_multiplication(self):
        i = QuadExtElem(0, 1, -1)
        p = S("s0") * i
        assert p.has_extension_coeffs()
        assert (p * i) == S("s0") * rat(-1)

    def test_evaluate(self):
        p = S("s0*t0*u0 + 2*s1*t1*u1")
        val = p.evaluate(
            {"s": (rat(1), rat(2)), "t": (rat(1), rat(1)), "u": (rat(1), rat(3))}
        )
        assert val == 1 + 2 * 2 * 1 * 3

    def test_substitute_leaves_remaining_blocks(self):
        p = S("s0*t0*u0 + s1*t0*u1")
        q = p.substitute("s", (rat(1), rat(1)))
        assert isinstance(q, MPoly)
        assert q == parse_poly("t0*u0 + t0*u1", SIG_STU.without("s"))

    @given(st.lists(coefs, min_size=8, max_size=8),
           st.lists(coefs, min_size=8, max_size=8),
           st.lists(coefs, min_size=6, max_size=6))
    @settings(max_examples=40, deadline=None)
    def test_evaluation_is_ring_map(self, cs1, cs2, pt):
        from fractions import Fraction

        p = random_trilinear([Fraction(c) for c in cs1])
        q = random_trilinear([Fraction(c) for c in cs2])
        at = {"s": (rat(pt[0]), rat(pt[1])),
              "t": (rat(pt[2]), rat(pt[3])),
              "u": (rat(pt[4]), rat(pt[5]))}
        assert (p + q).evaluate(at) == p.evaluate(at) + q.evaluate(at)
        assert (p * q).evaluate(at) == p.evaluate(at) * q.evaluate(at)


# ---------------------------------------------------------------------------
# Content removal and exact division
# ---------------------------------------------------------------------------


class TestContentFree:
    def test_scalar_content_unchanged(self):
        polys = [S("2*s0"), S("4*s1")]
        assert content_free(polys) == polys

    def test_common_factor_removed(self):
        u01 = S("u0 + u1")
        out = content_free([S("s0") * u01, S("s1") * u01])
        assert out == [S("s0"), S("s1")]

    def test_zero_entries_keep_consistent_multidegree(self):
        # The zero entry's multidegree must drop by the content's degree —
        # here (0,0,1) — exactly like the nonzero quotients.
        u01 = S("u0 + u1")
        out = content_free(
            [S("s0") * u01, S("s1") * u01, MPoly.zero(SIG_STU, (1, 0, 1))]
        )
        assert [p.multidegree for p in out] == [(1, 0, 0)] * 3
        assert out[2].is_zero()

    def test_all_zero_raises(self):
        with pytest.raises(AllZero):
            content_free([MPoly.zero(SIG_STU, (1, 1, 1))])

    def test_extension_coefficients_rejected(self):
        p = S("s0") * QuadExtElem(1, 1, -1)
        with pytest.raises(TypeError):
            content_free([p])

    def test_exact_divide(self):
        p, q = S("s0*u0 + s0*u1"), S("u0 + u1")
        assert exact_divide(p, q) == S("s0")
        with pytest.raises(ArithmeticError):
            exact_divide(S("s0*u0"), q)
        with pytest.raises(ZeroDivisionError):
            exact_divide(p, MPoly.zero(SIG_STU, (0, 0, 1)))

    @given(st.lists(coefs, min_size=8, max_size=8), coefs, coefs)
    @settings(max_examples=40, deadline=None)
    def test_divide_undoes_multiply(self, cs, g0, g1):
        from fractions import Fraction

        p = random_trilinear([Fraction(c) for c in cs])
        if p.is_zero() or (g0 == 0 and g1 == 0):
            return
        g = S("u0") * rat(g0) + S("u1") * rat(g1)
        if g.is_zero():
            return
        assert exact_divide(p * g, g) == p


# ---------------------------------------------------------------------------
# Flattenings, rank-one splits, resultants
# ---------------------------------------------------------------------------


class TestFlattening:
    def test_shape_and_entries(self):
        p = S("s0*t0*u0 + 2*s1*t1*u1")
        m = flattening(p, "s")
        assert len(m) == 2 and len(m[0]) == 4
        assert m[0][0] == 1 and m[1][3] == 2

    def test_split_rank_one(self):
        p = S("(s0 + s1)*(t0 - t1)*(2*u0 + u1)")
        sp = split_rank_one(p)
        prod = sp.a * sp.b * sp.c * sp.scale
        assert prod == p

    def test_split_rejects_higher_rank(self):
        with pytest.raises(Indecomposable):
            split_rank_one(S("s0*t0*u0 + s1*t1*u1"))

    def test_split_rejects_wrong_degree(self):
        with pytest.raises(WrongDegree):
            split_rank_one(S("s0"))

    def test_sylvester_resultant(self):
        # res_s(s0*t0, s1*t0) = t0^2 up to sign: the forms share a zero in
        # s only where t0 vanishes.
        r = sylvester_resultant(S("s0*t0"), S("s1*t0"), "s")
        red = SIG_STU.without("s")
        assert r == parse_poly("t0^2", red) or r == parse_poly("-t0^2", red)

    def test_resultant_detects_common_factor(self):
        r = sylvester_resultant(S("s0*t0 + s1*t1"), S("2*s0*t0 + 2*s1*t1"), "s")
        assert r.is_zero()


# ---------------------------------------------------------------------------
# Dense binary forms
# ---------------------------------------------------------------------------


class TestBinaryForms:
    def test_eval_and_mul(self):
        f = [rat(1), rat(0), rat(-1)]  # z0^2 - z1^2
        assert bin_eval(f, (rat(2), rat(1))) == 3
        g = bin_mul([rat(1), rat(1)], [rat(1), rat(-1)])
        assert g == f
        assert bin_is_zero([rat(0), rat(0)])

    def test_gcd_and_div(self):
        f = [rat(1), rat(0), rat(-1)]
        g = bin_gcd([rat(1), rat(-1)], f)
        assert g == [rat(1), rat(-1)]
        assert bin_div(f, [rat(1), rat(1)]) == [rat(1), rat(-1)]
        assert bin_div(f, [rat(1), rat(2)]) is None

    def test_squarefree(self):
        f = bin_mul([rat(1), rat(1)], [rat(1), rat(1)])  # (z0 + z1)^2
        assert bin_squarefree(f) == [rat(1), rat(1)]

    def test_deriv(self):
        assert bin_deriv_z0([rat(1), rat(0), rat(-1)]) == [rat(2), rat(0)]

    def test_binary_roots_rational(self):
        br = binary_roots([rat(1), rat(0), rat(-1)])
        got = {tuple(r) for r, _m in br.rational}
        assert got == {(rat(1), rat(1)), (rat(1), rat(-1))}

    def test_binary_roots_multiplicity(self):
        # (z0 + z1)^2 * z0 has the double root (1 : -1) and simple (0 : 1).
        f = bin_mul([rat(1), rat(1)], bin_mul([rat(1), rat(1)], [rat(1), rat(0)]))
        br = binary_roots(f)
        mult = {tuple(r): m for r, m in br.rational}
        assert mult[(rat(1), rat(-1))] == 2
        assert mult[(rat(0), rat(1))] == 1

    def test_binary_roots_quadratic_pair(self):
        br = binary_roots([rat(1), rat(0), rat(1)])  # z0^2 + z1^2
        assert not br.rational
        assert len(br.quadratic) == 1

    def test_zero_input(self):
        with pytest.raises(ZeroInput):
            binary_roots([rat(0), rat(0), rat(0)])

    @given(st.lists(coefs, min_size=2, max_size=4),
           st.lists(coefs, min_size=2, max_size=4))
    @settings(max_examples=60, deadline=None)
    def test_roots_of_products_substitute_to_zero(self, fc, gc):
        f = [rat(c) for c in fc]
        g = [rat(c) for c in gc]
        if bin_is_zero(f) or bin_is_zero(g):
            return
        h = bin_mul(f, g)
        br = binary_roots(h)
        for root, _m in br.rational:
            assert bin_eval(h, root) == 0
