"""The three parametric line congruences of a trilinear map.

Each factor of (P¹)³ induces a family of lines in P³ — the images of the
factor's fibers.  This module constructs those families in Plücker
coordinates (two independent routes), computes their linear spans,
extracts focal lines / conics / points, and certifies every incidence
claim symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ._ground import Rat, rat
from . import _linalg
from .exact import QuadExtElem, normalize_seq, proportional
from .mpoly import MPoly, content_free
from .maps import MovingPlane, SpecialPlaneData, TrilinearMap, syzygy_space
from .pluecker import (
    SWAP,
    Degenerate,
    Elliptic,
    Hyperbolic,
    Parabolic,
    Pencil5,
    PencilClassification,
    Plane,
    PluLine,
    Pt,
    antisym_matrix,
    dual_antisym_matrix,
    klein_quadratic,
    line_points,
    pencil_vs_quadric,
    polar_subspace,
)

__all__ = [
    "CongruenceParam",
    "RealLine",
    "ConjugateLinePair",
    "DoubleLine",
    "Conic",
    "FocalPoint",
    "FocalVariety",
    "Certificate",
    "biquadratic_param",
    "syzygy_param",
    "select_syzygy_param",
    "params_agree",
    "span",
    "focal_lines_linear",
    "focal_conic",
    "conic_restricted_matrix",
    "incidence_certificate",
    "focal_point",
    "pencil_to_focal",
    "DegenerateFamily",
    "DependentSyzygies",
    "NotLinear",
    "WrongType",
    "NotDegenerate",
]

FAMILY_BLOCK = {"S": "s", "T": "t", "U": "u"}
FAMILIES = ("S", "T", "U")


class DegenerateFamily(ValueError):
    """The family's line parameterization is identically undefined."""


class DependentSyzygies(ValueError):
    """The two syzygies wedge to zero (proportional plane data)."""


class NotLinear(ValueError):
    """The congruence span is not a projective 3-plane."""


class WrongType(ValueError):
    """The requested focal datum does not exist for this map type."""


class NotDegenerate(ValueError):
    """The congruence's lines do not all pass through one point."""


# ---------------------------------------------------------------------------
# Focal variety variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RealLine:
    """A single real focal line; rational (``d == 1``, a PluLine) or a
    conjugate-over-√d real line given as a plain 6-tuple (``d > 1``)."""

    line: Union[PluLine, Tuple]
    d: int = 1


@dataclass(frozen=True)
class ConjugateLinePair:
    """Two complex-conjugate focal lines (no real points in common with
    the family's real lines); the representative is over ``sqrt(d)``,
    with d < 0, and the real pencil containing both is attached."""

    representative: Tuple
    d: int
    pencil: Pencil5


@dataclass(frozen=True)
class DoubleLine:
    """A doubled focal line (flat limit); the supporting-quadric structure
    is recorded only as the tag."""

    line: PluLine
    tag: str = "parabolic"


@dataclass(frozen=True)
class Conic:
    """A focal conic: the plane containing it and the symmetric 4×4
    rational matrix of a quadric cutting it on that plane."""

    plane: Plane
    form: Tuple[Tuple, ...]


@dataclass(frozen=True)
class FocalPoint:
    """All member lines pass through this point."""

    point: Pt


FocalVariety = Union[RealLine, ConjugateLinePair, DoubleLine, Conic, FocalPoint]


# ---------------------------------------------------------------------------
# CongruenceParam
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CongruenceParam:
    """A parametrized line family in Plücker coordinates.

    ``coeffs`` are six polynomials in the two surviving parameter blocks;
    the Klein quadratic form of the 6-vector is the zero polynomial, so
    every parameter value with a nonzero evaluation is a genuine line.
    """

    family: str
    coeffs: Tuple[MPoly, ...]
    bidegree: Tuple[int, int]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if len(self.coeffs) != 6:
            raise ValueError("coeffs must be a 6-vector")

    @property
    def blocks(self) -> Tuple[str, str]:
        """The two surviving parameter block names, in signature order."""
        return tuple(self.coeffs[0].sig.block_names)

    def evaluate(self, v1: Sequence, v2: Sequence) -> List:
        b1, b2 = self.blocks
        assign = {b1: tuple(v1), b2: tuple(v2)}
        return [c.evaluate(assign) for c in self.coeffs]


def _finalize_param(family: str, six: List[MPoly], error) -> CongruenceParam:
    if all(c.is_zero() for c in six):
        raise error
    reduced = content_free(six)
    kq = klein_quadratic(reduced)
    if not kq.is_zero():
        raise AssertionError(
            f"Klein form of the {family}-parameterization is nonzero: {kq}"
        )
    md = next(c.multidegree for c in reduced if not c.is_zero())
    return CongruenceParam(family=family, coeffs=tuple(reduced), bidegree=md)


def biquadratic_param(phi: TrilinearMap, family: str) -> CongruenceParam:
    """The family's lines as the wedge of the map at the factor's two unit
    values — the line through Φ(z=(1,0)) and Φ(z=(0,1))."""
    block = FAMILY_BLOCK[family]
    p = [f.substitute(block, (rat(1), rat(0))) for f in phi.f]
    q = [f.substitute(block, (rat(0), rat(1))) for f in phi.f]

    def minor(i, j):
        return p[i] * q[j] + (-(p[j] * q[i]))

    six = [minor(0, 1), minor(0, 2), minor(0, 3), minor(2, 3), minor(3, 1), minor(1, 2)]
    return _finalize_param(
        family,
        six,
        DegenerateFamily(
            f"the {family}-wedge vanishes identically (lines undefined)"
        ),
    )


def syzygy_param(
    syz1: MovingPlane, syz2: MovingPlane, family: str
) -> CongruenceParam:
    """The family's lines as the intersection of two moving planes.

    Both syzygies must be independent of the family's own parameter; the
    plane-pair wedge uses the duality swap of ``line_from_planes``
    coefficientwise.
    """
    block = FAMILY_BLOCK[family]
    comps1 = syz1.component_polys()
    comps2 = syz2.component_polys()
    bi = comps1[0].sig.block_index(block)
    if syz1.multidegree[bi] != 0 or syz2.multidegree[bi] != 0:
        raise ValueError(
            f"syzygies for family {family} must not involve the {block}-block"
        )
    a = [c.substitute(block, (rat(1), rat(1))) for c in comps1]
    b = [c.substitute(block, (rat(1), rat(1))) for c in comps2]

    def minor(i, j):
        return a[i] * b[j] + (-(a[j] * b[i]))

    gamma = [minor(0, 1), minor(0, 2), minor(0, 3), minor(2, 3), minor(3, 1), minor(1, 2)]
    six = [gamma[SWAP[i]] for i in range(6)]
    return _finalize_param(
        family,
        six,
        DependentSyzygies("the two syzygies wedge to the zero vector"),
    )


def select_syzygy_param(phi: TrilinearMap, family: str) -> CongruenceParam:
    """Deterministic syzygy-route parameterization of a family.

    Gathers all moving planes of the three multidegrees that avoid the
    family's parameter block (the two unit degrees and the mixed (1,1)
    degree in the other blocks) and wedges the first independent pair.
    Raises :class:`DependentSyzygies` when no independent pair exists.
    """
    block = FAMILY_BLOCK[family]
    sig_blocks = ("s", "t", "u")
    others = [b for b in sig_blocks if b != block]

    def md_for(degrees: Dict[str, int]) -> Tuple[int, int, int]:
        return tuple(degrees.get(b, 0) for b in sig_blocks)

    candidates: List[MovingPlane] = []
    for degs in (
        {others[0]: 1},
        {others[1]: 1},
        {others[0]: 1, others[1]: 1},
    ):
        candidates.extend(syzygy_space(phi, md_for(degs)))
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            try:
                return syzygy_param(candidates[i], candidates[j], family)
            except DependentSyzygies:
                continue
    raise DependentSyzygies(
        f"no independent syzygy pair avoiding the {block}-block "
        f"({len(candidates)} candidates)"
    )


def params_agree(C1: CongruenceParam, C2: CongruenceParam) -> bool:
    """Projective agreement of two parameterizations of the same family:
    all coefficientwise cross products vanish identically.  Parameterizations
    of different families (different blocks) never agree."""
    if C1.family != C2.family or C1.blocks != C2.blocks:
        return False
    for i in range(6):
        for j in range(i + 1, 6):
            d = C1.coeffs[i] * C2.coeffs[j] + (-(C1.coeffs[j] * C2.coeffs[i]))
            if not d.is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# Span and focal extraction
# ---------------------------------------------------------------------------


def span(C: CongruenceParam) -> List[Tuple]:
    """Basis of the smallest linear subspace containing all member lines:
    the span of the per-monomial coefficient 6-vectors."""
    exps = sorted({e for c in C.coeffs for e in c.terms}, reverse=True)
    rows = [[c.terms.get(e, rat(0)) for c in C.coeffs] for e in exps]
    red, piv = _linalg.rref(rows)
    return [tuple(normalize_seq(r)) for r in red[: len(piv)]]


def focal_lines_linear(C: CongruenceParam) -> PencilClassification:
    """Focal lines of a *linear* congruence: the Klein-quadric points of
    the polar line of its span."""
    sp = span(C)
    if len(sp) != 4:
        raise NotLinear(
            f"span has dimension {len(sp)}, expected 4 (projective 3-plane)"
        )
    polar = polar_subspace(sp)
    pencil = Pencil5(polar[0], polar[1])
    return pencil_vs_quadric(pencil)


def pencil_to_focal(cls: PencilClassification) -> List[FocalVariety]:
    """Repackage a pencil-vs-quadric answer as focal-variety variants."""
    if isinstance(cls, Hyperbolic):
        if cls.d == 1:
            return [RealLine(PluLine(l)) for l in cls.lines]
        return [RealLine(l, d=cls.d) for l in cls.lines]
    if isinstance(cls, Elliptic):
        return [ConjugateLinePair(cls.representative, cls.d, cls.pencil)]
    if isinstance(cls, Parabolic):
        return [DoubleLine(cls.line)]
    return []


def focal_conic(data: SpecialPlaneData, family: str) -> Conic:
    """The focal conic of a quadratic family, from the structured plane
    data: a plane together with a symmetric quadric matrix."""
    orig_block = FAMILY_BLOCK[family]
    slot = data.original_slots[orig_block]

    def sym(u, v):
        return [
            [(u[i] * v[j] + u[j] * v[i]) / 2 for j in range(4)] for i in range(4)
        ]

    if data.map_type == (1, 1, 2):
        if slot == "u":
            raise WrongType(
                f"family {family} of a (1,1,2) map focuses on a point, not a conic"
            )
        A, B, C0 = data.planes["A"], data.planes["B"], data.planes["C0"]
        M = sym(A, B)
        for i in range(4):
            for j in range(4):
                M[i][j] = M[i][j] - C0[i] * C0[j]
        plane = Plane(normalize_seq(data.planes["C1"]))
    elif data.map_type == (2, 2, 2):
        A, B, C = data.planes["A"], data.planes["B"], data.planes["C"]
        w1, w2, w3 = data.weights
        M1, M2, M3 = sym(B, C), sym(A, C), sym(A, B)
        M = [
            [w1 * M1[i][j] + w2 * M2[i][j] + w3 * M3[i][j] for j in range(4)]
            for i in range(4)
        ]
        plane = Plane(normalize_seq(data.planes["D"]))
    else:
        raise WrongType(f"no focal conic for map type {data.map_type}")
    return Conic(plane=plane, form=tuple(tuple(row) for row in M))


def conic_restricted_matrix(conic: Conic) -> List[List]:
    """The 3×3 matrix of the conic's form on a basis of its plane; its
    rank decides smooth (3) / line pair (2) / double line (1)."""
    basis = _linalg.nullspace([list(conic.plane.coords)], 4)
    if len(basis) != 3:
        raise ValueError("conic plane does not define a projective plane")
    M = conic.form
    out = []
    for u in basis:
        row = []
        for v in basis:
            total = rat(0)
            for i in range(4):
                for j in range(4):
                    total = total + u[i] * M[i][j] * v[j]
            row.append(total)
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# Incidence certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of an exact symbolic incidence check.

    ``holds`` iff every residual is the zero polynomial; otherwise
    ``witness`` is a parameter assignment with a nonzero residual value.
    """

    holds: bool
    residuals: Tuple[MPoly, ...]
    witness: Optional[Tuple] = None


def _zero_poly_like(C: CongruenceParam) -> MPoly:
    return MPoly.zero(C.coeffs[0].sig, C.coeffs[0].multidegree)


def _pairing_poly(C: CongruenceParam, six) -> MPoly:
    total: Optional[MPoly] = None
    for i in range(6):
        val = six[SWAP[i]]
        if isinstance(val, QuadExtElem):
            if val.is_zero():
                continue
        elif val == 0:
            continue
        term = C.coeffs[i] * val
        total = term if total is None else total + term
    return total if total is not None else _zero_poly_like(C)


def _line_coords(F) -> Tuple:
    if isinstance(F, RealLine):
        return tuple(F.line.p) if isinstance(F.line, PluLine) else tuple(F.line)
    if isinstance(F, DoubleLine):
        return tuple(F.line.p)
    if isinstance(F, ConjugateLinePair):
        return tuple(F.representative)
    if isinstance(F, PluLine):
        return tuple(F.p)
    return tuple(F)


def incidence_certificate(C: CongruenceParam, F) -> Certificate:
    """Certify symbolically that the focal variety meets every member line.

    Accepts the focal-variety variants, bare 6-vectors/PluLines, and
    Pt/4-sequences (treated as a required common point).
    """
    if isinstance(F, Conic):
        plane = tuple(F.plane.coords)
        P = _contraction_polys(C, plane)
        total: Optional[MPoly] = None
        for i in range(4):
            for j in range(4):
                if F.form[i][j] == 0:
                    continue
                term = (P[i] * P[j]) * F.form[i][j]
                total = term if total is None else total + term
        residuals = (total if total is not None else _zero_poly_like(C),)
    elif isinstance(F, (FocalPoint, Pt)) or (
        not isinstance(F, (RealLine, ConjugateLinePair, DoubleLine, PluLine))
        and len(tuple(F)) == 4
    ):
        pt = tuple(F.point.coords) if isinstance(F, FocalPoint) else (
            tuple(F.coords) if isinstance(F, Pt) else tuple(F)
        )
        residuals = tuple(_dual_rows_dot_point(C, pt))
    else:
        residuals = (_pairing_poly(C, _line_coords(F)),)
    holds = all(r.is_zero() for r in residuals)
    witness = None if holds else _find_witness(C, residuals)
    return Certificate(holds=holds, residuals=residuals, witness=witness)


def _contraction_polys(C: CongruenceParam, plane: Tuple) -> List[MPoly]:
    m = antisym_matrix(list(C.coeffs))
    out = []
    for i in range(4):
        total: Optional[MPoly] = None
        for j in range(4):
            entry = m[i][j]
            if entry is None or plane[j] == 0:
                continue
            term = entry * plane[j]
            total = term if total is None else total + term
        out.append(total if total is not None else _zero_poly_like(C))
    return out


def _dual_rows_dot_point(C: CongruenceParam, pt: Tuple) -> List[MPoly]:
    m = dual_antisym_matrix(list(C.coeffs))
    out = []
    for i in range(4):
        total: Optional[MPoly] = None
        for j in range(4):
            entry = m[i][j]
            if entry is None or pt[j] == 0:
                continue
            term = entry * pt[j]
            total = term if total is None else total + term
        out.append(total if total is not None else _zero_poly_like(C))
    return out


_WITNESS_VALUES = (
    (rat(1), rat(0)),
    (rat(0), rat(1)),
    (rat(1), rat(1)),
    (rat(1), rat(-1)),
    (rat(1), rat(2)),
    (rat(2), rat(1)),
    (rat(1), rat(-2)),
    (rat(1), rat(3)),
    (rat(3), rat(1)),
    (rat(2), rat(3)),
)


def _find_witness(C: CongruenceParam, residuals) -> Optional[Tuple]:
    b1, b2 = C.blocks
    for v1 in _WITNESS_VALUES:
        for v2 in _WITNESS_VALUES:
            assign = {b1: v1, b2: v2}
            for r in residuals:
                val = r.evaluate(assign)
                nz = (not val.is_zero()) if isinstance(val, QuadExtElem) else val != 0
                if nz:
                    return ((b1, v1), (b2, v2), val)
    return None


# ---------------------------------------------------------------------------
# Focal point of a degenerate family
# ---------------------------------------------------------------------------


def _sample_lines(C: CongruenceParam, want: int = 2) -> List[Tuple]:
    found: List[Tuple] = []
    for v1 in _WITNESS_VALUES:
        for v2 in _WITNESS_VALUES:
            vals = C.evaluate(v1, v2)
            if all(v == 0 for v in vals):
                continue
            line = tuple(normalize_seq(vals))
            if not any(proportional(line, l) for l in found):
                found.append(line)
            if len(found) >= want:
                return found
    return found


def focal_point(C: CongruenceParam) -> Pt:
    """The common point of a degenerate (point-focused) family.

    Samples two member lines, intersects them, then certifies the point
    lies on *every* member line symbolically; NotDegenerate otherwise.
    """
    lines = _sample_lines(C, 2)
    if len(lines) < 2:
        raise NotDegenerate("could not sample two distinct member lines")
    l1, l2 = lines
    p, q = line_points(l1)
    m2 = dual_antisym_matrix(l2)

    def apply(v4):
        return [
            _linalg.sum_prod(
                [rat(0) if e is None else e for e in m2[i]], list(v4)
            )
            for i in range(4)
        ]

    colp = apply(tuple(p.coords))
    colq = apply(tuple(q.coords))
    ns = _linalg.nullspace([[colp[i], colq[i]] for i in range(4)], 2)
    if len(ns) != 1:
        raise NotDegenerate("sampled member lines do not meet in one point")
    lam, mu = ns[0]
    pt = tuple(
        lam * pc + mu * qc for pc, qc in zip(tuple(p.coords), tuple(q.coords))
    )
    pt = normalize_seq(pt)
    residuals = _dual_rows_dot_point(C, tuple(pt))
    if not all(r.is_zero() for r in residuals):
        raise NotDegenerate("intersection point misses some member lines")
    return Pt(pt)
