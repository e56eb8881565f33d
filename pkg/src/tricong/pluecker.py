"""Lines in P³: Plücker coordinates, the Klein quadric, and pencils.

Conventions (fixed globally):

* A line through points ``a``, ``b`` has the six 2×2 minors ordered as
  ``(c01, c02, c03, c23, c31, c12)``.
* The dual construction from two planes produces minors ``γ_ij``; the
  duality identification reorders them as ``(γ23, γ31, γ12, γ01, γ02, γ03)``
  — the index permutation ``SWAP = (3, 4, 5, 0, 1, 2)``.
* Two lines meet iff their Klein pairing (the polarized quadratic form
  ``c01·c23 + c02·c31 + c03·c12``) vanishes.

Most operations are duck-typed: coordinates may be ground rationals,
:class:`~tricong.exact.QuadExtElem` values, or even polynomials (used for
symbolic incidence certificates).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from ._ground import Rat, rat
from . import _linalg
from .exact import (
    ConjugatePair,
    DoubleRoot,
    IdenticallyZero,
    ProjVec,
    QuadExtElem,
    TwoRealRoots,
    normalize,
    normalize_seq,
    proportional,
    quad_root_pair,
    scale_first_one,
)

__all__ = [
    "Pt",
    "Plane",
    "PluLine",
    "Pencil5",
    "SWAP",
    "line_from_points",
    "line_from_planes",
    "klein_pairing",
    "klein_quadratic",
    "swap_vector",
    "contraction",
    "contraction_vector",
    "antisym_matrix",
    "dual_antisym_matrix",
    "line_points",
    "point_on_line",
    "polar_subspace",
    "pencil_vs_quadric",
    "Hyperbolic",
    "Elliptic",
    "Parabolic",
    "Degenerate",
    "PencilClassification",
    "CoincidentPoints",
    "CoincidentPlanes",
    "LineInPlane",
]

SWAP = (3, 4, 5, 0, 1, 2)


class CoincidentPoints(ValueError):
    """Both points are the same projective point."""


class CoincidentPlanes(ValueError):
    """Both planes are the same projective plane."""


class LineInPlane(ValueError):
    """Contraction of a line lying inside the plane."""


def _coords(v, n: int) -> Tuple:
    if isinstance(v, (Pt, Plane)):
        seq = tuple(v.coords)
    elif isinstance(v, PluLine):
        seq = tuple(v.p)
    elif isinstance(v, ProjVec):
        seq = tuple(v)
    else:
        seq = tuple(v)
    if len(seq) != n:
        raise ValueError(f"expected a {n}-vector, got length {len(seq)}")
    return seq


def _is_zero_elem(c) -> bool:
    if isinstance(c, QuadExtElem):
        return c.is_zero()
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


@dataclass(frozen=True)
class Pt:
    """Homogeneous point of P³."""

    coords: ProjVec

    def __init__(self, coords):
        v = coords if isinstance(coords, ProjVec) else ProjVec(tuple(coords))
        if len(v) != 4:
            raise ValueError("Pt needs 4 coordinates")
        object.__setattr__(self, "coords", v)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self):
        return f"Pt({self.coords!r})"


@dataclass(frozen=True)
class Plane:
    """Plane of P³ given by its covector of coefficients."""

    coeffs: ProjVec

    def __init__(self, coeffs):
        v = coeffs if isinstance(coeffs, ProjVec) else ProjVec(tuple(coeffs))
        if len(v) != 4:
            raise ValueError("Plane needs 4 coefficients")
        object.__setattr__(self, "coeffs", v)

    @property
    def coords(self):
        return self.coeffs

    def __iter__(self):
        return iter(self.coeffs)

    def contains(self, point) -> bool:
        p = _coords(point, 4)
        total = None
        for a, b in zip(self.coeffs, p):
            term = a * b
            total = term if total is None else total + term
        return total == 0

    def __repr__(self):
        return f"Plane({self.coeffs!r})"


@dataclass(frozen=True)
class PluLine:
    """A line of P³ by its normalized 6-vector (c01,c02,c03,c23,c31,c12)."""

    p: ProjVec

    def __init__(self, p):
        v = p if isinstance(p, ProjVec) else normalize(ProjVec(tuple(p)))
        if len(v) != 6:
            raise ValueError("PluLine needs 6 coordinates")
        k = klein_quadratic(tuple(v))
        if k != 0:
            raise ValueError(f"not on the Klein quadric (form = {k})")
        object.__setattr__(self, "p", v)

    def __iter__(self):
        return iter(self.p)

    def __repr__(self):
        return f"PluLine({self.p!r})"


@dataclass(frozen=True)
class Pencil5:
    """A projective line in P⁵ spanned by two independent 6-vectors."""

    basis: Tuple[Tuple, Tuple]

    def __init__(self, v1, v2):
        a = _coords(v1, 6)
        b = _coords(v2, 6)
        if proportional(a, b):
            raise ValueError("pencil basis vectors are proportional")
        object.__setattr__(self, "basis", (a, b))

    def __repr__(self):
        return f"Pencil5({self.basis[0]!r}, {self.basis[1]!r})"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def line_from_points(a, b):
    """Plücker vector of the line joining two distinct points.

    Returns a :class:`PluLine` for rational inputs, a plain normalized
    6-tuple for extension-coefficient inputs.
    """
    p = _coords(a, 4)
    q = _coords(b, 4)
    if proportional(p, q):
        raise CoincidentPoints("points are projectively equal")

    def minor(i, j):
        return p[i] * q[j] - p[j] * q[i]

    six = (minor(0, 1), minor(0, 2), minor(0, 3), minor(2, 3), minor(3, 1), minor(1, 2))
    return _package_line(six)


def line_from_planes(alpha, beta):
    """Plücker vector of the intersection line of two distinct planes.

    Computes the dual minors γ_ij and applies the duality reordering, so
    the result agrees with :func:`line_from_points` on two independent
    common points.
    """
    p = _coords(alpha, 4)
    q = _coords(beta, 4)
    if proportional(p, q):
        raise CoincidentPlanes("planes are projectively equal")

    def minor(i, j):
        return p[i] * q[j] - p[j] * q[i]

    gamma = (
        minor(0, 1),
        minor(0, 2),
        minor(0, 3),
        minor(2, 3),
        minor(3, 1),
        minor(1, 2),
    )
    six = tuple(gamma[SWAP[i]] for i in range(6))
    return _package_line(six)


def _package_line(six):
    if any(isinstance(c, QuadExtElem) for c in six):
        return scale_first_one(six)
    return PluLine(normalize_seq(six))


# ---------------------------------------------------------------------------
# Klein forms
# ---------------------------------------------------------------------------


def swap_vector(v) -> Tuple:
    """Apply the duality index permutation (an involution)."""
    c = _coords(v, 6)
    return tuple(c[SWAP[i]] for i in range(6))


def klein_pairing(l, m):
    """Symmetric bilinear form whose vanishing means the lines meet."""
    a = _coords(l, 6)
    b = _coords(m, 6)
    total = None
    for i in range(6):
        term = a[i] * b[SWAP[i]]
        total = term if total is None else total + term
    return total


def klein_quadratic(v):
    """The Klein quadratic form c01·c23 + c02·c31 + c03·c12."""
    c = _coords(v, 6)
    return c[0] * c[3] + c[1] * c[4] + c[2] * c[5]


# ---------------------------------------------------------------------------
# Contraction and incidence
# ---------------------------------------------------------------------------


def antisym_matrix(v) -> List[List]:
    """The antisymmetric 4×4 matrix of a Plücker 6-vector.

    Its column space is the set of points on the line; applying it to a
    plane covector yields the intersection point (the contraction).
    Entries may be any ring elements.
    """
    c01, c02, c03, c23, c31, c12 = _coords(v, 6)
    z = None  # placeholder for structural zeros
    m = [
        [z, c01, c02, c03],
        [None, z, c12, None],
        [None, None, z, c23],
        [None, None, None, z],
    ]
    m[1][3] = -c31
    # antisymmetrize
    m[1][0] = -c01
    m[2][0] = -c02
    m[3][0] = -c03
    m[2][1] = -c12
    m[3][1] = c31
    m[3][2] = -c23
    return m


def dual_antisym_matrix(v) -> List[List]:
    """Antisymmetric matrix of the duality-swapped vector.

    A point ``p`` lies on the line iff this matrix annihilates ``p``.
    """
    return antisym_matrix(swap_vector(v))


def contraction_vector(six, plane4) -> List:
    """Apply the antisymmetric matrix of ``six`` to the covector ``plane4``.

    Works over any commutative ring (rationals, extensions, polynomials);
    structural zeros on the diagonal are skipped, so no ring zero is
    required.
    """
    m = antisym_matrix(six)
    out = []
    for i in range(4):
        total = None
        for j in range(4):
            entry = m[i][j]
            if entry is None:
                continue
            if _is_zero_elem(entry) or _is_zero_elem(plane4[j]):
                continue
            term = entry * plane4[j]
            total = term if total is None else total + term
        out.append(total)
    return out


def contraction(l, gamma) -> Pt:
    """The intersection point of a line with a plane not containing it."""
    six = _coords(l, 6)
    g = _coords(gamma, 4)
    vec = contraction_vector(six, g)
    vals = [rat(0) if v is None else v for v in vec]
    if all(_is_zero_elem(v) for v in vals):
        raise LineInPlane("line lies inside the plane")
    if any(isinstance(v, QuadExtElem) for v in vals):
        return scale_first_one(vals)
    return Pt(normalize_seq(vals))


def line_points(l) -> Tuple[Pt, Pt]:
    """Two distinct points spanning a (rational) line."""
    six = _coords(l, 6)
    m = antisym_matrix(six)
    cols = []
    for j in range(4):
        col = [rat(0) if m[i][j] is None else m[i][j] for i in range(4)]
        if any(c != 0 for c in col):
            cols.append(col)
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            if not proportional(cols[i], cols[j]):
                return Pt(normalize_seq(cols[i])), Pt(normalize_seq(cols[j]))
    raise ValueError("degenerate 6-vector: not a line")


def point_on_line(l, point) -> bool:
    """Exact incidence test point ∈ line (any coefficient ring)."""
    m = dual_antisym_matrix(l)
    p = _coords(point, 4)
    for i in range(4):
        total = None
        for j in range(4):
            entry = m[i][j]
            if entry is None:
                continue
            term = entry * p[j]
            total = term if total is None else total + term
        if total is not None and not _is_zero_elem(total):
            return False
    return True


# ---------------------------------------------------------------------------
# Polar subspaces
# ---------------------------------------------------------------------------


def polar_subspace(vectors: Sequence) -> List[Tuple]:
    """Basis of the Klein-orthogonal complement of a span of 6-vectors."""
    rows = [list(swap_vector(v)) for v in vectors]
    if not rows:
        rows = []
    basis = _linalg.nullspace(rows, 6)
    return [tuple(normalize_seq(b)) for b in basis]


# ---------------------------------------------------------------------------
# Pencil vs quadric
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Hyperbolic:
    """Pencil meets the quadric in two distinct real lines.

    ``d = 1``: both lines rational 6-tuples; ``d > 1``: conjugate
     6-tuples over Q(√d) (still real lines).
    """

    lines: Tuple[Tuple, Tuple]
    d: int = 1


@dataclass(frozen=True)
class Elliptic:
    """Pencil meets the quadric in two complex-conjugate lines.

    ``representative`` is one line over Q(√d) with d < 0; the other is its
    coordinatewise conjugate.  ``pencil`` keeps the real basis.
    """

    representative: Tuple
    d: int
    pencil: Tuple[Tuple, Tuple]


@dataclass(frozen=True)
class Parabolic:
    """Pencil tangent to the quadric: one rational double line."""

    line: Tuple


@dataclass(frozen=True)
class Degenerate:
    """Pencil contained in the quadric (all members are lines through a
    common point, in a common plane)."""

    pencil: Tuple[Tuple, Tuple]


PencilClassification = Union[Hyperbolic, Elliptic, Parabolic, Degenerate]


def _combine(root, v1, v2):
    lam, mu = root
    out = []
    for a, b in zip(v1, v2):
        out.append(lam * a + mu * b)
    return out


def pencil_vs_quadric(P: Pencil5) -> PencilClassification:
    """Classify the intersection of a pencil in P⁵ with the Klein quadric.

    Restricts the quadratic form to λ·v₁ + μ·v₂ and solves the resulting
    binary quadratic exactly.
    """
    v1, v2 = P.basis
    A = klein_quadratic(v1)
    B = klein_pairing(v1, v2)
    C = klein_quadratic(v2)
    res = quad_root_pair(A, B, C)
    if isinstance(res, IdenticallyZero):
        return Degenerate(pencil=(tuple(v1), tuple(v2)))
    if isinstance(res, DoubleRoot):
        line = normalize_seq(_combine(res.root, v1, v2))
        return Parabolic(line=tuple(line))
    if isinstance(res, TwoRealRoots):
        first = _combine(res.first, v1, v2)
        second = _combine(res.second, v1, v2)
        if res.d == 1:
            lines = (tuple(normalize_seq(first)), tuple(normalize_seq(second)))
        else:
            lines = (tuple(scale_first_one(first)), tuple(scale_first_one(second)))
        return Hyperbolic(lines=lines, d=res.d)
    assert isinstance(res, ConjugatePair)
    rep = scale_first_one(_combine(res.root, v1, v2))
    return Elliptic(representative=tuple(rep), d=res.d, pencil=(tuple(v1), tuple(v2)))
