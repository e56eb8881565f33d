"""Exact scalar arithmetic.

Provides the rational ground type :data:`Rat`, quadratic-extension elements
``a + b*sqrt(d)`` (:class:`QuadExtElem`), canonical projective vectors
(:class:`ProjVec`, :func:`normalize`) and exact root classification for
binary quadratic forms (:func:`quad_root_pair`).

No floating point is used anywhere; every decision is an exact sign test.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence, Tuple, Union

from ._ground import GROUND, ONE, ZERO, Rat, is_rat, rat, rat_den, rat_num, rat_str

__all__ = [
    "Rat",
    "rat",
    "rat_str",
    "QuadExtElem",
    "ProjVec",
    "ZeroVector",
    "normalize",
    "normalize_seq",
    "scale_first_one",
    "conjugate_value",
    "conjugate_seq",
    "proportional",
    "squarefree_decompose",
    "TwoRealRoots",
    "ConjugatePair",
    "DoubleRoot",
    "IdenticallyZero",
    "quad_root_pair",
]


class ZeroVector(ValueError):
    """Raised when a projective operation receives the zero vector."""


# ---------------------------------------------------------------------------
# Quadratic extension elements
# ---------------------------------------------------------------------------


class QuadExtElem:
    """An element ``a + b*sqrt(d)`` of a real or imaginary quadratic field.

    ``d`` is a fixed square-free integer, never 0 or 1.  All arithmetic is
    exact; mixing elements of different ``d`` raises ``ValueError``.
    Rationals and ints lift transparently into any extension.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        d = int(d)
        if d in (0, 1):
            raise ValueError("discriminant must be a square-free integer != 0, 1")
        self.a = rat(a)
        self.b = rat(b)
        self.d = d

    # -- coercion ----------------------------------------------------------

    def _lift(self, other) -> "QuadExtElem":
        if isinstance(other, QuadExtElem):
            if other.d != self.d:
                raise ValueError(
                    f"cannot mix extensions sqrt({self.d}) and sqrt({other.d})"
                )
            return other
        if is_rat(other):
            return QuadExtElem(other, 0, self.d)
        return NotImplemented  # type: ignore[return-value]

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def to_rat(self):
        if self.b != 0:
            raise ValueError(f"{self} is not rational")
        return self.a

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExtElem(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtElem(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExtElem(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExtElem(o.a - self.a, o.b - self.b, self.d)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExtElem(
            self.a * o.a + self.d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExtElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero extension element")
        return QuadExtElem(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadExtElem(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- field structure ---------------------------------------------------

    def conjugate(self) -> "QuadExtElem":
        return QuadExtElem(self.a, -self.b, self.d)

    def norm(self):
        """The field norm ``a^2 - d*b^2`` (a rational)."""
        return self.a * self.a - self.d * self.b * self.b

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, QuadExtElem):
            if other.d != self.d and not (self.is_rational() and other.is_rational()):
                return False
            return self.a == other.a and self.b == other.b
        if is_rat(other):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __repr__(self):
        if self.b == 0:
            return rat_str(self.a)
        core = f"sqrt({self.d})" if self.b == 1 else f"{rat_str(self.b)}*sqrt({self.d})"
        if self.a == 0:
            return core
        sign = "+" if self.b > 0 else "-"
        mag = abs(self.b)
        part = f"sqrt({self.d})" if mag == 1 else f"{rat_str(mag)}*sqrt({self.d})"
        return f"{rat_str(self.a)} {sign} {part}"


Scalar = Union["QuadExtElem", "Rat", int]


def conjugate_value(v):
    """Field conjugate for scalars: identity on rationals."""
    if isinstance(v, QuadExtElem):
        return v.conjugate()
    return v


def conjugate_seq(vec: Sequence) -> tuple:
    return tuple(conjugate_value(v) for v in vec)


# ---------------------------------------------------------------------------
# Projective vectors
# ---------------------------------------------------------------------------


def normalize_seq(coords: Iterable) -> Tuple:
    """Canonical projective representative of a rational vector.

    Returns a tuple of integer-valued :data:`Rat` entries that is coprime
    and whose first nonzero entry is positive.  Raises :class:`ZeroVector`
    on the zero vector.  Idempotent and invariant under nonzero scaling.
    """
    vals = [rat(c) for c in coords]
    if all(v == 0 for v in vals):
        raise ZeroVector("cannot normalize the zero vector")
    den_lcm = 1
    for v in vals:
        d = rat_den(v)
        den_lcm = den_lcm * d // gcd(den_lcm, d)
    ints = [rat_num(v) * (den_lcm // rat_den(v)) for v in vals]
    g = 0
    for n in ints:
        g = gcd(g, abs(n))
    ints = [n // g for n in ints]
    for n in ints:
        if n != 0:
            if n < 0:
                ints = [-m for m in ints]
            break
    return tuple(rat(n) for n in ints)


@dataclass(frozen=True)
class ProjVec:
    """A nonzero homogeneous coordinate vector (length 4 or 6 in practice)."""

    coords: Tuple

    def __init__(self, coords: Iterable):
        vals = tuple(rat(c) for c in coords)
        if all(v == 0 for v in vals):
            raise ZeroVector("projective vector must be nonzero")
        object.__setattr__(self, "coords", vals)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __repr__(self):
        return "(" + " : ".join(rat_str(c) for c in self.coords) + ")"


def normalize(v) -> ProjVec:
    """Canonicalize a :class:`ProjVec` (or any coordinate iterable)."""
    coords = v.coords if isinstance(v, ProjVec) else tuple(v)
    return ProjVec(normalize_seq(coords))


def scale_first_one(vec: Sequence) -> tuple:
    """Scale a (possibly extension-valued) vector so its first nonzero
    coordinate is 1.  Deterministic representative for extension vectors,
    where integer canonicalization is unavailable."""
    for v in vec:
        nz = not (v.is_zero() if isinstance(v, QuadExtElem) else v == 0)
        if nz:
            inv = (
                v.inverse() if isinstance(v, QuadExtElem) else ONE / rat(v)
            )
            return tuple(inv * w for w in vec)
    raise ZeroVector("cannot scale the zero vector")


def proportional(v: Sequence, w: Sequence) -> bool:
    """Exact projective equality: all 2x2 cross products vanish and neither
    vector is zero.  Works for rational and extension coordinates."""
    if len(v) != len(w):
        return False

    def _zero(x):
        return x.is_zero() if isinstance(x, QuadExtElem) else x == 0

    if all(_zero(x) for x in v) or all(_zero(x) for x in w):
        return False
    n = len(v)
    for i in range(n):
        for j in range(i + 1, n):
            if not _zero(v[i] * w[j] - v[j] * w[i]):
                return False
    return True


# ---------------------------------------------------------------------------
# Square-free decomposition and quadratic root classification
# ---------------------------------------------------------------------------


def squarefree_decompose(n: int) -> Tuple[int, int]:
    """Write ``n = e^2 * d`` with ``d`` square-free; returns ``(e, d)``.

    ``n`` may be negative (then ``d < 0``); ``n == 0`` gives ``(0, 0)``.
    Factoring is delegated to sympy (exact, arbitrary precision).
    """
    if n == 0:
        return 0, 0
    import sympy

    sign = -1 if n < 0 else 1
    e, d = 1, 1
    for p, m in sympy.factorint(abs(n)).items():
        e *= p ** (m // 2)
        if m % 2:
            d *= p
    return e, sign * d


@dataclass(frozen=True)
class TwoRealRoots:
    """Two distinct real projective roots.

    Coordinates are rational pairs when the discriminant is a perfect
    square (``d == 1``), else :class:`QuadExtElem` pairs over ``sqrt(d)``
    with ``d > 1``.
    """

    first: Tuple
    second: Tuple
    d: int = 1


@dataclass(frozen=True)
class ConjugatePair:
    """A complex-conjugate root pair; ``root`` is over ``sqrt(d)``, d < 0."""

    root: Tuple
    d: int

    @property
    def conjugate_root(self) -> Tuple:
        return conjugate_seq(self.root)


@dataclass(frozen=True)
class DoubleRoot:
    """A single rational root of multiplicity two."""

    root: Tuple


@dataclass(frozen=True)
class IdenticallyZero:
    """The identically vanishing quadratic form."""


RootClassification = Union[TwoRealRoots, ConjugatePair, DoubleRoot, IdenticallyZero]


def quad_root_pair(A, B, C) -> RootClassification:
    """Classify the roots of the binary quadratic ``A*z0^2 + B*z0*z1 + C*z1^2``.

    The branch is decided by the exact sign of the discriminant
    ``B^2 - 4*A*C``; roots are returned in projective coordinates, over a
    quadratic extension when irrational.  Substituting any returned root
    back into the form gives exactly zero.
    """
    A, B, C = rat(A), rat(B), rat(C)
    if A == 0 and B == 0 and C == 0:
        return IdenticallyZero()
    disc = B * B - 4 * A * C
    if disc == 0:
        if A != 0:
            return DoubleRoot(tuple(normalize_seq((-B, 2 * A))))
        # A == 0 and disc == 0 forces B == 0, C != 0: C*z1^2.
        return DoubleRoot((ONE, ZERO))
    # disc = (e/den)^2 * d with d square-free.
    num, den = rat_num(disc), rat_den(disc)
    e_int, d = squarefree_decompose(num * den)
    e = rat(e_int) / den  # sqrt(disc) = e * sqrt(d)
    if d == 1:
        # Rational square: two rational roots.
        if A != 0:
            r1 = tuple(normalize_seq((-B + e, 2 * A)))
            r2 = tuple(normalize_seq((-B - e, 2 * A)))
        else:
            # A == 0, B != 0: z1 * (B*z0 + C*z1).
            r1 = (ONE, ZERO)
            r2 = tuple(normalize_seq((-C, B)))
        return TwoRealRoots(r1, r2, 1)
    # Irrational: A != 0 is forced (A == 0 would make disc = B^2 a square).
    r1 = (QuadExtElem(-B, e, d), QuadExtElem(2 * A, 0, d))
    r2 = (QuadExtElem(-B, -e, d), QuadExtElem(2 * A, 0, d))
    if d > 0:
        return TwoRealRoots(scale_first_one(r1), scale_first_one(r2), d)
    return ConjugatePair(scale_first_one(r1), d)
