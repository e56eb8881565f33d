"""Analysis of trilinear rational maps (P¹)³ ⇢ P³.

The entry points are:

* :func:`syzygy_space` — moving planes of a given multidegree,
* :func:`detect_type` — the per-factor inverse degrees, with a
  birationality certificate,
* :func:`special_planes` — the structured covector/linear-factor data
  underlying the inverse and the focal varieties,
* :func:`extract_inverse` / :func:`verify_birational`,
* :func:`fiber_solve` — an independent elimination oracle.

Internally, maps are analyzed on a *canonical copy* whose factors are
relabeled so the inverse degrees are non-decreasing; all returned data
records the permutation used.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Dict, List, Optional, Sequence, Tuple

from ._ground import Rat, rat, rat_str
from . import _linalg
from .exact import (
    ConjugatePair,
    DoubleRoot,
    IdenticallyZero,
    QuadExtElem,
    TwoRealRoots,
    conjugate_seq,
    normalize_seq,
    proportional,
    quad_root_pair,
)
from .mpoly import (
    MPoly,
    SIG_STU,
    SIG_X,
    binary_roots,
    bin_gcd,
    bin_is_zero,
    bin_squarefree,
    content_free,
    monomials,
    parse_poly,
    sylvester_resultant,
)
from .pluecker import Pt

__all__ = [
    "TrilinearMap",
    "MovingPlane",
    "SpecialPlaneData",
    "InverseMap",
    "TypeDetection",
    "VerificationReport",
    "FiberResult",
    "eval_map",
    "syzygy_space",
    "special_planes",
    "detect_type",
    "extract_inverse",
    "verify_birational",
    "fiber_solve",
    "composition_residuals",
    "BasePoint",
    "NotBirational",
    "NoSpecialPlanes",
    "DegenerateConfiguration",
    "InconsistentData",
    "DegenerateTarget",
]

_BLOCK_ORDER = ("s", "t", "u")


class BasePoint(ValueError):
    """All four map components vanish at the given parameter point."""


class NotBirational(ValueError):
    """The map admits no rational inverse (or is not dominant)."""


class NoSpecialPlanes(ValueError):
    """No structured covector data exists (map not birational, or not of a
    handled class)."""


class DegenerateConfiguration(ValueError):
    """The structured data exists but violates the generality invariants.

    ``partial`` carries whatever data was recovered before the failure.
    """

    def __init__(self, message: str, partial: Optional["SpecialPlaneData"] = None):
        super().__init__(message)
        self.partial = partial


class InconsistentData(ValueError):
    """Special-plane data inconsistent with the map (inverse build failed)."""


class DegenerateTarget(ValueError):
    """The elimination oracle degenerates at the requested target point."""


# ---------------------------------------------------------------------------
# TrilinearMap
# ---------------------------------------------------------------------------


class TrilinearMap:
    """A rational map (P¹)³ ⇢ P³ with four multidegree-(1,1,1) components."""

    __slots__ = ("f", "_cache")

    def __init__(self, components: Sequence[MPoly]):
        comps = tuple(components)
        if len(comps) != 4:
            raise ValueError("a trilinear map needs exactly 4 components")
        md111 = (1, 1, 1)
        for c in comps:
            if c.sig != SIG_STU:
                raise ValueError("components must live in the s,t,u blocks")
            if c.multidegree != md111:
                raise ValueError(
                    f"component has multidegree {c.multidegree}, expected (1,1,1)"
                )
        if all(c.is_zero() for c in comps):
            raise ValueError("all components are zero")
        self.f = comps
        self._cache: Dict = {}

    @classmethod
    def from_strings(cls, texts: Sequence[str]) -> "TrilinearMap":
        return cls([parse_poly(t, SIG_STU) for t in texts])

    def coefficient_rows(self) -> List[List[Rat]]:
        monos = monomials(SIG_STU, (1, 1, 1))
        return [[c.terms.get(e, rat(0)) for e in monos] for c in self.f]

    def validate(self):
        """Reject non-dominant maps: dependent components or common factors."""
        if _linalg.rank(self.coefficient_rows()) != 4:
            raise NotBirational("the four components are linearly dependent")
        reduced = content_free(list(self.f))
        if any(r.multidegree != f.multidegree for r, f in zip(reduced, self.f)):
            raise NotBirational("components share a common polynomial factor")

    def renamed(self, mapping: Dict[str, str]) -> "TrilinearMap":
        return TrilinearMap([c.rename_blocks(mapping) for c in self.f])

    def evaluate(self, s, t, u) -> List:
        assign = {"s": tuple(s), "t": tuple(t), "u": tuple(u)}
        return [c.evaluate(assign) for c in self.f]

    def __eq__(self, other):
        return isinstance(other, TrilinearMap) and self.f == other.f

    def __hash__(self):
        return hash(self.f)

    def __repr__(self):
        return "TrilinearMap(" + "; ".join(str(c) for c in self.f) + ")"


def eval_map(phi: TrilinearMap, p: Sequence) -> Pt:
    """Evaluate the map at a parameter triple; BasePoint when undefined."""
    s, t, u = p
    vals = phi.evaluate(tuple(s), tuple(t), tuple(u))
    if all(v == 0 for v in vals):
        raise BasePoint(f"map undefined at {tuple(tuple(x) for x in p)}")
    return Pt(normalize_seq(vals))


# ---------------------------------------------------------------------------
# Moving planes (syzygies)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MovingPlane:
    """A plane-valued multihomogeneous form annihilating the map.

    ``form`` lists (monomial exponent over the s,t,u variables, covector);
    the defining invariant is that ``bracket`` with the map's components
    expands to the literal zero polynomial.
    """

    multidegree: Tuple[int, int, int]
    form: Tuple[Tuple[Tuple[int, ...], Tuple], ...]

    def covector(self, exp: Tuple[int, ...]) -> Tuple:
        for e, cov in self.form:
            if e == exp:
                return cov
        return (rat(0),) * 4

    def pencil(self, block: str) -> Tuple[Tuple, Tuple]:
        """For a unit multidegree in ``block``: the pair of covectors at
        the block's two variables (z0-coefficient first)."""
        start, _ = SIG_STU.var_slice(block)
        e0 = [0] * SIG_STU.nvars
        e0[start] = 1
        e1 = [0] * SIG_STU.nvars
        e1[start + 1] = 1
        return self.covector(tuple(e0)), self.covector(tuple(e1))

    def coefficient_span(self) -> List[List]:
        red, _ = _linalg.rref([list(cov) for _, cov in self.form])
        return red

    def component_polys(self) -> List[MPoly]:
        """The four coordinate polynomials of the plane-valued form."""
        out = []
        for i in range(4):
            terms = {e: cov[i] for e, cov in self.form}
            out.append(MPoly(SIG_STU, terms, self.multidegree))
        return out

    def bracket(self, phi: TrilinearMap) -> MPoly:
        total: Optional[MPoly] = None
        for e, cov in self.form:
            mono = MPoly(SIG_STU, {e: rat(1)}, self.multidegree)
            for i in range(4):
                ci = cov[i]
                if _is_zero_val(ci):
                    continue
                term = mono * phi.f[i] * ci
                total = term if total is None else total + term
        if total is None:
            md = tuple(d + 1 for d in self.multidegree)
            return MPoly.zero(SIG_STU, md)
        return total

    def evaluate_covector(self, assignment: Dict[str, Sequence]) -> List:
        """Evaluate the parameter dependence, leaving a numeric covector."""
        flat = []
        for name, size in SIG_STU.blocks:
            vals = assignment.get(name, (rat(1),) * size)
            flat.extend(vals)
        out = [rat(0)] * 4
        for e, cov in self.form:
            factor = rat(1)
            for v, p in zip(flat, e):
                for _ in range(p):
                    factor = factor * v
            for i in range(4):
                out[i] = out[i] + factor * cov[i]
        return out


def _is_zero_val(c) -> bool:
    return c.is_zero() if isinstance(c, QuadExtElem) else c == 0


def syzygy_space(phi: TrilinearMap, d: Sequence[int]) -> List[MovingPlane]:
    """Basis of the moving planes of multidegree ``d`` (may be empty)."""
    d = tuple(int(x) for x in d)
    if any(x < 0 for x in d):
        raise ValueError("multidegree must be componentwise non-negative")
    key = ("syz", d)
    if key in phi._cache:
        return phi._cache[key]
    monos = monomials(SIG_STU, d)
    out_monos = monomials(SIG_STU, tuple(x + 1 for x in d))
    rmi = {m: i for i, m in enumerate(out_monos)}
    cols = [(m, i) for m in monos for i in range(4)]
    mat = [[rat(0)] * len(cols) for _ in out_monos]
    for j, (m, i) in enumerate(cols):
        for e, c in phi.f[i].terms.items():
            prod = tuple(a + b for a, b in zip(m, e))
            mat[rmi[prod]][j] = mat[rmi[prod]][j] + c
    basis = _linalg.nullspace(mat, len(cols))
    planes = []
    for v in basis:
        by_mono: Dict[Tuple[int, ...], List] = {}
        for j, (m, i) in enumerate(cols):
            if v[j] != 0:
                by_mono.setdefault(m, [rat(0)] * 4)[i] = v[j]
        form = tuple(
            (m, tuple(by_mono[m])) for m in sorted(by_mono, reverse=True)
        )
        planes.append(MovingPlane(d, form))
    phi._cache[key] = planes
    return planes


def _unit_dims(phi: TrilinearMap) -> Tuple[int, int, int]:
    if "dims" not in phi._cache:
        phi._cache["dims"] = tuple(
            len(syzygy_space(phi, tuple(1 if b == blk else 0 for b in _BLOCK_ORDER)))
            for blk in _BLOCK_ORDER
        )
    return phi._cache["dims"]


# ---------------------------------------------------------------------------
# Specialization pencils
# ---------------------------------------------------------------------------

_OTHER = {"s": ("t", "u"), "t": ("s", "u"), "u": ("s", "t")}


def _spec_matrix_pencil(phi: TrilinearMap, blk: str):
    """W(p) = p0·W0 + p1·W1: the 4×4 matrix whose columns are the map
    components and whose rows are the four bilinear monomials of the other
    two factors; its rank drops where a covector kills the specialized map."""
    o1, o2 = _OTHER[blk]
    s1, _ = SIG_STU.var_slice(o1)
    s2, _ = SIG_STU.var_slice(o2)
    sb, _ = SIG_STU.var_slice(blk)
    W0 = [[rat(0)] * 4 for _ in range(4)]
    W1 = [[rat(0)] * 4 for _ in range(4)]
    for j in range(4):
        for e, c in phi.f[j].terms.items():
            row = 2 * e[s1 + 1] + e[s2 + 1]
            if e[sb]:
                W0[row][j] = c
            else:
                W1[row][j] = c
    return W0, W1


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def _pencil_det_quartic(W0, W1) -> List:
    """det(p0·W0 + p1·W1) as a degree-4 binary coefficient list."""
    coeffs = [rat(0)] * 5
    for perm in permutations(range(4)):
        sign = _perm_sign(perm)
        prod = [rat(sign)]
        for i in range(4):
            a, b = W0[i][perm[i]], W1[i][perm[i]]
            if a == 0 and b == 0:
                prod = None
                break
            nxt = [rat(0)] * (len(prod) + 1)
            for k, c in enumerate(prod):
                nxt[k] = nxt[k] + c * a
                nxt[k + 1] = nxt[k + 1] + c * b
            prod = nxt
        if prod is None:
            continue
        for k in range(5):
            coeffs[k] = coeffs[k] + prod[k]
    return coeffs


def _minors3_gcd(W0, W1) -> Optional[List]:
    """GCD of all 3×3 minors of the pencil (binary cubics); None if all 0."""
    g = None
    for rows in combinations(range(4), 3):
        for cols in combinations(range(4), 3):
            m = [rat(0)] * 4
            for perm in permutations(range(3)):
                sign = _perm_sign(perm)
                prod = [rat(sign)]
                for i in range(3):
                    r, c = rows[i], cols[perm[i]]
                    a, b = W0[r][c], W1[r][c]
                    nxt = [rat(0)] * (len(prod) + 1)
                    for k, cc in enumerate(prod):
                        nxt[k] = nxt[k] + cc * a
                        nxt[k + 1] = nxt[k + 1] + cc * b
                    prod = nxt
                for k in range(4):
                    m[k] = m[k] + prod[k]
            if bin_is_zero(m):
                continue
            g = m if g is None else bin_gcd(g, m)
    return g


def _kernel_at(W0, W1, root) -> List[List]:
    r0, r1 = root
    M = [[r0 * W0[i][j] + r1 * W1[i][j] for j in range(4)] for i in range(4)]
    return _linalg.nullspace(M, 4)


def _root_linform(block: str, root) -> MPoly:
    """The linear form vanishing at a projective root (r0:r1)."""
    return MPoly.linear_form(SIG_STU, block, (root[1], -root[0]))


# ---------------------------------------------------------------------------
# Small exact helpers
# ---------------------------------------------------------------------------


def _bracket_cov(cov, phi: TrilinearMap) -> MPoly:
    total: Optional[MPoly] = None
    for i in range(4):
        if _is_zero_val(cov[i]):
            continue
        term = phi.f[i] * cov[i]
        total = term if total is None else total + term
    if total is None:
        return MPoly.zero(SIG_STU, (1, 1, 1))
    return total


def _try_divide(p: MPoly, q: MPoly) -> Optional[MPoly]:
    """Exact division over any coefficient field; None when not divisible."""
    if q.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero():
        md = tuple(a - b for a, b in zip(p.multidegree, q.multidegree))
        if any(x < 0 for x in md):
            return None
        return MPoly.zero(p.sig, md)
    md = tuple(a - b for a, b in zip(p.multidegree, q.multidegree))
    if any(x < 0 for x in md):
        return None
    rem = dict(p.terms)
    qlead = max(q.terms)
    qc = q.terms[qlead]
    quot: Dict[Tuple[int, ...], object] = {}
    qc_inv = qc.inverse() if isinstance(qc, QuadExtElem) else None
    while rem:
        plead = max(rem)
        e = tuple(a - b for a, b in zip(plead, qlead))
        if any(x < 0 for x in e):
            return None
        c = rem[plead] * qc_inv if qc_inv is not None else rem[plead] / qc
        quot[e] = quot.get(e, None)
        quot[e] = c if quot[e] is None else quot[e] + c
        for qe, qc2 in q.terms.items():
            te = tuple(a + b for a, b in zip(e, qe))
            cur = rem.get(te)
            nv = (-(c * qc2)) if cur is None else cur - c * qc2
            if _is_zero_val(nv):
                rem.pop(te, None)
            else:
                rem[te] = nv
    return MPoly(p.sig, quot, md)


def _split_bilinear(p: MPoly, blk1: str, blk2: str):
    """Split a rank-one bilinear form into linear factors; None if rank 2."""
    s1, _ = p.sig.var_slice(blk1)
    s2, _ = p.sig.var_slice(blk2)
    M = [[rat(0), rat(0)], [rat(0), rat(0)]]
    for e, c in p.terms.items():
        M[e[s1 + 1]][e[s2 + 1]] = c
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if not _is_zero_val(det):
        return None
    if not (_is_zero_val(M[0][0]) and _is_zero_val(M[0][1])):
        br = 0
    elif not (_is_zero_val(M[1][0]) and _is_zero_val(M[1][1])):
        br = 1
    else:
        return None
    cvec = (M[br][0], M[br][1])
    j0 = 0 if not _is_zero_val(cvec[0]) else 1
    inv = cvec[j0].inverse() if isinstance(cvec[j0], QuadExtElem) else None
    bvec = tuple(
        (M[i][j0] * inv) if inv is not None else M[i][j0] / cvec[j0] for i in (0, 1)
    )
    f = MPoly.linear_form(p.sig, blk1, bvec)
    g = MPoly.linear_form(p.sig, blk2, cvec)
    return f, g


def _match_scale(f: MPoly, g: MPoly, block: str):
    """λ with g = λ·f for proportional linear forms (exact); None if not."""
    start, _ = f.sig.var_slice(block)
    e0 = [0] * f.sig.nvars
    e0[start] = 1
    e1 = [0] * f.sig.nvars
    e1[start + 1] = 1
    f0, f1 = f.terms.get(tuple(e0), rat(0)), f.terms.get(tuple(e1), rat(0))
    g0, g1 = g.terms.get(tuple(e0), rat(0)), g.terms.get(tuple(e1), rat(0))
    if not _is_zero_val(f0 * g1 - f1 * g0):
        return None
    if not _is_zero_val(f0):
        return g0 * f0.inverse() if isinstance(f0, QuadExtElem) else g0 / f0
    if not _is_zero_val(f1):
        return g1 * f1.inverse() if isinstance(f1, QuadExtElem) else g1 / f1
    return None


def _pair_coeffs(form: MPoly, block: str) -> Tuple:
    start, _ = form.sig.var_slice(block)
    e0 = [0] * form.sig.nvars
    e0[start] = 1
    e1 = [0] * form.sig.nvars
    e1[start + 1] = 1
    return (
        form.terms.get(tuple(e0), rat(0)),
        form.terms.get(tuple(e1), rat(0)),
    )


def _in_span(vec, basis) -> bool:
    if not basis:
        return all(_is_zero_val(x) for x in vec)
    return _linalg.rank([list(b) for b in basis] + [list(vec)]) == len(basis)


def _span_intersect(sp1, sp2) -> List:
    """Intersection of two covector spans (lists of 4-vectors)."""
    rows = []
    for c in range(4):
        rows.append([v[c] for v in sp1] + [-w[c] for w in sp2])
    ns = _linalg.nullspace(rows, len(sp1) + len(sp2))
    out = []
    for sol in ns:
        vec = [
            _linalg.sum_prod(sol[: len(sp1)], [v[c] for v in sp1])
            for c in range(4)
        ]
        if any(not _is_zero_val(x) for x in vec):
            if not any(proportional(vec, u) for u in out):
                out.append(vec)
    return out


def _solve_in_span(span, phi: TrilinearMap, target: MPoly):
    """Element of the span whose bracket equals ``target`` exactly."""
    brs = [_bracket_cov(v, phi) for v in span]
    monos = monomials(SIG_STU, (1, 1, 1))
    rows = [[b.terms.get(m, rat(0)) for b in brs] for m in monos]
    rhs = [target.terms.get(m, rat(0)) for m in monos]
    sol = _linalg.solve(rows, rhs)
    if sol is None:
        return None
    vec = [_linalg.sum_prod(sol, [v[c] for v in span]) for c in range(4)]
    check = _bracket_cov(vec, phi)
    if not (check + (-target)).is_zero():
        return None
    return vec


def _dual_point(covs) -> List:
    """The point annihilated by three independent covectors."""
    ns = _linalg.nullspace([list(c) for c in covs], 4)
    if len(ns) != 1:
        raise DegenerateConfiguration(
            f"covectors span a space of rank {4 - len(ns)}, expected 3"
        )
    return normalize_seq(ns[0])


def _cov_dot_x(cov) -> MPoly:
    """The linear x-form <cov, x>."""
    return MPoly.linear_form(SIG_X, "x", tuple(cov))


# ---------------------------------------------------------------------------
# SpecialPlaneData
# ---------------------------------------------------------------------------


@dataclass
class SpecialPlaneData:
    """Structured covector / linear-factor data of a birational map.

    All polynomial entries use the *canonical* factor labels: the factors
    are relabeled so the inverse degrees are non-decreasing;
    ``permutation[i]`` records which original factor sits in canonical
    slot i (slots are named s, t, u in order).

    ``planes`` maps covector names to 4-tuples (rational, or quadratic
    extension elements with discriminant ``ext_d``); ``linear_factors``
    maps factor names to linear forms in the canonical parameter blocks.
    ``weights`` is the nonzero scalar triple of the (2,2,2) shape;
    ``residual`` the shared bilinear factor of the (1,2,2) shape;
    ``attribution`` the pairing of each B/C covector with its degree-1
    factor root index in the (1,2,2) shape.
    """

    map_type: Tuple[int, int, int]
    permutation: Tuple[str, str, str]
    planes: Dict[str, Tuple]
    linear_factors: Dict[str, MPoly] = field(default_factory=dict)
    weights: Optional[Tuple] = None
    residual: Optional[MPoly] = None
    ext_d: Optional[int] = None
    attribution: Optional[Dict[str, int]] = None
    general: bool = True

    @property
    def slot_blocks(self) -> Dict[str, str]:
        """Canonical slot name -> original factor name."""
        return {slot: orig for slot, orig in zip(_BLOCK_ORDER, self.permutation)}

    @property
    def original_slots(self) -> Dict[str, str]:
        """Original factor name -> canonical slot name."""
        return {orig: slot for slot, orig in zip(_BLOCK_ORDER, self.permutation)}


# ---------------------------------------------------------------------------
# Type detection
# ---------------------------------------------------------------------------


class TypeDetection(tuple):
    """(type triple, factor permutation); unpacks as a 2-tuple.

    ``triple`` is non-decreasing; ``permutation[i]`` names the original
    factor placed in slot i.
    """

    def __new__(cls, triple, permutation):
        return super().__new__(cls, (tuple(triple), tuple(permutation)))

    @property
    def triple(self) -> Tuple[int, int, int]:
        return self[0]

    @property
    def permutation(self) -> Tuple[str, str, str]:
        return self[1]

    @property
    def degrees_by_factor(self) -> Dict[str, int]:
        return {orig: self[0][i] for i, orig in enumerate(self[1])}


def _degree_data(phi: TrilinearMap):
    dims = _unit_dims(phi)
    if any(d > 1 for d in dims):
        raise NotBirational(
            f"unit syzygy spaces have dimensions {dims}; the map is not birational"
        )
    degs = {blk: (1 if d == 1 else 2) for blk, d in zip(_BLOCK_ORDER, dims)}
    perm = tuple(sorted(_BLOCK_ORDER, key=lambda b: (degs[b], _BLOCK_ORDER.index(b))))
    triple = tuple(degs[b] for b in perm)
    return dims, degs, perm, triple


def detect_type(phi: TrilinearMap) -> TypeDetection:
    """Inverse component degrees per factor, with a birationality check.

    Returns (non-decreasing type triple, permutation of original factors);
    raises :class:`NotBirational` when no exact inverse exists.
    """
    if "type" in phi._cache:
        cached = phi._cache["type"]
        if isinstance(cached, Exception):
            raise cached
        return cached
    try:
        result = _detect_type_impl(phi)
    except NotBirational as e:
        phi._cache["type"] = e
        raise
    phi._cache["type"] = result
    return result


def _detect_type_impl(phi: TrilinearMap) -> TypeDetection:
    phi.validate()
    dims, degs, perm, triple = _degree_data(phi)
    det = TypeDetection(triple, perm)
    # Certify birationality: prefer the exact inverse composition identity.
    try:
        data = special_planes(phi)
        extract_inverse(phi, data)  # raises InconsistentData on failure
        return det
    except DegenerateConfiguration as e:
        if e.partial is not None and e.partial.map_type == (1, 1, 1):
            try:
                extract_inverse(phi, e.partial)
                return det
            except InconsistentData:
                pass
    except (NoSpecialPlanes, InconsistentData):
        pass
    # Fallback: the independent elimination oracle at two random targets.
    rng = random.Random(0x5EED)
    confirmed = 0
    attempts = 0
    while confirmed < 2 and attempts < 25:
        attempts += 1
        pt = _random_parameter_point(rng)
        try:
            img = eval_map(phi, pt)
        except BasePoint:
            continue
        try:
            fib = fiber_solve(phi, tuple(img.coords))
        except DegenerateTarget:
            continue
        if len(fib) == 1 and fib.nonrational_count == 0:
            confirmed += 1
        else:
            coords = "(" + ":".join(rat_str(v) for v in img.coords) + ")"
            raise NotBirational(
                f"fiber over {coords} has {len(fib)} rational point(s) "
                f"and {fib.nonrational_count} non-rational candidate(s)"
            )
    if confirmed < 2:
        raise NotBirational("could not certify birationality at generic targets")
    return det


def _random_parameter_point(rng: random.Random):
    def pair():
        while True:
            a, b = rng.randint(-9, 9), rng.randint(-9, 9)
            if a or b:
                return (rat(a), rat(b))

    return (pair(), pair(), pair())


# ---------------------------------------------------------------------------
# special_planes and the per-type recoveries
# ---------------------------------------------------------------------------


def special_planes(phi: TrilinearMap) -> SpecialPlaneData:
    """Recover the structured covector data for the map's type.

    Raises :class:`NoSpecialPlanes` when the structural shape is absent
    (non-birational or unhandled map) and :class:`DegenerateConfiguration`
    when the shape exists but the generality invariants fail (partial data
    attached).
    """
    if "special" in phi._cache:
        cached = phi._cache["special"]
        if isinstance(cached, Exception):
            raise cached
        return cached
    try:
        result = _special_planes_impl(phi)
    except (NoSpecialPlanes, DegenerateConfiguration) as e:
        phi._cache["special"] = e
        raise
    phi._cache["special"] = result
    return result


def _special_planes_impl(phi: TrilinearMap) -> SpecialPlaneData:
    dims = _unit_dims(phi)
    if any(d > 1 for d in dims):
        raise NoSpecialPlanes(
            f"unit syzygy dimensions {dims}: no structured plane data"
        )
    degs = {blk: (1 if d == 1 else 2) for blk, d in zip(_BLOCK_ORDER, dims)}
    perm = tuple(sorted(_BLOCK_ORDER, key=lambda b: (degs[b], _BLOCK_ORDER.index(b))))
    triple = tuple(degs[b] for b in perm)
    mapping = {orig: slot for slot, orig in zip(_BLOCK_ORDER, perm)}
    phic = phi if mapping == {b: b for b in _BLOCK_ORDER} else phi.renamed(mapping)
    if triple == (1, 1, 1):
        return _recover_111(phic, perm)
    if triple == (1, 1, 2):
        return _recover_112(phic, perm)
    if triple == (1, 2, 2):
        return _recover_122(phic, perm)
    return _recover_222(phic, perm)


def _unit_syzygy(phic: TrilinearMap, block: str) -> MovingPlane:
    d = tuple(1 if b == block else 0 for b in _BLOCK_ORDER)
    syz = syzygy_space(phic, d)
    if len(syz) != 1:
        raise NoSpecialPlanes(f"expected one unit syzygy in {block}, got {len(syz)}")
    return syz[0]


def _recover_111(phic: TrilinearMap, perm) -> SpecialPlaneData:
    names = (("A0", "A1"), ("B0", "B1"), ("C0", "C1"))
    planes: Dict[str, Tuple] = {}
    for blk, (n0, n1) in zip(_BLOCK_ORDER, names):
        V, W = _unit_syzygy(phic, blk).pencil(blk)
        if all(_is_zero_val(x) for x in V) or all(_is_zero_val(x) for x in W):
            raise NoSpecialPlanes(f"degenerate unit syzygy pencil in {blk}")
        # The relative scale of the two pencil covectors carries the inverse
        # formula; normalize them jointly, never separately.
        joint = normalize_seq(tuple(V) + tuple(W))
        planes[n0] = tuple(joint[:4])
        planes[n1] = tuple(joint[4:])
    data = SpecialPlaneData(
        map_type=(1, 1, 1), permutation=perm, planes=planes
    )
    # Generality: any four of the six covectors linearly independent.
    keys = [n for pair in names for n in pair]
    for quad in combinations(keys, 4):
        if _linalg.rank([list(planes[k]) for k in quad]) != 4:
            data.general = False
            raise DegenerateConfiguration(
                f"dependent covector quadruple {quad}", partial=data
            )
    return data


def _recover_112(phic: TrilinearMap, perm) -> SpecialPlaneData:
    sig_syz = _unit_syzygy(phic, "s")
    tau_syz = _unit_syzygy(phic, "t")
    sspan = sig_syz.coefficient_span()
    tspan = tau_syz.coefficient_span()
    if len(sspan) != 2 or len(tspan) != 2:
        raise DegenerateConfiguration(
            f"syzygy coefficient spans have dims {len(sspan)},{len(tspan)} (expected 2,2)"
        )
    inter = _span_intersect(sspan, tspan)
    if len(inter) != 1:
        raise DegenerateConfiguration(
            f"sigma/tau coefficient spans meet in dimension {len(inter)}"
        )
    C0 = normalize_seq(inter[0])

    W0u, W1u = _spec_matrix_pencil(phic, "u")
    q = _pencil_det_quartic(W0u, W1u)
    if bin_is_zero(q):
        raise NoSpecialPlanes("u-specialization determinant vanishes identically")
    roots = binary_roots(bin_squarefree(q))
    if roots.quadratic or roots.higher or len(roots.rational) != 2:
        raise DegenerateConfiguration(
            f"u-determinant root pattern {roots} outside the (1,1,2) shape"
        )
    kers = [_kernel_at(W0u, W1u, r) for r, _ in roots.rational]
    dk = [len(k) for k in kers]
    if sorted(dk) != [1, 3]:
        raise DegenerateConfiguration(f"u-kernel dimensions {dk} (expected 1 and 3)")
    i3, i1 = dk.index(3), dk.index(1)
    C1 = tuple(normalize_seq(kers[i1][0]))
    c1f = _root_linform("u", roots.rational[i3][0])
    c0f = _root_linform("u", roots.rational[i1][0])

    # Scale chain: <C0,Phi> = a0 b0 c1.
    PC0 = _bracket_cov(C0, phic)
    ab = _try_divide(PC0, c1f)
    if ab is None:
        raise DegenerateConfiguration("c1 does not divide <C0,map>")
    split = _split_bilinear(ab, "s", "t")
    if split is None:
        raise DegenerateConfiguration("<C0,map>/c1 is not rank one")
    a0f, b0f = split
    PC1 = _bracket_cov(tuple(C1), phic)
    rest = _try_divide(PC1, c0f)
    if rest is None:
        raise DegenerateConfiguration("c0 does not divide <C1,map>")
    # Calibration: a1 b1 = a0 b0 - kappa * rest must be rank one for the right
    # kappa; det(P - kappa R) = kappa (det(R) kappa - mixed) with kappa=0 spurious.
    P = _bil_mat(a0f * b0f)
    R = _bil_mat(rest)
    detR = R[0][0] * R[1][1] - R[0][1] * R[1][0]
    mixed = (
        P[0][0] * R[1][1]
        + P[1][1] * R[0][0]
        - P[0][1] * R[1][0]
        - P[1][0] * R[0][1]
    )
    if detR == 0:
        raise DegenerateConfiguration("degenerate (1,1,2) calibration matrix")
    kappa = mixed / detR
    if kappa == 0:
        raise DegenerateConfiguration("vanishing (1,1,2) calibration scale")
    a1b1 = a0f * b0f + (-(rest * kappa))
    c0f = c0f * (1 / kappa)
    split = _split_bilinear(a1b1, "s", "t")
    if split is None:
        raise DegenerateConfiguration("calibrated a1*b1 is not rank one")
    a1f, b1f = split

    A = _solve_in_span(sspan, phic, a1f * b0f * c1f)
    B = _solve_in_span(tspan, phic, a0f * b1f * c1f)
    if A is None or B is None:
        raise DegenerateConfiguration("sigma/tau spans do not contain A or B")
    A, B = tuple(A), tuple(B)

    planes = {"A": A, "B": B, "C0": tuple(C0), "C1": C1}
    factors = {"a0": a0f, "a1": a1f, "b0": b0f, "b1": b1f, "c0": c0f, "c1": c1f}
    data = SpecialPlaneData(
        map_type=(1, 1, 2), permutation=perm, planes=planes, linear_factors=factors
    )
    # Exact bracket validation.
    checks = [
        (_bracket_cov(A, phic), a1f * b0f * c1f),
        (_bracket_cov(B, phic), a0f * b1f * c1f),
        (PC0, a0f * b0f * c1f),
        (PC1, (a0f * b0f + (-(a1f * b1f))) * c0f),
    ]
    for got, want in checks:
        if not (got + (-want)).is_zero():
            raise DegenerateConfiguration("bracket identities fail", partial=data)
    if _linalg.rank([list(planes[k]) for k in ("A", "B", "C0", "C1")]) != 4:
        data.general = False
        raise DegenerateConfiguration("A,B,C0,C1 dependent", partial=data)
    return data


def _bil_mat(p: MPoly):
    s1, _ = p.sig.var_slice("s")
    s2, _ = p.sig.var_slice("t")
    M = [[rat(0), rat(0)], [rat(0), rat(0)]]
    for e, c in p.terms.items():
        M[e[s1 + 1]][e[s2 + 1]] = c
    return M


def _ext_root_pair(res):
    """Both roots of a quad_root_pair result, with the field discriminant."""
    if isinstance(res, TwoRealRoots):
        return [res.first, res.second], res.d
    if isinstance(res, ConjugatePair):
        return [res.root, res.conjugate_root], res.d
    return None, None


def _recover_122(phic: TrilinearMap, perm) -> SpecialPlaneData:
    W0s, W1s = _spec_matrix_pencil(phic, "s")
    qs = _pencil_det_quartic(W0s, W1s)
    if not bin_is_zero(qs):
        raise NoSpecialPlanes("s-determinant should vanish for a unit s-syzygy")
    g3 = _minors3_gcd(W0s, W1s)
    if g3 is None or bin_is_zero(g3):
        raise NoSpecialPlanes("s-specialization has rank <= 2 everywhere")
    sf = bin_squarefree(g3)
    sroots = binary_roots(sf)
    ext_d: Optional[int] = None
    if len(sroots.rational) == 2 and not sroots.quadratic and not sroots.higher:
        a_roots = [r for r, _ in sroots.rational]
    elif (
        not sroots.rational and len(sroots.quadratic) == 1 and not sroots.higher
    ):
        (Aq, Bq, Cq), _ = sroots.quadratic[0]
        res = quad_root_pair(Aq, Bq, Cq)
        a_roots, ext_d = _ext_root_pair(res)
        if a_roots is None:
            raise DegenerateConfiguration("repeated root in the degree-1 drop locus")
    else:
        raise DegenerateConfiguration(
            f"degree-1 factor drop locus has unexpected roots {sroots}"
        )
    skers = [_kernel_at(W0s, W1s, r) for r in a_roots]
    if any(len(k) != 2 for k in skers):
        raise DegenerateConfiguration(
            f"s-kernel dimensions {[len(k) for k in skers]} (expected 2,2)"
        )

    # t- and u-factor quartics: shape root^2 * (two simple roots).
    sides = {}
    for blk in ("t", "u"):
        W0, W1 = _spec_matrix_pencil(phic, blk)
        q = _pencil_det_quartic(W0, W1)
        if bin_is_zero(q):
            raise NoSpecialPlanes(f"{blk}-determinant vanishes identically")
        sfq = bin_squarefree(q)
        rts = binary_roots(sfq)
        singles = []
        pair_root = None
        if len(rts.rational) == 3 and not rts.quadratic and not rts.higher:
            cand = []
            for r, _ in rts.rational:
                ker = _kernel_at(W0, W1, r)
                cand.append((r, ker))
            dims_k = [len(k) for (_, k) in cand]
            if sorted(dims_k) != [1, 1, 2]:
                raise DegenerateConfiguration(
                    f"{blk}-kernel dimensions {dims_k} (expected 1,1,2)"
                )
            for r, ker in cand:
                if len(ker) == 1:
                    singles.append((r, ker[0]))
                else:
                    pair_root = (r, ker)
        elif (
            len(rts.rational) == 1
            and len(rts.quadratic) == 1
            and not rts.higher
        ):
            r2, _ = rts.rational[0]
            ker2 = _kernel_at(W0, W1, r2)
            if len(ker2) != 2:
                raise DegenerateConfiguration(
                    f"{blk}-kernel at the rational root has dimension {len(ker2)}"
                )
            pair_root = (r2, ker2)
            (Aq, Bq, Cq), _ = rts.quadratic[0]
            res = quad_root_pair(Aq, Bq, Cq)
            roots2, d2 = _ext_root_pair(res)
            if roots2 is None:
                raise DegenerateConfiguration(f"repeated {blk}-root")
            if ext_d is None:
                ext_d = d2
            elif d2 != ext_d:
                raise DegenerateConfiguration(
                    f"mixed extension discriminants {ext_d} and {d2}"
                )
            for r in roots2:
                ker = _kernel_at(W0, W1, r)
                if len(ker) != 1:
                    raise DegenerateConfiguration(
                        f"{blk}-kernel at an extension root has dimension {len(ker)}"
                    )
                singles.append((r, ker[0]))
        else:
            raise DegenerateConfiguration(
                f"{blk}-quartic root pattern {rts} outside the (1,2,2) shape"
            )
        sides[blk] = dict(singles=singles, pair=pair_root)

    # Attribute each single covector to its degree-1 factor root.
    def membership(vec) -> Optional[int]:
        hits = [i for i, K in enumerate(skers) if _in_span(vec, K)]
        return hits[0] if len(hits) == 1 else None

    Bs = sides["t"]["singles"]
    Cs = sides["u"]["singles"]
    iB = [membership(v) for _, v in Bs]
    iC = [membership(v) for _, v in Cs]
    if None in iB or None in iC or set(iB) != {0, 1} or set(iC) != {0, 1}:
        raise DegenerateConfiguration(
            f"covector-to-root attribution failed (B:{iB}, C:{iC})"
        )
    # Relabel so B_i / C_i pair with a-root i.
    Bv = {iB[k]: Bs[k][1] for k in range(2)}
    Cv = {iC[k]: Cs[k][1] for k in range(2)}
    b_roots_by = {iB[k]: Bs[k][0] for k in range(2)}
    c_roots_by = {iC[k]: Cs[k][0] for k in range(2)}

    # A_i from the unit s-syzygy alpha = a0 A1 - a1 A0: evaluating the
    # covector pencil at the root of a_i lands in the kernel there and is
    # proportional to A_i.
    alpha = _unit_syzygy(phic, "s")
    V, W = alpha.pencil("s")
    Avec = []
    for idx, r in enumerate(a_roots):
        cand = [r[0] * V[i] + r[1] * W[i] for i in range(4)]
        if not _in_span(cand, skers[idx]):
            raise DegenerateConfiguration("alpha evaluation misses the s-kernel")
        Avec.append(cand)

    # Scale chain: a0 free; h = <A0>/a0; a1 = <A1>/h.
    a0f = _root_linform("s", a_roots[0])
    PA0 = _bracket_cov(Avec[0], phic)
    h = _try_divide(PA0, a0f)
    if h is None:
        raise DegenerateConfiguration("a0 does not divide <A0,map>")
    PA1 = _bracket_cov(Avec[1], phic)
    a1f = _try_divide(PA1, h)
    if a1f is None:
        raise DegenerateConfiguration("h does not divide <A1,map>")
    afs = [a0f, a1f]

    # <B_i> = a_i * b_i * c2 with the same c2; fix scales by matching.
    splits_b = []
    for i in (0, 1):
        q = _try_divide(_bracket_cov(Bv[i], phic), afs[i])
        if q is None:
            raise DegenerateConfiguration(f"a{i} does not divide <B{i},map>")
        sp = _split_bilinear(q, "t", "u")
        if sp is None:
            raise DegenerateConfiguration(f"<B{i},map>/a{i} not rank one")
        splits_b.append(sp)
    (b0f, c2a), (b1f, c2b) = splits_b
    lam = _match_scale(c2a, c2b, "u")
    if lam is None or _is_zero_val(lam):
        raise DegenerateConfiguration("c2 factors of the two B-brackets differ")
    b1f = b1f * lam
    c2f = c2a

    splits_c = []
    for i in (0, 1):
        q = _try_divide(_bracket_cov(Cv[i], phic), afs[i])
        if q is None:
            raise DegenerateConfiguration(f"a{i} does not divide <C{i},map>")
        sp = _split_bilinear(q, "t", "u")
        if sp is None:
            raise DegenerateConfiguration(f"<C{i},map>/a{i} not rank one")
        splits_c.append(sp)
    (b2a, c0f), (b2b, c1f) = splits_c
    lam2 = _match_scale(b2a, b2b, "t")
    if lam2 is None or _is_zero_val(lam2):
        raise DegenerateConfiguration("b2 factors of the two C-brackets differ")
    c1f = c1f * lam2
    b2f = b2a

    planes = {
        "A0": tuple(Avec[0]),
        "A1": tuple(Avec[1]),
        "B0": tuple(Bv[0]),
        "B1": tuple(Bv[1]),
        "C0": tuple(Cv[0]),
        "C1": tuple(Cv[1]),
    }
    factors = {
        "a0": a0f,
        "a1": a1f,
        "b0": b0f,
        "b1": b1f,
        "b2": b2f,
        "c0": c0f,
        "c1": c1f,
        "c2": c2f,
    }
    data = SpecialPlaneData(
        map_type=(1, 2, 2),
        permutation=perm,
        planes=planes,
        linear_factors=factors,
        residual=h,
        ext_d=ext_d,
        attribution={"B0": 0, "B1": 1, "C0": 0, "C1": 1},
    )
    # Exact bracket validation.
    for i in (0, 1):
        got = _bracket_cov(Bv[i], phic)
        want = afs[i] * (b0f if i == 0 else b1f) * c2f
        if not (got + (-want)).is_zero():
            raise DegenerateConfiguration("B-bracket identity fails", partial=data)
        got = _bracket_cov(Cv[i], phic)
        want = afs[i] * b2f * (c0f if i == 0 else c1f)
        if not (got + (-want)).is_zero():
            raise DegenerateConfiguration("C-bracket identity fails", partial=data)
    # Matroid invariants: E_i = {A_i, B_i, C_i} dependent, pairwise
    # independent; E_0 pairs + E_1 pairs span.
    for i in (0, 1):
        E = [list(planes[f"A{i}"]), list(planes[f"B{i}"]), list(planes[f"C{i}"])]
        if _linalg.rank(E) != 2:
            data.general = False
            raise DegenerateConfiguration(f"E{i} not rank 2", partial=data)
        for va, vb in combinations(E, 2):
            if _linalg.rank([va, vb]) != 2:
                data.general = False
                raise DegenerateConfiguration(
                    f"dependent pair inside E{i}", partial=data
                )
    if _linalg.rank(
        [list(planes[k]) for k in ("A0", "B0", "A1", "B1")]
    ) != 4:
        data.general = False
        raise DegenerateConfiguration("E0+E1 pairs do not span", partial=data)
    # Conjugation consistency for extension data.
    if ext_d is not None:
        for nm0, nm1 in (("A0", "A1"), ("B0", "B1"), ("C0", "C1")):
            v0 = conjugate_seq(planes[nm0])
            if not proportional(v0, planes[nm1]):
                raise DegenerateConfiguration(
                    f"{nm0},{nm1} are not a conjugate pair", partial=data
                )
    return data


def _recover_222(phic: TrilinearMap, perm) -> SpecialPlaneData:
    rootdata = {}
    for blk in _BLOCK_ORDER:
        W0, W1 = _spec_matrix_pencil(phic, blk)
        q = _pencil_det_quartic(W0, W1)
        if bin_is_zero(q):
            raise NoSpecialPlanes(f"{blk}-determinant vanishes identically")
        rts = binary_roots(bin_squarefree(q))
        if rts.quadratic or rts.higher or len(rts.rational) != 2:
            raise DegenerateConfiguration(
                f"{blk}-quartic root pattern {rts} outside the (2,2,2) shape"
            )
        kers = [_kernel_at(W0, W1, r) for r, _ in rts.rational]
        dk = [len(k) for k in kers]
        if sorted(dk) != [1, 2]:
            raise DegenerateConfiguration(
                f"{blk}-kernel dimensions {dk} (expected 1 and 2)"
            )
        i1 = dk.index(1)
        rootdata[blk] = dict(
            single=kers[i1][0],
            root0=rts.rational[i1][0],
            root1=rts.rational[1 - i1][0],
        )

    A = tuple(normalize_seq(rootdata["s"]["single"]))
    B = tuple(normalize_seq(rootdata["t"]["single"]))
    C = tuple(normalize_seq(rootdata["u"]["single"]))
    a0f = _root_linform("s", rootdata["s"]["root0"])
    # Scale chain: <A> = a0 b1 c1; <B> = a1 b0 c1; <C> = a1 b1 c0.
    PA = _bracket_cov(A, phic)
    b1c1 = _try_divide(PA, a0f)
    if b1c1 is None:
        raise DegenerateConfiguration("a0 does not divide <A,map>")
    sp = _split_bilinear(b1c1, "t", "u")
    if sp is None:
        raise DegenerateConfiguration("<A,map>/a0 not rank one")
    b1f, c1f = sp
    PB = _bracket_cov(B, phic)
    a1b0 = _try_divide(PB, c1f)
    if a1b0 is None:
        raise DegenerateConfiguration("c1 does not divide <B,map>")
    sp = _split_bilinear(a1b0, "s", "t")
    if sp is None:
        raise DegenerateConfiguration("<B,map>/c1 not rank one")
    a1f, b0f = sp
    PC = _bracket_cov(C, phic)
    tmp = _try_divide(PC, a1f)
    c0f = _try_divide(tmp, b1f) if tmp is not None else None
    if c0f is None:
        raise DegenerateConfiguration("a1*b1 does not divide <C,map>")

    # D: complete {A,B,C} to a basis, expand the bracket in the 8-product
    # basis, and remove the A/B/C contributions.
    basis_forms = []
    for af in (a0f, a1f):
        for bf in (b0f, b1f):
            for cf in (c0f, c1f):
                basis_forms.append(af * bf * cf)
    monos = monomials(SIG_STU, (1, 1, 1))
    Mb = [[bf.terms.get(m, rat(0)) for bf in basis_forms] for m in monos]

    def expand(p: MPoly):
        rhs = [p.terms.get(m, rat(0)) for m in monos]
        return _linalg.solve(Mb, rhs)

    Dp = None
    for cand in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)):
        if _linalg.rank([list(A), list(B), list(C), [rat(x) for x in cand]]) == 4:
            Dp = [rat(x) for x in cand]
            break
    coeffs = expand(_bracket_cov(Dp, phic))
    if coeffs is None:
        raise DegenerateConfiguration("product basis does not span the brackets")
    # Basis order: (a0b0c0, a0b0c1, a0b1c0, a0b1c1, a1b0c0, a1b0c1, a1b1c0, a1b1c1)
    al, be, ga = coeffs[3], coeffs[5], coeffs[6]
    D = tuple(Dp[i] - al * A[i] - be * B[i] - ga * C[i] for i in range(4))
    dco = expand(_bracket_cov(D, phic))
    if dco is None or dco[0] != 0 or dco[7] != 0:
        raise DegenerateConfiguration(
            "a0b0c0/a1b1c1 coordinates of <D,map> do not vanish"
        )
    w1, w2, w3 = dco[4], dco[2], dco[1]
    planes = {"A": A, "B": B, "C": C, "D": D}
    factors = {"a0": a0f, "a1": a1f, "b0": b0f, "b1": b1f, "c0": c0f, "c1": c1f}
    data = SpecialPlaneData(
        map_type=(2, 2, 2),
        permutation=perm,
        planes=planes,
        linear_factors=factors,
        weights=(w1, w2, w3),
    )
    if w1 == 0 or w2 == 0 or w3 == 0:
        data.general = False
        raise DegenerateConfiguration(
            f"vanishing weight in {(w1, w2, w3)}", partial=data
        )
    # Exact validation of all four brackets.
    want_D: Optional[MPoly] = None
    for w, prod in (
        (w1, a1f * b0f * c0f),
        (w2, a0f * b1f * c0f),
        (w3, a0f * b0f * c1f),
    ):
        term = prod * w
        want_D = term if want_D is None else want_D + term
    checks = [
        (PA, a0f * b1f * c1f),
        (PB, a1f * b0f * c1f),
        (PC, a1f * b1f * c0f),
        (_bracket_cov(D, phic), want_D),
    ]
    for got, want in checks:
        if not (got + (-want)).is_zero():
            raise DegenerateConfiguration("bracket identities fail", partial=data)
    return data


# ---------------------------------------------------------------------------
# Inverse extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InverseMap:
    """Inverse components per original factor, as x-form pairs.

    ``components[i]`` is the (numerator, denominator)-style homogeneous
    pair for the i-th original factor (s, t, u); each pair is content-free,
    of equal degree, and defined up to a unimodular change of the pair.
    """

    components: Tuple[Tuple[MPoly, MPoly], ...]

    @property
    def degrees(self) -> Tuple[int, int, int]:
        return tuple(p0.degree_in("x") for p0, _ in self.components)

    def evaluate(self, x: Sequence) -> List[Tuple]:
        assign = {"x": tuple(x)}
        return [
            (p0.evaluate(assign), p1.evaluate(assign)) for p0, p1 in self.components
        ]


def _inv_pair(forms: Tuple[MPoly, MPoly], block: str, valpair) -> Tuple[MPoly, MPoly]:
    """Solve (f0(z):f1(z)) = (val0:val1) for z via the adjugate."""
    m0 = _pair_coeffs(forms[0], block)
    m1 = _pair_coeffs(forms[1], block)
    p0 = valpair[0] * m1[1] + (-(valpair[1] * m0[1]))
    p1 = (-(valpair[0] * m1[0])) + valpair[1] * m0[0]
    return p0, p1


def _realify_pair(P0: MPoly, P1: MPoly) -> Tuple[MPoly, MPoly]:
    """Strip a common quadratic-extension scale from a projectively real
    pair, returning rational polynomials."""
    if not (P0.has_extension_coeffs() or P1.has_extension_coeffs()):
        return P0, P1

    def part(p: MPoly, which: str) -> MPoly:
        terms = {}
        for e, c in p.terms.items():
            if isinstance(c, QuadExtElem):
                v = c.a if which == "a" else c.b
            else:
                v = c if which == "a" else rat(0)
            if v != 0:
                terms[e] = v
        return MPoly(p.sig, terms, p.multidegree)

    for which in ("a", "b"):
        R0, R1 = part(P0, which), part(P1, which)
        if R0.is_zero() and R1.is_zero():
            continue
        # Verify (R0:R1) == (P0:P1) exactly.
        if (P0 * R1 + (-(P1 * R0))).is_zero():
            return R0, R1
    raise InconsistentData("inverse pair is not projectively real")


def extract_inverse(phi: TrilinearMap, data: Optional[SpecialPlaneData] = None) -> InverseMap:
    """Assemble the inverse map from the structured plane data.

    Components are returned in the *original* factor order; each pair is
    realified and content-free.  Raises :class:`InconsistentData` when the
    data does not reproduce the map (exact composition check).
    """
    if data is None:
        try:
            data = special_planes(phi)
        except DegenerateConfiguration as e:
            if e.partial is not None and e.partial.map_type == (1, 1, 1):
                data = e.partial
            else:
                raise InconsistentData(f"no usable plane data: {e}") from e
    key = ("inverse", id(data))
    if key in phi._cache:
        return phi._cache[key]
    tt = data.map_type
    if tt == (1, 1, 1):
        pairs_c = _inverse_111(data)
    elif tt == (1, 1, 2):
        pairs_c = _inverse_112(data)
    elif tt == (1, 2, 2):
        pairs_c = _inverse_122(data)
    else:
        pairs_c = _inverse_222(data)
    # Canonical slot i corresponds to original factor data.permutation[i];
    # reorder into original factor order.
    by_orig = {}
    for slot_i, orig in enumerate(data.permutation):
        by_orig[orig] = pairs_c[slot_i]
    pairs = []
    for orig in _BLOCK_ORDER:
        p0, p1 = by_orig[orig]
        p0, p1 = _realify_pair(p0, p1)
        if p0.is_zero() and p1.is_zero():
            raise InconsistentData("zero inverse pair")
        cf = content_free([p0, p1])
        pairs.append((cf[0], cf[1]))
    inv = InverseMap(tuple(pairs))
    residuals = composition_residuals(phi, inv)
    if any(not r.is_zero() for r in residuals):
        raise InconsistentData(
            "inverse composition identity fails (nonzero residual)"
        )
    phi._cache[key] = inv
    return inv


def _inverse_111(data: SpecialPlaneData):
    out = []
    for n0, n1 in (("A0", "A1"), ("B0", "B1"), ("C0", "C1")):
        Z0 = _cov_dot_x(data.planes[n0])
        Z1 = _cov_dot_x(data.planes[n1])
        out.append((Z1, -Z0))
    return out


def _inverse_112(data: SpecialPlaneData):
    Ax = _cov_dot_x(data.planes["A"])
    Bx = _cov_dot_x(data.planes["B"])
    C0x = _cov_dot_x(data.planes["C0"])
    C1x = _cov_dot_x(data.planes["C1"])
    lf = data.linear_factors
    s_pair = _inv_pair((lf["a0"], lf["a1"]), "s", (C0x, Ax))
    t_pair = _inv_pair((lf["b0"], lf["b1"]), "t", (C0x, Bx))
    u_val = (C1x * C0x, C0x * C0x + (-(Ax * Bx)))
    u_pair = _inv_pair((lf["c0"], lf["c1"]), "u", u_val)
    return [s_pair, t_pair, u_pair]


def _inverse_122(data: SpecialPlaneData):
    Ax = [_cov_dot_x(data.planes["A0"]), _cov_dot_x(data.planes["A1"])]
    Bx = [_cov_dot_x(data.planes["B0"]), _cov_dot_x(data.planes["B1"])]
    Cx = [_cov_dot_x(data.planes["C0"]), _cov_dot_x(data.planes["C1"])]
    lf = data.linear_factors
    s_pair = _inv_pair((lf["a0"], lf["a1"]), "s", (Ax[0], Ax[1]))
    # (b0(t):b1(t)) = (B0.x * A1.x : B1.x * A0.x): both sides scale a0 a1 b_i c2 h.
    t_val = (Bx[0] * Ax[1], Bx[1] * Ax[0])
    t_pair = _inv_pair((lf["b0"], lf["b1"]), "t", t_val)
    u_val = (Cx[0] * Ax[1], Cx[1] * Ax[0])
    u_pair = _inv_pair((lf["c0"], lf["c1"]), "u", u_val)
    return [s_pair, t_pair, u_pair]


def _inverse_222(data: SpecialPlaneData):
    Ax = _cov_dot_x(data.planes["A"])
    Bx = _cov_dot_x(data.planes["B"])
    Cx = _cov_dot_x(data.planes["C"])
    Dx = _cov_dot_x(data.planes["D"])
    w1, w2, w3 = data.weights
    Qx = (Bx * Cx) * w1 + (Ax * Cx) * w2 + (Ax * Bx) * w3
    lf = data.linear_factors
    s_pair = _inv_pair((lf["a0"], lf["a1"]), "s", (Ax * Dx, Qx))
    t_pair = _inv_pair((lf["b0"], lf["b1"]), "t", (Bx * Dx, Qx))
    u_pair = _inv_pair((lf["c0"], lf["c1"]), "u", (Cx * Dx, Qx))
    return [s_pair, t_pair, u_pair]


def _compose_x(poly_x: MPoly, phi: TrilinearMap) -> MPoly:
    """Substitute the map components for the x-variables."""
    deg = poly_x.degree_in("x")
    md = (deg, deg, deg)
    total: Optional[MPoly] = None
    for e, c in poly_x.terms.items():
        term: Optional[MPoly] = None
        for i in range(4):
            for _ in range(e[i]):
                term = phi.f[i] if term is None else term * phi.f[i]
        if term is None:
            term = MPoly.constant(SIG_STU, 1)
        term = term * c
        total = term if total is None else total + term
    return total if total is not None else MPoly.zero(SIG_STU, md)


def composition_residuals(phi: TrilinearMap, inv: InverseMap) -> List[MPoly]:
    """Per-factor exact residual of inv∘phi = identity; all zero iff the
    inverse is correct on the whole parameter space."""
    out = []
    for block, (p0, p1) in zip(_BLOCK_ORDER, inv.components):
        c0 = _compose_x(p0, phi)
        c1 = _compose_x(p1, phi)
        z0 = MPoly.variable(SIG_STU, f"{block}0")
        z1 = MPoly.variable(SIG_STU, f"{block}1")
        out.append(c0 * z1 + (-(c1 * z0)))
    return out


# ---------------------------------------------------------------------------
# Verification by sampling
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    """Outcome of sampled composition checks."""

    total: int
    passed: int
    seed: int
    failures: List[Tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total and not self.failures


def verify_birational(
    phi: TrilinearMap, inv: InverseMap, n: int, seed: int
) -> VerificationReport:
    """Check φ⁻¹∘φ = id at ``n`` random rational points (deterministic in
    ``seed``); failures carry witnesses."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    report = VerificationReport(total=n, passed=0, seed=seed)
    produced = 0
    redraws = 0
    while produced < n:
        pt = _random_parameter_point(rng)
        vals = phi.evaluate(*pt)
        if all(v == 0 for v in vals):
            redraws += 1
            if redraws > 1000:
                raise ValueError("could not avoid the base locus in 1000 redraws")
            continue
        back = inv.evaluate(vals)
        if all(b0 == 0 and b1 == 0 for b0, b1 in back):
            redraws += 1
            if redraws > 1000:
                raise ValueError("inverse undefined at 1000 sampled images")
            continue
        produced += 1
        ok = True
        for blk_i, (got, want) in enumerate(zip(back, pt)):
            if got[0] * want[1] - got[1] * want[0] != 0:
                ok = False
                report.failures.append(
                    (
                        tuple(tuple(x) for x in pt),
                        _BLOCK_ORDER[blk_i],
                        tuple(got),
                    )
                )
        if ok:
            report.passed += 1
    return report


# ---------------------------------------------------------------------------
# Fiber oracle
# ---------------------------------------------------------------------------


class FiberResult(list):
    """List of parameter triples (pairs normalized), plus the count of
    non-rational fiber candidates detected by the eliminant's root
    classification."""

    def __init__(self, solutions, nonrational_count: int):
        super().__init__(solutions)
        self.nonrational_count = nonrational_count


def fiber_solve(phi: TrilinearMap, x: Sequence) -> FiberResult:
    """All rational preimages of a target point, by elimination.

    Independent of the inverse formulas: forms the 2×2 minors
    ``x_j f_i − x_i f_j``, eliminates s linearly, eliminates t with
    Sylvester resultants, intersects the u-eliminants, back-substitutes
    and verifies every candidate exactly.
    """
    xv = [rat(v) for v in x]
    if all(v == 0 for v in xv):
        raise DegenerateTarget("zero target point")
    minors_st: List[MPoly] = []
    for i in range(4):
        for j in range(i + 1, 4):
            g = phi.f[i] * xv[j] + (-(phi.f[j] * xv[i]))
            if not g.is_zero():
                minors_st.append(g)
    if len(minors_st) < 2:
        raise DegenerateTarget("fewer than two independent minor equations")
    pairs = []
    for g in minors_st:
        by_s = g.split_by(("s",))
        G0 = by_s.get((1, 0))
        G1 = by_s.get((0, 1))
        zero_tu = MPoly.zero(SIG_STU.without("s"), (1, 1))
        pairs.append((G0 if G0 is not None else zero_tu, G1 if G1 is not None else zero_tu))
    cross: List[MPoly] = []
    for (G0a, G1a), (G0b, G1b) in combinations(pairs, 2):
        m = G0a * G1b + (-(G0b * G1a))
        if not m.is_zero():
            cross.append(m)
    if len(cross) < 2:
        raise DegenerateTarget("cross-minor system degenerates")
    res_forms = []
    for ma, mb in combinations(cross[:4], 2):
        r = sylvester_resultant(ma, mb, "t")
        if not r.is_zero():
            res_forms.append(r.as_binary("u"))
    if not res_forms:
        raise DegenerateTarget("all t-resultants vanish identically")
    g = res_forms[0]
    for r in res_forms[1:]:
        g = bin_gcd(g, r)
    if len(g) == 1:
        return FiberResult([], 0)
    sf = bin_squarefree(g)
    roots = binary_roots(sf)
    solutions = []
    for ur, _ in roots.rational:
        sols = _solutions_at_u(phi, xv, pairs, cross, ur)
        solutions.extend(sols)
    # Non-rational candidates: back-substitute each quadratic factor's root
    # over its extension field and verify exactly, weeding out spurious
    # factors contributed by the map's base locus.
    nonrational = 0
    for (Aq, Bq, Cq), _ in roots.quadratic:
        res = quad_root_pair(Aq, Bq, Cq)
        ext_roots, _ = _ext_root_pair(res)
        if ext_roots is None:
            continue
        if _verify_ext_u_root(phi, xv, pairs, cross, ext_roots[0]):
            nonrational += 2
    for deg, mult in roots.higher:
        nonrational += deg * mult
    deduped = []
    for s in solutions:
        if not any(
            all(proportional(p, q) for p, q in zip(s, o)) for o in deduped
        ):
            deduped.append(s)
    return FiberResult(deduped, nonrational)


def _verify_ext_u_root(phi, xv, pairs, cross, ur) -> bool:
    """Exact check that an extension-field u-root carries a genuine fiber
    point (and is not an artifact of the base locus)."""
    tg = None
    for m in cross:
        mu = m.substitute("u", ur)
        if mu.is_zero():
            continue
        bq = mu.as_binary("t")
        tg = bq if tg is None else bin_gcd(tg, bq)
        if len(tg) == 1:
            return False
    if tg is None:
        return False
    t_roots: List[Tuple] = []
    if len(tg) == 2:
        t_roots = [(-tg[1], tg[0])]
    elif len(tg) == 3 and all(
        not isinstance(c, QuadExtElem) or c.is_rational() for c in tg
    ):
        vals = [c.to_rat() if isinstance(c, QuadExtElem) else c for c in tg]
        t_roots = _rational_quadratic_roots(vals)
        if not t_roots:
            # Roots in a further extension: count conservatively.
            return True
    else:
        # Degree >= 2 over the extension: not resolvable here; count it.
        return True
    for tr in t_roots:
        for G0, G1 in pairs:
            assign = {"t": tr, "u": ur}
            g0v = G0.evaluate(assign)
            g1v = G1.evaluate(assign)
            if _is_zero_val(g0v) and _is_zero_val(g1v):
                continue
            sr = (g1v, -g0v)
            img = phi.evaluate(sr, tr, ur)
            if all(_is_zero_val(v) for v in img):
                break
            diffs_zero = all(
                _is_zero_val(img[i] * xv[j] - img[j] * xv[i])
                for i in range(4)
                for j in range(i + 1, 4)
            )
            if diffs_zero:
                return True
            break
    return False


def _solutions_at_u(phi, xv, pairs, cross, ur):
    tcands: Optional[List[Tuple]] = None
    for m in cross:
        mu = m.substitute("u", ur)
        if mu.is_zero():
            continue
        bq = mu.as_binary("t")
        rts = _rational_quadratic_roots(bq)
        if tcands is None:
            tcands = rts
        else:
            tcands = [
                r for r in tcands if any(proportional(r, q) for q in rts)
            ]
        if not tcands:
            return []
    if tcands is None:
        return []
    out = []
    for tr in tcands:
        for G0, G1 in pairs:
            assign = {"t": tr, "u": ur}
            g0v = G0.evaluate(assign)
            g1v = G1.evaluate(assign)
            if g0v == 0 and g1v == 0:
                continue
            sr = (g1v, -g0v)
            img = phi.evaluate(sr, tr, ur)
            if all(v == 0 for v in img):
                break
            if all(
                img[i] * xv[j] - img[j] * xv[i] == 0
                for i in range(4)
                for j in range(i + 1, 4)
            ):
                out.append(
                    (
                        tuple(normalize_seq(sr)),
                        tuple(normalize_seq(tr)),
                        tuple(normalize_seq(ur)),
                    )
                )
            break
    return out


def _rational_quadratic_roots(bq) -> List[Tuple]:
    res = quad_root_pair(bq[0], bq[1], bq[2])
    if isinstance(res, IdenticallyZero):
        return []
    if isinstance(res, DoubleRoot):
        return [tuple(res.root)]
    if isinstance(res, TwoRealRoots) and res.d == 1:
        return [tuple(res.first), tuple(res.second)]
    return []
