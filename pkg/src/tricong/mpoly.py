"""Multihomogeneous polynomial arithmetic over exact rationals.

Polynomials live in variable blocks ``s = (s0,s1)``, ``t = (t0,t1)``,
``u = (u0,u1)`` and ``x = (x0..x3)``; every stored polynomial is
homogeneous of a fixed degree in each block of its signature (the zero
polynomial carries an explicit multidegree tag).  The module provides

* :class:`BlockSignature` / :class:`MPoly` with exact ring operations,
* a text parser for the CLI polynomial grammar (:func:`parse_poly`),
* tensor flattenings and rank-one splitting of trilinear forms,
* a Sylvester resultant for eliminating one binary block,
* binary-form utilities (gcd, square-free part, exact root extraction)
  used by the analysis modules.

Coefficients are the ground rationals by default; most arithmetic also
works verbatim over quadratic-extension coefficients (duck typing), which
the analysis modules rely on.  Parsing, printing, content removal and root
extraction are rational-only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ._ground import Rat, is_rat, rat, rat_str
from .exact import QuadExtElem, normalize_seq

__all__ = [
    "BlockSignature",
    "SIG_STU",
    "SIG_X",
    "SIG_STUX",
    "MPoly",
    "RankOneSplit",
    "parse_poly",
    "evaluate",
    "content_free",
    "flattening",
    "split_rank_one",
    "sylvester_resultant",
    "monomials",
    "exact_divide",
    "BinRoots",
    "binary_roots",
    "bin_is_zero",
    "bin_mul",
    "bin_scale",
    "bin_eval",
    "bin_gcd",
    "bin_div",
    "bin_squarefree",
    "bin_deriv_z0",
    "bin_deriv_z1",
    "PolySyntaxError",
    "UnknownVariable",
    "NotHomogeneous",
    "DegreeMismatch",
    "AllZero",
    "WrongDegree",
    "Indecomposable",
    "ZeroInput",
]

_BLOCK_UNIVERSE = {"s": 2, "t": 2, "u": 2, "x": 4}


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class PolySyntaxError(SyntaxError):
    """Parse failure; ``pos`` is the 0-based offset into the input text."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class UnknownVariable(PolySyntaxError):
    """An identifier outside the signature's variable set."""


class NotHomogeneous(ValueError):
    """Polynomial is not multihomogeneous; carries the offending monomials."""

    def __init__(self, message: str, monomials: Sequence[str]):
        super().__init__(f"{message}: {', '.join(monomials)}")
        self.monomials = tuple(monomials)


class DegreeMismatch(ValueError):
    """Addition of polynomials with different multidegrees."""


class AllZero(ValueError):
    """Content removal of an all-zero list."""


class WrongDegree(ValueError):
    """Operation applied to a polynomial of unsupported multidegree."""


class Indecomposable(ValueError):
    """Trilinear form is not a product of per-block linear forms."""


class ZeroInput(ValueError):
    """Resultant of a zero (or block-constant) polynomial."""


# ---------------------------------------------------------------------------
# Signatures and monomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockSignature:
    """An ordered tuple of (block name, block size) pairs."""

    blocks: Tuple[Tuple[str, int], ...]

    def __init__(self, blocks: Iterable):
        blk = []
        for entry in blocks:
            if isinstance(entry, str):
                name, size = entry, _BLOCK_UNIVERSE[entry]
            else:
                name, size = entry
            if name not in _BLOCK_UNIVERSE or _BLOCK_UNIVERSE[name] != size:
                raise ValueError(f"unknown block {name!r} of size {size}")
            blk.append((name, size))
        names = [n for n, _ in blk]
        if len(set(names)) != len(names):
            raise ValueError("duplicate block names")
        object.__setattr__(self, "blocks", tuple(blk))

    @property
    def block_names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.blocks)

    @property
    def nvars(self) -> int:
        return sum(sz for _, sz in self.blocks)

    @property
    def var_names(self) -> Tuple[str, ...]:
        out = []
        for name, size in self.blocks:
            out.extend(f"{name}{i}" for i in range(size))
        return tuple(out)

    def block_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.blocks):
            if n == name:
                return i
        raise KeyError(f"no block {name!r} in signature")

    def var_slice(self, name: str) -> Tuple[int, int]:
        start = 0
        for n, size in self.blocks:
            if n == name:
                return start, start + size
            start += size
        raise KeyError(f"no block {name!r} in signature")

    def size(self, name: str) -> int:
        return dict(self.blocks)[name]

    def without(self, name: str) -> "BlockSignature":
        return BlockSignature(tuple(b for b in self.blocks if b[0] != name))

    def __repr__(self):
        return "BlockSignature(" + ",".join(f"{n}:{s}" for n, s in self.blocks) + ")"


SIG_STU = BlockSignature(("s", "t", "u"))
SIG_X = BlockSignature(("x",))
SIG_STUX = BlockSignature(("s", "t", "u", "x"))
SIG_TU = BlockSignature(("t", "u"))
SIG_SU = BlockSignature(("s", "u"))
SIG_ST = BlockSignature(("s", "t"))


def _block_degrees(sig: BlockSignature, exp: Tuple[int, ...]) -> Tuple[int, ...]:
    out = []
    start = 0
    for _, size in sig.blocks:
        out.append(sum(exp[start : start + size]))
        start += size
    return tuple(out)


def monomials(sig: BlockSignature, multidegree: Sequence[int]) -> List[Tuple[int, ...]]:
    """All exponent tuples of the given multidegree, descending-lex order."""

    def block_exps(size: int, deg: int) -> List[Tuple[int, ...]]:
        if size == 1:
            return [(deg,)]
        out = []
        for first in range(deg, -1, -1):
            for rest in block_exps(size - 1, deg - first):
                out.append((first,) + rest)
        return out

    partial: List[Tuple[int, ...]] = [()]
    for (name, size), deg in zip(sig.blocks, multidegree):
        partial = [p + be for p in partial for be in block_exps(size, deg)]
    return sorted(partial, reverse=True)


def _mono_str(sig: BlockSignature, exp: Tuple[int, ...]) -> str:
    names = sig.var_names
    parts = []
    for name, e in zip(names, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def _coeff_is_zero(c) -> bool:
    return c.is_zero() if isinstance(c, QuadExtElem) else c == 0


# ---------------------------------------------------------------------------
# MPoly
# ---------------------------------------------------------------------------


class MPoly:
    """Immutable multihomogeneous polynomial over a block signature."""

    __slots__ = ("sig", "terms", "multidegree")

    def __init__(
        self,
        sig: BlockSignature,
        terms: Dict[Tuple[int, ...], object],
        multidegree: Optional[Sequence[int]] = None,
    ):
        clean = {e: c for e, c in terms.items() if not _coeff_is_zero(c)}
        degrees = {_block_degrees(sig, e) for e in clean}
        if len(degrees) > 1:
            bad = sorted(clean, reverse=True)
            raise NotHomogeneous(
                "mixed multidegrees", [_mono_str(sig, e) for e in bad]
            )
        if degrees:
            md = degrees.pop()
            if multidegree is not None and tuple(multidegree) != md:
                raise NotHomogeneous(
                    f"terms have multidegree {md}, tag says {tuple(multidegree)}",
                    [_mono_str(sig, e) for e in sorted(clean, reverse=True)],
                )
        else:
            md = tuple(multidegree) if multidegree is not None else tuple(
                0 for _ in sig.blocks
            )
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "multidegree", md)

    def __setattr__(self, *a):
        raise AttributeError("MPoly is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(sig: BlockSignature, multidegree: Sequence[int]) -> "MPoly":
        return MPoly(sig, {}, multidegree)

    @staticmethod
    def constant(sig: BlockSignature, value) -> "MPoly":
        md = tuple(0 for _ in sig.blocks)
        exp = tuple(0 for _ in range(sig.nvars))
        return MPoly(sig, {exp: rat(value) if is_rat(value) else value}, md)

    @staticmethod
    def variable(sig: BlockSignature, name: str) -> "MPoly":
        idx = sig.var_names.index(name)
        exp = tuple(1 if i == idx else 0 for i in range(sig.nvars))
        return MPoly(sig, {exp: rat(1)})

    @staticmethod
    def linear_form(sig: BlockSignature, block: str, coeffs: Sequence) -> "MPoly":
        """``coeffs[0]*z0 + coeffs[1]*z1 + ...`` in the given block."""
        start, stop = sig.var_slice(block)
        terms: Dict[Tuple[int, ...], object] = {}
        for i, c in enumerate(coeffs):
            if _coeff_is_zero(c):
                continue
            exp = [0] * sig.nvars
            exp[start + i] = 1
            terms[tuple(exp)] = c
        md = tuple(1 if n == block else 0 for n, _ in sig.blocks)
        return MPoly(sig, terms, md)

    @staticmethod
    def from_binary(sig: BlockSignature, block: str, coeffs: Sequence) -> "MPoly":
        """Binary form ``sum coeffs[k] * z0^(n-k) * z1^k`` in one block."""
        n = len(coeffs) - 1
        start, _ = sig.var_slice(block)
        terms: Dict[Tuple[int, ...], object] = {}
        for k, c in enumerate(coeffs):
            if _coeff_is_zero(c):
                continue
            exp = [0] * sig.nvars
            exp[start] = n - k
            exp[start + 1] = k
            terms[tuple(exp)] = c
        md = tuple(n if nm == block else 0 for nm, _ in sig.blocks)
        return MPoly(sig, terms, md)

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree_in(self, block: str) -> int:
        return self.multidegree[self.sig.block_index(block)]

    def sorted_terms(self) -> List[Tuple[Tuple[int, ...], object]]:
        return [(e, self.terms[e]) for e in sorted(self.terms, reverse=True)]

    def coefficients(self) -> List:
        return [c for _, c in self.sorted_terms()]

    def coeff_vector(self, multidegree: Optional[Sequence[int]] = None) -> List:
        """Dense coefficient vector over ``monomials(sig, multidegree)``."""
        md = tuple(multidegree) if multidegree is not None else self.multidegree
        return [self.terms.get(e, rat(0)) for e in monomials(self.sig, md)]

    def has_extension_coeffs(self) -> bool:
        return any(isinstance(c, QuadExtElem) for c in self.terms.values())

    # -- ring operations ---------------------------------------------------

    def _check_add(self, other: "MPoly"):
        if self.sig != other.sig:
            raise DegreeMismatch("signatures differ")
        if self.multidegree != other.multidegree:
            raise DegreeMismatch(
                f"multidegrees differ: {self.multidegree} vs {other.multidegree}"
            )

    def __add__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check_add(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            cur = terms.get(e)
            terms[e] = c if cur is None else cur + c
        return MPoly(self.sig, terms, self.multidegree)

    def __neg__(self):
        return MPoly(
            self.sig, {e: -c for e, c in self.terms.items()}, self.multidegree
        )

    def __sub__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MPoly):
            if self.sig != other.sig:
                raise DegreeMismatch("signatures differ")
            md = tuple(
                a + b for a, b in zip(self.multidegree, other.multidegree)
            )
            terms: Dict[Tuple[int, ...], object] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    prod = c1 * c2
                    cur = terms.get(e)
                    terms[e] = prod if cur is None else cur + prod
            return MPoly(self.sig, terms, md)
        # scalar
        c0 = other if isinstance(other, QuadExtElem) else rat(other)
        return MPoly(
            self.sig, {e: c * c0 for e, c in self.terms.items()}, self.multidegree
        )

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a natural number")
        out = MPoly.constant(self.sig, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return (
            self.sig == other.sig
            and self.multidegree == other.multidegree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(
            (self.sig, self.multidegree, tuple(sorted(self.terms.items())))
        )

    # -- evaluation and substitution ---------------------------------------

    def evaluate(self, assignment: Dict[str, Sequence]):
        """Full evaluation; ``assignment`` maps block name -> value tuple."""
        flat: List = []
        for name, size in self.sig.blocks:
            vals = assignment[name]
            if len(vals) != size:
                raise ValueError(f"block {name} expects {size} values")
            flat.extend(vals)
        total = None
        for e, c in self.terms.items():
            term = c
            for v, p in zip(flat, e):
                for _ in range(p):
                    term = term * v
            total = term if total is None else total + term
        return total if total is not None else rat(0)

    def substitute(self, block: str, values: Sequence) -> "MPoly":
        """Evaluate one block at scalar values; returns an MPoly over the
        remaining blocks."""
        start, stop = self.sig.var_slice(block)
        new_sig = self.sig.without(block)
        bi = self.sig.block_index(block)
        new_md = tuple(d for i, d in enumerate(self.multidegree) if i != bi)
        terms: Dict[Tuple[int, ...], object] = {}
        for e, c in self.terms.items():
            factor = c
            for v, p in zip(values, e[start:stop]):
                for _ in range(p):
                    factor = factor * v
            ne = e[:start] + e[stop:]
            if _coeff_is_zero(factor):
                continue
            cur = terms.get(ne)
            terms[ne] = factor if cur is None else cur + factor
        return MPoly(new_sig, terms, new_md)

    def rename_blocks(self, mapping: Dict[str, str]) -> "MPoly":
        """Relabel blocks (a bijection between equal-size blocks), keeping
        coefficients; used to move data between permuted factor orders."""
        new_names = [mapping.get(n, n) for n in self.sig.block_names]
        sizes = dict(self.sig.blocks)
        new_sig = BlockSignature(
            sorted(
                ((nn, sizes[on]) for on, nn in zip(self.sig.block_names, new_names)),
                key=lambda b: ("s", "t", "u", "x").index(b[0]),
            )
        )
        # Build exponent translation: old flat position -> new flat position.
        old_slices = {n: self.sig.var_slice(n) for n in self.sig.block_names}
        pos_map: Dict[int, int] = {}
        for old, new in zip(self.sig.block_names, new_names):
            os, oe = old_slices[old]
            ns, _ = new_sig.var_slice(new)
            for k in range(oe - os):
                pos_map[os + k] = ns + k
        terms: Dict[Tuple[int, ...], object] = {}
        for e, c in self.terms.items():
            ne = [0] * new_sig.nvars
            for i, p in enumerate(e):
                ne[pos_map[i]] = p
            terms[tuple(ne)] = c
        md = [0] * len(new_sig.blocks)
        for old, new in zip(self.sig.block_names, new_names):
            md[new_sig.block_index(new)] = self.multidegree[
                self.sig.block_index(old)
            ]
        return MPoly(new_sig, terms, tuple(md))

    def split_by(self, blocks: Sequence[str]) -> Dict[Tuple[int, ...], "MPoly"]:
        """Collect coefficients with respect to the chosen blocks.

        Returns a map from exponent tuples over the chosen blocks (flat, in
        signature order) to polynomials in the remaining blocks.
        """
        chosen = [b for b in self.sig.block_names if b in blocks]
        rest_sig = self.sig
        for b in chosen:
            rest_sig = rest_sig.without(b)
        slices = [self.sig.var_slice(b) for b in chosen]
        rest_positions = [
            i
            for i in range(self.sig.nvars)
            if not any(s <= i < e for s, e in slices)
        ]
        rest_md = tuple(
            d
            for i, d in enumerate(self.multidegree)
            if self.sig.block_names[i] not in chosen
        )
        grouped: Dict[Tuple[int, ...], Dict[Tuple[int, ...], object]] = {}
        for e, c in self.terms.items():
            key = tuple(p for s, st in slices for p in e[s:st])
            rest_e = tuple(e[i] for i in rest_positions)
            grouped.setdefault(key, {})[rest_e] = c
        return {
            k: MPoly(rest_sig, t, rest_md) for k, t in sorted(grouped.items(), reverse=True)
        }

    def as_binary(self, block: str) -> List:
        """Dense coefficient list of a single-block (binary) polynomial."""
        for i, (name, _) in enumerate(self.sig.blocks):
            if name != block and self.multidegree[i] != 0:
                raise WrongDegree(
                    f"polynomial involves block {name!r}, not binary in {block!r}"
                )
        n = self.degree_in(block)
        start, _ = self.sig.var_slice(block)
        out = [rat(0)] * (n + 1)
        for e, c in self.terms.items():
            out[e[start + 1]] = c
        return out

    # -- printing ----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = _mono_str(self.sig, e)
            if isinstance(c, QuadExtElem):
                coeff_txt = f"({c!r})"
                neg = False
            else:
                neg = c < 0
                mag = -c if neg else c
                coeff_txt = rat_str(mag)
            if mono == "1":
                body = coeff_txt
            elif coeff_txt == "1":
                body = mono
            else:
                body = f"{coeff_txt}*{mono}"
            parts.append(("-" if neg else "+", body))
        sign0, body0 = parts[0]
        text = body0 if sign0 == "+" else f"-{body0}"
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"MPoly({self})"


def evaluate(p: MPoly, assignment: Dict[str, Sequence]):
    """Module-level alias for :meth:`MPoly.evaluate`."""
    return p.evaluate(assignment)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise PolySyntaxError(f"unexpected character {text[bad_at]!r}", bad_at)
        if m.lastgroup == "num":
            out.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "name":
            out.append(("name", m.group("name"), m.start("name")))
        else:
            out.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    """Recursive descent for
    ``expr := ['+'|'-'] term (('+'|'-') term)*``,
    ``term := factor ('*' factor)*``,
    ``factor := atom ('^' nat)*``,
    ``atom := rational | var | '(' expr ')'``.
    Implicit multiplication is rejected by construction.
    """

    def __init__(self, text: str, sig: BlockSignature):
        self.tokens = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.nvars = sig.nvars
        self.varset = {n: i for i, n in enumerate(sig.var_names)}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    # raw polynomials: dict exp -> Rat, no homogeneity enforcement
    def _rconst(self, value) -> Dict[Tuple[int, ...], object]:
        if value == 0:
            return {}
        return {tuple(0 for _ in range(self.nvars)): value}

    @staticmethod
    def _radd(a, b):
        out = dict(a)
        for e, c in b.items():
            cur = out.get(e)
            s = c if cur is None else cur + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return out

    @staticmethod
    def _rneg(a):
        return {e: -c for e, c in a.items()}

    @staticmethod
    def _rmul(a, b):
        out: Dict[Tuple[int, ...], object] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                cur = out.get(e)
                s = c1 * c2 if cur is None else cur + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return out

    def parse(self):
        raw = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolySyntaxError(f"unexpected {val!r}", pos)
        return raw

    def expr(self):
        kind, val, pos = self.peek()
        negate = False
        if kind == "op" and val in "+-":
            self.take()
            negate = val == "-"
        acc = self.term()
        if negate:
            acc = self._rneg(acc)
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                acc = self._radd(acc, self._rneg(rhs) if val == "-" else rhs)
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = self._rmul(acc, self.factor())
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                raise PolySyntaxError(
                    "implicit multiplication is not allowed; use '*'", pos
                )
            else:
                return acc

    def factor(self):
        acc = self.atom()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "^":
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "num" or "/" in v2:
                    raise PolySyntaxError("exponent must be a natural number", p2)
                n = int(v2)
                out = self._rconst(rat(1))
                for _ in range(n):
                    out = self._rmul(out, acc)
                acc = out
            else:
                return acc

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return self._rconst(rat(val))
        if kind == "name":
            idx = self.varset.get(val)
            if idx is None:
                raise UnknownVariable(f"unknown variable {val!r}", pos)
            exp = tuple(1 if i == idx else 0 for i in range(self.nvars))
            return {exp: rat(1)}
        if kind == "op" and val == "(":
            inner = self.expr()
            k2, v2, p2 = self.take()
            if not (k2 == "op" and v2 == ")"):
                raise PolySyntaxError("expected ')'", p2)
            return inner
        raise PolySyntaxError(
            f"expected a number, variable or '(', got {val!r}" if val else "unexpected end of input",
            pos,
        )


def parse_poly(text: str, sig: BlockSignature) -> MPoly:
    """Parse the polynomial grammar into an :class:`MPoly`.

    Raises :class:`PolySyntaxError` (position-annotated),
    :class:`UnknownVariable`, or :class:`NotHomogeneous`.
    ``parse_poly(str(p), sig) == p`` for every polynomial ``p``.
    """
    raw = _Parser(text, sig).parse()
    return MPoly(sig, raw)


# ---------------------------------------------------------------------------
# sympy bridge (content removal / exact multivariate division)
# ---------------------------------------------------------------------------


def _sympy_symbols(sig: BlockSignature):
    import sympy

    return sympy.symbols(" ".join(sig.var_names))


def _to_sympy_poly(p: MPoly, symbols):
    """Direct term-dict conversion (no expression tree — much faster)."""
    import sympy

    rep = {
        e: sympy.Rational(int(c.numerator), int(c.denominator))
        for e, c in p.terms.items()
    }
    return sympy.Poly.from_dict(rep, *symbols, domain="QQ")


def _from_sympy_poly(poly, sig: BlockSignature) -> MPoly:
    terms: Dict[Tuple[int, ...], object] = {}
    for exps, coeff in poly.terms():
        terms[tuple(int(x) for x in exps)] = rat(int(coeff.numerator)) / int(
            coeff.denominator
        )
    return MPoly(sig, terms)


def content_free(polys: Sequence[MPoly]) -> List[MPoly]:
    """Divide out the polynomial GCD of a list (rational coefficients).

    Returns the inputs unchanged when the GCD is a scalar.  Zero entries are
    preserved; raises :class:`AllZero` when every entry is zero.
    """
    polys = list(polys)
    if not polys:
        raise AllZero("empty list")
    nonzero = [p for p in polys if not p.is_zero()]
    if not nonzero:
        raise AllZero("all polynomials are zero")
    sig = polys[0].sig
    for p in polys:
        if p.sig != sig:
            raise ValueError("mixed signatures")
        if p.has_extension_coeffs():
            raise TypeError("content removal requires rational coefficients")
    if len(nonzero) == 1 and len(nonzero[0].terms) == 1 and all(
        v == 0 for v in next(iter(nonzero[0].terms))
    ):
        return polys
    symbols = _sympy_symbols(sig)
    sp_polys = [_to_sympy_poly(p, symbols) for p in nonzero]
    g = sp_polys[0]
    for e in sp_polys[1:]:
        g = g.gcd(e)
        if g.is_ground:
            break
    if g.is_ground:
        return polys
    gdeg = (0,) * len(sig.blocks)
    for exps in g.monoms():
        bd = _block_degrees(sig, tuple(int(x) for x in exps))
        gdeg = tuple(max(a, b) for a, b in zip(gdeg, bd))
    quotients: Dict[int, MPoly] = {}
    for idx, sp in zip(
        [i for i, p in enumerate(polys) if not p.is_zero()], sp_polys
    ):
        q, r = sp.div(g)
        if not r.is_zero:
            raise ArithmeticError("inexact content division (internal error)")
        quotients[idx] = _from_sympy_poly(q, sig)
    out = []
    for i, p in enumerate(polys):
        if p.is_zero():
            new_md = tuple(a - b for a, b in zip(p.multidegree, gdeg))
            out.append(MPoly.zero(sig, new_md))
        else:
            out.append(quotients[i])
    return out


def exact_divide(p: MPoly, q: MPoly) -> MPoly:
    """Exact multivariate division ``p / q``; raises on nonzero remainder."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    symbols = _sympy_symbols(p.sig)
    quo, rem = _to_sympy_poly(p, symbols).div(_to_sympy_poly(q, symbols))
    if not rem.is_zero:
        raise ArithmeticError("inexact polynomial division")
    return _from_sympy_poly(quo, p.sig)


# ---------------------------------------------------------------------------
# Flattenings, rank-one splits
# ---------------------------------------------------------------------------


def _check_trilinear(p: MPoly):
    md = {n: p.multidegree[i] for i, n in enumerate(p.sig.block_names)}
    for b in ("s", "t", "u"):
        if md.get(b, 0) != 1:
            raise WrongDegree(f"expected multidegree 1 in block {b!r}, got {md.get(b, 0)}")
    for n, d in md.items():
        if n not in ("s", "t", "u") and d != 0:
            raise WrongDegree(f"unexpected degree in block {n!r}")


def flattening(p: MPoly, block: str) -> List[List]:
    """The 2x4 coefficient matrix of a trilinear form with respect to one
    factor: rows = the block's two variables, columns = the four bilinear
    monomials of the other two blocks (descending-lex order).

    ``p`` factors into per-block linear forms iff all three flattenings
    have rank <= 1.
    """
    _check_trilinear(p)
    if block not in ("s", "t", "u"):
        raise WrongDegree(f"flattening block must be s, t or u, got {block!r}")
    others = [b for b in ("s", "t", "u") if b != block]
    rows = []
    by_block = p.split_by((block,))
    other_sig_md = None
    for bi in range(2):
        key = (1, 0) if bi == 0 else (0, 1)
        coeff_poly = by_block.get(key)
        if coeff_poly is None:
            rows.append(None)
            continue
        other_sig_md = (coeff_poly.sig, coeff_poly.multidegree)
        rows.append(coeff_poly)
    if other_sig_md is None:
        raise WrongDegree("zero trilinear form has no flattening")
    sig2, md2 = other_sig_md
    monos = monomials(sig2, md2)
    out = []
    for rp in rows:
        if rp is None:
            out.append([rat(0)] * len(monos))
        else:
            out.append([rp.terms.get(e, rat(0)) for e in monos])
    return out


@dataclass(frozen=True)
class RankOneSplit:
    """Per-block linear factors of a decomposable trilinear form.

    ``a * b * c == scale * p`` exactly, with nonzero rational ``scale``.
    """

    a: MPoly
    b: MPoly
    c: MPoly
    scale: object


def _split_bilinear_matrix(m: List[List]):
    """Factor a rank-one 2x2 matrix as outer product b ⊗ c."""
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if not _coeff_is_zero(det):
        raise Indecomposable("bilinear part has rank 2")
    row_idx = None
    for i in (0, 1):
        if not (_coeff_is_zero(m[i][0]) and _coeff_is_zero(m[i][1])):
            row_idx = i
            break
    if row_idx is None:
        raise Indecomposable("zero bilinear part")
    c = [m[row_idx][0], m[row_idx][1]]
    col_idx = 0 if not _coeff_is_zero(c[0]) else 1
    b = [rat(0), rat(0)]
    for i in (0, 1):
        if isinstance(c[col_idx], QuadExtElem):
            b[i] = m[i][col_idx] * c[col_idx].inverse()
        else:
            b[i] = m[i][col_idx] / c[col_idx]
    return b, c


def split_rank_one(p: MPoly) -> RankOneSplit:
    """Factor a trilinear form as a product of three per-block linear forms.

    Raises :class:`Indecomposable` when any flattening has rank 2.
    """
    _check_trilinear(p)
    if p.is_zero():
        raise Indecomposable("zero polynomial")
    sig = p.sig
    by_s = p.split_by(("s",))
    r0 = by_s.get((1, 0))
    r1 = by_s.get((0, 1))
    if r0 is None:
        a = (rat(0), rat(1))
        base = r1
    elif r1 is None:
        a = (rat(1), rat(0))
        base = r0
    else:
        # r1 must be a scalar multiple of r0.
        e0, c0 = next(iter(r0.sorted_terms()))
        lam_c = r1.terms.get(e0)
        if lam_c is None:
            raise Indecomposable("s-flattening has rank 2")
        lam = lam_c / c0
        diff = r1 + (-(r0 * lam))
        if not diff.is_zero():
            raise Indecomposable("s-flattening has rank 2")
        a = (rat(1), lam)
        base = r0
    # base is bilinear in (t, u); 2x2 coefficient matrix.
    mat = [[rat(0), rat(0)], [rat(0), rat(0)]]
    start_t, _ = base.sig.var_slice("t")
    start_u, _ = base.sig.var_slice("u")
    for e, c in base.terms.items():
        i = e[start_t + 1]
        j = e[start_u + 1]
        mat[i][j] = c
    b, c = _split_bilinear_matrix(mat)
    a_poly = MPoly.linear_form(sig, "s", a)
    b_poly = MPoly.linear_form(sig, "t", b)
    c_poly = MPoly.linear_form(sig, "u", c)
    prod = a_poly * b_poly * c_poly
    # Determine the scale on a witness monomial.
    e0, c0 = next(iter(prod.sorted_terms()))
    pc = p.terms.get(e0)
    if pc is None:
        raise Indecomposable("factorization mismatch")
    scale = c0 / pc
    if not (prod + (-(p * scale))).is_zero():
        raise Indecomposable("factorization mismatch")
    return RankOneSplit(a_poly, b_poly, c_poly, scale)


# ---------------------------------------------------------------------------
# Sylvester resultant
# ---------------------------------------------------------------------------


def _poly_det(rows: List[List[Optional[MPoly]]], sig: BlockSignature, md) -> MPoly:
    n = len(rows)
    total: Optional[MPoly] = None
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term: Optional[MPoly] = None
        ok = True
        for i in range(n):
            entry = rows[i][perm[i]]
            if entry is None or entry.is_zero():
                ok = False
                break
            term = entry if term is None else term * entry
        if not ok:
            continue
        assert term is not None
        if sign < 0:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return MPoly.zero(sig, md)
    return total


def sylvester_resultant(p: MPoly, q: MPoly, block: str) -> MPoly:
    """Exact resultant eliminating one size-2 block.

    The result is a polynomial in the remaining blocks which vanishes at a
    parameter value iff ``p`` and ``q`` share a projective root in the
    block there.  Raises :class:`ZeroInput` on zero input or zero
    block-degree.
    """
    if p.is_zero() or q.is_zero():
        raise ZeroInput("resultant of the zero polynomial")
    m = p.degree_in(block)
    n = q.degree_in(block)
    if m < 1 or n < 1:
        raise ZeroInput(f"inputs must have positive degree in block {block!r}")
    new_sig = p.sig.without(block)
    pc = _binary_coefficient_polys(p, block)
    qc = _binary_coefficient_polys(q, block)
    size = m + n
    rows: List[List[Optional[MPoly]]] = []
    for shift in range(n):
        row: List[Optional[MPoly]] = [None] * size
        for i, cp in enumerate(pc):
            row[shift + i] = cp
        rows.append(row)
    for shift in range(m):
        row = [None] * size
        for i, cq in enumerate(qc):
            row[shift + i] = cq
        rows.append(row)
    bi = p.sig.block_index(block)
    md_p = tuple(d for i, d in enumerate(p.multidegree) if i != bi)
    md_q = tuple(d for i, d in enumerate(q.multidegree) if i != bi)
    md = tuple(n * a + m * b for a, b in zip(md_p, md_q))
    return _poly_det(rows, new_sig, md)


def _binary_coefficient_polys(p: MPoly, block: str) -> List[Optional[MPoly]]:
    """Coefficients of ``z0^(n-k) z1^k`` as polynomials in the other blocks."""
    n = p.degree_in(block)
    by = p.split_by((block,))
    out: List[Optional[MPoly]] = []
    for k in range(n + 1):
        out.append(by.get((n - k, k)))
    return out


# ---------------------------------------------------------------------------
# Binary forms as dense coefficient lists
# ---------------------------------------------------------------------------
# A binary form of degree n is a list [c0..cn] with f = sum c_k z0^(n-k) z1^k.
# Leading zeros encode roots at (1:0); trailing zeros encode roots at (0:1).


def bin_is_zero(f: Sequence) -> bool:
    return all(c == 0 for c in f)


def bin_mul(f: Sequence, g: Sequence) -> List:
    out = [rat(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            if b == 0:
                continue
            out[i + j] = out[i + j] + a * b
    return out


def bin_scale(f: Sequence, c) -> List:
    return [c * a for a in f]


def bin_deriv_z0(f: Sequence) -> List:
    n = len(f) - 1
    if n == 0:
        return [rat(0)]
    return [rat(n - k) * f[k] for k in range(n)]


def bin_deriv_z1(f: Sequence) -> List:
    n = len(f) - 1
    if n == 0:
        return [rat(0)]
    return [rat(k) * f[k] for k in range(1, n + 1)]


def bin_eval(f: Sequence, z) -> object:
    z0, z1 = z
    n = len(f) - 1
    total = None
    for k, c in enumerate(f):
        if c == 0:
            continue
        term = c
        for _ in range(n - k):
            term = term * z0
        for _ in range(k):
            term = term * z1
        total = term if total is None else total + term
    return total if total is not None else rat(0)


def _strip(f: Sequence) -> Tuple[List, int, int]:
    """Strip leading/trailing zeros; returns (core, lead_count, trail_count)."""
    lead = 0
    while lead < len(f) and f[lead] == 0:
        lead += 1
    trail = 0
    while trail < len(f) - lead and f[len(f) - 1 - trail] == 0:
        trail += 1
    core = list(f[lead : len(f) - trail])
    return core, lead, trail


def _uni_gcd(a: List, b: List) -> List:
    """Monic Euclidean gcd of univariate polynomials given as dense
    leading-coefficient-first lists (the binary-core convention)."""

    def norm(p: List) -> List:
        i = 0
        while i < len(p) and p[i] == 0:
            i += 1
        p = list(p[i:])
        if not p:
            return []
        lead = p[0]
        return [c / lead for c in p]

    a, b = norm(a), norm(b)
    while b:
        if len(a) < len(b):
            a, b = b, a
            continue
        r = list(a)
        for _ in range(len(a) - len(b) + 1):
            q = r[0]  # b is monic
            if q != 0:
                for i in range(len(b)):
                    r[i] = r[i] - q * b[i]
            r = r[1:]
        a, b = b, norm(r)
    return a if a else []


def bin_gcd(f: Sequence, g: Sequence) -> List:
    """GCD of two binary forms (monic-ish canonical; exact)."""
    if bin_is_zero(f):
        return list(g)
    if bin_is_zero(g):
        return list(f)
    cf, lf, tf = _strip(f)
    cg, lg, tg = _strip(g)
    core = _uni_gcd(cf, cg)
    if not core:
        core = [rat(1)]
    lead = min(lf, lg)
    trail = min(tf, tg)
    return [rat(0)] * lead + core + [rat(0)] * trail


def bin_div(f: Sequence, g: Sequence) -> Optional[List]:
    """Exact division of binary forms; None when not divisible."""
    if bin_is_zero(g):
        return None
    if bin_is_zero(f):
        return [rat(0)] * (len(f) - len(g) + 1) if len(f) >= len(g) else None
    cf, lf, tf = _strip(f)
    cg, lg, tg = _strip(g)
    if lf < lg or tf < tg or len(cf) < len(cg):
        return None
    # Univariate long division cf / cg (leading-first lists).
    r = list(cf)
    out = []
    for _ in range(len(cf) - len(cg) + 1):
        q = r[0] / cg[0]
        out.append(q)
        for i in range(len(cg)):
            r[i] = r[i] - q * cg[i]
        r = r[1:]
    if any(c != 0 for c in r):
        return None
    return [rat(0)] * (lf - lg) + out + [rat(0)] * (tf - tg)


def bin_squarefree(f: Sequence) -> List:
    """Square-free part ``f / gcd(f, df/dz0, df/dz1)``."""
    if bin_is_zero(f) or len(f) == 1:
        return list(f)
    g = bin_gcd(bin_gcd(f, bin_deriv_z0(f)), bin_deriv_z1(f))
    q = bin_div(f, g)
    assert q is not None
    return q


@dataclass(frozen=True)
class BinRoots:
    """Exact projective root data of a rational binary form.

    ``rational``:  list of ((r0, r1), multiplicity) canonical pairs;
    ``quadratic``: list of ((A, B, C), multiplicity) irreducible quadratics
                   ``A z0^2 + B z0 z1 + C z1^2``;
    ``higher``:    list of (degree, multiplicity) for irreducible factors of
                   degree >= 3 (roots not representable in a quadratic
                   extension).
    """

    rational: Tuple
    quadratic: Tuple
    higher: Tuple

    def nonrational_count(self) -> int:
        return 2 * sum(m for _, m in self.quadratic) + sum(
            d * m for d, m in self.higher
        )


def binary_roots(f: Sequence) -> BinRoots:
    """Factor a rational binary form into projective roots (exact).

    Delegates the univariate factorization to sympy (rational
    coefficients); roots at (1:0)/(0:1) from leading/trailing zero
    coefficients are handled directly.
    """
    if bin_is_zero(f):
        raise ZeroInput("zero binary form has no root data")
    core, lead, trail = _strip(f)
    rational: List = []
    if lead:
        rational.append(((rat(1), rat(0)), lead))
    if trail:
        rational.append(((rat(0), rat(1)), trail))
    if len(core) > 1:
        import sympy

        w = sympy.Symbol("w")
        expr = sympy.Integer(0)
        deg = len(core) - 1
        for k, c in enumerate(core):
            if c != 0:
                expr += sympy.Rational(int(c.numerator), int(c.denominator)) * w ** (
                    deg - k
                )
        _, factors = sympy.factor_list(expr)
        quads: List = []
        higher: List = []
        for poly, mult in factors:
            p = sympy.Poly(poly, w)
            cs = [sympy.Rational(c) for c in p.all_coeffs()]
            csr = [rat(int(c.p)) / int(c.q) for c in cs]
            if p.degree() == 1:
                # a*w + b -> root w = -b/a -> (-b : a)
                a, b = csr
                rational.append((tuple(normalize_seq((-b, a))), mult))
            elif p.degree() == 2:
                a, b, c = csr
                quads.append((tuple(normalize_seq((a, b, c))), mult))
            else:
                higher.append((int(p.degree()), mult))
        return BinRoots(tuple(rational), tuple(quads), tuple(higher))
    return BinRoots(tuple(rational), (), ())
