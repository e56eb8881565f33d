"""Ground rational type selection.

All exact arithmetic in this package runs over one rational scalar type,
chosen once at import time:

* ``gmpy2.mpq`` when gmpy2 is importable (faster on large numerators),
* ``fractions.Fraction`` otherwise.

Set the environment variable ``TRICONG_GROUND`` to ``fraction`` or ``gmpy2``
to force a backend (``auto`` is the default).  Both backends implement the
``numbers.Rational`` protocol, and everything downstream is written against
that protocol, so the choice is invisible except for speed.
"""

from __future__ import annotations

import numbers
import os

_PREF = os.environ.get("TRICONG_GROUND", "auto").strip().lower()

if _PREF not in ("auto", "fraction", "gmpy2"):
    raise RuntimeError(
        f"TRICONG_GROUND must be 'auto', 'fraction' or 'gmpy2', got {_PREF!r}"
    )

if _PREF in ("auto", "gmpy2"):
    try:
        from gmpy2 import mpq as Rat  # type: ignore

        GROUND = "gmpy2"
    except ImportError:
        if _PREF == "gmpy2":
            raise
        from fractions import Fraction as Rat  # type: ignore

        GROUND = "fraction"
else:
    from fractions import Fraction as Rat  # type: ignore

    GROUND = "fraction"

#: The rational 0 and 1 in the selected backend.
ZERO = Rat(0)
ONE = Rat(1)


def rat(value) -> "Rat":
    """Coerce ``value`` (int, str like ``"3/4"``, or any Rational) to Rat."""
    if isinstance(value, int):
        return Rat(value)
    if type(value) is Rat:
        return value
    if isinstance(value, str):
        return Rat(value)
    if isinstance(value, numbers.Rational):
        return Rat(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot coerce {value!r} to a rational")


def is_rat(value) -> bool:
    """True when ``value`` is a plain rational scalar (int included)."""
    return isinstance(value, numbers.Rational)


def rat_num(q) -> int:
    return int(q.numerator)


def rat_den(q) -> int:
    return int(q.denominator)


def rat_str(q) -> str:
    """Canonical string: ``p`` when the denominator is 1, else ``p/q``."""
    n, d = rat_num(q), rat_den(q)
    return str(n) if d == 1 else f"{n}/{d}"
