"""Real classification of the three line congruences of a trilinear map.

Per family the classes are:

* ``A1_hyperbolic`` — linear congruence, two real skew focal lines,
* ``A2_elliptic``  — linear, conjugate pair of non-real focal lines,
* ``A3_parabolic`` — linear, one doubled focal line,
* ``B_quadratic``  — quadratic congruence: a focal conic plus a focal line
  meeting it,
* ``C_degenerate`` — all member lines through a single focal point.

The per-map label aggregates the family classes with exact configuration
predicates (skewness table, conic rank, special-point membership) through
fixed decision tables keyed by the map's type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ._ground import Rat, rat
from . import _linalg
from .exact import QuadExtElem, conjugate_seq, normalize_seq, proportional
from .maps import (
    DegenerateConfiguration,
    NoSpecialPlanes,
    SpecialPlaneData,
    TrilinearMap,
    TypeDetection,
    detect_type,
    special_planes,
)
from .congruence import (
    FAMILY_BLOCK,
    FAMILIES,
    Conic,
    CongruenceParam,
    ConjugateLinePair,
    DoubleLine,
    FocalPoint,
    FocalVariety,
    NotDegenerate,
    RealLine,
    biquadratic_param,
    focal_conic,
    conic_restricted_matrix,
    focal_lines_linear,
    focal_point,
    incidence_certificate,
    pencil_to_focal,
    span,
)
from .pluecker import (
    Degenerate,
    Elliptic,
    Hyperbolic,
    LineInPlane,
    PluLine,
    antisym_matrix,
    contraction,
    dual_antisym_matrix,
    klein_pairing,
    line_from_planes,
)

__all__ = [
    "CongruenceClass",
    "Report",
    "classify_family",
    "configuration_predicates",
    "theorem_d_label",
    "analyze",
    "Unclassifiable",
    "NoMatch",
]

LABELS = (
    "A1_hyperbolic",
    "A2_elliptic",
    "A3_parabolic",
    "B_quadratic",
    "C_degenerate",
)


class Unclassifiable(ValueError):
    """No classification branch could be certified for a family."""


class NoMatch(ValueError):
    """The certified family configuration matches no known per-type class.

    ``diagnostics`` carries the exact facts that excluded every row of the
    decision table.
    """

    def __init__(self, message: str, diagnostics: Optional[Dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class CongruenceClass:
    """A family's class label plus its certified focal varieties."""

    label: str
    focal: Tuple[FocalVariety, ...]

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown class label {self.label!r}")


@dataclass
class Report:
    """Full classification outcome for one map."""

    map_type: TypeDetection
    per_family: Dict[str, CongruenceClass]
    theorem_d_label: str
    predicates: Dict[str, object]
    warnings: List[str] = field(default_factory=list)
    data: Optional[SpecialPlaneData] = None
    params: Optional[Dict[str, CongruenceParam]] = None


# ---------------------------------------------------------------------------
# Per-family classification
# ---------------------------------------------------------------------------


def classify_family(
    C: CongruenceParam, data: Optional[SpecialPlaneData] = None
) -> CongruenceClass:
    """Classify one family by its span dimension, certifying every focal
    variety symbolically before labeling."""
    sp = span(C)
    dim = len(sp)
    if dim == 3:
        try:
            pt = focal_point(C)
        except NotDegenerate as e:
            raise Unclassifiable(f"span 3 but no common point: {e}") from e
        return CongruenceClass("C_degenerate", (FocalPoint(pt),))
    if dim == 4:
        cls = focal_lines_linear(C)
        if isinstance(cls, Degenerate):
            try:
                pt = focal_point(C)
            except NotDegenerate as e:
                raise Unclassifiable(
                    f"degenerate polar pencil but no common point: {e}"
                ) from e
            return CongruenceClass("C_degenerate", (FocalPoint(pt),))
        focal = tuple(pencil_to_focal(cls))
        for F in focal:
            cert = incidence_certificate(C, F)
            if not cert.holds:
                raise Unclassifiable(
                    f"focal line fails incidence for family {C.family}: "
                    f"witness {cert.witness}"
                )
        if isinstance(cls, Hyperbolic):
            return CongruenceClass("A1_hyperbolic", focal)
        if isinstance(cls, Elliptic):
            return CongruenceClass("A2_elliptic", focal)
        return CongruenceClass("A3_parabolic", focal)
    if dim == 5:
        if data is None or data.map_type not in ((1, 1, 2), (2, 2, 2)):
            raise Unclassifiable(
                f"family {C.family} spans dimension 5 but no structured plane "
                "data is available for the conic"
            )
        conic = focal_conic(data, C.family)
        ccert = incidence_certificate(C, conic)
        if not ccert.holds:
            raise Unclassifiable(
                f"focal conic fails incidence for family {C.family}: "
                f"witness {ccert.witness}"
            )
        focal: List[FocalVariety] = []
        for name, line in _quadratic_line_candidates(data, C.family):
            cert = incidence_certificate(C, line)
            if cert.holds and _line_meets_conic(line, conic):
                focal.append(RealLine(line))
        if not focal:
            raise Unclassifiable(
                f"no candidate focal line certifies for family {C.family}"
            )
        focal.append(conic)
        return CongruenceClass("B_quadratic", tuple(focal))
    raise Unclassifiable(f"family {C.family} spans dimension {dim}")


def _quadratic_line_candidates(data: SpecialPlaneData, family: str):
    slot = data.original_slots[FAMILY_BLOCK[family]]
    P = data.planes
    if data.map_type == (1, 1, 2):
        pairs = [("a", P["B"], P["C0"]), ("b", P["A"], P["C0"])]
    else:
        table = {"s": ("x", "B", "C"), "t": ("y", "A", "C"), "u": ("z", "A", "B")}
        nm, k1, k2 = table[slot]
        pairs = [(nm, P[k1], P[k2])]
    out = []
    for nm, u, v in pairs:
        if proportional(u, v):
            continue
        out.append((nm, line_from_planes(u, v)))
    return out


def _line_meets_conic(line, conic: Conic) -> bool:
    """Exact check: the line meets the plane at a point of the conic."""
    six = tuple(line.p) if isinstance(line, PluLine) else tuple(line)
    try:
        pt = tuple(contraction(six, tuple(conic.plane.coords)).coords)
    except LineInPlane:
        return True  # line inside the plane: meets the plane conic
    total = rat(0)
    for i in range(4):
        for j in range(4):
            total = total + pt[i] * conic.form[i][j] * pt[j]
    return total == 0


# ---------------------------------------------------------------------------
# Configuration predicates
# ---------------------------------------------------------------------------


def _dot(cov, pt):
    total = None
    for c, p in zip(cov, pt):
        t = c * p
        total = t if total is None else total + t
    return total


def _conic_value(conic: Conic, pt) -> Rat:
    total = rat(0)
    for i in range(4):
        for j in range(4):
            total = total + pt[i] * conic.form[i][j] * pt[j]
    return total


def _covector_line(data: SpecialPlaneData, n1: str, n2: str):
    u, v = data.planes[n1], data.planes[n2]
    if proportional(u, v):
        return None
    return line_from_planes(u, v)


def _line_six(line) -> Tuple:
    return tuple(line.p) if isinstance(line, PluLine) else tuple(line)


def _three_lines_common_plane(lines) -> bool:
    """Do three lines lie in one plane?  A common plane is a covector
    annihilated by every antisymmetric line matrix."""
    rows = []
    for l in lines:
        m = antisym_matrix(_line_six(l))
        for i in range(4):
            rows.append([rat(0) if e is None else e for e in m[i]])
    return len(_linalg.nullspace(rows, 4)) >= 1


def _three_lines_common_point(lines) -> bool:
    rows = []
    for l in lines:
        m = dual_antisym_matrix(_line_six(l))
        for i in range(4):
            rows.append([rat(0) if e is None else e for e in m[i]])
    return len(_linalg.nullspace(rows, 4)) >= 1


def configuration_predicates(
    detection: TypeDetection,
    per_family: Dict[str, CongruenceClass],
    data: Optional[SpecialPlaneData] = None,
    params: Optional[Dict[str, CongruenceParam]] = None,
) -> Dict[str, object]:
    """Exact sign/rank facts feeding the per-type decision tables."""
    triple = detection.triple
    preds: Dict[str, object] = {
        "family_labels": {f: per_family[f].label for f in FAMILIES},
    }
    if params is not None:
        preds["span_dims"] = {f: len(span(params[f])) for f in FAMILIES}

    if triple == (1, 1, 1) and data is not None:
        lines = {}
        for nm, (k1, k2) in (("a", ("A0", "A1")), ("b", ("B0", "B1")), ("c", ("C0", "C1"))):
            lines[nm] = _covector_line(data, k1, k2)
        preds["lines_defined"] = all(l is not None for l in lines.values())
        if preds["lines_defined"]:
            la, lb, lc = lines["a"], lines["b"], lines["c"]
            preds["pairing_ab"] = klein_pairing(_line_six(la), _line_six(lb))
            preds["pairing_ac"] = klein_pairing(_line_six(la), _line_six(lc))
            preds["pairing_bc"] = klein_pairing(_line_six(lb), _line_six(lc))
            preds["lines_distinct"] = (
                not proportional(_line_six(la), _line_six(lb))
                and not proportional(_line_six(la), _line_six(lc))
                and not proportional(_line_six(lb), _line_six(lc))
            )
            trio = [la, lb, lc]
            preds["coplanar"] = _three_lines_common_plane(trio)
            preds["concurrent"] = _three_lines_common_point(trio)

    elif triple == (1, 1, 2):
        point_fam = _slot_family(detection, "u")
        cls = per_family[point_fam]
        if cls.label == "C_degenerate":
            O = tuple(cls.focal[0].point.coords)
            preds["O"] = O
            if data is not None and data.map_type == (1, 1, 2):
                conic = focal_conic(data, _slot_family(detection, "s"))
                preds["conic_rank"] = _linalg.rank(conic_restricted_matrix(conic))
                on_plane = _dot(tuple(conic.plane.coords), O) == 0
                preds["O_on_conic"] = bool(on_plane and _conic_value(conic, O) == 0)

    elif triple == (1, 2, 2):
        fam_t = _slot_family(detection, "t")
        fam_u = _slot_family(detection, "u")
        shared, other_t, other_u = _shared_focal_line(
            per_family[fam_t], per_family[fam_u]
        )
        preds["shared_line_found"] = shared is not None
        if shared is not None:
            preds["line_a"] = shared
            preds["line_c"] = other_t
            preds["line_b"] = other_u
            if other_t is not None and other_u is not None:
                preds["pairing_bc"] = klein_pairing(other_u, other_t)
        s_cls = per_family[_slot_family(detection, "s")].label
        preds["series"] = "b" if s_cls == "A2_elliptic" else "a"

    elif triple == (2, 2, 2) and data is not None and data.map_type == (2, 2, 2):
        covs = [list(data.planes[k]) for k in ("A", "B", "C")]
        ns = _linalg.nullspace(covs, 4)
        if len(ns) == 1:
            P = tuple(normalize_seq(ns[0]))
            preds["P"] = P
            preds["D_at_P"] = _dot(data.planes["D"], P)
            conic = focal_conic(data, "S")
            preds["Q_at_P"] = _conic_value(conic, P)
            preds["P_on_conic"] = bool(
                preds["D_at_P"] == 0 and preds["Q_at_P"] == 0
            )
            preds["conic_rank"] = _linalg.rank(conic_restricted_matrix(conic))
    return preds


def _slot_family(detection: TypeDetection, slot: str) -> str:
    """Family letter of the original factor sitting in the given canonical
    slot (slots ordered s,t,u by non-decreasing inverse degree)."""
    idx = {"s": 0, "t": 1, "u": 2}[slot]
    orig = detection.permutation[idx]
    return {"s": "S", "t": "T", "u": "U"}[orig]


def _family_lines(cls: CongruenceClass) -> List[Tuple]:
    out = []
    for F in cls.focal:
        if isinstance(F, RealLine):
            out.append(_line_six(F.line))
        elif isinstance(F, DoubleLine):
            out.append(_line_six(F.line))
            out.append(_line_six(F.line))
        elif isinstance(F, ConjugateLinePair):
            out.append(tuple(F.representative))
            out.append(conjugate_seq(F.representative))
    return out


def _shared_focal_line(cls_t: CongruenceClass, cls_u: CongruenceClass):
    """The common focal line of two linear families, plus each family's
    other line; (None, None, None) when there is no match."""
    lt = _family_lines(cls_t)
    lu = _family_lines(cls_u)
    for i, l1 in enumerate(lt):
        for j, l2 in enumerate(lu):
            if proportional(l1, l2):
                other_t = next(
                    (l for k, l in enumerate(lt) if k != i and not proportional(l, l1)),
                    l1,
                )
                other_u = next(
                    (l for k, l in enumerate(lu) if k != j and not proportional(l, l2)),
                    l2,
                )
                return l1, other_t, other_u
    return None, None, None


# ---------------------------------------------------------------------------
# Theorem-level label
# ---------------------------------------------------------------------------


def theorem_d_label(
    detection: TypeDetection,
    per_family: Dict[str, CongruenceClass],
    predicates: Dict[str, object],
) -> str:
    """Aggregate label from the per-type decision tables; NoMatch when the
    certified configuration fits no row."""
    triple = detection.triple
    labels = {f: per_family[f].label for f in FAMILIES}
    if triple == (1, 1, 1):
        return _label_111(labels, predicates)
    if triple == (1, 1, 2):
        return _label_112(detection, labels, predicates)
    if triple == (1, 2, 2):
        return _label_122(detection, labels, predicates)
    return _label_222(labels, predicates)


def _label_111(labels, preds) -> str:
    if not preds.get("lines_defined"):
        raise NoMatch("(1,1,1) covector lines undefined", preds)
    if not preds.get("lines_distinct"):
        raise NoMatch("(1,1,1) focal lines not pairwise distinct", preds)
    vanish = sum(
        1 for k in ("pairing_ab", "pairing_ac", "pairing_bc") if preds[k] == 0
    )
    if vanish == 0:
        return "(1,1,1) class 1"
    if vanish == 1:
        return "(1,1,1) class 2"
    if vanish == 2:
        return "(1,1,1) class 3"
    if preds.get("coplanar"):
        return "(1,1,1) class 4"
    raise NoMatch(
        "(1,1,1) three concurrent non-coplanar focal lines: no class row",
        preds,
    )


def _label_112(detection, labels, preds) -> str:
    slot_s = labels[_slot_family(detection, "s")]
    slot_t = labels[_slot_family(detection, "t")]
    slot_u = labels[_slot_family(detection, "u")]
    if slot_u != "C_degenerate":
        raise NoMatch(
            f"(1,1,2) deg-2 factor family is {slot_u}, expected C_degenerate",
            preds,
        )
    pair = sorted((slot_s, slot_t))
    if pair == ["B_quadratic", "B_quadratic"]:
        if "O_on_conic" not in preds:
            raise NoMatch("(1,1,2) O-membership undecidable (no conic data)", preds)
        return "(1,1,2) class 2" if preds["O_on_conic"] else "(1,1,2) class 1"
    if pair == ["A1_hyperbolic", "A1_hyperbolic"]:
        return "(1,1,2) class 3"
    if pair == ["A1_hyperbolic", "A3_parabolic"]:
        return "(1,1,2) class 4"
    if pair == ["A3_parabolic", "A3_parabolic"]:
        return "(1,1,2) class 5"
    raise NoMatch(f"(1,1,2) family pair {pair} fits no class row", preds)


def _label_122(detection, labels, preds) -> str:
    s_cls = labels[_slot_family(detection, "s")]
    t_cls = labels[_slot_family(detection, "t")]
    u_cls = labels[_slot_family(detection, "u")]
    if "C_degenerate" in (s_cls, t_cls, u_cls) or "B_quadratic" in (
        s_cls,
        t_cls,
        u_cls,
    ):
        raise NoMatch(
            f"(1,2,2) family classes ({s_cls},{t_cls},{u_cls}) fit no class row",
            preds,
        )
    pair = sorted((t_cls, u_cls))

    def bc_vanishes() -> bool:
        if "pairing_bc" not in preds:
            raise NoMatch("(1,2,2) lines b,c not identified", preds)
        v = preds["pairing_bc"]
        return v.is_zero() if isinstance(v, QuadExtElem) else v == 0

    if s_cls == "A2_elliptic":
        if pair == ["A1_hyperbolic", "A1_hyperbolic"]:
            return "(1,2,2) class b.1"
        if pair == ["A1_hyperbolic", "A3_parabolic"]:
            return "(1,2,2) class b.2"
        if pair == ["A3_parabolic", "A3_parabolic"]:
            return "(1,2,2) class b.3"
        raise NoMatch(f"(1,2,2) b-series pair {pair} fits no row", preds)
    if s_cls == "A1_hyperbolic":
        if pair == ["A1_hyperbolic", "A1_hyperbolic"]:
            return "(1,2,2) class a.5" if bc_vanishes() else "(1,2,2) class a.1"
        if pair == ["A1_hyperbolic", "A3_parabolic"]:
            return "(1,2,2) class a.2"
        if pair == ["A3_parabolic", "A3_parabolic"]:
            return "(1,2,2) class a.6"
        raise NoMatch(f"(1,2,2) a-series pair {pair} fits no row", preds)
    if s_cls == "A3_parabolic":
        if pair == ["A1_hyperbolic", "A1_hyperbolic"]:
            return "(1,2,2) class a.8" if bc_vanishes() else "(1,2,2) class a.3"
        if pair == ["A1_hyperbolic", "A3_parabolic"]:
            return "(1,2,2) class a.4"
        if pair == ["A3_parabolic", "A3_parabolic"]:
            return "(1,2,2) class a.7"
        raise NoMatch(f"(1,2,2) parabolic-S pair {pair} fits no row", preds)
    raise NoMatch(f"(1,2,2) deg-1 factor family {s_cls} fits no row", preds)


def _label_222(labels, preds) -> str:
    if any(labels[f] != "B_quadratic" for f in FAMILIES):
        raise NoMatch(f"(2,2,2) family classes {labels} fit no class row", preds)
    if "P" not in preds:
        raise NoMatch("(2,2,2) common dual point undefined", preds)
    if preds["D_at_P"] != 0:
        return "(2,2,2) class 1"
    if preds.get("P_on_conic"):
        return "(2,2,2) class 2"
    raise NoMatch(
        "(2,2,2) P on the conic plane but not on the conic: no class row",
        preds,
    )


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


def analyze(phi: TrilinearMap) -> Report:
    """Full pipeline: type detection (with birationality certificate),
    structured plane data (when available), the three congruences, their
    classes, and the aggregate label."""
    detection = detect_type(phi)
    warnings: List[str] = []
    data: Optional[SpecialPlaneData] = None
    try:
        data = special_planes(phi)
    except DegenerateConfiguration as e:
        data = e.partial
        warnings.append(
            f"structured plane data incomplete ({e}); classification uses "
            "congruence-side computations"
        )
    except NoSpecialPlanes as e:
        warnings.append(
            f"no structured plane data ({e}); classification uses "
            "congruence-side computations"
        )
    params = {f: biquadratic_param(phi, f) for f in FAMILIES}
    per_family = {f: classify_family(params[f], data) for f in FAMILIES}
    preds = configuration_predicates(detection, per_family, data, params)
    _attribution_warnings(detection, per_family, data, params, warnings)
    label = theorem_d_label(detection, per_family, preds)
    return Report(
        map_type=detection,
        per_family=per_family,
        theorem_d_label=label,
        predicates=preds,
        warnings=warnings,
        data=data,
        params=params,
    )


def _attribution_warnings(detection, per_family, data, params, warnings):
    """Record which covector-wedge line certified for each quadratic
    family (the letter attribution is decided computationally)."""
    if data is None or data.map_type != (1, 1, 2):
        return
    for slot in ("s", "t"):
        fam = _slot_family(detection, slot)
        if per_family[fam].label != "B_quadratic":
            continue
        matched = []
        for name, line in _quadratic_line_candidates(data, fam):
            if incidence_certificate(params[fam], line).holds:
                matched.append(name)
        if matched:
            warnings.append(
                f"family {fam}: certified focal line(s) "
                f"{', '.join('wedge(' + {'a': 'B,C0', 'b': 'A,C0'}[n] + ')' for n in matched)}"
            )
