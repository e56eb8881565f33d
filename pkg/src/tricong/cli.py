"""Command-line front end.

Subcommands:

* ``analyze <file> [--json] [--plot-data out.csv]`` — full pipeline: parse,
  type detection with birationality certificate, congruences, classes,
  aggregate label.
* ``invert <file> [--json]`` — closed-form inverse components, printed in
  the polynomial grammar; when the map file carries reference inverse
  components, the per-factor 2×2 unimodular equivalence witness is printed.
* ``check <file> --samples N --seed K`` — deterministic verification
  harness: Klein identities, dual-route parameterization agreement,
  incidence certificates, inverse composition and sampled round trips.

Exit codes: 0 success, 1 file/parse errors (or failed checks / reference
mismatches), 2 not birational, 3 analysis matches no classification row.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from ._ground import Rat, rat, rat_str
from . import _linalg
from .exact import QuadExtElem, proportional
from .mpoly import MPoly, SIG_STU, SIG_X, parse_poly
from .maps import (
    DegenerateConfiguration,
    InconsistentData,
    InverseMap,
    NoSpecialPlanes,
    NotBirational,
    TrilinearMap,
    composition_residuals,
    extract_inverse,
    verify_birational,
)
from .congruence import (
    FAMILIES,
    Conic,
    ConjugateLinePair,
    DependentSyzygies,
    DoubleLine,
    FocalPoint,
    RealLine,
    incidence_certificate,
    params_agree,
    select_syzygy_param,
)
from .classify import NoMatch, Report, Unclassifiable, analyze
from .pluecker import PluLine, klein_quadratic

__all__ = [
    "MapFile",
    "MapFileError",
    "parse_map_file",
    "build_map",
    "cmd_analyze",
    "cmd_invert",
    "cmd_check",
    "main",
]

_INVERSE_KEYS = (
    "inverse_s0",
    "inverse_s1",
    "inverse_t0",
    "inverse_t1",
    "inverse_u0",
    "inverse_u1",
)


class MapFileError(ValueError):
    """A map file could not be parsed; the message carries the position."""


@dataclass(frozen=True)
class MapFile:
    """Parsed map file: a name, four component expressions, and optional
    expected-label / reference-inverse metadata."""

    name: str
    path: str
    components: Tuple[str, str, str, str]
    expected: Optional[str] = None
    inverse_ref: Optional[Tuple[Tuple[str, str], ...]] = None


def parse_map_file(path: str) -> MapFile:
    """Read the ``key: value`` map-file format (``#`` comments allowed)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as e:
        raise MapFileError(f"{path}: {e}") from e
    fields: Dict[str, str] = {}
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise MapFileError(f"{path}:{lineno}: expected 'key: value', got {line!r}")
        key, value = line.split(":", 1)
        key = key.strip()
        value = value.strip()
        allowed = ("name", "f0", "f1", "f2", "f3", "expect") + _INVERSE_KEYS
        if key not in allowed:
            raise MapFileError(f"{path}:{lineno}: unknown key {key!r}")
        if key in fields:
            raise MapFileError(f"{path}:{lineno}: duplicate key {key!r}")
        if not value:
            raise MapFileError(f"{path}:{lineno}: empty value for {key!r}")
        fields[key] = value
    missing = [k for k in ("f0", "f1", "f2", "f3") if k not in fields]
    if missing:
        raise MapFileError(f"{path}: missing component line(s): {', '.join(missing)}")
    inv_present = [k for k in _INVERSE_KEYS if k in fields]
    if inv_present and len(inv_present) != 6:
        raise MapFileError(
            f"{path}: reference inverse requires all six inverse_* keys "
            f"(got {', '.join(inv_present)})"
        )
    inverse_ref = None
    if inv_present:
        inverse_ref = tuple(
            (fields[f"inverse_{b}0"], fields[f"inverse_{b}1"]) for b in "stu"
        )
    stem = path.rsplit("/", 1)[-1]
    stem = stem[:-4] if stem.endswith(".map") else stem
    return MapFile(
        name=fields.get("name", stem),
        path=path,
        components=tuple(fields[f"f{i}"] for i in range(4)),
        expected=fields.get("expect"),
        inverse_ref=inverse_ref,
    )


def build_map(mf: MapFile) -> TrilinearMap:
    """Parse the four component expressions into a trilinear map."""
    try:
        return TrilinearMap.from_strings(list(mf.components))
    except Exception as e:
        raise MapFileError(f"{mf.path}: component parse error: {e}") from e


def _reference_inverse(mf: MapFile) -> Optional[InverseMap]:
    if mf.inverse_ref is None:
        return None
    comps = []
    for b, (s0, s1) in zip("stu", mf.inverse_ref):
        try:
            p0 = parse_poly(s0, SIG_X)
            p1 = parse_poly(s1, SIG_X)
        except Exception as e:
            raise MapFileError(f"{mf.path}: inverse_{b}* parse error: {e}") from e
        comps.append((p0, p1))
    return InverseMap(components=tuple(comps))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _num_str(v) -> str:
    if isinstance(v, QuadExtElem):
        return repr(v)
    if isinstance(v, MPoly):
        return str(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return rat_str(v)


def _seq_str(seq) -> List[str]:
    return [_num_str(v) for v in seq]


def _line_coords(line) -> List[str]:
    six = tuple(line.p) if isinstance(line, PluLine) else tuple(line)
    return _seq_str(six)


def _focal_json(F) -> Dict[str, object]:
    if isinstance(F, RealLine):
        return {"kind": "line", "six": _line_coords(F.line), "discriminant": F.d}
    if isinstance(F, ConjugateLinePair):
        return {
            "kind": "conjugate_line_pair",
            "discriminant": F.d,
            "representative": _seq_str(F.representative),
            "pencil": [_seq_str(b) for b in F.pencil],
        }
    if isinstance(F, DoubleLine):
        return {"kind": "double_line", "six": _line_coords(F.line), "tag": F.tag}
    if isinstance(F, Conic):
        return {
            "kind": "conic",
            "plane": _seq_str(F.plane.coords),
            "matrix": [[_num_str(v) for v in row] for row in F.form],
        }
    if isinstance(F, FocalPoint):
        return {"kind": "point", "coords": _seq_str(F.point.coords)}
    raise TypeError(f"unknown focal variety {F!r}")


def _pred_json(value):
    if isinstance(value, dict):
        return {k: _pred_json(v) for k, v in sorted(value.items())}
    if isinstance(value, (list, tuple)):
        return [_pred_json(v) for v in value]
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, str)) and not isinstance(value, bool):
        return value
    return _num_str(value)


def _report_json(
    mf: MapFile, phi: TrilinearMap, rep: Report, verification: Dict[str, object]
) -> Dict[str, object]:
    return {
        "name": mf.name,
        "map": [str(f) for f in phi.f],
        "type": {
            "triple": list(rep.map_type.triple),
            "permutation": list(rep.map_type.permutation),
        },
        "families": {
            fam: {
                "class": rep.per_family[fam].label,
                "focal": [_focal_json(F) for F in rep.per_family[fam].focal],
            }
            for fam in FAMILIES
        },
        "theorem_d_label": rep.theorem_d_label,
        "predicates": _pred_json(rep.predicates),
        "verification": verification,
        "warnings": list(rep.warnings),
        "expected": mf.expected,
    }


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Verification harness (shared by analyze --json and check)
# ---------------------------------------------------------------------------


def _verification_summary(
    phi: TrilinearMap,
    rep: Report,
    samples: int = 0,
    seed: int = 0,
    reference: Optional[InverseMap] = None,
) -> Tuple[Dict[str, object], List[str]]:
    """Run the certificate battery; returns (summary dict, failure list)."""
    failures: List[str] = []
    out: Dict[str, object] = {}

    klein = {}
    for fam in FAMILIES:
        ok = klein_quadratic(list(rep.params[fam].coeffs)).is_zero()
        klein[fam] = ok
        if not ok:
            failures.append(f"Klein form of the {fam}-parameterization is nonzero")
    out["klein_identity"] = klein

    agreement = {}
    for fam in FAMILIES:
        try:
            C2 = select_syzygy_param(phi, fam)
        except DependentSyzygies as e:
            agreement[fam] = f"skipped: {e}"
            continue
        ok = params_agree(rep.params[fam], C2)
        agreement[fam] = ok
        if not ok:
            failures.append(f"{fam}: syzygy route disagrees with biquadratic route")
    out["syzygy_agreement"] = agreement

    incidence = {}
    for fam in FAMILIES:
        certs = []
        for F in rep.per_family[fam].focal:
            cert = incidence_certificate(rep.params[fam], F)
            certs.append(cert.holds)
            if not cert.holds:
                failures.append(
                    f"{fam}: incidence certificate failed "
                    f"(witness {cert.witness})"
                )
        incidence[fam] = certs
    out["incidence_certificates"] = incidence

    inv = None
    inv_info: Dict[str, object] = {}
    try:
        inv = extract_inverse(phi)
        inv_info["degrees"] = list(inv.degrees)
        res = composition_residuals(phi, inv)
        ok = all(r.is_zero() for r in res)
        inv_info["composition_identity"] = ok
        if not ok:
            failures.append("inverse composition residuals are nonzero")
    except (NotBirational, NoSpecialPlanes, DegenerateConfiguration, InconsistentData) as e:
        inv_info["composition_identity"] = f"unavailable: {e}"
    if reference is not None:
        matches, witnesses = _unimodular_witnesses(inv, reference)
        inv_info["reference_equivalent"] = matches
        if matches:
            inv_info["reference_witnesses"] = witnesses
        else:
            failures.append("reference inverse is not unimodularly equivalent")
        ref_res = composition_residuals(phi, reference)
        ref_ok = all(r.is_zero() for r in ref_res)
        inv_info["reference_composition_identity"] = ref_ok
        if not ref_ok:
            bad = [str(r) for r in ref_res if not r.is_zero()]
            failures.append(
                f"reference inverse fails the composition identity "
                f"(first residual: {bad[0]})"
            )
    check_inv = reference if reference is not None else inv
    if samples > 0 and check_inv is not None:
        vrep = verify_birational(phi, check_inv, samples, seed)
        inv_info["samples"] = {
            "total": vrep.total,
            "passed": vrep.passed,
            "seed": seed,
        }
        if not vrep.ok:
            for pt, blk, got in vrep.failures[:3]:
                pt_s = "; ".join(
                    f"{b}=({rat_str(p[0])}:{rat_str(p[1])})"
                    for b, p in zip("stu", pt)
                )
                failures.append(
                    f"sampled round trip failed [{pt_s}] "
                    f"factor {blk} came back ({rat_str(got[0])}:{rat_str(got[1])})"
                )
    out["inverse"] = inv_info
    return out, failures


def _unimodular_witnesses(
    inv: Optional[InverseMap], reference: InverseMap
) -> Tuple[bool, List[List[List[str]]]]:
    """Per-factor 2×2 change of pair carrying the reference onto ours."""
    if inv is None:
        return False, []
    witnesses = []
    for (r0, r1), (m0, m1) in zip(reference.components, inv.components):
        monos = sorted(
            set(r0.terms) | set(r1.terms) | set(m0.terms) | set(m1.terms),
            reverse=True,
        )
        rows = [[p.terms.get(mo, rat(0)) for p in (r0, r1, m0, m1)] for mo in monos]
        red, piv = _linalg.rref(rows)
        if piv != [0, 1]:
            return False, []
        N = [[red[0][2], red[0][3]], [red[1][2], red[1][3]]]
        if N[0][0] * N[1][1] - N[0][1] * N[1][0] == 0:
            return False, []
        witnesses.append([[rat_str(v) for v in row] for row in N])
    return True, witnesses


# ---------------------------------------------------------------------------
# Plot data
# ---------------------------------------------------------------------------

_PLOT_BOX = 5.0
_PLOT_PARAMS = (
    (rat(1), rat(0)),
    (rat(1), rat(1)),
    (rat(1), rat(-1)),
    (rat(1), rat(1) / 2),
    (rat(1), rat(-1) / 2),
    (rat(1), rat(2)),
    (rat(1), rat(-2)),
    (rat(0), rat(1)),
)


def _float(v) -> float:
    if isinstance(v, QuadExtElem):
        return float(v.a) + float(v.b) * math.sqrt(float(v.d))
    return float(v)


def _float_line_points(six: Sequence[float]):
    """Two independent float points on a line from its antisymmetric matrix."""
    c01, c02, c03, c23, c31, c12 = six
    m = [
        [0.0, c01, c02, c03],
        [-c01, 0.0, c12, -c31],
        [-c02, -c12, 0.0, c23],
        [-c03, c31, -c23, 0.0],
    ]
    cols = [[m[i][j] for i in range(4)] for j in range(4)]
    cols = [c for c in cols if max(abs(x) for x in c) > 1e-12]
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            a, b = cols[i], cols[j]
            big = 0.0
            for p in range(4):
                for q in range(p + 1, 4):
                    big = max(big, abs(a[p] * b[q] - a[q] * b[p]))
            if big > 1e-9:
                return a, b
    return None


def _clip_segment(P: Sequence[float], Q: Sequence[float], box: float):
    """Clip the full line through homogeneous P, Q to an affine box."""
    if abs(P[0]) < 1e-12 and abs(Q[0]) < 1e-12:
        return None
    if abs(P[0]) < 1e-12:
        P, Q = Q, P
    base = [P[i] / P[0] for i in range(1, 4)]
    if abs(Q[0]) < 1e-12:
        dirv = [Q[i] for i in range(1, 4)]
    else:
        q = [Q[i] / Q[0] for i in range(1, 4)]
        dirv = [q[i] - base[i] for i in range(3)]
    norm = max(abs(d) for d in dirv)
    if norm < 1e-12:
        return None
    dirv = [d / norm for d in dirv]
    lo, hi = -1e18, 1e18
    for i in range(3):
        if abs(dirv[i]) < 1e-12:
            if abs(base[i]) > box:
                return None
            continue
        t1 = (-box - base[i]) / dirv[i]
        t2 = (box - base[i]) / dirv[i]
        if t1 > t2:
            t1, t2 = t2, t1
        lo, hi = max(lo, t1), min(hi, t2)
    if lo >= hi:
        return None
    A = [base[i] + lo * dirv[i] for i in range(3)]
    B = [base[i] + hi * dirv[i] for i in range(3)]
    return A, B


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _conic_points(F: Conic, n: int = 48) -> List[List[float]]:
    """Sampled real points of a plane conic, as affine P³ floats."""
    basis = _linalg.nullspace([list(F.plane.coords)], 4)
    H = [[_float(v) for v in b] for b in basis]
    M = [[_float(v) for v in row] for row in F.form]
    R = [
        [
            sum(H[a][i] * M[i][j] * H[b][j] for i in range(4) for j in range(4))
            for b in range(3)
        ]
        for a in range(3)
    ]
    pts = []
    for k in range(n):
        th = 2.0 * math.pi * k / n
        c, s = math.cos(th), math.sin(th)
        # restrict to the pencil y = (c, s, z): quadratic in z
        a = R[2][2]
        b = 2 * (c * R[0][2] + s * R[1][2])
        cc = c * c * R[0][0] + 2 * c * s * R[0][1] + s * s * R[1][1]
        roots = []
        if abs(a) < 1e-12:
            if abs(b) > 1e-12:
                roots = [-cc / b]
        else:
            disc = b * b - 4 * a * cc
            if disc >= 0:
                rt = math.sqrt(disc)
                roots = [(-b + rt) / (2 * a), (-b - rt) / (2 * a)]
        for z in roots:
            y = (c, s, z)
            p4 = [sum(y[i] * H[i][j] for i in range(3)) for j in range(4)]
            if abs(p4[0]) < 1e-9:
                continue
            pts.append([p4[i] / p4[0] for i in range(1, 4)])
    return pts


def _plot_rows(rep: Report) -> List[List[str]]:
    rows: List[List[str]] = []
    for fam in FAMILIES:
        C = rep.params[fam]
        for v1 in _PLOT_PARAMS:
            for v2 in _PLOT_PARAMS:
                six = [_float(x) for x in C.evaluate(v1, v2)]
                if max(abs(x) for x in six) < 1e-12:
                    continue
                pq = _float_line_points(six)
                if pq is None:
                    continue
                seg = _clip_segment(pq[0], pq[1], _PLOT_BOX)
                if seg is None:
                    continue
                A, B = seg
                rows.append(
                    [fam, "member", rat_str(v1[0]), rat_str(v1[1]),
                     rat_str(v2[0]), rat_str(v2[1])]
                    + [_fmt(x) for x in A] + [_fmt(x) for x in B]
                )
        for F in rep.per_family[fam].focal:
            if isinstance(F, (RealLine, DoubleLine)):
                six_raw = F.line.p if isinstance(F.line, PluLine) else F.line
                six = [_float(x) for x in six_raw]
                pq = _float_line_points(six)
                if pq is None:
                    continue
                seg = _clip_segment(pq[0], pq[1], _PLOT_BOX)
                if seg is None:
                    continue
                A, B = seg
                kind = "double_line" if isinstance(F, DoubleLine) else "focal_line"
                rows.append([fam, kind, "", "", "", ""]
                            + [_fmt(x) for x in A] + [_fmt(x) for x in B])
            elif isinstance(F, Conic):
                pts = _conic_points(F)
                for i in range(len(pts)):
                    A, B = pts[i], pts[(i + 1) % len(pts)]
                    if max(abs(a - b) for a, b in zip(A, B)) > 1.0:
                        continue  # avoid chords across branches
                    inb = all(abs(x) <= _PLOT_BOX for x in A + B)
                    if not inb:
                        continue
                    rows.append([fam, "focal_conic", "", "", "", ""]
                                + [_fmt(x) for x in A] + [_fmt(x) for x in B])
            elif isinstance(F, FocalPoint):
                p = [_float(v) for v in F.point.coords]
                if abs(p[0]) < 1e-12:
                    continue
                aff = [_fmt(p[i] / p[0]) for i in range(1, 4)]
                rows.append([fam, "focal_point", "", "", "", ""] + aff + aff)
    return rows


def _write_plot_csv(path: str, rep: Report):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["family", "kind", "t0", "t1", "u0", "u1",
                    "x0", "y0", "z0", "x1", "y1", "z1"])
        w.writerows(_plot_rows(rep))


# ---------------------------------------------------------------------------
# Human-readable rendering
# ---------------------------------------------------------------------------


def _describe_focal(F) -> str:
    if isinstance(F, RealLine):
        tag = "" if F.d == 1 else f" (coordinates over sqrt({F.d}))"
        return f"line ({', '.join(_line_coords(F.line))}){tag}"
    if isinstance(F, ConjugateLinePair):
        return (
            f"conjugate line pair over sqrt({F.d}): "
            f"representative ({', '.join(_seq_str(F.representative))})"
        )
    if isinstance(F, DoubleLine):
        return f"double line ({', '.join(_line_coords(F.line))})"
    if isinstance(F, Conic):
        return f"conic in plane ({', '.join(_seq_str(F.plane.coords))})"
    if isinstance(F, FocalPoint):
        return f"point ({' : '.join(_seq_str(F.point.coords))})"
    return repr(F)


def _print_report(mf: MapFile, rep: Report, out):
    tri = rep.map_type.triple
    perm = rep.map_type.permutation
    degs = rep.map_type.degrees_by_factor
    print(f"map: {mf.name}", file=out)
    print(
        f"type: ({tri[0]},{tri[1]},{tri[2]})  "
        f"inverse degrees s={degs['s']}, t={degs['t']}, u={degs['u']}  "
        f"canonical order ({', '.join(perm)})",
        file=out,
    )
    for fam in FAMILIES:
        cls = rep.per_family[fam]
        print(f"family {fam}: {cls.label}", file=out)
        for F in cls.focal:
            print(f"  - {_describe_focal(F)}", file=out)
    print(f"label: {rep.theorem_d_label}", file=out)
    if mf.expected is not None:
        verdict = "match" if mf.expected == rep.theorem_d_label else "MISMATCH"
        print(f"expected: {mf.expected}  [{verdict}]", file=out)
    for w in rep.warnings:
        print(f"warning: {w}", file=out)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_analyze(
    path: str, json_out: bool = False, plot_data: Optional[str] = None
) -> int:
    try:
        mf = parse_map_file(path)
        phi = build_map(mf)
    except MapFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        rep = analyze(phi)
    except NotBirational as e:
        print(f"not birational: {e}", file=sys.stderr)
        return 2
    except (NoMatch, Unclassifiable) as e:
        print(f"unclassifiable: {e}", file=sys.stderr)
        diag = getattr(e, "diagnostics", None)
        if diag:
            for k in sorted(diag):
                print(f"  {k} = {diag[k]}", file=sys.stderr)
        return 3
    if plot_data is not None:
        _write_plot_csv(plot_data, rep)
    if json_out:
        verification, _ = _verification_summary(phi, rep)
        sys.stdout.write(_dump_json(_report_json(mf, phi, rep, verification)))
    else:
        _print_report(mf, rep, sys.stdout)
    return 0


def cmd_invert(path: str, json_out: bool = False) -> int:
    try:
        mf = parse_map_file(path)
        phi = build_map(mf)
        reference = _reference_inverse(mf)
    except MapFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        inv = extract_inverse(phi)
    except NotBirational as e:
        print(f"not birational: {e}", file=sys.stderr)
        return 2
    except (NoSpecialPlanes, DegenerateConfiguration, InconsistentData) as e:
        print(f"no closed-form inverse available: {e}", file=sys.stderr)
        return 3
    names = ("s", "t", "u")
    texts = {}
    for b, (p0, p1) in zip(names, inv.components):
        t0, t1 = str(p0), str(p1)
        # grammar round trip (exactness guard)
        assert parse_poly(t0, SIG_X) == p0 and parse_poly(t1, SIG_X) == p1
        texts[b] = (t0, t1)
    exit_code = 0
    witness_out = None
    if reference is not None:
        matches, witnesses = _unimodular_witnesses(inv, reference)
        if matches:
            witness_out = witnesses
        else:
            exit_code = 1
    if json_out:
        obj: Dict[str, object] = {
            "name": mf.name,
            "degrees": list(inv.degrees),
            "components": {b: list(texts[b]) for b in names},
        }
        if reference is not None:
            obj["reference_equivalent"] = witness_out is not None
            if witness_out is not None:
                obj["reference_witnesses"] = witness_out
        sys.stdout.write(_dump_json(obj))
    else:
        for b in names:
            print(f"{b}0 = {texts[b][0]}")
            print(f"{b}1 = {texts[b][1]}")
        if reference is not None:
            if witness_out is not None:
                for b, N in zip(names, witness_out):
                    print(
                        f"reference equivalence ({b}): "
                        f"[[{N[0][0]}, {N[0][1]}], [{N[1][0]}, {N[1][1]}]]"
                    )
            else:
                print("reference inverse NOT equivalent", file=sys.stderr)
    return exit_code


def cmd_check(path: str, samples: int = 100, seed: int = 42) -> int:
    if samples < 1:
        print("error: --samples must be >= 1", file=sys.stderr)
        return 1
    try:
        mf = parse_map_file(path)
        phi = build_map(mf)
        reference = _reference_inverse(mf)
    except MapFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        rep = analyze(phi)
    except NotBirational as e:
        print(f"not birational: {e}", file=sys.stderr)
        return 2
    except (NoMatch, Unclassifiable) as e:
        print(f"unclassifiable: {e}", file=sys.stderr)
        return 3
    summary, failures = _verification_summary(
        phi, rep, samples=samples, seed=seed, reference=reference
    )
    print(f"map: {mf.name}")
    print(f"label: {rep.theorem_d_label}")
    for fam in FAMILIES:
        print(f"klein identity {fam}: {'ok' if summary['klein_identity'][fam] else 'FAIL'}")
    for fam in FAMILIES:
        v = summary["syzygy_agreement"][fam]
        print(f"route agreement {fam}: {'ok' if v is True else v if isinstance(v, str) else 'FAIL'}")
    for fam in FAMILIES:
        certs = summary["incidence_certificates"][fam]
        ok = all(certs)
        print(f"incidence {fam}: {'ok' if ok else 'FAIL'} ({len(certs)} certificates)")
    inv_info = summary["inverse"]
    print(f"inverse composition: {inv_info.get('composition_identity')}")
    if reference is not None:
        print(f"reference equivalent: {inv_info.get('reference_equivalent')}")
        print(
            "reference composition: "
            f"{inv_info.get('reference_composition_identity')}"
        )
    if "samples" in inv_info:
        s = inv_info["samples"]
        print(f"sampled round trips: {s['passed']}/{s['total']} (seed {s['seed']})")
    if mf.expected is not None:
        ok = mf.expected == rep.theorem_d_label
        print(f"expected label: {'ok' if ok else 'FAIL'} ({mf.expected})")
        if not ok:
            failures.append(
                f"label {rep.theorem_d_label} != expected {mf.expected}"
            )
    if failures:
        for f in failures:
            print(f"FAIL: {f}", file=sys.stderr)
        return 1
    print("all checks passed")
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tricong",
        description=(
            "Exact analysis of real trilinear birational maps: type, "
            "inverse, line congruences, and their classification."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="classify a map file")
    p_an.add_argument("file")
    p_an.add_argument("--json", action="store_true", help="emit the JSON report")
    p_an.add_argument(
        "--plot-data", metavar="OUT.CSV", help="write sampled line segments as CSV"
    )

    p_inv = sub.add_parser("invert", help="print the closed-form inverse")
    p_inv.add_argument("file")
    p_inv.add_argument("--json", action="store_true")

    p_chk = sub.add_parser("check", help="run the verification harness")
    p_chk.add_argument("file")
    p_chk.add_argument("--samples", type=int, default=100)
    p_chk.add_argument("--seed", type=int, default=42)

    args = parser.parse_args(argv)
    if args.command == "analyze":
        return cmd_analyze(args.file, json_out=args.json, plot_data=args.plot_data)
    if args.command == "invert":
        return cmd_invert(args.file, json_out=args.json)
    return cmd_check(args.file, samples=args.samples, seed=args.seed)


if __name__ == "__main__":
    sys.exit(main())
