"""End-to-end tests for the command-line front end.

Covers the map-file parser, the three subcommands (human and JSON output,
plot CSV export), every documented exit code, and the installed console
script.  Subcommands run in-process through ``main(argv)``; one subprocess
test exercises the real entry point.
"""

import contextlib
import csv
import io
import json
import subprocess
import sys

import pytest

import conftest
from conftest import EXAMPLE_LABEL
from tricong.cli import (
    MapFile,
    MapFileError,
    build_map,
    main,
    parse_map_file,
)
from tricong.maps import TrilinearMap


def run_cli(argv):
    """Run ``main`` in-process, catching argparse's SystemExit."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = main(list(argv))
        except SystemExit as e:
            code = 0 if e.code is None else e.code
    return code, out.getvalue(), err.getvalue()


def write_map(tmp_path, text, name="case.map"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


TENSOR_TEXT = """\
name: plain_tensor
f0: s1*t0*u0
f1: s0*t1*u0
f2: s0*t0*u1
f3: s0*t0*u0
"""


# ---------------------------------------------------------------------------
# Map-file parsing
# ---------------------------------------------------------------------------


class TestParseMapFile:
    def test_example_fields(self):
        mf = parse_map_file(fixture_path("example_b1"))
        assert isinstance(mf, MapFile)
        assert mf.name == "example_b1"
        assert len(mf.components) == 4
        assert mf.expected == EXAMPLE_LABEL
        assert mf.inverse_ref is not None and len(mf.inverse_ref) == 3
        assert mf.inverse_ref[0] == ("x2 - x3", "x3")

    def test_name_defaults_to_stem(self, tmp_path):
        path = write_map(tmp_path, TENSOR_TEXT.replace("name: plain_tensor\n", ""))
        mf = parse_map_file(path)
        assert mf.name == "case"

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        text = "# header\n\nname: c  # trailing comment\n" + TENSOR_TEXT.split("\n", 1)[1]
        mf = parse_map_file(write_map(tmp_path, text))
        assert mf.name == "c"
        assert mf.components[3] == "s0*t0*u0"

    def test_unknown_key_reports_line(self, tmp_path):
        path = write_map(tmp_path, TENSOR_TEXT + "colour: blue\n")
        with pytest.raises(MapFileError, match=r":6: unknown key 'colour'"):
            parse_map_file(path)

    def test_duplicate_key_reports_line(self, tmp_path):
        path = write_map(tmp_path, TENSOR_TEXT + "f0: s0*t0*u0\n")
        with pytest.raises(MapFileError, match=r":6: duplicate key 'f0'"):
            parse_map_file(path)

    def test_empty_value_rejected(self, tmp_path):
        path = write_map(tmp_path, TENSOR_TEXT + "expect:\n")
        with pytest.raises(MapFileError, match=r":6: empty value for 'expect'"):
            parse_map_file(path)

    def test_line_without_colon_rejected(self, tmp_path):
        path = write_map(tmp_path, TENSOR_TEXT + "just words\n")
        with pytest.raises(MapFileError, match=r"expected 'key: value'"):
            parse_map_file(path)

    def test_missing_components_listed(self, tmp_path):
        path = write_map(tmp_path, "name: partial\nf0: s0*t0*u0\nf3: s1*t1*u1\n")
        with pytest.raises(MapFileError, match=r"missing component line\(s\): f1, f2"):
            parse_map_file(path)

    def test_partial_inverse_block_rejected(self, tmp_path):
        path = write_map(tmp_path, TENSOR_TEXT + "inverse_s0: x1\ninverse_s1: x3\n")
        with pytest.raises(MapFileError, match=r"requires all six inverse_\* keys"):
            parse_map_file(path)

    def test_missing_file_wraps_oserror(self, tmp_path):
        path = str(tmp_path / "nowhere.map")
        with pytest.raises(MapFileError, match=r"nowhere\.map"):
            parse_map_file(path)


class TestBuildMap:
    def test_good_components(self):
        phi = build_map(parse_map_file(fixture_path("tensor_class4")))
        assert isinstance(phi, TrilinearMap)
        assert all(p.multidegree == (1, 1, 1) for p in phi.components)

    def test_component_parse_error_carries_path(self):
        path = fixture_path("bad_syntax")
        mf = parse_map_file(path)
        with pytest.raises(MapFileError, match=r"component parse error"):
            build_map(mf)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


class TestAnalyze:
    def test_example_human_report(self):
        code, out, err = run_cli(["analyze", fixture_path("example_b1")])
        assert code == 0 and err == ""
        assert "map: example_b1" in out
        assert "type: (1,2,2)" in out
        assert "inverse degrees s=1, t=2, u=2" in out
        assert "family S: A2_elliptic" in out
        assert f"label: {EXAMPLE_LABEL}" in out
        assert f"expected: {EXAMPLE_LABEL}  [match]" in out

    def test_json_schema(self):
        code, out, _ = run_cli(["analyze", fixture_path("example_b1"), "--json"])
        assert code == 0
        doc = json.loads(out)
        assert sorted(doc) == [
            "expected",
            "families",
            "map",
            "name",
            "predicates",
            "theorem_d_label",
            "type",
            "verification",
            "warnings",
        ]
        assert doc["theorem_d_label"] == EXAMPLE_LABEL
        assert doc["type"] == {"triple": [1, 2, 2], "permutation": ["s", "t", "u"]}
        assert sorted(doc["families"]) == ["S", "T", "U"]
        for fam in "STU":
            assert sorted(doc["families"][fam]) == ["class", "focal"]
        ver = doc["verification"]
        assert sorted(ver) == [
            "incidence_certificates",
            "inverse",
            "klein_identity",
            "syzygy_agreement",
        ]
        assert ver["klein_identity"] == {"S": True, "T": True, "U": True}
        assert ver["inverse"]["composition_identity"] is True
        assert ver["inverse"]["degrees"] == [1, 2, 2]

    def test_expect_mismatch_is_reported_not_fatal(self, tmp_path):
        path = write_map(tmp_path, TENSOR_TEXT + "expect: (1,2,2) class b.1\n")
        code, out, _ = run_cli(["analyze", path])
        assert code == 0
        assert "[MISMATCH]" in out

    def test_not_birational_exit_2(self):
        code, out, err = run_cli(["analyze", fixture_path("involution_2to1")])
        assert code == 2 and out == ""
        assert err.startswith("not birational:")
        assert "rational point(s)" in err

    def test_component_syntax_error_exit_1(self):
        code, out, err = run_cli(["analyze", fixture_path("bad_syntax")])
        assert code == 1 and out == ""
        assert err.startswith("error:")
        assert "component parse error" in err
        assert "(at position" in err

    def test_missing_file_exit_1(self, tmp_path):
        code, _, err = run_cli(["analyze", str(tmp_path / "ghost.map")])
        assert code == 1
        assert err.startswith("error:")

    def test_plot_data_csv(self, tmp_path):
        out_csv = tmp_path / "segments.csv"
        code, _, _ = run_cli(
            ["analyze", fixture_path("example_b1"), "--plot-data", str(out_csv)]
        )
        assert code == 0
        with open(out_csv, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "family",
            "kind",
            "t0",
            "t1",
            "u0",
            "u1",
            "x0",
            "y0",
            "z0",
            "x1",
            "y1",
            "z1",
        ]
        body = rows[1:]
        assert body, "plot CSV has no data rows"
        assert {r[0] for r in body} <= {"S", "T", "U"}
        kinds = {r[1] for r in body}
        assert "member" in kinds
        assert kinds <= {"member", "focal_line", "focal_conic", "focal_point"}
        assert all(len(r) == 12 for r in body)
        # every numeric cell parses as a float (affine chart coordinates)
        for r in body[:20]:
            for cell in r[2:]:
                float(cell)


# ---------------------------------------------------------------------------
# invert
# ---------------------------------------------------------------------------


class TestInvert:
    def test_example_human_output(self):
        code, out, err = run_cli(["invert", fixture_path("example_b1")])
        assert code == 0 and err == ""
        lines = out.splitlines()
        prefixes = [ln.split(" = ")[0] for ln in lines[:6]]
        assert prefixes == ["s0", "s1", "t0", "t1", "u0", "u1"]
        assert "reference equivalence (s): [[-1, 0], [0, -1]]" in out
        assert "reference equivalence (t): [[1, 0], [0, 1]]" in out
        assert "reference equivalence (u): [[-2, 0], [0, -2]]" in out

    def test_json_output(self):
        code, out, _ = run_cli(["invert", fixture_path("example_b1"), "--json"])
        assert code == 0
        doc = json.loads(out)
        assert sorted(doc) == [
            "components",
            "degrees",
            "name",
            "reference_equivalent",
            "reference_witnesses",
        ]
        assert doc["degrees"] == [1, 2, 2]
        assert doc["reference_equivalent"] is True
        assert sorted(doc["components"]) == ["s", "t", "u"]
        assert all(len(doc["components"][b]) == 2 for b in "stu")
        wit = doc["reference_witnesses"]
        assert len(wit) == 3
        assert all(len(N) == 2 and all(len(row) == 2 for row in N) for N in wit)
        assert wit[0] == [["-1", "0"], ["0", "-1"]]

    def test_no_reference_block_prints_no_witnesses(self):
        code, out, err = run_cli(["invert", fixture_path("tensor_class4")])
        assert code == 0 and err == ""
        assert "reference equivalence" not in out

    def test_out_of_span_reference_exit_1(self, tmp_path):
        src = open(fixture_path("example_b1"), encoding="utf-8").read()
        bad = src.replace("inverse_s0: x2 - x3", "inverse_s0: x0")
        assert bad != src
        code, out, err = run_cli(["invert", write_map(tmp_path, bad)])
        assert code == 1
        assert "s0 = " in out  # components still printed
        assert "reference inverse NOT equivalent" in err

    def test_corrupted_fixture_is_still_span_equivalent(self):
        # The tampered component stays inside the pencil spanned by the true
        # pair, so pencil equivalence holds; the corruption only shows up in
        # the composition checks run by the `check` subcommand.
        code, out, err = run_cli(["invert", fixture_path("corrupted_inverse")])
        assert code == 0 and err == ""
        assert "reference equivalence (s):" in out

    def test_not_birational_exit_2(self):
        code, _, err = run_cli(["invert", fixture_path("involution_2to1")])
        assert code == 2
        assert err.startswith("not birational:")


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


class TestCheck:
    def test_example_all_green(self):
        code, out, err = run_cli(
            ["check", fixture_path("example_b1"), "--samples", "10", "--seed", "7"]
        )
        assert code == 0 and err == ""
        for fam in "STU":
            assert f"klein identity {fam}: ok" in out
            assert f"route agreement {fam}: ok" in out
            assert f"incidence {fam}: ok" in out
        assert "inverse composition: True" in out
        assert "reference equivalent: True" in out
        assert "reference composition: True" in out
        assert "sampled round trips: 10/10 (seed 7)" in out
        assert f"expected label: ok ({EXAMPLE_LABEL})" in out
        assert out.rstrip().endswith("all checks passed")

    def test_corrupted_reference_fails_composition(self):
        code, out, err = run_cli(
            ["check", fixture_path("corrupted_inverse"), "--samples", "5", "--seed", "7"]
        )
        assert code == 1
        # structural checks still pass; the reference composition does not
        assert "reference equivalent: True" in out
        assert "reference composition: False" in out
        assert "sampled round trips: 0/5 (seed 7)" in out
        assert "FAIL: reference inverse fails the composition identity" in err
        assert "round trip failed" in err

    @pytest.mark.parametrize(
        "stem", ["tensor_class4", "t112_class1", "t222_class1"]
    )
    def test_fixtures_without_reference(self, stem):
        code, out, err = run_cli(
            ["check", fixture_path(stem), "--samples", "3", "--seed", "5"]
        )
        assert code == 0 and err == ""
        assert "reference equivalent" not in out
        assert "sampled round trips: 3/3 (seed 5)" in out
        assert "all checks passed" in out

    def test_rejects_nonpositive_samples(self):
        code, _, err = run_cli(
            ["check", fixture_path("example_b1"), "--samples", "0"]
        )
        assert code == 1
        assert "--samples must be >= 1" in err

    def test_not_birational_exit_2(self):
        code, _, err = run_cli(["check", fixture_path("involution_2to1")])
        assert code == 2
        assert err.startswith("not birational:")


# ---------------------------------------------------------------------------
# Entry point plumbing
# ---------------------------------------------------------------------------


class TestEntryPoint:
    def test_version_flag(self):
        code, out, _ = run_cli(["--version"])
        assert code == 0
        assert out.strip() == "tricong 1.0.0"

    def test_command_required(self):
        code, _, err = run_cli([])
        assert code == 2
        assert "usage:" in err

    def test_unknown_command_rejected(self):
        code, _, err = run_cli(["frobnicate"])
        assert code == 2
        assert "invalid choice" in err

    def test_console_script(self):
        proc = subprocess.run(
            [sys.executable, "-m", "tricong.cli", "analyze", fixture_path("example_b1")],
            capture_output=True,
            text=True,
            timeout=120,
        )
        assert proc.returncode == 0
        assert f"label: {EXAMPLE_LABEL}" in proc.stdout
