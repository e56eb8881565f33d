"""Shared fixtures: corpus paths, parsed maps, cached analysis reports."""

from __future__ import annotations

import pathlib

import pytest

from tricong.classify import Report, analyze
from tricong.cli import build_map, parse_map_file
from tricong.maps import TrilinearMap

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

# Every positive fixture: (file stem, expected aggregate label).
CORPUS = (
    ("example_b1", "(1,2,2) class b.1"),
    ("tensor_class4", "(1,1,1) class 4"),
    ("t111_class1", "(1,1,1) class 1"),
    ("t111_class2", "(1,1,1) class 2"),
    ("t111_class3", "(1,1,1) class 3"),
    ("t111_class4", "(1,1,1) class 4"),
    ("t112_class1", "(1,1,2) class 1"),
    ("t112_class1b", "(1,1,2) class 1"),
    ("t112_perm", "(1,1,2) class 1"),
    ("t122_a1", "(1,2,2) class a.1"),
    ("t122_a1b", "(1,2,2) class a.1"),
    ("t122_b1", "(1,2,2) class b.1"),
    ("t222_class1", "(2,2,2) class 1"),
    ("t222_class1b", "(2,2,2) class 1"),
)

EXAMPLE_LABEL = "(1,2,2) class b.1"

EXAMPLE_COMPONENTS = (
    "s0*t0*u1 + s1*t0*u1 + s0*t1*u1",
    "s1*t0*u1 + s0*t1*u1 + 2*s1*t1*u1",
    "-s0*t1*u0 - s1*t1*u0 + s0*t0*u1 + s1*t0*u1",
    "-s1*t1*u0 + s1*t0*u1",
)


def fixture_path(stem: str) -> pathlib.Path:
    p = FIXTURES / f"{stem}.map"
    if not p.exists():
        p = FIXTURES / "negative" / f"{stem}.map"
    assert p.exists(), f"missing fixture {stem}"
    return p


@pytest.fixture(scope="session")
def example_map() -> TrilinearMap:
    return TrilinearMap.from_strings(list(EXAMPLE_COMPONENTS))


@pytest.fixture(scope="session")
def corpus_maps():
    """[(name, TrilinearMap, expected label)] for every positive fixture."""
    out = []
    for stem, label in CORPUS:
        mf = parse_map_file(str(fixture_path(stem)))
        out.append((stem, build_map(mf), label))
    return out


@pytest.fixture(scope="session")
def corpus_reports(corpus_maps):
    """{name: Report} — analysis is run once per session."""
    return {name: analyze(phi) for name, phi, _ in corpus_maps}
