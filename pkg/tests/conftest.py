from __future__ import annotations

from importlib import resources

import pytest

from periodic_homology.builder import parse_template, template_from_wqg
from periodic_homology.wqg import parse_wqg

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def data_path(name: str) -> str:
    return str(resources.files("periodic_homology") / "data" / name)


def load_text(name: str) -> str:
    with open(data_path(name), encoding="utf-8") as fh:
        return fh.read()


def load_wqg(name: str):
    return parse_wqg(load_text(f"{name}.wqg.json"))


def load_template(name: str):
    if name in ("kagome", "interwoven_B", "interwoven_D"):
        return template_from_wqg(load_wqg(name))
    return parse_template(load_text(f"{name}.template.json"))


@pytest.fixture
def kagome():
    return load_wqg("kagome")


@pytest.fixture
def planes():
    return load_template("planes")


@pytest.fixture
def torus():
    return load_template("torus")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
