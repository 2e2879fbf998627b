from __future__ import annotations

import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fuzztarget.api_model import ApiFunction, ApiSpec, parse_api_spec, parse_type  # noqa: E402
from fuzztarget.depgraph import build_graph  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
FIXTURE_NAMES = sorted(p.name for p in FIXTURES.iterdir() if (p / "api.json").exists())


def load_spec(name: str) -> ApiSpec:
    return parse_api_spec((FIXTURES / name / "api.json").read_text(encoding="utf-8"))


def make_spec(*fns: tuple[str, list[str], str | None], library: str = "lib") -> ApiSpec:
    """Spec from (id, param type strings, return type string) triples."""
    return ApiSpec(library, "0.0.0", tuple(
        ApiFunction(fid, f"{library}::{fid}", tuple(parse_type(p) for p in params),
                    parse_type(ret) if ret else None)
        for fid, params, ret in fns
    ))


@pytest.fixture(scope="session")
def toylib_spec() -> ApiSpec:
    return load_spec("toylib")


@pytest.fixture(scope="session")
def toylib_graph(toylib_spec):
    return build_graph(toylib_spec)


requires_rustc = pytest.mark.skipif(shutil.which("rustc") is None, reason="rustc not on PATH")


# -- acceptance summary ------------------------------------------------------------

_CRITERIA: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    number = int(report.nodeid.split("test_criterion_")[1].split("_")[0])
    _CRITERIA.setdefault(number, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        outcomes = _CRITERIA[number]
        if "failed" in outcomes:
            verdict = "FAIL"
        elif all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {number}: {verdict} ({len(outcomes)} checks)")
