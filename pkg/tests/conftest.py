import json
from fractions import Fraction
from pathlib import Path

import pytest

from overconv.spectral.eigen import eigen_solve
from overconv.uoperator import u_matrix

DATA = Path(__file__).parent / "data"

# one line per acceptance criterion, filled in by tests carrying the marker
_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, text): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = dict(report.user_properties).get("criterion")
    if marker is None:
        return
    label, text = marker
    _CRITERIA[label] = ("PASS" if report.passed else "FAIL", text)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", tuple(m.args)))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")

    def key(label):
        head, _, tail = label.partition(".")
        return (int(head), tail)

    for label in sorted(_CRITERIA, key=key):
        status, text = _CRITERIA[label]
        terminalreporter.write_line(f"{status}  criterion {label}: {text}")


@pytest.fixture(scope="session")
def golden_eigen():
    return json.loads((DATA / "eigenfunctions_p5.json").read_text())


@pytest.fixture(scope="session")
def golden_spectral():
    return json.loads((DATA / "spectral_coefficients_p5.json").read_text())


@pytest.fixture(scope="session")
def U5():
    return u_matrix(5, 30, Fraction(1, 3))


@pytest.fixture(scope="session")
def eigens5(U5):
    """The ten smallest-slope eigenfunctions for p = 5, to 5^40 absolute."""
    return eigen_solve(U5, 10, 40)


def matches_golden(x, entry, relprec):
    """``x`` equals ``p^v * u`` with ``u`` known modulo ``p^relprec``, for ``entry = [v, u]``."""
    v, u = entry
    if x.is_zero() or x.valuation != v or x.relprec < relprec:
        return False
    return (x.unit - u) % x.prime ** relprec == 0
