from __future__ import annotations

import pytest

from clusterfibre.poly_frontend import picture_from_dsl

FIGURE_CURVES = {
    "two_orbit": "(x^3-p^2)*(x^4-p^11)",
    "nested": "((x^3-p)^3-p^15)*((x-1)^4-p^9)",
    "three_children": "(x^3-p^4)((x-1)^3-p^17)((x-2)^3-p^13)",
    "twin_orbit": "(x^3-p)((x^3-p^4)^2-p^9)",
    "ubereven": "((x^2-p)^2+p^4)((x-1)^2-p^3)",
    "two_odd": "x(x^2-p)((x-1)^3-p^2)",
}


@pytest.fixture
def pic():
    return picture_from_dsl


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
