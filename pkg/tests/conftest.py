"""Shared fixtures: catalog forms and small reference pencils."""

import numpy as np
import pytest

from shadowlab.catalog import catalog
from shadowlab.polys import Polynomial
from shadowlab.sdp import SymMatrix
from shadowlab.spectra import Pencil


@pytest.fixture(scope="session")
def motzkin() -> Polynomial:
    return catalog("motzkin").polynomial


@pytest.fixture(scope="session")
def choi_lam() -> Polynomial:
    return catalog("choi-lam").polynomial


@pytest.fixture(scope="session")
def rplus_pencil() -> Pencil:
    return Pencil(SymMatrix.zeros(1), [SymMatrix([[1.0]])])


@pytest.fixture(scope="session")
def psd2_pencil() -> Pencil:
    """Cone of PSD 2x2 matrices [[x1, x2], [x2, x3]]."""
    return Pencil(SymMatrix.zeros(2), [
        SymMatrix([[1.0, 0.0], [0.0, 0.0]]),
        SymMatrix([[0.0, 1.0], [1.0, 0.0]]),
        SymMatrix([[0.0, 0.0], [0.0, 1.0]]),
    ])


@pytest.fixture(scope="session")
def disk_cone_pencil() -> Pencil:
    """Second-order cone x1 >= sqrt(x2^2 + x3^2) as [[x1+x2, x3], [x3, x1-x2]]."""
    return Pencil(SymMatrix.zeros(2), [
        SymMatrix(np.eye(2)),
        SymMatrix([[1.0, 0.0], [0.0, -1.0]]),
        SymMatrix([[0.0, 1.0], [1.0, 0.0]]),
    ])


@pytest.fixture(scope="session")
def disk_pencil() -> Pencil:
    """Unit disk [[1+x1, x2], [x2, 1-x1]]."""
    return Pencil(SymMatrix(np.eye(2)), [
        SymMatrix([[1.0, 0.0], [0.0, -1.0]]),
        SymMatrix([[0.0, 1.0], [1.0, 0.0]]),
    ])


def poly(variables, terms):
    """Build a rational polynomial from {exp tuple: coeff}."""
    p = Polynomial.zero(variables)
    for exp, c in terms.items():
        p = p + Polynomial.monomial(variables, exp, c)
    return p


def pytest_terminal_summary(terminalreporter):
    """Echo the per-criterion pass/fail lines past output capture."""
    import sys
    lines = []
    for name, module in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance":
            lines = getattr(module, "CRITERION_LINES", [])
            if lines:
                break
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
