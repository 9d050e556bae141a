from fractions import Fraction

import numpy as np
import pytest

from pinchtrace.numeric import random_psd, random_rational_psd, random_rational_spectral

ACCEPTANCE_LINES = []


def rel_close(a, b, rtol):
    a, b = complex(a), complex(b)
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)


@pytest.fixture
def float_pair():
    def make(dim, seed, profile="isotropic"):
        return (random_psd(dim, profile, 2 * seed), random_psd(dim, "isotropic", 2 * seed + 1))
    return make


@pytest.fixture
def exact_pair():
    """A with rational spectrum (exactly decomposable), B = L L^T."""
    def make(dim, seed):
        return random_rational_spectral(dim, seed), random_rational_psd(dim, seed + 10_000)
    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
