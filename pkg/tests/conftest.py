import math

import numpy as np
import pytest

from xpulse.pulse import AxiconGeometry
from xpulse.spectrum import GaussianSpectrum, RectangularSpectrum, TabulatedSpectrum

SQRT2 = math.sqrt(2.0)


@pytest.fixture
def g45():
    return AxiconGeometry(math.pi / 4, 1.0)


@pytest.fixture
def rect1():
    return RectangularSpectrum(1.0)


@pytest.fixture
def gauss():
    return GaussianSpectrum(2.0, 0.5, 0.5, 3.5)


@pytest.fixture
def zero_spectrum():
    return TabulatedSpectrum(np.array([0.0, 1.0]), np.array([0.0, 0.0]), source="zero")


BUILTIN_SPECTRA = [RectangularSpectrum(1.0), GaussianSpectrum(2.0, 0.5, 0.5, 3.5)]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
