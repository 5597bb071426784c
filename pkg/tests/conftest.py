"""Shared fixtures: detector defaults and the QPSK alphabet constructor."""

import math

import pytest

from qpskrx import DetectorModel, PskAlphabet


def qpsk(alpha_sq: float) -> PskAlphabet:
    """Uniform QPSK alphabet at mean photon number alpha_sq."""
    return PskAlphabet(M=4, alpha=math.sqrt(alpha_sq))


@pytest.fixture
def ideal_det() -> DetectorModel:
    return DetectorModel()
