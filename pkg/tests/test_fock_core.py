"""Fock-space primitives: alphabet geometry, squeezed-coherent expansions, overlaps."""

import cmath
import math

import numpy as np
import pytest
from numpy.polynomial import hermite as np_hermite
from scipy.special import gammaln

import oracles
from conftest import qpsk
from qpskrx import (
    FockVector,
    PskAlphabet,
    SqueezeParam,
    coherent_overlap,
    hermite_eval,
    squeezed_coherent_fock,
)
from qpskrx.fock_core import HERMITE_MAX_DEGREE, _rescaled_coeffs


def test_alphabet_amplitudes_sit_on_quadrature_axes():
    ab = PskAlphabet(alpha=1.2)
    assert ab.M == 4
    assert ab.priors == (0.25, 0.25, 0.25, 0.25)
    assert list(ab.amplitudes()) == [1.2 + 0j, 1.2j, -1.2 + 0j, -1.2j]
    # integer powers of i keep nulling differences exact
    assert ab.amplitude(1) - ab.amplitude(1) == 0j
    assert ab.amplitude(5) == ab.amplitude(1)


def test_alphabet_validation():
    with pytest.raises(ValueError):
        PskAlphabet(M=0)
    with pytest.raises(ValueError):
        PskAlphabet(alpha=-0.1)
    with pytest.raises(ValueError):
        PskAlphabet(alpha=math.inf)
    with pytest.raises(ValueError):
        PskAlphabet(priors=(0.5, 0.5))
    with pytest.raises(ValueError):
        PskAlphabet(priors=(0.5, 0.5, 0.25, 0.25))
    custom = PskAlphabet(priors=(0.1, 0.2, 0.3, 0.4))
    assert math.isclose(sum(custom.priors), 1.0)


def test_squeeze_param_normalizes_phase_and_rejects_negative_r():
    xi = SqueezeParam(r=0.3, phi=-1.0)
    assert 0.0 <= xi.phi < 2.0 * math.pi
    assert math.isclose(xi.phi, 2.0 * math.pi - 1.0)
    assert math.isclose(xi.mu, math.cosh(0.3))
    assert cmath.isclose(xi.kappa, cmath.exp(1j * xi.phi) * math.sinh(0.3))
    with pytest.raises(ValueError):
        SqueezeParam(r=-0.01)
    with pytest.raises(ValueError):
        SqueezeParam(r=0.1, phi=math.nan)


def test_fock_vector_rejects_bad_norm_and_shape():
    ok = FockVector(coeffs=np.array([1.0 + 0j, 0j]), n_max=1, tail_norm=0.0)
    assert ok.norm_sq == 1.0
    with pytest.raises(ValueError):
        FockVector(coeffs=np.array([1.0 + 0j]), n_max=1, tail_norm=0.0)
    with pytest.raises(ValueError):
        FockVector(coeffs=np.array([1.1 + 0j, 0j]), n_max=1, tail_norm=-0.21)
    with pytest.raises(ValueError):
        FockVector(coeffs=np.array([math.nan + 0j, 0j]), n_max=1, tail_norm=math.nan)


def test_zero_squeezing_reduces_to_poisson_amplitudes():
    beta = 0.9 - 0.35j
    fv = squeezed_coherent_fock(SqueezeParam(), beta, 40)
    ns = np.arange(41)
    expected = np.exp(-abs(beta) ** 2 / 2.0) * beta**ns / np.sqrt(
        np.array([math.factorial(int(n)) for n in ns], dtype=float)
    )
    np.testing.assert_allclose(fv.coeffs, expected, atol=1e-13)
    assert abs(fv.tail_norm) < 1e-10


def test_squeezed_vacuum_matches_analytic_even_series():
    r, phi = 0.7, 1.1
    xi = SqueezeParam(r=r, phi=phi)
    fv = squeezed_coherent_fock(xi, 0.0, 24)
    mu = math.cosh(r)
    assert np.all(fv.coeffs[1::2] == 0)
    for n in range(5):
        expected = (
            (-cmath.exp(1j * phi) * math.tanh(r)) ** n
            * math.sqrt(math.factorial(2 * n))
            / (2**n * math.factorial(n) * math.sqrt(mu))
        )
        assert cmath.isclose(fv.coeffs[2 * n], expected, abs_tol=1e-12)


@pytest.mark.parametrize(
    "r,phi,beta",
    [
        (0.3, 0.0, 0.8 + 0.4j),
        (0.9, 2.2, -1.5j),
        (1.0, 4.0, 2.0 + 0j),
        (0.0, 0.0, 1.3 - 0.2j),
    ],
)
def test_expansion_matches_matrix_exponential_oracle(r, phi, beta):
    xi = SqueezeParam(r=r, phi=phi)
    got = squeezed_coherent_fock(xi, beta, 60).coeffs[:40]
    ref = oracles.displaced_squeezed_fock(xi, beta, dim=170)[:40]
    np.testing.assert_allclose(got, ref, atol=1e-9)


def test_rescaled_recurrence_matches_direct_path():
    # same state through the direct route (public, |beta|^2 <= 300) and the
    # running-rescale route used above that threshold
    xi = SqueezeParam(r=0.8, phi=2.4)
    beta = complex(math.sqrt(299.0), 0.3)
    direct = squeezed_coherent_fock(xi, beta, 900).coeffs
    log_pref = -abs(beta) ** 2 / 2.0 + beta * beta * xi.kappa.conjugate() / (2.0 * xi.mu)
    rescaled = _rescaled_coeffs(xi.mu, xi.kappa, beta, log_pref, 900)
    np.testing.assert_allclose(rescaled, direct, atol=1e-12)


def test_huge_amplitude_stays_finite_and_matches_log_space_terms():
    beta = 45.0
    fv = squeezed_coherent_fock(SqueezeParam(), beta, 2700)
    assert np.all(np.isfinite(fv.coeffs))
    assert abs(fv.tail_norm) < 1e-9
    ns = np.arange(1900, 2151)
    analytic = np.exp(-(beta**2) / 2.0 + ns * math.log(beta) - 0.5 * gammaln(ns + 1.0))
    rel = np.abs(fv.coeffs[1900:2151].real - analytic) / analytic
    assert rel.max() < 1e-10
    assert np.max(np.abs(fv.coeffs[1900:2151].imag)) == 0.0


def test_squeezed_coherent_rejects_negative_n_max():
    with pytest.raises(ValueError):
        squeezed_coherent_fock(SqueezeParam(), 1.0, -1)


@pytest.mark.parametrize("n", [0, 1, 7, 35, 60])
@pytest.mark.parametrize("z", [0.3, -1.7, 1.2 + 0.8j])
def test_hermite_eval_matches_numpy_hermval(n, z):
    basis = np.zeros(n + 1)
    basis[n] = 1.0
    ref = np_hermite.hermval(z, basis)
    got = hermite_eval(n, z)
    assert abs(got - ref) <= 1e-10 * max(abs(ref), 1.0)


def test_hermite_eval_bounds():
    with pytest.raises(ValueError):
        hermite_eval(-1, 0.5)
    with pytest.raises(ValueError):
        hermite_eval(HERMITE_MAX_DEGREE + 1, 0.5)


def test_coherent_overlap_identities():
    a, b = 0.7 + 0.1j, -0.4 + 1.2j
    assert cmath.isclose(coherent_overlap(a, a), 1.0 + 0j, abs_tol=1e-15)
    assert math.isclose(
        abs(coherent_overlap(a, b)) ** 2, math.exp(-abs(a - b) ** 2), rel_tol=1e-12
    )
    direct = cmath.exp(-abs(a) ** 2 / 2.0 - abs(b) ** 2 / 2.0 + a.conjugate() * b)
    assert cmath.isclose(coherent_overlap(a, b), direct, rel_tol=1e-15)


def test_alphabet_m3_uses_unit_circle_roots():
    ab = PskAlphabet(M=3, alpha=1.0)
    amps = ab.amplitudes()
    assert np.allclose(np.abs(amps), 1.0)
    assert cmath.isclose(amps[1], cmath.exp(2j * math.pi / 3.0), rel_tol=1e-12)


def test_qpsk_helper_matches_energy():
    ab = qpsk(2.5)
    assert math.isclose(ab.alpha**2, 2.5, rel_tol=1e-15)
