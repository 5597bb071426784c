"""Reference limits for QPSK discrimination: Helstrom minimum error and heterodyne benchmark."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock_core import PskAlphabet, coherent_overlap


@dataclass(frozen=True)
class GramSpectrum:
    """Eigenvalues of the alphabet's Gram matrix (circulant for symmetric ensembles)."""

    eigenvalues: np.ndarray

    def __post_init__(self) -> None:
        lam = np.asarray(self.eigenvalues, dtype=float)
        if np.any(lam < -1e-12):
            raise ValueError("Gram eigenvalue negative beyond tolerance")
        lam = np.clip(lam, 0.0, None)
        if abs(lam.sum() - lam.size) > 1e-10:
            raise ValueError("Gram eigenvalues must sum to M (unit-norm states)")
        object.__setattr__(self, "eigenvalues", lam)


def _require_uniform_qpsk(alphabet: PskAlphabet) -> None:
    if alphabet.M != 4:
        raise ValueError("these limits are implemented for the M = 4 alphabet")
    if any(abs(p - 0.25) > 1e-12 for p in alphabet.priors):
        raise ValueError("these limits assume uniform priors")


def gram_spectrum(alphabet: PskAlphabet) -> GramSpectrum:
    """Circulant Gram eigenvalues lambda_k = sum_j exp(2i*pi*j*k/M) <alpha_0|alpha_j>."""
    M = alphabet.M
    overlaps = [coherent_overlap(alphabet.amplitude(0), alphabet.amplitude(j)) for j in range(M)]
    if M == 4:
        # integer powers of i are exact, so degenerate ensembles (alpha -> 0)
        # keep eigenvalues that are exactly zero instead of sqrt-amplified noise
        twiddle = [[1j ** ((j * k) % 4) for j in range(4)] for k in range(4)]
    else:
        twiddle = [[np.exp(2j * np.pi * j * k / M) for j in range(M)] for k in range(M)]
    lam = np.array([sum(w * o for w, o in zip(row, overlaps)) for row in twiddle])
    if np.max(np.abs(lam.imag)) > 1e-10:
        raise ValueError("circulant eigenvalues acquired a non-real part; overlaps inconsistent")
    return GramSpectrum(eigenvalues=lam.real)


def helstrom_qpsk(alphabet: PskAlphabet) -> float:
    """Minimum average error probability for the uniform QPSK ensemble.

    For equiprobable symmetric pure states the square-root measurement is
    optimal, giving P_e = 1 - (1/M^2) (sum_k sqrt(lambda_k))^2 in terms of the
    circulant Gram eigenvalues.
    """
    _require_uniform_qpsk(alphabet)
    lam = gram_spectrum(alphabet).eigenvalues
    return 1.0 - float(np.sqrt(lam).sum() / alphabet.M) ** 2


def heterodyne_qpsk(alphabet: PskAlphabet) -> float:
    """Error probability of the heterodyne receiver on the uniform QPSK ensemble.

    Outcome density (1/pi) exp(-|z - alpha_m|^2) with nearest-symbol angular
    decision wedges; rotating the wedge onto the quadrature axes factorizes the
    success probability into [ (1/2)(1 + erf(alpha/sqrt(2))) ]^2.
    """
    _require_uniform_qpsk(alphabet)
    half = 0.5 * (1.0 + math.erf(alphabet.alpha / math.sqrt(2.0)))
    return 1.0 - half * half
