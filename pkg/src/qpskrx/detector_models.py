"""Detector response models: on-off and photon-number-resolving, with loss and dark counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock_core import ComplexAmplitude, FockVector, SqueezeParam

SERIES_TAIL_RTOL = 1e-12
_SERIES_MAX_TERMS = 5000


def default_n_cutoff(mean: float) -> int:
    """Count cutoff ceil(mean + 12 sqrt(mean)) + 5; the Poisson tail beyond it is < 1e-10."""
    if not (math.isfinite(mean) and mean >= 0.0):
        raise ValueError("mean must be finite and >= 0")
    return math.ceil(mean + 12.0 * math.sqrt(mean)) + 5


@dataclass(frozen=True)
class DetectorModel:
    """Quantum efficiency eta, Poissonian dark-count mean nu, and PNRD count cutoff.

    ``n_cutoff`` bounds the resolved counts in enumerations; None derives it
    per use site from :func:`default_n_cutoff` at the relevant mean.
    """

    eta: float = 1.0
    nu: float = 0.0
    n_cutoff: int | None = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.eta <= 1.0):
            raise ValueError("eta must lie in [0, 1]")
        if not (math.isfinite(self.nu) and self.nu >= 0.0):
            raise ValueError("nu must be finite and >= 0")
        if self.n_cutoff is not None and self.n_cutoff < 0:
            raise ValueError("n_cutoff must be >= 0")

    def cutoff_for(self, max_abs_sq: float) -> int:
        """Resolved-count cutoff for incident amplitudes up to |b|^2 = max_abs_sq."""
        if self.n_cutoff is not None:
            return self.n_cutoff
        return default_n_cutoff(self.nu + self.eta * max_abs_sq)


@dataclass(frozen=True)
class PovmDiagonal:
    """Fock-diagonal POVM element: weights[k] multiplies |k><k|."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1:
            raise ValueError("weights must be a vector over the Fock index")
        if np.any(w < -1e-12) or np.any(w > 1.0 + 1e-12):
            raise ValueError("POVM weights must lie in [0, 1]")
        object.__setattr__(self, "weights", np.clip(w, 0.0, 1.0))


def onoff_off_prob(beta: ComplexAmplitude, det: DetectorModel) -> float:
    """Off-outcome probability exp(-nu - eta |beta|^2) of a coherent state |beta>."""
    return math.exp(-det.nu - det.eta * abs(beta) ** 2)


def pnrd_count_prob(n: int, beta: ComplexAmplitude, det: DetectorModel) -> float:
    """Probability of resolving n counts on |beta>: Poisson with mean nu + eta |beta|^2."""
    if n < 0:
        raise ValueError("count must be >= 0")
    mean = det.nu + det.eta * abs(beta) ** 2
    if mean == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-mean + n * math.log(mean) - math.lgamma(n + 1))


def pnrd_povm_element(n: int, det: DetectorModel, k_max: int) -> PovmDiagonal:
    """Fock-diagonal weights of the PNRD outcome-n measurement operator.

    weight(k) = exp(-nu) * sum_{l=0}^{n} (nu^l / l!) C(k, n-l) eta^(n-l) (1-eta)^(k-(n-l)),
    the sum running over dark-count splittings with n - l <= k.
    """
    if n < 0:
        raise ValueError("outcome must be >= 0")
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if det.n_cutoff is not None and n > det.n_cutoff:
        raise ValueError("outcome exceeds the detector n_cutoff")
    weights = np.zeros(k_max + 1)
    for k in range(k_max + 1):
        acc = 0.0
        for l in range(n + 1):
            d = n - l  # photons genuinely detected; the rest are dark counts
            if d > k:
                continue
            acc += (
                det.nu**l
                / math.factorial(l)
                * math.comb(k, d)
                * det.eta**d
                * (1.0 - det.eta) ** (k - d)
            )
        weights[k] = math.exp(-det.nu) * acc
    return PovmDiagonal(weights=weights)


def off_prob_fock(fv: FockVector, det: DetectorModel) -> float:
    """Off-outcome probability exp(-nu) sum_n (1-eta)^n |c_n|^2 of a Fock-expanded state.

    The truncation bias is bounded by ``fv.tail_norm`` since every weight is <= 1.
    """
    n = np.arange(fv.coeffs.size)
    return math.exp(-det.nu) * float(np.sum((1.0 - det.eta) ** n * np.abs(fv.coeffs) ** 2))


def off_prob_squeezed(
    xi: SqueezeParam, m: int, alpha: float, det: DetectorModel, max_terms: int = _SERIES_MAX_TERMS
) -> float:
    """Closed-form off-outcome probability of the squeezed QPSK state |xi; alpha * i^m>.

    Evaluates

        exp(-nu - alpha^2 (1 - tanh r cos theta))
        * sum_n [(1-eta)^n / (n! mu)] (|kappa|/(2 mu))^n |H_n(w)|^2

    with theta = m*pi - phi and w = alpha exp(i theta/2) / sqrt(2 mu |kappa|);
    the phase theta pairs the symbol's quadrature with the squeezing axis so
    that the expression agrees with the Fock-expansion route for every m.
    The sum runs over the scaled terms h_n = q^(n/2) H_n(w) / sqrt(n!) with
    q = (1-eta)|kappa|/(2 mu), generated by

        h_0 = 1,  h_1 = c,
        h_{n+1} = c h_n / sqrt(n+1) - 2 q sqrt(n/(n+1)) h_{n-1},
        c = (alpha sqrt(1-eta) / mu) exp(i theta/2),

    which stays bounded for all parameters (including r -> 0, where it
    collapses to the coherent-state value exp(-nu - eta alpha^2)).  The series
    stops once a geometric ratio bound places the remaining tail below
    ``SERIES_TAIL_RTOL`` of the accumulated sum.
    """
    if not (math.isfinite(alpha) and alpha >= 0.0):
        raise ValueError("alpha must be finite and >= 0")
    mu = xi.mu
    theta = m * math.pi - xi.phi
    prefactor = math.exp(-det.nu - alpha**2 * (1.0 - math.tanh(xi.r) * math.cos(theta)))
    q = (1.0 - det.eta) * abs(xi.kappa) / (2.0 * mu)
    c = (alpha * math.sqrt(1.0 - det.eta) / mu) * _exp_i_half(theta)
    h_prev: complex = 1.0 + 0j
    total = abs(h_prev) ** 2
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    h: complex = c
    term_prev = total
    for n in range(1, max_terms + 1):
        term = abs(h) ** 2
        total += term
        # geometric tail bound: once the term ratio settles below 1, the
        # remainder is at most term * rho / (1 - rho)
        if n >= 8 and term_prev > 0.0:
            rho = term / term_prev
            if rho < 0.995 and term * rho / (1.0 - rho) < SERIES_TAIL_RTOL * total:
                break
            if term == 0.0 and term_prev == 0.0:
                break
        elif term == 0.0 and term_prev == 0.0:
            break
        h_prev, h = h, c * h / math.sqrt(n + 1) - 2.0 * q * math.sqrt(n / (n + 1)) * h_prev
        term_prev = term
    else:
        raise RuntimeError(
            f"off-probability series did not converge within {max_terms} terms; "
            "call again with a larger max_terms (n_max)"
        )
    return prefactor * total / mu


def _exp_i_half(theta: float) -> complex:
    """exp(i theta / 2)."""
    return complex(math.cos(theta / 2.0), math.sin(theta / 2.0))
