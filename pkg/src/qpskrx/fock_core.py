"""Truncated Fock-space numerics for displaced and squeezed coherent states."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# A coherent field amplitude is dimensionless and carries (re, im); the
# built-in complex type already is exactly that.
ComplexAmplitude = complex

TWO_PI = 2.0 * math.pi
DEFAULT_N_MAX = 100
HERMITE_MAX_DEGREE = 200
# |g_n| peaks near exp(|beta|^2); below this the direct recurrence cannot overflow
_DIRECT_BETA_SQ_MAX = 300.0


@dataclass(frozen=True)
class PskAlphabet:
    """Phase-shift-keyed alphabet: symbol m has amplitude alpha * u**m, u = exp(2i*pi/M).

    ``priors`` holds the a priori symbol probabilities; an empty tuple selects
    the uniform distribution.
    """

    M: int = 4
    alpha: float = 1.0
    priors: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError("M must be a positive integer")
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ValueError("alpha must be finite and >= 0")
        if not self.priors:
            object.__setattr__(self, "priors", (1.0 / self.M,) * self.M)
        if len(self.priors) != self.M:
            raise ValueError("priors must have length M")
        if min(self.priors) < 0.0 or abs(math.fsum(self.priors) - 1.0) > 1e-12:
            raise ValueError("priors must be nonnegative and sum to 1 within 1e-12")

    def amplitude(self, m: int) -> ComplexAmplitude:
        """Coherent amplitude of symbol m."""
        m = m % self.M
        if self.M == 4:
            # integer powers of i are exact, so nulling differences cancel exactly
            return complex(self.alpha) * 1j**m
        return self.alpha * cmath.exp(2j * math.pi * m / self.M)

    def amplitudes(self) -> np.ndarray:
        """All M symbol amplitudes as a complex vector."""
        return np.array([self.amplitude(m) for m in range(self.M)])


@dataclass(frozen=True)
class SqueezeParam:
    """Squeezing xi = r * exp(i*phi) with magnitude r >= 0 and phase phi in [0, 2*pi)."""

    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r >= 0.0):
            raise ValueError("squeezing magnitude r must be finite and >= 0")
        if not math.isfinite(self.phi):
            raise ValueError("squeezing phase phi must be finite")
        object.__setattr__(self, "phi", self.phi % TWO_PI)

    @property
    def mu(self) -> float:
        """cosh r."""
        return math.cosh(self.r)

    @property
    def kappa(self) -> complex:
        """exp(i*phi) * sinh r."""
        return cmath.exp(1j * self.phi) * math.sinh(self.r)


@dataclass(frozen=True)
class FockVector:
    """Truncated photon-number expansion plus its missing-norm diagnostic.

    ``tail_norm`` is 1 - sum |c_n|^2, the probability weight lost to the
    truncation at n_max.
    """

    coeffs: np.ndarray
    n_max: int
    tail_norm: float

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.n_max + 1,):
            raise ValueError("coeffs must have length n_max + 1")
        # written as a negated >= so a nan tail (non-finite coefficients) fails too
        if not (self.tail_norm >= -1e-9):
            raise ValueError(
                "norm exceeds 1 beyond tolerance or is not finite; coefficients are inconsistent"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def norm_sq(self) -> float:
        """Captured probability weight sum |c_n|^2."""
        return 1.0 - self.tail_norm


def hermite_eval(n: int, z: ComplexAmplitude) -> ComplexAmplitude:
    """Physicists' Hermite polynomial H_n(z) by the three-term recurrence.

    H_0 = 1, H_1 = 2z, H_{n+1}(z) = 2z H_n(z) - 2n H_{n-1}(z).
    """
    if n < 0:
        raise ValueError("n must be a nonnegative integer")
    if n > HERMITE_MAX_DEGREE:
        raise ValueError(f"n={n} exceeds the supported degree {HERMITE_MAX_DEGREE}")
    if n == 0:
        return 1.0 + 0j
    h_prev: complex = 1.0 + 0j
    h: complex = 2.0 * complex(z)
    for k in range(1, n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
    if not cmath.isfinite(h):
        raise OverflowError(
            "Hermite recurrence overflowed; evaluate a rescaled form such as "
            "s**n * H_n(z) with a damping factor |s| < 1 instead"
        )
    return h


def squeezed_coherent_fock(xi: SqueezeParam, beta: ComplexAmplitude, n_max: int) -> FockVector:
    """Fock coefficients of the squeezed coherent state |xi; beta>.

    The coefficients are

        c_n = exp(-|beta|^2/2 + beta^2 conj(kappa)/(2 mu))
              * (1/sqrt(n! mu)) * (kappa/(2 mu))^(n/2) * H_n(beta/sqrt(2 mu kappa))

    with mu = cosh r and kappa = exp(i*phi) sinh r, evaluated through the
    equivalent scaled recurrence

        g_0 = 1,  g_1 = beta/mu,
        g_{n+1} = (beta/mu) g_n / sqrt(n+1) - (kappa/mu) sqrt(n/(n+1)) g_{n-1},
        c_n = exp(-|beta|^2/2 + beta^2 conj(kappa)/(2 mu)) g_n / sqrt(mu).

    The recurrence never forms n!, H_n, or sqrt(kappa) separately, so every
    intermediate stays bounded for physical amplitudes and the half-integer
    power of kappa introduces no branch ambiguity (the printed pairing of
    (kappa/2mu)^(n/2) with H_n(beta/sqrt(2 mu kappa)) is branch-independent;
    any consistent square root gives the same product).  At kappa -> 0 the
    recurrence reduces continuously to the coherent-state coefficients
    beta^n / sqrt(n!), so no special-casing of small squeezing is needed.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    mu = xi.mu
    kappa = xi.kappa
    beta = complex(beta)
    log_pref = -abs(beta) ** 2 / 2.0 + beta * beta * kappa.conjugate() / (2.0 * mu)
    if abs(beta) ** 2 <= _DIRECT_BETA_SQ_MAX:
        g = np.zeros(n_max + 1, dtype=complex)
        g[0] = 1.0
        if n_max >= 1:
            g[1] = beta / mu
        for n in range(1, n_max):
            g[n + 1] = (beta / mu) * g[n] / math.sqrt(n + 1) - (kappa / mu) * math.sqrt(
                n / (n + 1)
            ) * g[n - 1]
        coeffs = cmath.exp(log_pref) * g / math.sqrt(mu)
    else:
        coeffs = _rescaled_coeffs(mu, kappa, beta, log_pref, n_max)
    tail_norm = 1.0 - float(np.sum(np.abs(coeffs) ** 2))
    return FockVector(coeffs=coeffs, n_max=n_max, tail_norm=tail_norm)


def _rescaled_coeffs(
    mu: float, kappa: complex, beta: complex, log_pref: complex, n_max: int
) -> np.ndarray:
    """g recurrence with running rescaling for very large |beta|.

    |g_n| peaks near exp(|beta|^2) before the prefactor cancels it back below
    1, so for |beta|^2 beyond a few hundred the direct recurrence overflows.
    Keeping |g| inside [1e-200, 1e200] by power-of-ten shifts folded into the
    prefactor exponent makes every intermediate finite; each coefficient is
    materialized with the shift current at its own step.
    """
    log10 = math.log(10.0)
    coeffs = np.zeros(n_max + 1, dtype=complex)
    shift = 0.0
    g_prev: complex = 0j
    g_cur: complex = 1.0 + 0j
    sqrt_mu = math.sqrt(mu)
    coeffs[0] = cmath.exp(log_pref) / sqrt_mu
    for n in range(n_max):
        g_next = (beta / mu) * g_cur / math.sqrt(n + 1) - (kappa / mu) * math.sqrt(
            n / (n + 1)
        ) * g_prev
        g_prev, g_cur = g_cur, g_next
        big = max(abs(g_prev), abs(g_cur))
        if big > 1e200:
            g_prev *= 1e-200
            g_cur *= 1e-200
            shift += 200.0 * log10
        elif 0.0 < big < 1e-200:
            g_prev *= 1e200
            g_cur *= 1e200
            shift -= 200.0 * log10
        arg = log_pref + shift
        # deep in the suppressed head of the distribution the coefficient
        # underflows to an exact 0, which is the correct truncated value
        coeffs[n + 1] = 0j if arg.real < -745.0 else g_cur * cmath.exp(arg) / sqrt_mu
    return coeffs


def coherent_overlap(a: ComplexAmplitude, b: ComplexAmplitude) -> complex:
    """Inner product <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) * b)."""
    a = complex(a)
    b = complex(b)
    return cmath.exp(-abs(a) ** 2 / 2.0 - abs(b) ** 2 / 2.0 + a.conjugate() * b)
