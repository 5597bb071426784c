"""Three-port displacement + squeezing receiver for QPSK discrimination.

The signal passes two beam splitters (reflectances R1, R2) into ports A, B, C.
Each port applies a displacement that nulls one symbol (A nulls m=0, B nulls
m=2, C nulls m=1), optionally squeezes, and feeds an on-off detector; the
first port to fire determines the decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detector_models import DetectorModel, off_prob_fock
from .fock_core import ComplexAmplitude, PskAlphabet, SqueezeParam, squeezed_coherent_fock

PORTS = ("A", "B", "C")
NULLING_TARGETS = {"A": 0, "B": 2, "C": 1}
FOCK_TAIL_TOL = 1e-8
_MIN_PORT_N_MAX = 100
_MAX_PORT_N_MAX = 4000


class FockTruncationError(RuntimeError):
    """A port state cannot be represented below the Fock tail tolerance."""


@dataclass(frozen=True)
class StaticReceiverConfig:
    """Splitter reflectances plus per-port displacement offsets and squeezings.

    ``beta_j`` is the residual displacement offset after nulling the port's
    target symbol, so exact nulling is beta_j = 0.
    """

    R1: float = 1.0 / 3.0
    R2: float = 0.5
    beta_A: ComplexAmplitude = 0j
    beta_B: ComplexAmplitude = 0j
    beta_C: ComplexAmplitude = 0j
    xi_A: SqueezeParam = SqueezeParam()
    xi_B: SqueezeParam = SqueezeParam()
    xi_C: SqueezeParam = SqueezeParam()

    def __post_init__(self) -> None:
        if not (0.0 <= self.R1 <= 1.0 and 0.0 <= self.R2 <= 1.0):
            raise ValueError("reflectances must lie in [0, 1]")

    def port_beta(self, port: str) -> ComplexAmplitude:
        return {"A": self.beta_A, "B": self.beta_B, "C": self.beta_C}[port]

    def port_xi(self, port: str) -> SqueezeParam:
        return {"A": self.xi_A, "B": self.xi_B, "C": self.xi_C}[port]


@dataclass(frozen=True)
class ConditionalProbTable:
    """Decision probabilities: probs[m, i] = P(decide i | sent m)."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("table must be square")
        # negated np.all forms so nan entries fail the checks
        if not np.all((p >= -1e-12) & (p <= 1.0 + 1e-12)):
            raise ValueError("entries must be probabilities")
        if not np.all(np.abs(p.sum(axis=1) - 1.0) <= 1e-10):
            raise ValueError("each row must sum to 1 within 1e-10")
        object.__setattr__(self, "probs", p)


def port_effective_amplitude(
    m: int, port: str, cfg: StaticReceiverConfig, alphabet: PskAlphabet
) -> ComplexAmplitude:
    """Effective coherent amplitude reaching the given port's detector for symbol m.

    b_A(m) = sqrt(R1) (alpha_m - alpha_0) + beta_A
    b_B(m) = sqrt((1-R1) R2) (alpha_m - alpha_2) + beta_B
    b_C(m) = sqrt((1-R1)(1-R2)) (alpha_m - alpha_1) + beta_C
    """
    a_m = alphabet.amplitude(m)
    if port == "A":
        scale = math.sqrt(cfg.R1)
    elif port == "B":
        scale = math.sqrt((1.0 - cfg.R1) * cfg.R2)
    elif port == "C":
        scale = math.sqrt((1.0 - cfg.R1) * (1.0 - cfg.R2))
    else:
        raise ValueError("port must be one of 'A', 'B', 'C'")
    return scale * (a_m - alphabet.amplitude(NULLING_TARGETS[port])) + cfg.port_beta(port)


def _port_n_max(xi: SqueezeParam, amps: list[ComplexAmplitude]) -> int:
    """Fock cutoff for a port from its largest amplitude and squeezing magnitude."""
    # mean photon number of a displaced squeezed state is at most
    # |b|^2 e^{2r} + sinh^2 r; pad the Poisson-style tail rule for the
    # broader squeezed number distribution
    mean = max(abs(b) ** 2 for b in amps) * math.exp(2.0 * xi.r) + math.sinh(xi.r) ** 2
    n_max = max(_MIN_PORT_N_MAX, math.ceil(mean + 14.0 * math.sqrt(mean)) + 20)
    if n_max > _MAX_PORT_N_MAX:
        raise FockTruncationError(
            f"port state needs n_max ~ {n_max} > {_MAX_PORT_N_MAX}; "
            "amplitude or squeezing out of the supported range"
        )
    return n_max


def decision_probabilities(
    cfg: StaticReceiverConfig, alphabet: PskAlphabet, det: DetectorModel
) -> ConditionalProbTable:
    """Conditional decision probabilities of the sequential three-port measurement.

    Port off-probabilities come from the truncated Fock expansion of each
    squeezed displaced port state; the decision combines them as
    P(0|m) = pA, P(1|m) = (1-pA) pB, P(2|m) = (1-pA)(1-pB) pC,
    P(3|m) = (1-pA)(1-pB)(1-pC).
    """
    if alphabet.M != 4:
        raise ValueError("the three-port receiver is specific to M = 4")
    p_off = np.zeros((3, 4))
    for pi, port in enumerate(PORTS):
        xi = cfg.port_xi(port)
        amps = [port_effective_amplitude(m, port, cfg, alphabet) for m in range(4)]
        n_max = _port_n_max(xi, amps)
        while True:
            # strongly squeezed states decay slower than the Poisson-style
            # estimate, so escalate the cutoff instead of failing outright
            states = [squeezed_coherent_fock(xi, b, n_max) for b in amps]
            worst = max(fv.tail_norm for fv in states)
            if worst <= FOCK_TAIL_TOL:
                break
            if n_max >= _MAX_PORT_N_MAX:
                raise FockTruncationError(
                    f"port {port} Fock tail {worst:.3e} exceeds {FOCK_TAIL_TOL:.0e} "
                    f"at n_max={n_max}"
                )
            n_max = min(2 * n_max, _MAX_PORT_N_MAX)
        for m in range(4):
            p_off[pi, m] = off_prob_fock(states[m], det)
    pA, pB, pC = p_off
    table = np.stack(
        [
            pA,
            (1.0 - pA) * pB,
            (1.0 - pA) * (1.0 - pB) * pC,
            (1.0 - pA) * (1.0 - pB) * (1.0 - pC),
        ],
        axis=1,
    )
    return ConditionalProbTable(probs=table)


def static_error_rate(
    cfg: StaticReceiverConfig, alphabet: PskAlphabet, det: DetectorModel
) -> float:
    """Average error probability 1 - (1/4) sum_i P(i|i)."""
    table = decision_probabilities(cfg, alphabet, det)
    return 1.0 - float(np.mean(np.diag(table.probs)))
