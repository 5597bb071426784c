"""N-step feedforward receiver: split the pulse, null the leading hypothesis, update, repeat.

The pulse is split into N equal slots (stage amplitude scale 1/sqrt(N)).  Each
stage displaces by the negative of the currently most probable symbol's
amplitude, detects (on-off or photon-number-resolving), and feeds the outcome
into a Bayesian posterior update that picks the next stage's nulling target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .detector_models import DetectorModel, onoff_off_prob, pnrd_count_prob
from .fock_core import ComplexAmplitude, PskAlphabet

MODES = ("onoff", "pnrd")
EXACT_TAIL_TOL = 1e-9
_PRUNE = 1e-18


@dataclass(frozen=True)
class FeedforwardConfig:
    """Stage count N, detector mode and model, and the signal alphabet."""

    N: int
    mode: str
    det: DetectorModel
    alphabet: PskAlphabet

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class Posterior:
    """Probability vector over the M signal hypotheses."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1:
            raise ValueError("posterior must be a vector")
        if np.any(p < 0.0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("posterior must be nonnegative and sum to 1 within 1e-12")
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class ErrorEstimate:
    """Error probability with its uncertainty.

    ``std_err`` is the binomial standard error for the Monte Carlo method and
    0 for the exact method; ``trials`` is 0 for the exact method.  ``tail`` is
    the outcome-tree mass the exact enumeration left unaccounted (bounded by
    EXACT_TAIL_TOL, see exact_error_rate) and 0 for Monte Carlo.
    """

    p_error: float
    std_err: float
    method: str
    trials: int
    tail: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_error <= 1.0):
            raise ValueError("p_error must lie in [0, 1]")
        if self.std_err < 0.0:
            raise ValueError("std_err must be >= 0")
        if self.tail < 0.0:
            raise ValueError("tail must be >= 0")


def stage_amplitude(m: int, m_null: int, cfg: FeedforwardConfig) -> ComplexAmplitude:
    """Displaced amplitude (alpha_m - alpha_mnull)/sqrt(N) entering one stage's detector."""
    return (cfg.alphabet.amplitude(m) - cfg.alphabet.amplitude(m_null)) / math.sqrt(cfg.N)


def stage_likelihood(n: int, m: int, m_null: int, cfg: FeedforwardConfig) -> float:
    """P(outcome n | symbol m, stage nulling m_null)."""
    b = stage_amplitude(m, m_null, cfg)
    if cfg.mode == "onoff":
        if n not in (0, 1):
            raise ValueError("on-off outcome must be 0 (off) or 1 (on)")
        off = onoff_off_prob(b, cfg.det)
        return off if n == 0 else 1.0 - off
    return pnrd_count_prob(n, b, cfg.det)


def posterior_update(prior: Posterior, n: int, m_null: int, cfg: FeedforwardConfig) -> Posterior:
    """Bayes update of the hypothesis posterior from one stage outcome."""
    lik = np.array([stage_likelihood(n, m, m_null, cfg) for m in range(cfg.alphabet.M)])
    post = prior.probs * lik
    total = post.sum()
    if total <= 0.0:
        raise ValueError("posterior vanished: outcome inconsistent with every hypothesis")
    return Posterior(probs=post / total)


def choose_nulling(post: Posterior, stage: int) -> int:
    """Stage 1 nulls symbol 0; later stages null the posterior argmax (lowest index on ties)."""
    if stage < 1:
        raise ValueError("stage must be >= 1")
    if stage == 1:
        return 0
    return int(np.argmax(post.probs))


def _squared_distances(alphabet: PskAlphabet) -> np.ndarray:
    amps = alphabet.amplitudes()
    return np.abs(amps[:, None] - amps[None, :]) ** 2


class _AggregateLikelihood:
    """Hypothesis log-likelihoods from per-symbol nulling counts and summed outcomes.

    For nu = 0 the stage outcome distribution depends only on which symbol was
    nulled, so (c_q, S_q) - the number of stages that nulled q and the summed
    outcomes over those stages - is a sufficient statistic for the posterior:

        pnrd:  log L(m) = sum_q [ -c_q lam(m,q) + S_q log lam(m,q) ]
        onoff: log L(m) = sum_q [ -(c_q - S_q) lam(m,q) + S_q log(1 - e^{-lam(m,q)}) ]

    with lam(m,q) = eta |alpha_m - alpha_q|^2 / N, common outcome-factorial
    terms dropped, and L(m) = 0 whenever S_q > 0 for a q with lam(m,q) = 0.
    """

    def __init__(self, cfg: FeedforwardConfig):
        d2 = _squared_distances(cfg.alphabet)
        self.onoff = cfg.mode == "onoff"
        self.lam = cfg.det.eta * d2 / cfg.N
        self.zero = self.lam == 0.0
        self.log_priors = np.log(np.asarray(cfg.alphabet.priors, dtype=float))
        with np.errstate(divide="ignore"):
            if self.onoff:
                self.log_gain = np.where(self.zero, 0.0, np.log1p(-np.exp(-self.lam)))
            else:
                self.log_gain = np.where(self.zero, 0.0, np.log(self.lam))

    def __call__(self, c: np.ndarray, S: np.ndarray) -> np.ndarray:
        if self.onoff:
            ll = -self.lam @ (c - S) + self.log_gain @ S
        else:
            ll = -self.lam @ c + self.log_gain @ S
        dead = (self.zero & (S > 0)[None, :]).any(axis=1)
        ll = ll + self.log_priors
        ll[dead] = -np.inf
        return ll


def _stage_pmf(cfg: FeedforwardConfig, n_cutoff: int) -> np.ndarray:
    """pmf[q, n] = P(outcome n | true symbol index 0..M-1 nulled by q) ... shaped (M, M, n_out).

    Returns P[m, q, n]: outcome probability for true symbol m when the stage
    nulls q.  On-off outcomes are n in {0, 1}.
    """
    M = cfg.alphabet.M
    d2 = _squared_distances(cfg.alphabet)
    lam = cfg.det.eta * d2 / cfg.N
    if cfg.mode == "onoff":
        off = np.exp(-lam)
        return np.stack([off, 1.0 - off], axis=2)
    ns = np.arange(n_cutoff + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        logpmf = -lam[:, :, None] + ns[None, None, :] * np.log(lam[:, :, None]) - gammaln(
            ns + 1.0
        )[None, None, :]
    pmf = np.exp(logpmf)
    # lam = 0 stages produce outcome 0 with certainty
    zero = lam == 0.0
    pmf[zero, :] = 0.0
    pmf[zero, 0] = 1.0
    return pmf


def exact_error_rate(cfg: FeedforwardConfig) -> ErrorEstimate:
    """Exact average error by enumerating the stage-outcome tree (requires nu = 0).

    Outcome sequences that share the per-symbol nulling counts and summed
    outcomes produce identical posteriors, so the tree folds into that
    sufficient statistic.  Mass lost to the per-stage count cutoff or to the
    branch-probability floor is accounted as a tail, reported in ``tail``;
    a tail above EXACT_TAIL_TOL raises with advice to raise n_cutoff.
    """
    if cfg.det.nu != 0.0:
        raise ValueError("exact enumeration requires nu = 0; use montecarlo_error_rate")
    M = cfg.alphabet.M
    priors = np.asarray(cfg.alphabet.priors, dtype=float)
    onoff = cfg.mode == "onoff"
    n_cutoff = 1 if onoff else cfg.det.cutoff_for(_squared_distances(cfg.alphabet).max() / cfg.N)
    pmf = _stage_pmf(cfg, n_cutoff)
    loglik = _AggregateLikelihood(cfg)
    n_out = pmf.shape[2]

    # state: (c_0..c_{M-1}, S_0..S_{M-1}) -> vector of P(outcomes so far | m)
    states: dict[tuple[int, ...], np.ndarray] = {(0,) * (2 * M): np.ones(M)}
    tally = np.zeros((M, M))  # [decision, true symbol]
    with np.errstate(invalid="ignore"):
        for stage in range(1, cfg.N + 1):
            new_states: dict[tuple[int, ...], np.ndarray] = {}
            for key, mass in states.items():
                c = np.asarray(key[:M])
                S = np.asarray(key[M:])
                ll = loglik(c, S)
                alive = np.isfinite(ll)
                if alive.sum() == 1:
                    # a single surviving hypothesis stays the argmax through
                    # any further outcomes; absorb the full remaining mass
                    tally[int(np.argmax(alive))] += mass
                    continue
                q = 0 if stage == 1 else int(np.argmax(ll))
                for n in range(n_out):
                    branch = mass * pmf[:, q, n]
                    if branch.max() < _PRUNE:
                        continue
                    nk = list(key)
                    nk[q] += 1
                    nk[M + q] += n
                    nk_t = tuple(nk)
                    if nk_t in new_states:
                        new_states[nk_t] += branch
                    else:
                        new_states[nk_t] = branch
            states = new_states
        for key, mass in states.items():
            c = np.asarray(key[:M])
            S = np.asarray(key[M:])
            tally[int(np.argmax(loglik(c, S)))] += mass
    p_correct = float(priors @ np.diag(tally))
    coverage = tally.sum(axis=0)
    tail = float(priors @ (1.0 - coverage))
    if tail > EXACT_TAIL_TOL:
        raise RuntimeError(
            f"unaccounted outcome-tree tail {tail:.3e} exceeds {EXACT_TAIL_TOL:.0e}; "
            "raise the detector n_cutoff"
        )
    return ErrorEstimate(
        p_error=1.0 - p_correct, std_err=0.0, method="exact", trials=0, tail=max(tail, 0.0)
    )


def _poisson_counts(mean: np.ndarray, u: np.ndarray, k_max: int) -> np.ndarray:
    """Inverse-CDF Poisson draws (capped at k_max) from uniforms, vectorized per trial."""
    cdf = np.exp(-mean)
    pmf = cdf.copy()
    counts = np.zeros(mean.shape, dtype=np.int64)
    for k in range(1, k_max + 1):
        counts += u >= cdf
        pmf = pmf * (mean / k)
        cdf = cdf + pmf
    return counts


def _simulate_rows(U: np.ndarray, cfg: FeedforwardConfig, k_max: int) -> int:
    """Error count for one block of trials; row t of U drives trial t alone."""
    M = cfg.alphabet.M
    trials = U.shape[0]
    d2 = _squared_distances(cfg.alphabet)
    mean_by_pair = cfg.det.nu + cfg.det.eta * d2 / cfg.N  # [m, q]
    priors = np.asarray(cfg.alphabet.priors, dtype=float)
    cdf = np.cumsum(priors)
    sym = np.minimum(np.searchsorted(cdf, U[:, 0], side="right"), M - 1)
    post = np.tile(priors, (trials, 1))
    null = np.zeros(trials, dtype=np.int64)  # stage 1 nulls symbol 0
    lgam = gammaln(np.arange(k_max + 1) + 1.0)
    for stage in range(1, cfg.N + 1):
        counts = _poisson_counts(mean_by_pair[sym, null], U[:, stage], k_max)
        if cfg.mode == "onoff":
            n_obs = np.minimum(counts, 1)
        else:
            n_obs = counts
        mean_tm = mean_by_pair[:, null].T  # [trial, m]
        if cfg.mode == "onoff":
            off = np.exp(-mean_tm)
            lik = np.where(n_obs[:, None] == 0, off, 1.0 - off)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                loglik = (
                    -mean_tm
                    + n_obs[:, None] * np.log(mean_tm)
                    - lgam[n_obs][:, None]
                )
                loglik = np.where(n_obs[:, None] == 0, -mean_tm, loglik)
            lik = np.exp(loglik)
        post = post * lik
        total = post.sum(axis=1)
        if np.any(total <= 0.0):
            raise RuntimeError("posterior vanished during simulation")
        post = post / total[:, None]
        null = np.argmax(post, axis=1)
    return int(np.count_nonzero(null != sym))


def montecarlo_error_rate(
    cfg: FeedforwardConfig, trials: int, seed: int, chunk_size: int | None = None
) -> ErrorEstimate:
    """Monte Carlo estimate of the average error.

    All randomness comes from one counter-based uniform block keyed by the
    seed; row t holds trial t's draws (one for the symbol, one per stage), so
    the result is bit-identical for a given (seed, trials) no matter how the
    trials are chunked or scheduled.  Counts are drawn by Poisson inverse-CDF
    with mean nu + eta |b|^2; on-off outcomes threshold the same draw at
    n >= 1, so they are a deterministic coarsening of the PNRD outcomes.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if seed is None:
        raise ValueError("Monte Carlo requires an explicit seed")
    rng = np.random.Generator(np.random.Philox(key=seed))
    U = rng.random((trials, cfg.N + 1))
    k_max = cfg.det.cutoff_for(_squared_distances(cfg.alphabet).max() / cfg.N)
    step = trials if chunk_size is None else max(1, chunk_size)
    errors = 0
    for lo in range(0, trials, step):
        errors += _simulate_rows(U[lo : lo + step], cfg, k_max)
    p = errors / trials
    std_err = math.sqrt(p * (1.0 - p) / trials)
    return ErrorEstimate(p_error=p, std_err=std_err, method="montecarlo", trials=trials)
