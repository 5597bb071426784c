"""Independent reference implementations the tests compare the package against.

Each oracle recomputes a quantity through a structurally different route
(dense matrix exponentials, eigendecompositions, 2D quadrature, brute-force
tree enumeration) so that agreement is evidence, not tautology.
"""

import math

import numpy as np
from scipy.integrate import dblquad
from scipy.linalg import expm

from qpskrx import (
    FeedforwardConfig,
    Posterior,
    PskAlphabet,
    SqueezeParam,
    choose_nulling,
    coherent_overlap,
    stage_likelihood,
)


def displaced_squeezed_fock(xi: SqueezeParam, beta: complex, dim: int) -> np.ndarray:
    """Fock coefficients of S(xi) D(beta) |0> via dense matrix exponentials.

    S(xi) = exp((conj(xi) a^2 - xi a^dag^2) / 2) applied to the displaced
    vacuum D(beta) |0>; dim must exceed the occupied levels by a comfortable
    margin for the truncated exponentials to have converged.
    """
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    adag = a.conj().T
    z = xi.r * np.exp(1j * xi.phi)
    squeeze = expm(0.5 * (np.conj(z) * (a @ a) - z * (adag @ adag)))
    displace = expm(beta * adag - np.conj(beta) * a)
    vac = np.zeros(dim, dtype=complex)
    vac[0] = 1.0
    return squeeze @ (displace @ vac)


def _gram_root(alphabet: PskAlphabet) -> np.ndarray:
    """Hermitian square root of the alphabet's Gram matrix.

    Its columns realize the states in an orthonormal basis of their span:
    column inner products reproduce the Gram matrix exactly.
    """
    amps = alphabet.amplitudes()
    G = np.array([[coherent_overlap(x, y) for y in amps] for x in amps])
    vals, vecs = np.linalg.eigh(G)
    return vecs @ np.diag(np.sqrt(np.clip(vals.real, 0.0, None))) @ vecs.conj().T


def srm_error(alphabet: PskAlphabet) -> float:
    """Square-root-measurement error via numerical eigendecomposition."""
    root = _gram_root(alphabet)
    return 1.0 - float(np.mean(np.abs(np.diag(root)) ** 2))


def srm_optimality_residuals(alphabet: PskAlphabet) -> tuple[float, float]:
    """Optimality-condition residuals of the square-root measurement.

    For a minimum-error measurement the operator Y = sum_m p_m rho_m Pi_m is
    Hermitian and Y - p_j rho_j is positive semidefinite for every j.  In the
    Gram-root representation the SRM projectors are the computational basis,
    so both conditions reduce to small-matrix algebra.  Returns the maximum
    Hermiticity defect and the minimum eigenvalue across all j; both are ~0
    (the latter bounded below by roundoff) iff the measurement is optimal.
    """
    M = alphabet.M
    root = _gram_root(alphabet)
    p = np.asarray(alphabet.priors, dtype=float)
    Y = np.zeros((M, M), dtype=complex)
    for m in range(M):
        E = np.zeros((M, M))
        E[m, m] = 1.0
        Y += p[m] * np.outer(root[:, m], root[:, m].conj()) @ E
    herm_defect = float(np.max(np.abs(Y - Y.conj().T)))
    H = 0.5 * (Y + Y.conj().T)
    min_eig = min(
        float(np.linalg.eigvalsh(H - p[j] * np.outer(root[:, j], root[:, j].conj())).min())
        for j in range(M)
    )
    return herm_defect, min_eig


def heterodyne_wedge_error(alphabet: PskAlphabet) -> float:
    """Heterodyne error by polar 2D quadrature over one decision wedge.

    Integrates the outcome density (1/pi) exp(-|z - alpha|^2) of symbol 0
    over its nearest-symbol wedge |arg z| < pi/4; by symmetry the success
    probability is the same for every symbol.
    """
    a = alphabet.alpha
    p_correct, _ = dblquad(
        lambda r, th: (r / math.pi)
        * math.exp(-((r * math.cos(th) - a) ** 2) - (r * math.sin(th)) ** 2),
        -math.pi / 4.0,
        math.pi / 4.0,
        0.0,
        a + 9.0,
        epsabs=1e-12,
        epsrel=1e-10,
    )
    return 1.0 - p_correct


def feedforward_tree_error(cfg: FeedforwardConfig) -> float:
    """Average feedforward error by brute-force recursion over outcome sequences.

    Walks every stage-outcome sequence explicitly (no sufficient-statistic
    folding, no pruning), carrying the shared posterior path and the per-symbol
    sequence probability.  Counts are enumerated up to the same detector cutoff
    the exact enumeration derives, so truncated mass (< 1e-9) is counted as
    error in both routes.  Exponential in N; use only for small N.
    """
    M = cfg.alphabet.M
    amps = cfg.alphabet.amplitudes()
    d2_max = float(np.max(np.abs(amps[:, None] - amps[None, :]) ** 2))
    n_cutoff = cfg.det.cutoff_for(d2_max / cfg.N)
    outs = (0, 1) if cfg.mode == "onoff" else tuple(range(n_cutoff + 1))
    priors = np.asarray(cfg.alphabet.priors, dtype=float)
    correct = 0.0

    def recurse(stage: int, post: Posterior, prob_by_m: np.ndarray) -> None:
        nonlocal correct
        if stage > cfg.N:
            decision = int(np.argmax(post.probs))
            correct += priors[decision] * prob_by_m[decision]
            return
        q = choose_nulling(post, stage)
        for n in outs:
            lik = np.array([stage_likelihood(n, m, q, cfg) for m in range(M)])
            branch = prob_by_m * lik
            if branch.max() <= 0.0:
                continue
            scaled = post.probs * lik
            total = scaled.sum()
            if total <= 0.0:
                continue
            recurse(stage + 1, Posterior(probs=scaled / total), branch)

    recurse(1, Posterior(probs=priors), np.ones(M))
    return 1.0 - correct
