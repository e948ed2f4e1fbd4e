"""Mutual information, secrecy rate and cut-off-rate surrogate.

Conventions: ``side`` is ``"bob"`` or ``"eve"``; ``beta`` is the fraction of
the power budget given to the data signal, the rest going to artificial noise.
All rates are in bits per channel use.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .exceptions import PreconditionError
from .numerics import complex_gaussian_matrix, hermitian_eig, inv_sqrt_psd

__all__ = [
    "SIDES",
    "WhitenedModel",
    "MonteCarloSpec",
    "RateEstimate",
    "derive_seed",
    "interference_covariances",
    "whitened_model",
    "mc_mutual_information",
    "mc_mutual_information_unwhitened",
    "instantaneous_secrecy_rate",
    "cutoff_rate",
    "approx_secrecy_rate",
    "grad_approx_secrecy_rate",
    "CutoffSurrogate",
    "SecrecyCurve",
]

SIDES = ("bob", "eve")
LOG2E = 1.0 / np.log(2.0)

# stream tags for the per-receiver noise draws
_BOB_TAG = 0xB0B0_5EED
_EVE_TAG = 0xE7E0_5EED

# below this, a point's own term exp(t_i - m) is too small to anchor the
# factored sum and the pairwise log-sum-exp is used instead
_FACTOR_MIN_EXP = -300.0


def derive_seed(*words):
    """Mix integer words into one 64-bit seed (order sensitive)."""
    ss = np.random.SeedSequence([int(w) & 0xFFFF_FFFF_FFFF_FFFF for w in words])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class MonteCarloSpec:
    """Depth and seed of the noise expectation in the MI estimate."""

    n_noise_samples: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n_noise_samples < 1:
            raise PreconditionError("n_noise_samples must be >= 1")


@dataclass(frozen=True)
class RateEstimate:
    value: float
    std_error: float = 0.0

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class WhitenedModel:
    """Interference-plus-noise covariance at one receiver for a given beta."""

    side: str
    beta: float
    w: np.ndarray
    w_inv_sqrt: np.ndarray
    h_white: np.ndarray
    c: np.ndarray
    w_inv: np.ndarray


def _check_side(side):
    if side not in SIDES:
        raise PreconditionError(f"side must be one of {SIDES}, got {side!r}")


def _check_beta(beta, open_interval=False):
    if open_interval:
        if not 0.0 < beta < 1.0:
            raise PreconditionError(f"beta must lie in (0, 1), got {beta}")
    elif not 0.0 <= beta <= 1.0:
        raise PreconditionError(f"beta must lie in [0, 1], got {beta}")


def interference_covariances(chan):
    """AN covariances ``C_g = H_g T T^H H_g^H`` at Bob and Eve."""
    TT = chan.t_an @ chan.t_an.conj().T
    out = []
    for H in (chan.h_bob, chan.h_eve):
        C = H @ TT @ H.conj().T
        out.append(0.5 * (C + C.conj().T))
    return out[0], out[1]


def whitened_model(chan, beta, side, cfg):
    """Build ``W = (1-beta) P C + sigma^2 I`` and its whitening transform."""
    _check_beta(beta)
    _check_side(side)
    c_bob, c_eve = interference_covariances(chan)
    C = c_bob if side == "bob" else c_eve
    n = C.shape[0]
    W = (1.0 - beta) * cfg.total_power * C + cfg.noise_variance(side) * np.eye(n)
    B = inv_sqrt_psd(W)
    return WhitenedModel(
        side=side,
        beta=beta,
        w=W,
        w_inv_sqrt=B,
        h_white=B @ chan.h(side),
        c=C,
        w_inv=B @ B,
    )


def _pair_sqdist(S):
    """``D[..., i, j] = ||s_i - s_j||^2`` for column points ``S[..., r, k]``."""
    G = np.matmul(S.conj().swapaxes(-1, -2), S).real
    nrm = np.einsum("...kk->...k", G)
    D = nrm[..., :, None] + nrm[..., None, :] - 2.0 * G
    np.maximum(D, 0.0, out=D)
    idx = np.arange(D.shape[-1])
    D[..., idx, idx] = 0.0
    return D


def _log2_posterior_terms(S, noise):
    """Per-sample terms ``log2 sum_j exp(-||s_i - s_j + n||^2 + ||n||^2)``.

    Args:
        S: received constellation points, shape ``(..., n_rx, K)``.
        noise: whitened noise samples, shape ``(n_rx, n_samples)``.

    Returns:
        Array of shape ``(..., K, n_samples)``, every entry >= 0 up to rounding.

    The exponent splits as ``-D_ij - t_i + t_j`` with ``t_k = 2 Re(s_k^H n)``,
    so the inner sum is ``exp(-t_i) * (exp(-D) @ exp(t))[i]``; a per-sample
    shift by ``max_k t_k`` keeps ``exp(t)`` bounded.
    """
    t = 2.0 * np.matmul(S.conj().swapaxes(-1, -2), noise).real
    D = _pair_sqdist(S)
    m = t.max(axis=-2, keepdims=True)
    Z = np.matmul(np.exp(-D), np.exp(t - m))
    own = t - m
    with np.errstate(divide="ignore"):
        L = (m - t) * LOG2E + np.log2(Z)
    bad = own < _FACTOR_MIN_EXP
    if np.any(bad):
        # pairwise fallback for samples far from the current top point
        for idx in zip(*np.nonzero(bad)):
            *lead, i, n = idx
            lead = tuple(lead)
            e = -D[lead + (i,)] - t[lead + (i, n)] + t[lead + (slice(None), n)]
            L[idx] = logsumexp(e) * LOG2E
    return L


def _mi_from_terms(L, K):
    """MI estimate and standard error from ``(K, n_samples)`` terms."""
    per_sample = L.mean(axis=-2)
    n = per_sample.shape[-1]
    value = np.log2(K) - per_sample.mean(axis=-1)
    if n > 1:
        se = per_sample.std(axis=-1, ddof=1) / np.sqrt(n)
    else:
        se = np.full_like(value, np.inf)
    return value, se


def _whitened_noise(seed, n_rx, n_samples):
    rng = np.random.default_rng(seed)
    return complex_gaussian_matrix(rng, (n_rx, n_samples))


def mc_mutual_information(chan, beta, side, cfg, alphabet, mc=MonteCarloSpec()):
    """Monte Carlo estimate of ``I(x; y_side)`` for a uniform SM input.

    The whitened noise ``n' ~ CN(0, I)`` is drawn directly; one set of
    ``mc.n_noise_samples`` draws is shared by every transmitted vector, and the
    standard error is taken over the per-draw averages.
    """
    wm = whitened_model(chan, beta, side, cfg)
    S = np.sqrt(beta * cfg.total_power) * wm.h_white @ alphabet.vectors.T
    noise = _whitened_noise(mc.seed, S.shape[0], mc.n_noise_samples)
    value, se = _mi_from_terms(_log2_posterior_terms(S, noise), alphabet.size)
    return RateEstimate(float(value), float(se))


def mc_mutual_information_unwhitened(chan, beta, side, cfg, alphabet, mc=MonteCarloSpec()):
    """Reference MI estimator working on the raw received signal.

    Draws the physical AN and thermal noise, independently for every
    transmitted vector, and scores candidates with the Gaussian
    log-density ``-(y - mu)^H W^{-1} (y - mu)``. Slower than
    :func:`mc_mutual_information`; used to cross-check the whitening.
    """
    _check_beta(beta)
    _check_side(side)
    H = chan.h(side)
    n_rx, n_tx = H.shape
    P = cfg.total_power
    s2 = cfg.noise_variance(side)
    K, Ns = alphabet.size, mc.n_noise_samples
    rng = np.random.default_rng(mc.seed)

    c_bob, c_eve = interference_covariances(chan)
    C = c_bob if side == "bob" else c_eve
    W = (1.0 - beta) * P * C + s2 * np.eye(n_rx)
    W_inv = np.linalg.inv(W)

    mu = np.sqrt(beta * P) * alphabet.vectors @ H.T  # (K, n_rx)
    an = complex_gaussian_matrix(rng, (K, Ns, n_tx))
    thermal = complex_gaussian_matrix(rng, (K, Ns, n_rx), s2)
    v = np.sqrt((1.0 - beta) * P) * an @ (H @ chan.t_an).T + thermal
    y = mu[:, None, :] + v  # (K, Ns, n_rx)
    diff = y[:, :, None, :] - mu[None, None, :, :]  # (K, Ns, K, n_rx)
    q = np.einsum("inkr,rs,inks->ink", diff.conj(), W_inv, diff).real
    own = q[np.arange(K), :, np.arange(K)]  # (K, Ns)
    terms = logsumexp(own[:, :, None] - q, axis=-1) * LOG2E
    value = np.log2(K) - terms.mean()
    se = terms.std(ddof=1) / np.sqrt(terms.size) if terms.size > 1 else np.inf
    return RateEstimate(float(value), float(se))


def _side_seeds(seed):
    return derive_seed(seed, _BOB_TAG), derive_seed(seed, _EVE_TAG)


def instantaneous_secrecy_rate(chan, beta, cfg, alphabet, mc=MonteCarloSpec(), clip=True):
    """``max(0, I_B - I_E)`` for one channel, from independent noise streams.

    With ``clip=False`` the raw difference is returned (used when averaging
    before clipping).
    """
    seed_b, seed_e = _side_seeds(mc.seed)
    ib = mc_mutual_information(chan, beta, "bob", cfg, alphabet, MonteCarloSpec(mc.n_noise_samples, seed_b))
    ie = mc_mutual_information(chan, beta, "eve", cfg, alphabet, MonteCarloSpec(mc.n_noise_samples, seed_e))
    diff = ib.value - ie.value
    se = float(np.hypot(ib.std_error, ie.std_error))
    return RateEstimate(max(0.0, diff) if clip else diff, se)


def _log2_kappa(x):
    # x <= 0 with exact zeros on the diagonal, so the sum is >= K and the
    # log-sum-exp shift is zero
    return np.log2(np.exp(x).sum(axis=-1))


def cutoff_rate(chan, beta, side, cfg, alphabet):
    """Closed-form cut-off rate, a lower bound on the finite-alphabet MI."""
    wm = whitened_model(chan, beta, side, cfg)
    S = wm.h_white @ alphabet.vectors.T
    q = _pair_sqdist(S).reshape(-1)
    K = alphabet.size
    value = 2.0 * np.log2(K) - _log2_kappa(-beta * cfg.total_power * q / 4.0)
    return RateEstimate(float(value), 0.0)


def approx_secrecy_rate(chan, beta, cfg, alphabet):
    """Cut-off-rate secrecy surrogate ``I0_B - I0_E`` (not clipped)."""
    return (
        cutoff_rate(chan, beta, "bob", cfg, alphabet).value
        - cutoff_rate(chan, beta, "eve", cfg, alphabet).value
    )


def _quad_forms(M, d):
    """Hermitian forms ``d^H M d`` for each row of ``d``; checked to be real."""
    v = np.einsum("pa,ab,pb->p", d.conj(), M, d)
    scale = max(1.0, float(np.max(np.abs(v.real))))
    if np.max(np.abs(v.imag)) > 1e-10 * scale:
        raise ArithmeticError("quadratic form has a non-negligible imaginary part")
    return v.real


def grad_approx_secrecy_rate(chan, beta, cfg, alphabet):
    """Analytic derivative of :func:`approx_secrecy_rate` with respect to beta."""
    _check_beta(beta, open_interval=True)
    P = cfg.total_power
    d = alphabet.differences().reshape(-1, alphabet.n_tx)
    terms = {}
    for side in SIDES:
        wm = whitened_model(chan, beta, side, cfg)
        H = chan.h(side)
        HW = H.conj().T @ wm.w_inv
        q = _quad_forms(HW @ H, d)
        r = _quad_forms(HW @ wm.c @ wm.w_inv @ H, d)
        chi = 0.25 * (q + beta * P * r)
        x = -beta * P * q / 4.0
        weights = np.exp(x - logsumexp(x))
        terms[side] = float(np.dot(chi, weights))
    return P * LOG2E * (terms["bob"] - terms["eve"])


class _SideSpectrum:
    """Eigen-factorized ``W(beta)`` for one receiver, cheap to re-evaluate in beta."""

    def __init__(self, chan, side, cfg, alphabet):
        c_bob, c_eve = interference_covariances(chan)
        U, lam = hermitian_eig(c_bob if side == "bob" else c_eve)
        self.lam = np.maximum(lam, 0.0)
        self.U = U
        self.H = chan.h(side)
        self.power = cfg.total_power
        self.sigma2 = cfg.noise_variance(side)
        self.X = alphabet.vectors
        d = alphabet.differences().reshape(-1, alphabet.n_tx)
        G = U.conj().T @ self.H @ d.T  # (n_rx, K^2)
        self.Q = np.abs(G) ** 2

    def w_diag(self, beta):
        beta = np.asarray(beta, dtype=float)
        return (1.0 - beta)[..., None] * self.power * self.lam + self.sigma2

    def received_points(self, beta):
        """``sqrt(beta P) W^{-1/2} H X^T`` with shape ``beta.shape + (n_rx, K)``."""
        beta = np.asarray(beta, dtype=float)
        scale = np.sqrt(beta * self.power)[..., None] / np.sqrt(self.w_diag(beta))
        B = np.matmul(self.U * scale[..., None, :], self.U.conj().T)
        return B @ (self.H @ self.X.T)

    def quad(self, beta):
        w = self.w_diag(beta)
        q = np.matmul(1.0 / w, self.Q)
        r = np.matmul(self.lam / w**2, self.Q)
        return q, r


class CutoffSurrogate:
    """Fast evaluator of the cut-off secrecy surrogate for one channel.

    Eigendecomposes the AN covariances once so that the value and gradient
    cost two small matrix-vector products per beta. Accepts scalar or array
    ``beta``.
    """

    def __init__(self, chan, cfg, alphabet):
        self.power = cfg.total_power
        self.K = alphabet.size
        self.sides = {s: _SideSpectrum(chan, s, cfg, alphabet) for s in SIDES}

    def cutoff(self, beta, side):
        beta = np.asarray(beta, dtype=float)
        q, _ = self.sides[side].quad(beta)
        x = -beta[..., None] * self.power * q / 4.0
        return 2.0 * np.log2(self.K) - _log2_kappa(x)

    def value(self, beta):
        return self.cutoff(beta, "bob") - self.cutoff(beta, "eve")

    def gradient(self, beta):
        beta = np.asarray(beta, dtype=float)
        b = beta[..., None]
        out = 0.0
        for side, sign in (("bob", 1.0), ("eve", -1.0)):
            q, r = self.sides[side].quad(beta)
            chi = 0.25 * (q + b * self.power * r)
            x = -b * self.power * q / 4.0
            w = np.exp(x - logsumexp(x, axis=-1, keepdims=True))
            out = out + sign * (chi * w).sum(axis=-1)
        return self.power * LOG2E * out


class SecrecyCurve:
    """Monte Carlo secrecy rate on a grid of beta with common random numbers.

    One set of whitened noise draws per receiver is fixed at construction and
    reused for every beta, so differences across beta carry little noise.
    """

    def __init__(self, chan, cfg, alphabet, mc=MonteCarloSpec()):
        self.K = alphabet.size
        self.sides = {s: _SideSpectrum(chan, s, cfg, alphabet) for s in SIDES}
        seeds = dict(zip(SIDES, _side_seeds(mc.seed)))
        self.noise = {
            s: _whitened_noise(seeds[s], cfg.n_rx(s), mc.n_noise_samples) for s in SIDES
        }

    def mutual_information(self, betas, side):
        S = self.sides[side].received_points(betas)
        value, _ = _mi_from_terms(_log2_posterior_terms(S, self.noise[side]), self.K)
        return value

    def secrecy_rate(self, betas):
        """Unclipped ``I_B - I_E`` at each beta."""
        betas = np.atleast_1d(np.asarray(betas, dtype=float))
        return self.mutual_information(betas, "bob") - self.mutual_information(betas, "eve")
