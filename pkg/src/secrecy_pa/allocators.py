"""Power-allocation strategies between the data signal and artificial noise.

Each strategy is available as a function returning an
:class:`AllocationOutcome` and as a scikit-learn style estimator whose
``fit(channel, config)`` stores the outcome in ``outcome_`` / ``beta_``.
The estimators carry their hyper-parameters through ``get_params`` so the
experiment harness can clone and re-seed them per channel.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, clone

from .exceptions import PreconditionError
from .model import build_alphabet
from .rates import (
    CutoffSurrogate,
    MonteCarloSpec,
    SecrecyCurve,
    approx_secrecy_rate,
    interference_covariances,
)
from .validation import check_beta_open, check_channel, check_config

__all__ = [
    "BETA_MIN",
    "BETA_MAX",
    "ProductCoefficients",
    "AllocationOutcome",
    "product_coefficients",
    "product_objective",
    "product_root",
    "max_p_sinr_ansnr",
    "gradient_ascent",
    "exhaustive_search",
    "beta_grid",
    "fixed_beta",
    "BaseAllocator",
    "MaxProductAllocator",
    "GradientAscentAllocator",
    "ExhaustiveSearchAllocator",
    "FixedAllocator",
    "make_allocator",
]

BETA_MIN = 1e-6
BETA_MAX = 1.0 - 1e-6
METHODS = ("max_p", "gd", "es", "fixed")


@dataclass(frozen=True)
class ProductCoefficients:
    """Coefficients of ``f(beta) = SINR_B(beta) * ANSNR_E(beta)``."""

    a_b: float
    a_e: float
    b_b: float
    c_b: float
    b_e: float
    c_e: float

    @property
    def a(self):
        return self.c_b * self.b_e - self.c_e * self.b_b

    @property
    def b(self):
        return self.c_e * self.b_b + self.c_e * self.c_b


@dataclass
class AllocationOutcome:
    beta: float
    method: str
    surrogate_value: float
    diagnostics: dict = field(default_factory=dict)


def _clamp(beta):
    return float(min(max(beta, BETA_MIN), BETA_MAX))


def product_coefficients(chan, cfg):
    P = cfg.total_power
    c_bob, c_eve = interference_covariances(chan)
    return ProductCoefficients(
        a_b=P * np.linalg.norm(chan.h_bob) ** 2 / cfg.n_tx,
        a_e=P * np.trace(c_eve).real,
        b_b=P * max(np.trace(c_bob).real, 0.0),
        c_b=cfg.n_rx_bob * cfg.sigma2_bob,
        b_e=P * np.linalg.norm(chan.h_eve) ** 2 / cfg.n_tx,
        c_e=cfg.n_rx_eve * cfg.sigma2_eve,
    )


def product_objective(coeffs, beta):
    """SINR-times-ANSNR product; vectorized over ``beta``."""
    beta = np.asarray(beta, dtype=float)
    k = coeffs
    num = k.a_b * k.a_e * beta * (1.0 - beta)
    den = ((1.0 - beta) * k.b_b + k.c_b) * (beta * k.b_e + k.c_e)
    return num / den


def product_root(coeffs):
    """Interior stationary point of the product objective.

    Uses ``b / (b + sqrt(b^2 + a b))``, the rationalized root of
    ``a beta^2 + 2 b beta - b = 0``; it stays finite when ``a`` is zero or
    negative.
    """
    a, b = coeffs.a, coeffs.b
    return b / (b + np.sqrt(b * b + a * b))


def max_p_sinr_ansnr(chan, cfg):
    """Closed-form allocation maximizing Bob's SINR times Eve's ANSNR."""
    coeffs = product_coefficients(chan, cfg)
    degenerate = coeffs.a_b * coeffs.a_e == 0.0
    beta = 0.5 if degenerate else _clamp(product_root(coeffs))
    return AllocationOutcome(
        beta=beta,
        method="max_p",
        surrogate_value=float(product_objective(coeffs, beta)),
        diagnostics={"a": coeffs.a, "b": coeffs.b, "degenerate": degenerate},
    )


def gradient_ascent(chan, cfg, alphabet, step0=0.1, restarts=5, max_iters=500, grad_tol=1e-6, rng=None):
    """Multi-start projected gradient ascent on the cut-off secrecy surrogate.

    Each restart draws ``beta ~ U(0.05, 0.95)`` and steps along the analytic
    gradient. The step starts at ``step0``, is halved until the surrogate does
    not decrease, and doubles after a step that needed no halving. Returns
    the best restart.
    """
    if restarts < 1:
        raise PreconditionError("restarts must be >= 1")
    if not step0 > 0:
        raise PreconditionError("step0 must be positive")
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    sur = CutoffSurrogate(chan, cfg, alphabet)
    starts = rng.uniform(0.05, 0.95, size=restarts)

    best_beta, best_val = None, -np.inf
    iterations, converged = [], []
    for beta in starts:
        beta = float(beta)
        val = float(sur.value(beta))
        done = False
        it = 0
        eta = step0
        for it in range(1, max_iters + 1):
            g = float(sur.gradient(beta))
            if abs(g) < grad_tol:
                done = True
                break
            cand = _clamp(beta + eta * g)
            cval = float(sur.value(cand))
            halved = False
            while cval < val and eta > 1e-15:
                eta *= 0.5
                halved = True
                cand = _clamp(beta + eta * g)
                cval = float(sur.value(cand))
            if cand == beta or cval < val:
                # pinned at a bound or no ascent left at machine precision
                done = True
                break
            beta, val = cand, cval
            if not halved:
                eta *= 2.0
        iterations.append(it)
        converged.append(done)
        if val > best_val:
            best_beta, best_val = beta, val

    return AllocationOutcome(
        beta=best_beta,
        method="gd",
        surrogate_value=best_val,
        diagnostics={
            "restarts": restarts,
            "iterations": iterations,
            "converged": converged,
            "hit_max_iters": not all(converged),
        },
    )


def beta_grid(grid_step):
    """Interior grid ``{g, 2g, ...}`` strictly below 1."""
    if not 0.0 < grid_step < 1.0:
        raise PreconditionError(f"grid_step must lie in (0, 1), got {grid_step}")
    n = int(np.floor((1.0 - 1e-9) / grid_step))
    return grid_step * np.arange(1, n + 1)


def exhaustive_search(chan, cfg, alphabet, grid_step=0.01, metric="mc_sr", mc=MonteCarloSpec()):
    """Grid search over beta; ties go to the smaller beta.

    ``metric`` is ``"mc_sr"`` (Monte Carlo secrecy rate with one noise set
    shared by every grid point), ``"approx_sr"`` (cut-off surrogate) or a
    callable ``beta -> float``.
    """
    betas = beta_grid(grid_step)
    if metric == "mc_sr":
        values = SecrecyCurve(chan, cfg, alphabet, mc).secrecy_rate(betas)
    elif metric == "approx_sr":
        values = np.array([approx_secrecy_rate(chan, b, cfg, alphabet) for b in betas])
    elif callable(metric):
        values = np.array([float(metric(b)) for b in betas])
    else:
        raise PreconditionError(f"unknown metric {metric!r}")
    k = int(np.argmax(values))
    return AllocationOutcome(
        beta=float(betas[k]),
        method="es",
        surrogate_value=float(values[k]),
        diagnostics={"grid_size": len(betas), "metric": metric if isinstance(metric, str) else "callable"},
    )


def fixed_beta(beta):
    check_beta_open(beta)
    return AllocationOutcome(beta=float(beta), method="fixed", surrogate_value=float("nan"))


class BaseAllocator(BaseEstimator):
    """Common ``fit`` / ``predict`` plumbing for the allocation strategies."""

    method = None

    def allocate(self, chan, cfg, alphabet):
        raise NotImplementedError

    def fit(self, chan, cfg, alphabet=None):
        """Compute the allocation for one channel realization.

        Returns:
            self, with ``outcome_`` and ``beta_`` set.
        """
        check_config(cfg)
        check_channel(chan, cfg)
        if alphabet is None:
            alphabet = build_alphabet(cfg)
        self.outcome_ = self.allocate(chan, cfg, alphabet)
        self.beta_ = self.outcome_.beta
        return self

    def predict(self, channels, cfg, alphabet=None):
        """Allocation factor for each channel in ``channels``."""
        if alphabet is None:
            alphabet = build_alphabet(cfg)
        return np.array([clone(self).fit(ch, cfg, alphabet).beta_ for ch in channels])

    @property
    def method_id(self):
        return self.method


class MaxProductAllocator(BaseAllocator):
    method = "max_p"

    def allocate(self, chan, cfg, alphabet):
        return max_p_sinr_ansnr(chan, cfg)


class GradientAscentAllocator(BaseAllocator):
    method = "gd"

    def __init__(self, step0=0.1, restarts=5, max_iters=500, grad_tol=1e-6, random_state=None):
        self.step0 = step0
        self.restarts = restarts
        self.max_iters = max_iters
        self.grad_tol = grad_tol
        self.random_state = random_state

    def allocate(self, chan, cfg, alphabet):
        return gradient_ascent(
            chan, cfg, alphabet,
            step0=self.step0,
            restarts=self.restarts,
            max_iters=self.max_iters,
            grad_tol=self.grad_tol,
            rng=np.random.default_rng(self.random_state),
        )


class ExhaustiveSearchAllocator(BaseAllocator):
    method = "es"

    def __init__(self, grid_step=0.01, metric="mc_sr", n_noise_samples=1000, random_state=None):
        self.grid_step = grid_step
        self.metric = metric
        self.n_noise_samples = n_noise_samples
        self.random_state = random_state

    def allocate(self, chan, cfg, alphabet):
        seed = 0 if self.random_state is None else self.random_state
        mc = MonteCarloSpec(self.n_noise_samples, seed)
        return exhaustive_search(chan, cfg, alphabet, self.grid_step, self.metric, mc)

    @property
    def method_id(self):
        return f"es:{self.grid_step:g}:{self.metric}"


class FixedAllocator(BaseAllocator):
    method = "fixed"

    def __init__(self, beta=0.5):
        self.beta = beta

    def allocate(self, chan, cfg, alphabet):
        return fixed_beta(self.beta)

    @property
    def method_id(self):
        return f"fixed:{self.beta:g}"


def make_allocator(method_id, n_noise_samples=1000):
    """Parse a method id such as ``max_p``, ``gd``, ``es:0.01:mc_sr`` or ``fixed:0.5``.

    ``gd`` accepts optional ``gd:<step0>:<restarts>:<max_iters>:<grad_tol>``.

    Raises:
        PreconditionError: for unknown ids or malformed parameters.
    """
    name, *args = str(method_id).strip().split(":")
    try:
        if name == "max_p" and not args:
            return MaxProductAllocator()
        if name == "gd" and len(args) <= 4:
            conv = (float, int, int, float)
            keys = ("step0", "restarts", "max_iters", "grad_tol")
            return GradientAscentAllocator(**{k: c(v) for k, c, v in zip(keys, conv, args)})
        if name == "es" and len(args) <= 2:
            grid_step = float(args[0]) if args else 0.01
            metric = args[1] if len(args) > 1 else "mc_sr"
            if metric not in ("mc_sr", "approx_sr"):
                raise ValueError(metric)
            beta_grid(grid_step)
            return ExhaustiveSearchAllocator(grid_step, metric, n_noise_samples)
        if name == "fixed" and len(args) == 1:
            beta = float(args[0])
            check_beta_open(beta)
            return FixedAllocator(beta)
    except ValueError as exc:
        raise PreconditionError(f"bad parameters in method id {method_id!r}: {exc}") from None
    raise PreconditionError(f"unknown method id {method_id!r}")
