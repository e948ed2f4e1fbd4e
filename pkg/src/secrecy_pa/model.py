"""System parameters, the spatial-modulation alphabet and channel draws."""

from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import PreconditionError
from .numerics import complex_gaussian_matrix, null_space_projector

__all__ = [
    "AN_MODES",
    "SystemConfig",
    "TransmitAlphabet",
    "ChannelRealization",
    "qpsk_constellation",
    "psk_constellation",
    "build_alphabet",
    "sample_channel",
    "noise_variance_from_snr",
]

AN_MODES = ("null_space", "isotropic")


def _is_pow2(n):
    return isinstance(n, (int, np.integer)) and n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SystemConfig:
    """Fixed experiment parameters.

    Attributes:
        n_tx: transmit antennas at Alice (power of two, >= 2).
        n_rx_bob: receive antennas at Bob.
        n_rx_eve: receive antennas at Eve.
        mod_order: constellation size (power of two, >= 2).
        total_power: total transmit power budget, shared by signal and AN.
        sigma2_bob: noise variance per receive antenna at Bob.
        sigma2_eve: noise variance per receive antenna at Eve.
    """

    n_tx: int = 4
    n_rx_bob: int = 2
    n_rx_eve: int = 2
    mod_order: int = 4
    total_power: float = 4.0
    sigma2_bob: float = 0.4
    sigma2_eve: float = 0.4

    def __post_init__(self):
        if not _is_pow2(self.n_tx) or self.n_tx < 2:
            raise PreconditionError(f"n_tx must be a power of two >= 2, got {self.n_tx}")
        if not _is_pow2(self.mod_order) or self.mod_order < 2:
            raise PreconditionError(f"mod_order must be a power of two >= 2, got {self.mod_order}")
        if self.n_rx_bob < 1 or self.n_rx_eve < 1:
            raise PreconditionError("receive antenna counts must be >= 1")
        if not self.total_power > 0:
            raise PreconditionError("total_power must be positive")
        if not (self.sigma2_bob > 0 and self.sigma2_eve > 0):
            raise PreconditionError("noise variances must be positive")

    @property
    def alphabet_size(self):
        return self.n_tx * self.mod_order

    def noise_variance(self, side):
        return self.sigma2_bob if side == "bob" else self.sigma2_eve

    def n_rx(self, side):
        return self.n_rx_bob if side == "bob" else self.n_rx_eve

    def with_snr(self, snr_db):
        """Copy with both noise variances set from ``snr_db``."""
        s2 = noise_variance_from_snr(self.total_power, snr_db)
        return replace(self, sigma2_bob=s2, sigma2_eve=s2)


@dataclass(frozen=True)
class TransmitAlphabet:
    """All ``n_tx * M`` spatial-modulation transmit vectors ``e_i * b_j``.

    Row ``k = i * M + j`` of ``vectors`` activates antenna ``i`` with symbol
    ``b_j``.
    """

    constellation: np.ndarray
    vectors: np.ndarray = field(repr=False)

    @property
    def size(self):
        return self.vectors.shape[0]

    @property
    def n_tx(self):
        return self.vectors.shape[1]

    def index(self, antenna, symbol):
        return antenna * len(self.constellation) + symbol

    def split(self, k):
        """Inverse of :meth:`index`: ``k -> (antenna, symbol)``."""
        return divmod(k, len(self.constellation))

    def differences(self):
        """Array ``d[k, l] = x_k - x_l`` with shape ``(K, K, n_tx)``."""
        X = self.vectors
        return X[:, None, :] - X[None, :, :]


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of Bob's and Eve's channels plus the AN shaping matrix."""

    h_bob: np.ndarray
    h_eve: np.ndarray
    t_an: np.ndarray
    an_mode: str = "null_space"

    def h(self, side):
        return self.h_bob if side == "bob" else self.h_eve


def qpsk_constellation():
    """Unit-energy Gray-labelled QPSK: label bits ``(hi, lo)`` map to signs of (re, im)."""
    pts = [((1 - 2 * (j >> 1)) + 1j * (1 - 2 * (j & 1))) / np.sqrt(2.0) for j in range(4)]
    return np.array(pts, dtype=np.complex128)


def psk_constellation(M):
    """Unit-energy Gray-labelled M-PSK (BPSK for M=2, the QPSK above for M=4)."""
    if M == 4:
        return qpsk_constellation()
    gray = np.arange(M) ^ (np.arange(M) >> 1)
    pts = np.empty(M, dtype=np.complex128)
    # label gray[p] sits at phase position p
    pts[gray] = np.exp(2j * np.pi * np.arange(M) / M)
    return pts


def build_alphabet(cfg, constellation=None):
    """Enumerate the spatial-modulation transmit vectors for ``cfg``."""
    if constellation is None:
        constellation = psk_constellation(cfg.mod_order)
    constellation = np.asarray(constellation, dtype=np.complex128)
    if len(constellation) != cfg.mod_order:
        raise PreconditionError("constellation size does not match mod_order")
    if abs(np.mean(np.abs(constellation) ** 2) - 1.0) > 1e-12:
        raise PreconditionError("constellation must have unit average energy")
    Nt, M = cfg.n_tx, cfg.mod_order
    X = np.zeros((Nt * M, Nt), dtype=np.complex128)
    for i in range(Nt):
        X[i * M:(i + 1) * M, i] = constellation
    X.setflags(write=False)
    return TransmitAlphabet(constellation=constellation, vectors=X)


def an_projector(h_bob, an_mode):
    """AN shaping matrix with ``trace(T T^H) = 1``."""
    n_tx = h_bob.shape[1]
    if an_mode == "null_space":
        P = null_space_projector(h_bob)
        return P / np.sqrt(np.trace(P).real)
    if an_mode == "isotropic":
        return np.eye(n_tx, dtype=np.complex128) / np.sqrt(n_tx)
    raise PreconditionError(f"unknown an_mode {an_mode!r}; expected one of {AN_MODES}")


def sample_channel(rng, cfg, an_mode="null_space"):
    """Draw i.i.d. ``CN(0, 1)`` channels for Bob and Eve and build the AN matrix.

    Raises:
        DegenerateChannelError: in null-space mode when Bob's channel has no
            usable null space. Resampling is left to the caller.
    """
    if an_mode not in AN_MODES:
        raise PreconditionError(f"unknown an_mode {an_mode!r}; expected one of {AN_MODES}")
    if an_mode == "null_space" and cfg.n_rx_bob >= cfg.n_tx:
        raise PreconditionError("null-space AN needs n_rx_bob < n_tx")
    h_bob = complex_gaussian_matrix(rng, (cfg.n_rx_bob, cfg.n_tx))
    h_eve = complex_gaussian_matrix(rng, (cfg.n_rx_eve, cfg.n_tx))
    t_an = an_projector(h_bob, an_mode)
    return ChannelRealization(h_bob=h_bob, h_eve=h_eve, t_an=t_an, an_mode=an_mode)


def noise_variance_from_snr(power, snr_db):
    """Noise variance ``P * 10**(-snr_db/10)`` for SNR defined as ``P / sigma^2``."""
    if not power > 0:
        raise PreconditionError("power must be positive")
    return power * 10.0 ** (-snr_db / 10.0)
