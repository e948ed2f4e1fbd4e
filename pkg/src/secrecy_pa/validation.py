"""Input checks shared by the estimators and the harness."""

import numpy as np

from .exceptions import PreconditionError
from .model import ChannelRealization, SystemConfig


def check_beta_open(beta):
    if not 0.0 < beta < 1.0:
        raise PreconditionError(f"beta must lie in (0, 1), got {beta}")
    return float(beta)


def check_config(cfg):
    if not isinstance(cfg, SystemConfig):
        raise PreconditionError(f"expected SystemConfig, got {type(cfg).__name__}")
    return cfg


def check_channel(chan, cfg):
    """Verify channel shapes against ``cfg`` and that entries are finite."""
    if not isinstance(chan, ChannelRealization):
        raise PreconditionError(f"expected ChannelRealization, got {type(chan).__name__}")
    shapes = {
        "h_bob": (cfg.n_rx_bob, cfg.n_tx),
        "h_eve": (cfg.n_rx_eve, cfg.n_tx),
        "t_an": (cfg.n_tx, cfg.n_tx),
    }
    for name, shape in shapes.items():
        arr = getattr(chan, name)
        if np.shape(arr) != shape:
            raise PreconditionError(f"{name} has shape {np.shape(arr)}, expected {shape}")
        if not np.all(np.isfinite(arr)):
            raise PreconditionError(f"{name} has non-finite entries")
    return chan
