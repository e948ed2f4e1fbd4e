"""Seeded experiment runner: SNR sweeps, secrecy-rate CDFs, CSV output.

Every random quantity in a (SNR, channel) cell is drawn from a child seed
mixed from ``(master_seed, snr_index, channel_index, purpose)``, so results
do not depend on how cells are scheduled across worker threads.
"""

import csv
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np
from sklearn.base import clone

from .allocators import make_allocator
from .exceptions import DegenerateChannelError, PreconditionError
from .model import AN_MODES, SystemConfig, build_alphabet, sample_channel
from .rates import MonteCarloSpec, derive_seed, instantaneous_secrecy_rate

__all__ = [
    "CLIP_MODES",
    "DEFAULT_METHODS",
    "ExperimentSpec",
    "SweepRow",
    "SweepTable",
    "CdfRow",
    "CdfTable",
    "ConfigError",
    "load_spec",
    "spec_from_dict",
    "draw_channel",
    "run_snr_sweep",
    "run_cdf",
    "allocate_once",
    "write_csv",
]

log = logging.getLogger(__name__)

CLIP_MODES = ("per_realization", "post_average")
DEFAULT_METHODS = ("es:0.01:mc_sr", "gd", "max_p", "fixed:0.1", "fixed:0.5", "fixed:0.9")

TAG_CHANNEL = 1
TAG_ALLOC = 2
TAG_EVAL = 3
MAX_RESAMPLES = 64


class ConfigError(PreconditionError):
    """Malformed experiment configuration."""


@dataclass(frozen=True)
class ExperimentSpec:
    config: SystemConfig = field(default_factory=SystemConfig)
    an_mode: str = "null_space"
    methods: tuple = DEFAULT_METHODS
    snr_db_list: tuple = (0.0, 5.0, 10.0, 15.0)
    n_channels: int = 200
    mc: MonteCarloSpec = field(default_factory=MonteCarloSpec)
    master_seed: int = 0
    clip_mode: str = "per_realization"

    def __post_init__(self):
        if self.n_channels < 1:
            raise ConfigError("n_channels must be >= 1")
        if len(self.snr_db_list) == 0:
            raise ConfigError("snr_db_list must be nonempty")
        if len(self.methods) == 0:
            raise ConfigError("methods must be nonempty")
        if self.an_mode not in AN_MODES:
            raise ConfigError(f"an_mode must be one of {AN_MODES}")
        if self.clip_mode not in CLIP_MODES:
            raise ConfigError(f"clip_mode must be one of {CLIP_MODES}")

    def allocators(self):
        return [make_allocator(m, self.mc.n_noise_samples) for m in self.methods]


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    method: str
    beta_mean: float
    sr_mean: float
    sr_stderr: float
    n_channels: int
    resamples: int


@dataclass(frozen=True)
class CdfRow:
    method: str
    sr_value: float


@dataclass
class SweepTable:
    header = ("snr_db", "method", "beta_mean", "sr_mean", "sr_stderr", "n_channels", "resamples")
    rows: list = field(default_factory=list)

    def lookup(self, snr_db, method):
        for r in self.rows:
            if r.snr_db == snr_db and r.method == method:
                return r
        raise KeyError((snr_db, method))


@dataclass
class CdfTable:
    header = ("method", "sr_value")
    rows: list = field(default_factory=list)

    def samples(self, method):
        return np.array([r.sr_value for r in self.rows if r.method == method])


# --- configuration -----------------------------------------------------------

_CONFIG_KEYS = {
    "n_tx", "n_rx_bob", "n_rx_eve", "mod_order", "total_power", "an_mode",
    "snr_db_list", "n_channels", "n_noise_samples", "master_seed", "methods",
    "clip_mode",
}


def spec_from_dict(d):
    """Build an :class:`ExperimentSpec` from the flat JSON config layout."""
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(d) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        n_tx = int(d.get("n_tx", 4))
        power = d.get("total_power", "auto")
        power = float(n_tx) if power == "auto" else float(power)
        cfg = SystemConfig(
            n_tx=n_tx,
            n_rx_bob=int(d.get("n_rx_bob", 2)),
            n_rx_eve=int(d.get("n_rx_eve", 2)),
            mod_order=int(d.get("mod_order", 4)),
            total_power=power,
        )
        spec = ExperimentSpec(
            config=cfg,
            an_mode=d.get("an_mode", "null_space"),
            methods=tuple(str(m) for m in d.get("methods", DEFAULT_METHODS)),
            snr_db_list=tuple(float(s) for s in d.get("snr_db_list", (0, 5, 10, 15))),
            n_channels=int(d.get("n_channels", 200)),
            mc=MonteCarloSpec(int(d.get("n_noise_samples", 1000)), 0),
            master_seed=int(d.get("master_seed", 0)),
            clip_mode=d.get("clip_mode", "per_realization"),
        )
        spec.allocators()  # reject unknown method ids early
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return spec


def load_spec(path):
    """Read a JSON config file.

    Raises:
        OSError: if the file cannot be read.
        ConfigError: if the content is not a valid config.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return spec_from_dict(data)


# --- experiment cells --------------------------------------------------------

def draw_channel(cfg, an_mode, *seed_words):
    """Sample a channel, resampling degenerate draws with a bumped sub-seed.

    Returns:
        (channel, number_of_resamples)
    """
    for attempt in range(MAX_RESAMPLES):
        rng = np.random.default_rng(derive_seed(*seed_words, TAG_CHANNEL, attempt))
        try:
            return sample_channel(rng, cfg, an_mode), attempt
        except DegenerateChannelError:
            continue
    raise DegenerateChannelError(f"no usable channel after {MAX_RESAMPLES} draws")


def _run_cell(spec, allocators, alphabet, snr_index, k):
    cfg = spec.config.with_snr(spec.snr_db_list[snr_index])
    words = (spec.master_seed, snr_index, k)
    chan, resamples = draw_channel(cfg, spec.an_mode, *words)
    eval_mc = MonteCarloSpec(spec.mc.n_noise_samples, derive_seed(*words, TAG_EVAL))
    betas, raw = [], []
    for m, est in enumerate(allocators):
        est = clone(est)
        if "random_state" in est.get_params():
            est.set_params(random_state=derive_seed(*words, TAG_ALLOC, m))
        beta = est.fit(chan, cfg, alphabet).beta_
        sr = instantaneous_secrecy_rate(chan, beta, cfg, alphabet, eval_mc, clip=False)
        betas.append(beta)
        raw.append(sr.value)
    return np.array(betas), np.array(raw), resamples


def _run_cells(spec, threads):
    allocators = spec.allocators()
    alphabet = build_alphabet(spec.config)
    tasks = [(s, k) for s in range(len(spec.snr_db_list)) for k in range(spec.n_channels)]

    def work(task):
        return _run_cell(spec, allocators, alphabet, *task)

    if threads == 0:
        threads = os.cpu_count() or 1
    if threads <= 1:
        results = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    n_s, n_k, n_m = len(spec.snr_db_list), spec.n_channels, len(allocators)
    betas = np.array([r[0] for r in results]).reshape(n_s, n_k, n_m)
    raw = np.array([r[1] for r in results]).reshape(n_s, n_k, n_m)
    resamples = np.array([r[2] for r in results]).reshape(n_s, n_k)
    return betas, raw, resamples


def _reduce(raw, clip_mode):
    n = len(raw)
    if clip_mode == "per_realization":
        vals = np.maximum(raw, 0.0)
        mean = float(np.mean(vals))
    else:
        vals = raw
        mean = max(0.0, float(np.mean(vals)))
    se = float(np.std(vals, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, se


def run_snr_sweep(spec, threads=1):
    """Average secrecy rate versus SNR for every method in ``spec``."""
    betas, raw, resamples = _run_cells(spec, threads)
    table = SweepTable()
    for s, snr in enumerate(spec.snr_db_list):
        for m, method in enumerate(spec.methods):
            mean, se = _reduce(raw[s, :, m], spec.clip_mode)
            table.rows.append(SweepRow(
                snr_db=float(snr),
                method=method,
                beta_mean=float(np.mean(betas[s, :, m])),
                sr_mean=mean,
                sr_stderr=se,
                n_channels=spec.n_channels,
                resamples=int(resamples[s].sum()),
            ))
        log.info("snr %s dB done", snr)
    return table


def run_cdf(spec, threads=1):
    """Per-channel clipped secrecy rates at a single SNR, sorted per method."""
    if len(spec.snr_db_list) != 1:
        raise ConfigError("cdf needs exactly one SNR in snr_db_list")
    _, raw, _ = _run_cells(spec, threads)
    table = CdfTable()
    for m, method in enumerate(spec.methods):
        for v in np.sort(np.maximum(raw[0, :, m], 0.0)):
            table.rows.append(CdfRow(method, float(v)))
    return table


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return None if not np.isfinite(x) else float(x)
    return x


def allocate_once(spec, seed, method):
    """Allocate power on one seeded channel at the experiment's first SNR.

    Returns:
        dict ready for JSON output with the chosen beta, the method's own
        objective value and a Monte Carlo secrecy-rate estimate.
    """
    est = make_allocator(method, spec.mc.n_noise_samples)
    snr = spec.snr_db_list[0]
    cfg = spec.config.with_snr(snr)
    alphabet = build_alphabet(cfg)
    chan, resamples = draw_channel(cfg, spec.an_mode, seed)
    if "random_state" in est.get_params():
        est.set_params(random_state=derive_seed(seed, TAG_ALLOC))
    outcome = est.fit(chan, cfg, alphabet).outcome_
    sr = instantaneous_secrecy_rate(
        chan, outcome.beta, cfg, alphabet,
        MonteCarloSpec(spec.mc.n_noise_samples, derive_seed(seed, TAG_EVAL)),
    )
    return _jsonable({
        "method": method,
        "snr_db": snr,
        "seed": seed,
        "beta": outcome.beta,
        "surrogate_value": outcome.surrogate_value,
        "sr": sr.value,
        "sr_stderr": sr.std_error,
        "resamples": resamples,
        "diagnostics": outcome.diagnostics,
    })


# --- output ------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{v:.9g}"
    return str(v)


def write_csv(table, path):
    """Write ``table`` as UTF-8 CSV with LF line endings.

    Raises:
        OSError: on I/O failure, with ``path`` in the message.
    """
    names = [f.name for f in fields(table.rows[0])] if table.rows else list(table.header)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(table.header)
            for row in table.rows:
                w.writerow([_fmt(getattr(row, n)) for n in names])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
