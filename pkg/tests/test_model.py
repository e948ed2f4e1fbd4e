import itertools

import numpy as np
import pytest

from secrecy_pa.exceptions import PreconditionError
from secrecy_pa.model import (
    SystemConfig,
    build_alphabet,
    noise_variance_from_snr,
    psk_constellation,
    qpsk_constellation,
    sample_channel,
)
from secrecy_pa.numerics import complex_gaussian_matrix
from secrecy_pa.rates import interference_covariances


def test_qpsk_points():
    pts = qpsk_constellation()
    assert len(pts) == 4
    np.testing.assert_allclose(np.abs(pts), 1.0)
    assert abs(np.mean(np.abs(pts) ** 2) - 1.0) <= 1e-12
    dists = [abs(a - b) for a, b in itertools.combinations(pts, 2)]
    assert len(dists) == 6
    assert min(dists) == pytest.approx(np.sqrt(2))


def test_qpsk_gray_labels():
    pts = qpsk_constellation()
    for a, b in itertools.combinations(range(4), 2):
        if abs(pts[a] - pts[b]) == pytest.approx(np.sqrt(2)):
            assert bin(a ^ b).count("1") == 1


@pytest.mark.parametrize("M", [2, 8, 16])
def test_psk_unit_energy_and_gray(M):
    pts = psk_constellation(M)
    np.testing.assert_allclose(np.abs(pts), 1.0)
    order = np.argsort(np.angle(pts) % (2 * np.pi))
    for p, q in zip(order, np.roll(order, -1)):
        assert bin(p ^ q).count("1") == 1


def test_alphabet_default():
    al = build_alphabet(SystemConfig())
    assert al.size == 16
    for k, x in enumerate(al.vectors):
        i, j = al.split(k)
        assert al.index(i, j) == k
        expected = np.zeros(4, dtype=complex)
        expected[i] = qpsk_constellation()[j]
        np.testing.assert_array_equal(x, expected)


def test_alphabet_smallest():
    al = build_alphabet(SystemConfig(n_tx=2, n_rx_bob=1, n_rx_eve=1, mod_order=2))
    assert al.size == 4
    assert all(np.count_nonzero(x) == 1 for x in al.vectors)


def test_alphabet_zero_differences():
    al = build_alphabet(SystemConfig())
    d = al.differences()
    zero = np.all(d == 0, axis=-1)
    assert zero.sum() == al.size
    assert np.all(np.diag(zero))


def test_alphabet_rejects_non_unit_energy():
    with pytest.raises(PreconditionError):
        build_alphabet(SystemConfig(), constellation=2 * qpsk_constellation())


@pytest.mark.parametrize("kwargs", [
    dict(n_tx=3), dict(n_tx=1), dict(mod_order=3), dict(total_power=0.0), dict(sigma2_bob=0.0),
])
def test_config_validation(kwargs):
    with pytest.raises(PreconditionError):
        SystemConfig(**kwargs)


def test_null_space_channel(rng, cfg10):
    ch = sample_channel(rng, cfg10, "null_space")
    assert np.linalg.norm(ch.h_bob @ ch.t_an) <= 1e-9 * np.linalg.norm(ch.h_bob)
    assert abs(np.trace(ch.t_an @ ch.t_an.conj().T) - 1.0) <= 1e-10
    assert ch.h_bob.shape == (2, 4) and ch.h_eve.shape == (2, 4)


def test_isotropic_channel(rng, cfg10):
    ch = sample_channel(rng, cfg10, "isotropic")
    np.testing.assert_allclose(ch.t_an, np.eye(4) / 2.0)
    c_bob, c_eve = interference_covariances(ch)
    np.testing.assert_allclose(c_eve, ch.h_eve @ ch.h_eve.conj().T / 4, atol=1e-12)


def test_null_space_requires_wide_bob(rng):
    cfg = SystemConfig(n_tx=2, n_rx_bob=2)
    with pytest.raises(PreconditionError):
        sample_channel(rng, cfg, "null_space")


def test_unknown_mode(rng, cfg10):
    with pytest.raises(PreconditionError):
        sample_channel(rng, cfg10, "beamformed")


def test_channel_entry_power():
    rng = np.random.default_rng(11)
    cfg = SystemConfig()
    h = np.stack([sample_channel(rng, cfg).h_bob for _ in range(10_000)])
    assert abs(np.mean(np.abs(h) ** 2) - 1.0) <= 0.05


def test_channel_deterministic(cfg10):
    a = sample_channel(np.random.default_rng(5), cfg10)
    b = sample_channel(np.random.default_rng(5), cfg10)
    np.testing.assert_array_equal(a.h_eve, b.h_eve)
    np.testing.assert_array_equal(a.t_an, b.t_an)


@pytest.mark.parametrize("snr, expected", [(0, 4.0), (10, 0.4), (-10, 40.0)])
def test_noise_variance_from_snr(snr, expected):
    assert noise_variance_from_snr(4.0, snr) == pytest.approx(expected, rel=1e-12)


def test_with_snr_sets_both_sides():
    cfg = SystemConfig().with_snr(10)
    assert cfg.sigma2_bob == cfg.sigma2_eve == pytest.approx(0.4)


@pytest.mark.parametrize("mode", ["null_space", "isotropic"])
def test_an_power_normalization(rng, cfg10, mode):
    ch = sample_channel(rng, cfg10, mode)
    n = complex_gaussian_matrix(np.random.default_rng(1), (4, 200_000))
    beta, P = 0.3, cfg10.total_power
    an = np.sqrt((1 - beta) * P) * ch.t_an @ n
    power = np.sum(np.abs(an) ** 2, axis=0)
    mean, se = power.mean(), power.std(ddof=1) / np.sqrt(power.size)
    assert abs(mean - (1 - beta) * P) <= 3 * se


def test_transmit_power_budget(rng, cfg10):
    ch = sample_channel(rng, cfg10)
    al = build_alphabet(cfg10)
    beta, P = 0.7, cfg10.total_power
    # signal part averaged exactly over the alphabet, AN part exactly via trace
    signal = beta * P * np.mean(np.sum(np.abs(al.vectors) ** 2, axis=1))
    an = (1 - beta) * P * np.trace(ch.t_an @ ch.t_an.conj().T).real
    assert signal + an == pytest.approx(P, rel=1e-12)
