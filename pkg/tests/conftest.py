import numpy as np
import pytest

from secrecy_pa.model import ChannelRealization, SystemConfig, build_alphabet, sample_channel


@pytest.fixture
def rng():
    return np.random.default_rng(20181015)


@pytest.fixture
def cfg10():
    """Default four-antenna QPSK setup at 10 dB."""
    return SystemConfig().with_snr(10.0)


@pytest.fixture
def alphabet(cfg10):
    return build_alphabet(cfg10)


@pytest.fixture
def chan(rng, cfg10):
    return sample_channel(rng, cfg10, "null_space")


@pytest.fixture
def iso_chan(rng, cfg10):
    return sample_channel(rng, cfg10, "isotropic")


def random_hermitian(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return A + A.conj().T


def replace_eve(chan, h_eve):
    return ChannelRealization(chan.h_bob, h_eve, chan.t_an, chan.an_mode)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
