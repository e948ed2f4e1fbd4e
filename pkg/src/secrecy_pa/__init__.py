"""Power allocation for secure spatial modulation with artificial noise."""

from .allocators import (
    AllocationOutcome,
    ExhaustiveSearchAllocator,
    FixedAllocator,
    GradientAscentAllocator,
    MaxProductAllocator,
    exhaustive_search,
    fixed_beta,
    gradient_ascent,
    make_allocator,
    max_p_sinr_ansnr,
)
from .exceptions import DegenerateChannelError, NotPSDError, PreconditionError, SecrecyPAError
from .harness import ExperimentSpec, run_cdf, run_snr_sweep, write_csv
from .model import ChannelRealization, SystemConfig, TransmitAlphabet, build_alphabet, sample_channel
from .rates import (
    MonteCarloSpec,
    RateEstimate,
    approx_secrecy_rate,
    cutoff_rate,
    grad_approx_secrecy_rate,
    instantaneous_secrecy_rate,
    mc_mutual_information,
)

__version__ = "0.1.0"
