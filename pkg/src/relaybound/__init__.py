"""Capacity bounds for a relay channel whose relay reaches the destination over a lossless bit pipe.

Numerics for the cut-set bound, the Arimoto strong-converse exponent, and a tighter bound
obtained by letting the destination guess the relay's message from a simulated observation.
"""
from .bounds import (BoundInvariantError, BoundPreconditionError, BoundReport, cutset_bound,
                     degraded_bound, general_bound, iid_bound, solve_bound, sweep, sweep_csv)
from .channels import (ChannelError, CompanionChannel, RelayChannel, bec, bsc, companion_from_kernel,
                       degradation_test, det_example_channels, identity, joint_channel,
                       mix_companions, product_companion)
from .exponent import bec_exponent, error_exponent, exponent_curve, inverse_exponent
from .info import capacity, entropy, mutual_information, pmi_quantile, pmi_samples

__version__ = "0.1.0"

__all__ = [
    "BoundInvariantError", "BoundPreconditionError", "BoundReport", "cutset_bound", "degraded_bound",
    "general_bound", "iid_bound", "solve_bound", "sweep", "sweep_csv", "ChannelError",
    "CompanionChannel", "RelayChannel", "bec", "bsc", "companion_from_kernel", "degradation_test",
    "det_example_channels", "identity", "joint_channel", "mix_companions", "product_companion",
    "bec_exponent", "error_exponent", "exponent_curve", "inverse_exponent", "capacity", "entropy",
    "mutual_information", "pmi_quantile", "pmi_samples",
]
