"""Secret key rates for continuous-variable QKD with the entangled source in the middle."""

from .channel import ChannelParams, ReducedABParams, build_purified_network, reduced_ab
from .errors import InvalidArgument, NumericalFailure
from .keyrate import (
    ALL_PROTOCOLS,
    KeyRateBreakdown,
    Measurement,
    ProtocolSpec,
    Reconciliation,
    StatePrep,
    key_rate,
    mirror_protocol,
)
from .oracle import Axis, generic_key_rate, threshold_transmission

__all__ = [
    "ALL_PROTOCOLS",
    "Axis",
    "ChannelParams",
    "InvalidArgument",
    "KeyRateBreakdown",
    "Measurement",
    "NumericalFailure",
    "ProtocolSpec",
    "Reconciliation",
    "ReducedABParams",
    "StatePrep",
    "build_purified_network",
    "generic_key_rate",
    "key_rate",
    "mirror_protocol",
    "reduced_ab",
    "threshold_transmission",
]
