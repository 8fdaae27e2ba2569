"""Entanglement-in-the-middle channel with two entangling-cloner attacks.

The source emits an EPR pair of variance ``V``. One half travels to Alice
through a beam splitter of transmission ``T1`` whose free port carries half of
Eve's first cloner pair (variance ``W1``). The other half reaches Bob through
``T2`` with a second cloner pair of variance ``W2``. Setting ``T1 = 1`` recovers
a source held by Alice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .gaussian import (
    ModeRole,
    apply_symplectic,
    beam_splitter,
    direct_sum,
    epr_cm,
    partial_trace,
)


@dataclass(frozen=True)
class ChannelParams:
    V: float
    T1: float
    T2: float
    W1: float = 1.0
    W2: float = 1.0

    def __post_init__(self):
        if not self.V >= 1.0:
            raise InvalidArgument(f"V must be >= 1, got {self.V!r}")
        for name in ("T1", "T2"):
            t = getattr(self, name)
            if not 0.0 <= t <= 1.0:
                raise InvalidArgument(f"{name} must be in [0, 1], got {t!r}")
        for name in ("W1", "W2"):
            w = getattr(self, name)
            if not w >= 1.0:
                raise InvalidArgument(f"{name} must be >= 1, got {w!r}")

    @property
    def T_eff(self) -> float:
        return effective_transmission(self.T1, self.T2)

    def swapped(self) -> ChannelParams:
        """Same channel seen from Bob's side (arms exchanged)."""
        return ChannelParams(self.V, self.T2, self.T1, self.W2, self.W1)


@dataclass(frozen=True)
class ReducedABParams:
    """Scalars of the Alice-Bob covariance ``[[a I, c Z], [c Z, b I]]``."""

    a: float
    b: float
    c: float

    def cm(self) -> np.ndarray:
        z = np.diag([1.0, -1.0])
        return np.block([[self.a * np.eye(2), self.c * z], [self.c * z, self.b * np.eye(2)]])

    def swapped(self) -> ReducedABParams:
        return ReducedABParams(self.b, self.a, self.c)


def reduced_ab(params: ChannelParams) -> ReducedABParams:
    p = params
    a = p.T1 * p.V + (1.0 - p.T1) * p.W1
    b = p.T2 * p.V + (1.0 - p.T2) * p.W2
    c = math.sqrt(p.T1) * math.sqrt(p.T2) * math.sqrt(p.V * p.V - 1.0)
    return ReducedABParams(a, b, c)


def effective_transmission(t1: float, t2: float) -> float:
    """Overall transmission of two beam splitters in series."""
    for t in (t1, t2):
        if not 0.0 <= t <= 1.0:
            raise InvalidArgument(f"transmission must be in [0, 1], got {t!r}")
    return t1 * t2


def symmetric_arms(t_eff: float) -> tuple[float, float]:
    """Per-arm transmissions placing the source exactly in the middle."""
    if not 0.0 <= t_eff <= 1.0:
        raise InvalidArgument(f"effective transmission must be in [0, 1], got {t_eff!r}")
    t = math.sqrt(t_eff)
    return t, t


NETWORK_ORDER = (
    ModeRole.SourceToAlice,
    ModeRole.SourceToBob,
    ModeRole.Cloner1In,
    ModeRole.Cloner1Keep,
    ModeRole.Cloner2In,
    ModeRole.Cloner2Keep,
)


@dataclass(frozen=True)
class PurifiedNetwork:
    """Pure six-mode state of Alice, Bob and Eve after both cloner attacks."""

    cm: np.ndarray
    roles: dict[ModeRole, int] = field(default_factory=lambda: {r: k for k, r in enumerate(NETWORK_ORDER)})

    @property
    def alice(self) -> int:
        return self.roles[ModeRole.SourceToAlice]

    @property
    def bob(self) -> int:
        return self.roles[ModeRole.SourceToBob]

    @property
    def eve(self) -> list[int]:
        return [self.roles[r] for r in NETWORK_ORDER[2:]]

    def ab_cm(self) -> np.ndarray:
        return partial_trace(self.cm, [self.alice, self.bob])

    def eve_cm(self) -> np.ndarray:
        return partial_trace(self.cm, self.eve)


def build_purified_network(params: ChannelParams) -> PurifiedNetwork:
    roles = {r: k for k, r in enumerate(NETWORK_ORDER)}
    n = len(NETWORK_ORDER)
    gamma = direct_sum(epr_cm(params.V), epr_cm(params.W1), epr_cm(params.W2))
    for t, sig, anc in (
        (params.T1, ModeRole.SourceToAlice, ModeRole.Cloner1In),
        (params.T2, ModeRole.SourceToBob, ModeRole.Cloner2In),
    ):
        gamma = apply_symplectic(gamma, beam_splitter(t, roles[sig], roles[anc], n))
    return PurifiedNetwork(gamma, roles)
