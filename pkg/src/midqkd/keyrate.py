"""Closed-form key rates for the eight protocols with an untrusted middle source.

Only direct reconciliation has its own formulas. Reverse reconciliation is the
direct-reconciliation rate of the mirrored protocol on the arm-swapped channel:
relabelling Alice and Bob turns Bob's measurement into the state preparation
(heterodyne <-> coherent, homodyne <-> squeezed) and vice versa.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Optional

from .channel import ChannelParams, ReducedABParams, reduced_ab
from .errors import NumericalFailure
from .gaussian import PHYSICAL_TOL, g_function


class StatePrep(enum.Enum):
    Squeezed = "squeezed"
    Coherent = "coherent"


class Measurement(enum.Enum):
    Homodyne = "homodyne"
    Heterodyne = "heterodyne"


class Reconciliation(enum.Enum):
    Direct = "direct"
    Reverse = "reverse"


@dataclass(frozen=True)
class ProtocolSpec:
    state_prep: StatePrep
    measurement: Measurement
    reconciliation: Reconciliation = Reconciliation.Direct

    @property
    def name(self) -> str:
        """Short label such as ``coherent-hom``."""
        meas = "hom" if self.measurement is Measurement.Homodyne else "het"
        return f"{self.state_prep.value}-{meas}"

    @property
    def recon_label(self) -> str:
        return "dr" if self.reconciliation is Reconciliation.Direct else "rr"

    def __str__(self) -> str:
        return f"{self.name}/{self.recon_label}"

    @property
    def alice_heterodynes(self) -> bool:
        # coherent-state preparation is Alice heterodyning her half of the EPR pair
        return self.state_prep is StatePrep.Coherent

    @property
    def bob_heterodynes(self) -> bool:
        return self.measurement is Measurement.Heterodyne


ALL_PROTOCOLS = tuple(
    ProtocolSpec(s, m, r) for s, m, r in itertools.product(StatePrep, Measurement, Reconciliation)
)


@dataclass(frozen=True)
class KeyRateBreakdown:
    """Key-rate terms in bits per channel use."""

    i_ab: float
    s_e: float
    s_e_cond: float
    holevo: float
    key_rate: float


@dataclass(frozen=True)
class HolevoIntermediates:
    delta: float
    d: float
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: Optional[float] = None
    cap_a: Optional[float] = None
    cap_b: Optional[float] = None


def _log2_ratio(num: float, den: float) -> float:
    if not (num > 0.0 and den > 0.0):
        raise NumericalFailure(f"non-positive conditional variance ({num!r}, {den!r})")
    return math.log2(num / den)


def mutual_information(spec: ProtocolSpec, r: ReducedABParams) -> float:
    """Alice-Bob Shannon information; symmetric, so the direction is ignored."""
    a, b, c2 = r.a, r.b, r.c * r.c
    if spec.state_prep is StatePrep.Squeezed:
        if spec.measurement is Measurement.Homodyne:
            return 0.5 * _log2_ratio(a, a - c2 / b)
        return 0.5 * _log2_ratio(a, a - c2 / (b + 1.0))
    if spec.measurement is Measurement.Homodyne:
        return 0.5 * _log2_ratio(a + 1.0, a + 1.0 - c2 / b)
    # both parties keep two quadratures
    return _log2_ratio(b + 1.0, b + 1.0 - c2 / (a + 1.0))


def _sqrt_eig(x: float) -> float:
    """Square root of a squared symplectic eigenvalue, clamping rounding noise."""
    if x < (1.0 - PHYSICAL_TOL) ** 2:
        raise NumericalFailure(f"squared symplectic eigenvalue {x!r} below 1")
    return math.sqrt(max(x, 1.0))


def _quadratic_pair(s: float, p: float) -> tuple[float, float]:
    """Roots (larger first) of ``l**2 - s*l + p`` as symplectic eigenvalues.

    The smaller root is taken as ``p / larger`` to avoid cancellation.
    """
    disc = math.sqrt(max(s * s - 4.0 * p, 0.0))
    big = 0.5 * (s + disc)
    return _sqrt_eig(big), _sqrt_eig(p / big)


def _entropy(nu: float) -> float:
    return g_function((nu - 1.0) / 2.0)


def _direct_terms(spec: ProtocolSpec, r: ReducedABParams) -> tuple[float, float, HolevoIntermediates]:
    a, b, c2 = r.a, r.b, r.c * r.c
    # invariant form of Delta; a**2 + b**2 + c**2 breaks the pure-state limit
    delta = a * a + b * b - 2.0 * c2
    d = a * b - c2
    lam1, lam2 = _quadratic_pair(delta, d * d)
    s_e = _entropy(lam1) + _entropy(lam2)

    if spec.state_prep is StatePrep.Squeezed:
        # Alice homodynes; Bob's choice does not enter Eve's conditional state
        lam3 = _sqrt_eig(b * (b - c2 / a))
        inter = HolevoIntermediates(delta, d, lam1, lam2, lam3)
        s_cond = _entropy(lam3)
    elif spec.measurement is Measurement.Homodyne:
        # Alice keeps one quadrature of her heterodyne: conditional state of Bob plus the splitter's vacuum port
        cap_a = (a + b * d + delta) / (a + 1.0)
        cap_b = d * (b + d) / (a + 1.0)
        lam3, lam4 = _quadratic_pair(cap_a, cap_b)
        inter = HolevoIntermediates(delta, d, lam1, lam2, lam3, lam4, cap_a, cap_b)
        s_cond = _entropy(lam3) + _entropy(lam4)
    else:
        lam3 = b - c2 / (a + 1.0)
        if lam3 < 1.0 - PHYSICAL_TOL:
            raise NumericalFailure(f"conditional symplectic eigenvalue {lam3!r} below 1")
        lam3 = max(lam3, 1.0)
        inter = HolevoIntermediates(delta, d, lam1, lam2, lam3)
        s_cond = _entropy(lam3)
    return s_e, s_cond, inter


def holevo_direct(spec: ProtocolSpec, r: ReducedABParams) -> tuple[float, HolevoIntermediates]:
    """Eve's Holevo information on Alice's data, with its intermediate quantities."""
    s_e, s_cond, inter = _direct_terms(spec, r)
    return _clamp_holevo(s_e - s_cond), inter


def _clamp_holevo(chi: float) -> float:
    if chi < -PHYSICAL_TOL:
        raise NumericalFailure(f"negative Holevo information {chi!r}")
    return max(chi, 0.0)


_PREP_FOR_MEAS = {Measurement.Homodyne: StatePrep.Squeezed, Measurement.Heterodyne: StatePrep.Coherent}
_MEAS_FOR_PREP = {v: k for k, v in _PREP_FOR_MEAS.items()}


def mirror_protocol(spec: ProtocolSpec) -> ProtocolSpec:
    """Protocol obtained by exchanging the roles of Alice and Bob.

    >>> mirror_protocol(ProtocolSpec(StatePrep.Coherent, Measurement.Homodyne, Reconciliation.Direct))
    ... # doctest: +NORMALIZE_WHITESPACE
    ProtocolSpec(state_prep=<StatePrep.Squeezed: 'squeezed'>,
                 measurement=<Measurement.Heterodyne: 'heterodyne'>,
                 reconciliation=<Reconciliation.Reverse: 'reverse'>)
    """
    recon = (Reconciliation.Reverse if spec.reconciliation is Reconciliation.Direct
             else Reconciliation.Direct)
    return ProtocolSpec(_PREP_FOR_MEAS[spec.measurement], _MEAS_FOR_PREP[spec.state_prep], recon)


def key_rate_reduced(spec: ProtocolSpec, r: ReducedABParams) -> KeyRateBreakdown:
    """Key rate from the reduced Alice-Bob scalars."""
    if spec.reconciliation is Reconciliation.Reverse:
        spec, r = mirror_protocol(spec), r.swapped()
    i_ab = mutual_information(spec, r)
    s_e, s_cond, _ = _direct_terms(spec, r)
    chi = _clamp_holevo(s_e - s_cond)
    return KeyRateBreakdown(i_ab, s_e, s_cond, chi, i_ab - chi)


def key_rate(spec: ProtocolSpec, params: ChannelParams) -> KeyRateBreakdown:
    """Secret key rate ``I_AB - chi`` in bits per use; negative values are kept."""
    if spec.reconciliation is Reconciliation.Reverse:
        return key_rate_reduced(mirror_protocol(spec), reduced_ab(params.swapped()))
    return key_rate_reduced(spec, reduced_ab(params))
