"""Self-verification suite behind ``midqkd verify``."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator

from .channel import ChannelParams, build_purified_network, reduced_ab
from .gaussian import von_neumann_entropy
from .keyrate import (
    ALL_PROTOCOLS,
    Measurement,
    ProtocolSpec,
    Reconciliation,
    StatePrep,
    key_rate,
    mutual_information,
)
from .oracle import Axis, generic_key_rate, monte_carlo_mi, threshold_transmission

Sq, Co = StatePrep.Squeezed, StatePrep.Coherent
Hom, Het = Measurement.Homodyne, Measurement.Heterodyne
DR, RR = Reconciliation.Direct, Reconciliation.Reverse

STANDARD_V = (1.2, 2.0, 8.0, 20.0, 100.0)
STANDARD_T = (0.1, 0.35, 0.7, 0.9, 1.0)
STANDARD_W = (1.0, 1.01, 1.2)

# regression constant: generic-pipeline threshold for coherent-hom/dr,
# symmetric arms, V=20, W=1
MIDDLE_THRESHOLD_V20 = 0.3674479


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def standard_grid() -> Iterator[ChannelParams]:
    for v, t1, t2, w in itertools.product(STANDARD_V, STANDARD_T, STANDARD_T, STANDARD_W):
        yield ChannelParams(v, t1, t2, w, w)


def symmetric_grid() -> Iterator[ChannelParams]:
    for v, t, w in itertools.product(STANDARD_V, STANDARD_T, STANDARD_W):
        yield ChannelParams(v, t, t, w, w)


def lossless_decoupling() -> CheckResult:
    worst = 0.0
    for v, spec in itertools.product((1.5, 4.0, 20.0), ALL_PROTOCOLS):
        k = key_rate(spec, ChannelParams(v, 1.0, 1.0))
        worst = max(worst, abs(k.holevo), abs(k.key_rate - k.i_ab))
        if spec.state_prep is Sq and spec.measurement is Hom:
            worst = max(worst, abs(k.key_rate - math.log2(v)))
    return CheckResult("lossless decoupling", worst <= 1e-9, f"max deviation {worst:.3g}")


def oracle_agreement() -> CheckResult:
    worst = 0.0
    for p, spec in itertools.product(standard_grid(), ALL_PROTOCOLS):
        worst = max(worst, abs(key_rate(spec, p).key_rate - generic_key_rate(spec, p).key_rate))
    return CheckResult("closed form vs purification", worst <= 1e-7, f"max |dK| {worst:.3g}")


def purification_identity() -> CheckResult:
    worst = 0.0
    for p in standard_grid():
        net = build_purified_network(p)
        worst = max(worst, abs(von_neumann_entropy(net.eve_cm()) - von_neumann_entropy(net.ab_cm())))
    return CheckResult("S(E) = S(AB)", worst <= 1e-8, f"max deviation {worst:.3g}")


def _pairwise(pairs, tol: float, name: str) -> CheckResult:
    worst = 0.0
    for p in symmetric_grid():
        for s1, s2 in pairs:
            worst = max(worst, abs(generic_key_rate(s1, p).key_rate - generic_key_rate(s2, p).key_rate))
    return CheckResult(name, worst <= tol, f"max |dK| {worst:.3g}")


def equivalence_bullets() -> CheckResult:
    pairs = [(ProtocolSpec(Co, Hom, DR), ProtocolSpec(Sq, Het, RR)),
             (ProtocolSpec(Sq, Het, DR), ProtocolSpec(Co, Hom, RR))]
    return _pairwise(pairs, 1e-8, "DR/RR cross equivalences")


def self_dual() -> CheckResult:
    pairs = [(ProtocolSpec(Sq, Hom, DR), ProtocolSpec(Sq, Hom, RR)),
             (ProtocolSpec(Co, Het, DR), ProtocolSpec(Co, Het, RR))]
    return _pairwise(pairs, 1e-9, "self-dual protocols")


def three_db_limit() -> CheckResult:
    t = threshold_transmission(ProtocolSpec(Co, Hom, DR), 1e4, 1.0, 1.0, Axis.EffectiveT_trusted)
    return CheckResult("3 dB limit, trusted source", abs(t - 0.5) <= 1e-3, f"threshold {t:.6f}")


def beats_three_db() -> CheckResult:
    spec = ProtocolSpec(Co, Hom, DR)
    t = threshold_transmission(spec, 20.0, 1.0, 1.0, Axis.EffectiveT_symmetric, method="generic")
    k = generic_key_rate(spec, Axis.EffectiveT_symmetric.params(0.45, 20.0)).key_rate
    ok = t < 0.5 and k > 0.0 and abs(t - MIDDLE_THRESHOLD_V20) <= 1e-5
    return CheckResult("middle source beats 3 dB", ok, f"threshold {t:.6f}, K(0.45) = {k:.4g}")


def reverse_squeezed_secure() -> CheckResult:
    spec = ProtocolSpec(Sq, Hom, RR)
    ks = [key_rate(spec, ChannelParams(20.0, 1.0, j / 20)).key_rate for j in range(1, 20)]
    return CheckResult("RR squeezed-hom secure at all T", min(ks) > 0.0, f"min K {min(ks):.4g}")


def dominance() -> CheckResult:
    best = ProtocolSpec(Co, Hom, DR)
    bad = []
    for v, te in itertools.product((2.0, 8.0, 20.0), (0.2, 0.4, 0.6, 0.8)):
        p = Axis.EffectiveT_symmetric.params(te, v)
        k0 = key_rate(best, p).key_rate
        for spec in ALL_PROTOCOLS:
            k = key_rate(spec, p).key_rate
            if k > k0 + 1e-9:
                bad.append(f"V={v:g} T_eff={te:g} {spec} K={k:.4g} > {k0:.4g}")
    detail = f"{len(bad)} counterexamples" + (f"; first: {bad[0]}" if bad else "")
    return CheckResult("coherent-hom/dr dominance", not bad, detail)


def excess_noise_monotone() -> CheckResult:
    bad = []
    for spec in ALL_PROTOCOLS:
        ks = [key_rate(spec, Axis.EffectiveT_symmetric.params(0.6, 20.0, w, w)).key_rate
              for w in (1.0, 1.05, 1.1, 1.5)]
        if any(k1 > k0 for k0, k1 in zip(ks, ks[1:])):
            bad.append(str(spec))
    return CheckResult("K non-increasing in W", not bad, ", ".join(bad) or "all specs")


MC_POINTS = (
    (ProtocolSpec(Sq, Hom, DR), ChannelParams(4.0, 1.0, 1.0)),
    (ProtocolSpec(Sq, Het, DR), ChannelParams(20.0, 0.7, 0.4, 1.1, 1.3)),
    (ProtocolSpec(Co, Hom, DR), ChannelParams(20.0, 0.8, 0.8)),
    (ProtocolSpec(Co, Hom, RR), ChannelParams(8.0, 0.5, 0.9, 1.2, 1.0)),
    (ProtocolSpec(Co, Het, DR), ChannelParams(3.0, 1.0, 1.0)),
    (ProtocolSpec(Co, Het, RR), ChannelParams(100.0, 0.35, 0.9, 1.01, 1.01)),
)


def monte_carlo(seed: int = 20111, n_samples: int = 10**6) -> CheckResult:
    worst = 0.0
    for j, (spec, p) in enumerate(MC_POINTS):
        est = monte_carlo_mi(spec, p, n_samples, seed + j)
        worst = max(worst, abs(est.estimate - mutual_information(spec, reduced_ab(p))) / est.std_error)
    return CheckResult("Monte Carlo I_AB", worst <= 3.0, f"max deviation {worst:.2f} std errors")


def squeezed_holevo_invariance() -> CheckResult:
    worst = 0.0
    for p in standard_grid():
        a = generic_key_rate(ProtocolSpec(Sq, Hom, DR), p).holevo
        b = generic_key_rate(ProtocolSpec(Sq, Het, DR), p).holevo
        worst = max(worst, abs(a - b))
    return CheckResult("squeezed-prep Holevo hom = het", worst <= 1e-8, f"max deviation {worst:.3g}")


def all_checks(seed: int = 20111, n_samples: int = 10**6) -> list[Callable[[], CheckResult]]:
    return [
        lossless_decoupling,
        oracle_agreement,
        purification_identity,
        equivalence_bullets,
        self_dual,
        three_db_limit,
        beats_three_db,
        reverse_squeezed_secure,
        dominance,
        excess_noise_monotone,
        lambda: monte_carlo(seed, n_samples),
        squeezed_holevo_invariance,
    ]
