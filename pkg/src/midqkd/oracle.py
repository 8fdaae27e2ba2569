"""Independent checks of the closed forms.

``generic_key_rate`` never touches the closed-form formulas. It builds the
six-mode purification, measures the reference party's mode with the generic
conditioning routines, and reads Eve's entropies off her four-mode marginal.
Reverse reconciliation is computed directly by conditioning on Bob, so the
mirror construction in :mod:`midqkd.keyrate` is tested rather than assumed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .channel import ChannelParams, PurifiedNetwork, build_purified_network, reduced_ab
from .errors import InvalidArgument, NumericalFailure
from .gaussian import (
    Quadrature,
    apply_symplectic,
    beam_splitter,
    condition_heterodyne,
    condition_homodyne,
    direct_sum,
    partial_trace,
    vacuum_cm,
    von_neumann_entropy,
)
from .keyrate import KeyRateBreakdown, ProtocolSpec, Reconciliation, key_rate

NEVER_POSITIVE = math.inf


class Axis(enum.Enum):
    """How a scalar transmission ``t`` maps onto the two arms."""

    EffectiveT_symmetric = "symmetric"  # T1 = T2 = sqrt(t)
    EffectiveT_trusted = "trusted"  # T1 = 1, T2 = t
    PerArmT = "per-arm"  # T1 = T2 = t

    def params(self, t: float, V: float, W1: float = 1.0, W2: float = 1.0) -> ChannelParams:
        if self is Axis.EffectiveT_symmetric:
            t1 = t2 = math.sqrt(t)
        elif self is Axis.EffectiveT_trusted:
            t1, t2 = 1.0, t
        else:
            t1 = t2 = t
        return ChannelParams(V, t1, t2, W1, W2)


# --- measurement models ------------------------------------------------------


def _append_vacuum(gamma: np.ndarray) -> np.ndarray:
    return direct_sum(gamma, vacuum_cm(1))


def _split_on_vacuum(gamma: np.ndarray, mode: int) -> tuple[np.ndarray, int]:
    """Mix ``mode`` with a fresh vacuum on a 50/50 splitter; return (cm, vacuum index)."""
    g = _append_vacuum(gamma)
    n = g.shape[0] // 2
    return apply_symplectic(g, beam_splitter(0.5, mode, n - 1, n)), n - 1


def _outcome_covariance(gamma_ab: np.ndarray, alice_het: bool, bob_het: bool) -> tuple[np.ndarray, int]:
    """Covariance of the classical outcomes of Alice (first block) and Bob.

    Heterodyne is realised literally as a 50/50 splitter with vacuum followed
    by x on one port and p on the other. When only one side heterodynes, its
    p outcome is sifted away.
    """
    g = gamma_ab
    picks = {}
    for mode, het in ((0, alice_het), (1, bob_het)):
        if het:
            g, vac = _split_on_vacuum(g, mode)
            picks[mode] = [2 * mode, 2 * vac + 1]
        else:
            picks[mode] = [2 * mode]
    if alice_het != bob_het:
        picks = {m: idx[:1] for m, idx in picks.items()}
    idx = picks[0] + picks[1]
    return g[np.ix_(idx, idx)], len(picks[0])


def gaussian_mutual_information(cov: np.ndarray, n_first: int) -> float:
    """Mutual information in bits between the first ``n_first`` variables and the rest."""
    s_a = np.linalg.det(cov[:n_first, :n_first])
    s_b = np.linalg.det(cov[n_first:, n_first:])
    s = np.linalg.det(cov)
    if not (s_a > 0 and s_b > 0 and s > 0):
        raise NumericalFailure("outcome covariance is not positive definite")
    return 0.5 * math.log2(s_a * s_b / s)


def _condition_reference(net: PurifiedNetwork, spec: ProtocolSpec) -> tuple[np.ndarray, list[int]]:
    """Measure the reference party; return the conditional cm and Eve's indices in it."""
    if spec.reconciliation is Reconciliation.Direct:
        ref, ref_het, other_het = net.alice, spec.alice_heterodynes, spec.bob_heterodynes
    else:
        ref, ref_het, other_het = net.bob, spec.bob_heterodynes, spec.alice_heterodynes
    eve = net.eve
    if not ref_het:
        cond = condition_homodyne(net.cm, ref, Quadrature.X)
    elif other_het:
        cond = condition_heterodyne(net.cm, ref)
    else:
        # reference heterodynes but keeps only the quadrature the other side measured
        g, _ = _split_on_vacuum(net.cm, ref)
        cond = condition_homodyne(g, ref, Quadrature.X)
    return cond, [k - (k > ref) for k in eve]


def generic_key_rate(spec: ProtocolSpec, params: ChannelParams) -> KeyRateBreakdown:
    """Key rate from the full Alice-Bob-Eve purification."""
    net = build_purified_network(params)
    cov, n_a = _outcome_covariance(net.ab_cm(), spec.alice_heterodynes, spec.bob_heterodynes)
    i_ab = gaussian_mutual_information(cov, n_a)
    s_e = von_neumann_entropy(net.eve_cm())
    cond, eve = _condition_reference(net, spec)
    s_cond = von_neumann_entropy(partial_trace(cond, eve))
    chi = s_e - s_cond
    if chi < -1e-9:
        raise NumericalFailure(f"negative Holevo information {chi!r}")
    chi = max(chi, 0.0)
    return KeyRateBreakdown(i_ab, s_e, s_cond, chi, i_ab - chi)


# --- Monte Carlo -------------------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float
    n_samples: int
    seed: int


def outcome_model(spec: ProtocolSpec, params: ChannelParams) -> tuple[np.ndarray, int]:
    """Measured-quadrature covariance from ``(a, b, c)``.

    Homodyne outcomes have variance ``a`` (or ``b``), heterodyne quadratures
    ``a + 1`` (or ``b + 1``); each x pair correlates with ``+c`` and each p pair
    with ``-c``. A heterodyning party facing a homodyning one contributes both
    quadratures, the p one being uncorrelated.
    """
    r = reduced_ab(params)
    a_het, b_het = spec.alice_heterodynes, spec.bob_heterodynes
    va = r.a + 1.0 if a_het else r.a
    vb = r.b + 1.0 if b_het else r.b
    na, nb = (2 if a_het else 1), (2 if b_het else 1)
    cov = np.zeros((na + nb, na + nb))
    cov[:na, :na] = va * np.eye(na)
    cov[na:, na:] = vb * np.eye(nb)
    cov[0, na] = cov[na, 0] = r.c
    if a_het and b_het:
        cov[1, na + 1] = cov[na + 1, 1] = -r.c
    return cov, na


def monte_carlo_mi(spec: ProtocolSpec, params: ChannelParams, n_samples: int,
                   seed: int, n_batches: int = 10) -> McEstimate:
    """Plug-in estimate of I_AB from sampled measurement outcomes.

    Only the outcome covariance model is tested this way: the estimator
    assumes Gaussian statistics, so it cannot check Gaussianity itself.
    The standard error comes from batch means.
    """
    if n_samples < 10_000:
        raise InvalidArgument("monte_carlo_mi needs at least 10^4 samples")
    if not 0 <= seed < 2**64:
        raise InvalidArgument("seed must be a 64-bit unsigned integer")
    cov, na = outcome_model(spec, params)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("outcome covariance is not positive definite") from exc
    rng = np.random.Generator(np.random.PCG64(seed))
    samples = rng.standard_normal((n_samples, cov.shape[0])) @ chol.T

    def plug_in(block: np.ndarray) -> float:
        return gaussian_mutual_information(np.cov(block, rowvar=False), na)

    batches = np.array_split(samples, n_batches)
    per_batch = np.array([plug_in(b) for b in batches])
    std_error = float(np.std(per_batch, ddof=1) / math.sqrt(n_batches))
    return McEstimate(plug_in(samples), std_error, n_samples, seed)


# --- thresholds and sweeps ---------------------------------------------------


def _rate_function(method: str) -> Callable[[ProtocolSpec, ChannelParams], KeyRateBreakdown]:
    if method == "closed":
        return key_rate
    if method == "generic":
        return generic_key_rate
    raise InvalidArgument(f"unknown method {method!r}")


def threshold_transmission(spec: ProtocolSpec, V: float, W1: float, W2: float, axis: Axis,
                           tol: float = 1e-6, max_iter: int = 60, method: str = "closed") -> float:
    """Smallest transmission along ``axis`` with a strictly positive key rate.

    Returns :data:`NEVER_POSITIVE` when the key rate is not positive at ``t = 1``.

    Raises:
        NumericalFailure: if the rate is not non-decreasing on a 16-point probe of (0, 1].
    """
    rate = _rate_function(method)

    def k(t: float) -> float:
        return rate(spec, axis.params(t, V, W1, W2)).key_rate

    probe = [(j / 16, k(j / 16)) for j in range(1, 17)]
    for (t0, k0), (t1, k1) in zip(probe, probe[1:]):
        if k1 < k0 - 1e-12:
            raise NumericalFailure(
                f"key rate not monotone in t for {spec} on axis {axis.value}: "
                f"K({t0:g})={k0:.6g} > K({t1:g})={k1:.6g}")
    if probe[-1][1] <= 0.0:
        return NEVER_POSITIVE
    lo, hi = 0.0, 1.0
    if k(lo) > 0.0:
        return 0.0
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if k(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class SweepGrid:
    spec: ProtocolSpec
    V: float
    W1: float
    W2: float
    axis: Axis
    t_start: float
    t_end: float
    steps: int

    def __post_init__(self):
        if not 0.0 <= self.t_start <= self.t_end <= 1.0:
            raise InvalidArgument("need 0 <= t_start <= t_end <= 1")
        if self.steps < 2:
            raise InvalidArgument("steps must be >= 2")

    def points(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps)


@dataclass(frozen=True)
class SweepRow:
    t: float
    params: ChannelParams
    closed: Optional[KeyRateBreakdown] = None
    generic: Optional[KeyRateBreakdown] = None


def sweep(grid: SweepGrid, method: str = "closed") -> list[SweepRow]:
    """Evaluate the key rate at each point of ``grid``, ascending in t."""
    if method not in ("closed", "generic", "both"):
        raise InvalidArgument(f"unknown method {method!r}")
    rows = []
    for t in grid.points():
        p = grid.axis.params(float(t), grid.V, grid.W1, grid.W2)
        closed = key_rate(grid.spec, p) if method in ("closed", "both") else None
        generic = generic_key_rate(grid.spec, p) if method in ("generic", "both") else None
        rows.append(SweepRow(float(t), p, closed, generic))
    return rows
