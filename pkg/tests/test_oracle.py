import itertools

import numpy as np
import pytest

from midqkd.channel import ChannelParams, build_purified_network, reduced_ab
from midqkd.errors import InvalidArgument, NumericalFailure
from midqkd.gaussian import von_neumann_entropy
from midqkd.keyrate import ALL_PROTOCOLS, Measurement, ProtocolSpec, Reconciliation, StatePrep, key_rate
from midqkd.oracle import (
    NEVER_POSITIVE,
    Axis,
    SweepGrid,
    gaussian_mutual_information,
    generic_key_rate,
    monte_carlo_mi,
    outcome_model,
    sweep,
    threshold_transmission,
)

Sq, Co = StatePrep.Squeezed, StatePrep.Coherent
Hom, Het = Measurement.Homodyne, Measurement.Heterodyne
DR, RR = Reconciliation.Direct, Reconciliation.Reverse
CO_HOM_DR = ProtocolSpec(Co, Hom, DR)


class TestGenericKeyRate:
    @pytest.mark.parametrize("spec", ALL_PROTOCOLS)
    def test_lossless(self, spec):
        k = generic_key_rate(spec, ChannelParams(6.0, 1.0, 1.0, 1.2, 1.4))
        assert k.holevo == pytest.approx(0.0, abs=1e-8)
        assert k.key_rate == pytest.approx(k.i_ab, abs=1e-8)

    @pytest.mark.parametrize("spec,p", list(itertools.product(
        ALL_PROTOCOLS, [ChannelParams(20.0, 0.7, 0.4, 1.1, 1.3), ChannelParams(2.0, 0.35, 0.9, 1.01, 1.2)])))
    def test_matches_closed_form(self, spec, p):
        closed, generic = key_rate(spec, p), generic_key_rate(spec, p)
        assert generic.key_rate == pytest.approx(closed.key_rate, abs=1e-7)
        assert generic.i_ab == pytest.approx(closed.i_ab, abs=1e-9)

    def test_eve_entropy_is_ab_entropy(self):
        p = ChannelParams(8.0, 0.6, 0.3, 1.2, 1.05)
        s_ab = von_neumann_entropy(build_purified_network(p).ab_cm())
        for spec in ALL_PROTOCOLS:
            assert generic_key_rate(spec, p).s_e == pytest.approx(s_ab, abs=1e-8)

    def test_reverse_is_computed_directly(self):
        # asymmetric channel: reverse rates differ from direct ones
        p = ChannelParams(20.0, 0.9, 0.3)
        spec = ProtocolSpec(Sq, Hom, RR)
        assert generic_key_rate(spec, p).key_rate != pytest.approx(
            generic_key_rate(ProtocolSpec(Sq, Hom, DR), p).key_rate, abs=1e-3)


class TestMonteCarlo:
    def test_outcome_model_shapes(self):
        p = ChannelParams(5.0, 0.8, 0.7)
        r = reduced_ab(p)
        cov, na = outcome_model(ProtocolSpec(Co, Het), p)
        assert na == 2
        assert np.allclose(cov, [[r.a + 1, 0, r.c, 0], [0, r.a + 1, 0, -r.c],
                                 [r.c, 0, r.b + 1, 0], [0, -r.c, 0, r.b + 1]])
        cov, na = outcome_model(ProtocolSpec(Sq, Hom), p)
        assert na == 1 and np.allclose(cov, [[r.a, r.c], [r.c, r.b]])

    @pytest.mark.parametrize("spec", [s for s in ALL_PROTOCOLS if s.reconciliation is DR])
    def test_model_reproduces_closed_mi(self, spec):
        p = ChannelParams(12.0, 0.6, 0.8, 1.1, 1.2)
        cov, na = outcome_model(spec, p)
        assert gaussian_mutual_information(cov, na) == pytest.approx(key_rate(spec, p).i_ab, abs=1e-12)

    def test_uncorrelated(self):
        est = monte_carlo_mi(ProtocolSpec(Sq, Hom), ChannelParams(5.0, 0.0, 0.5), 10**4, seed=3)
        assert est.std_error > 0
        assert abs(est.estimate) <= 3 * est.std_error

    def test_lossless_squeezed(self):
        est = monte_carlo_mi(ProtocolSpec(Sq, Hom), ChannelParams(4.0, 1.0, 1.0), 10**6, seed=11)
        assert abs(est.estimate - 2.0) <= 3 * est.std_error

    def test_deterministic(self):
        args = (ProtocolSpec(Co, Het), ChannelParams(3.0, 0.7, 0.7), 20_000)
        a, b = monte_carlo_mi(*args, seed=2**63 + 5), monte_carlo_mi(*args, seed=2**63 + 5)
        assert a == b
        assert monte_carlo_mi(*args, seed=1).estimate != a.estimate

    def test_affine_invariance_of_plug_in(self):
        rng = np.random.default_rng(0)
        cov = np.array([[3.0, 1.2], [1.2, 2.0]])
        x = rng.multivariate_normal([0, 0], cov, size=50_000)
        y = x * np.array([7.5, -0.2]) + np.array([3.0, -40.0])
        i_x = gaussian_mutual_information(np.cov(x, rowvar=False), 1)
        i_y = gaussian_mutual_information(np.cov(y, rowvar=False), 1)
        assert i_x == pytest.approx(i_y, abs=1e-9)

    def test_needs_enough_samples(self):
        with pytest.raises(InvalidArgument):
            monte_carlo_mi(ProtocolSpec(Sq, Hom), ChannelParams(4.0, 1.0, 1.0), 999, seed=0)

    def test_seed_range(self):
        with pytest.raises(InvalidArgument):
            monte_carlo_mi(ProtocolSpec(Sq, Hom), ChannelParams(4.0, 1.0, 1.0), 10**4, seed=2**64)


class TestThreshold:
    def test_trusted_3db(self):
        t = threshold_transmission(CO_HOM_DR, 1e4, 1.0, 1.0, Axis.EffectiveT_trusted)
        assert t == pytest.approx(0.5, abs=1e-3)

    @pytest.mark.parametrize("method", ["closed", "generic"])
    def test_middle_beats_3db(self, method):
        t = threshold_transmission(CO_HOM_DR, 20.0, 1.0, 1.0, Axis.EffectiveT_symmetric, method=method)
        assert t < 0.5
        assert t == pytest.approx(0.3674479, abs=2e-6)

    def test_reverse_squeezed_has_no_limit(self):
        t = threshold_transmission(ProtocolSpec(Sq, Hom, RR), 20.0, 1.0, 1.0, Axis.EffectiveT_trusted)
        assert t <= 1e-5

    @pytest.mark.parametrize("spec,axis,v,w", [
        (CO_HOM_DR, Axis.EffectiveT_symmetric, 20.0, 1.0),
        (CO_HOM_DR, Axis.EffectiveT_trusted, 50.0, 1.05),
        (ProtocolSpec(Co, Het, RR), Axis.EffectiveT_symmetric, 8.0, 1.1),
        (ProtocolSpec(Sq, Hom, RR), Axis.PerArmT, 100.0, 1.1),
    ])
    def test_bracketing(self, spec, axis, v, w):
        tol = 1e-6
        t = threshold_transmission(spec, v, w, w, axis, tol=tol)
        assert 0.0 < t <= 1.0

        def k(x):
            return key_rate(spec, axis.params(x, v, w, w)).key_rate

        assert k(t - tol) <= 0.0 < k(t + tol)

    def test_never_positive(self):
        assert threshold_transmission(CO_HOM_DR, 1.0, 1.0, 1.0, Axis.EffectiveT_symmetric) == NEVER_POSITIVE

    def test_non_monotone_rejected(self):
        with pytest.raises(NumericalFailure, match="not monotone"):
            threshold_transmission(ProtocolSpec(Sq, Hom, DR), 2.0, 1.0, 1.0, Axis.PerArmT)

    def test_axis_mapping(self):
        assert Axis.EffectiveT_symmetric.params(0.25, 3.0) == ChannelParams(3.0, 0.5, 0.5)
        assert Axis.EffectiveT_trusted.params(0.25, 3.0, 1.1, 1.2) == ChannelParams(3.0, 1.0, 0.25, 1.1, 1.2)
        assert Axis.PerArmT.params(0.25, 3.0) == ChannelParams(3.0, 0.25, 0.25)


class TestSweep:
    def test_degenerate_lossless(self):
        rows = sweep(SweepGrid(CO_HOM_DR, 20.0, 1.0, 1.0, Axis.EffectiveT_symmetric, 1.0, 1.0, 2))
        assert len(rows) == 2
        assert rows[0] == rows[1]
        assert rows[0].closed.key_rate == pytest.approx(rows[0].closed.i_ab, abs=1e-9)

    def test_middle_vs_trusted_curves(self):
        grids = {axis: SweepGrid(CO_HOM_DR, 20.0, 1.0, 1.0, axis, 0.05, 1.0, 96)
                 for axis in (Axis.EffectiveT_symmetric, Axis.EffectiveT_trusted)}
        curves = {axis: sweep(g, "both") for axis, g in grids.items()}
        trusted_cut = min(r.t for r in curves[Axis.EffectiveT_trusted] if r.closed.key_rate > 0)
        middle_cut = min(r.t for r in curves[Axis.EffectiveT_symmetric] if r.closed.key_rate > 0)
        assert middle_cut < trusted_cut
        for rows in curves.values():
            ts = [r.t for r in rows]
            assert ts == sorted(ts)
            assert max(abs(r.closed.key_rate - r.generic.key_rate) for r in rows) <= 1e-7

    def test_method_selection(self):
        grid = SweepGrid(ProtocolSpec(Sq, Het, RR), 5.0, 1.1, 1.1, Axis.PerArmT, 0.2, 0.8, 4)
        rows = sweep(grid, "generic")
        assert all(r.closed is None and r.generic is not None for r in rows)
        with pytest.raises(InvalidArgument):
            sweep(grid, "magic")

    @pytest.mark.parametrize("args", [(0.8, 0.2, 5), (0.1, 0.9, 1), (-0.1, 0.5, 3)])
    def test_invalid_grid(self, args):
        with pytest.raises(InvalidArgument):
            SweepGrid(CO_HOM_DR, 2.0, 1.0, 1.0, Axis.PerArmT, *args)

    def test_deterministic(self):
        grid = SweepGrid(CO_HOM_DR, 20.0, 1.0, 1.0, Axis.EffectiveT_symmetric, 0.1, 1.0, 10)
        assert sweep(grid, "both") == sweep(grid, "both")
