import math

import numpy as np
import pytest

from risnoma.analytic import derive_constants, sop_system
from risnoma.config import SystemConfig
from risnoma.model import draw_groups
from risnoma.montecarlo import (Scheme, _chunk_plan, _chunk_rng,
                                _chunk_size, clopper_pearson_ci, estimate_sop,
                                sweep, wald_ci)


def make_cfg(**kw):
    base = dict(n_elements=4, n_groups=2, c1_sq=0.95, target_rate=0.05,
                snr_legit_db=20.0, snr_eve_db=0.0, seed=2024, trials=50_000)
    base.update(kw)
    return SystemConfig(**base)


# -- Estimator mechanics -----------------------------------------------------

def test_estimate_is_deterministic():
    cfg = make_cfg()
    assert estimate_sop(cfg) == estimate_sop(cfg)


def test_worker_count_cannot_change_results():
    cfg = make_cfg(trials=30_000)
    serial = estimate_sop(cfg, workers=1)
    parallel = estimate_sop(cfg, workers=4)
    assert serial == parallel


def test_stderr_matches_binomial_formula():
    est = estimate_sop(make_cfg())
    expected = math.sqrt(est.value * (1.0 - est.value) / est.trials)
    assert est.stderr == pytest.approx(expected, rel=1e-12)
    assert 0.0 <= est.ci95[0] <= est.value <= est.ci95[1] <= 1.0


def test_doubling_trials_halves_variance():
    # The binomial variance v(1-v)/n is the error model; doubling n at a
    # comparable outage rate halves stderr^2 up to sampling noise.
    small = estimate_sop(make_cfg(trials=40_000))
    large = estimate_sop(make_cfg(trials=80_000))
    ratio = large.stderr ** 2 / small.stderr ** 2
    assert 0.35 <= ratio <= 0.65


def test_minimum_trial_count_enforced():
    with pytest.raises(ValueError):
        estimate_sop(make_cfg(trials=999))


def test_chunk_plan_covers_trials_exactly():
    cfg = make_cfg(trials=150_001)
    plan = _chunk_plan(cfg.trials, _chunk_size(cfg))
    assert sum(n for _, n in plan) == cfg.trials
    assert [i for i, _ in plan] == list(range(len(plan)))


def test_chunk_streams_differ():
    a = _chunk_rng(7, 0).standard_normal(4)
    b = _chunk_rng(7, 1).standard_normal(4)
    assert not np.allclose(a, b)


# -- Outage semantics --------------------------------------------------------

def test_single_group_equals_direct_min_rate_fraction():
    # With M = 1 the engine's outage fraction must equal the fraction of
    # trials whose minimum secrecy rate misses the target, recomputed
    # straight from the same per-chunk channel draws.
    cfg = make_cfg(n_groups=1, trials=20_000)
    est = estimate_sop(cfg, Scheme.RIS_NOMA)

    c_th = 2.0 ** cfg.target_rate
    outages = 0
    for index, count in _chunk_plan(cfg.trials, _chunk_size(cfg)):
        batch = draw_groups(cfg, _chunk_rng(cfg.seed, index), count)
        from risnoma.model import gamma_far, gamma_near
        g1 = gamma_far(batch.a_sum, cfg)
        g2 = gamma_near(batch.h2_sq, cfg)
        b2 = batch.eve_composite_sq
        ok_far = (1.0 + g1) > c_th * (1.0 + b2 * cfg.c1_sq)
        ok_near = (1.0 + g2) > c_th * (1.0 + b2 * cfg.c2_sq)
        outages += int(np.count_nonzero(~(ok_far & ok_near).any(axis=1)))
    assert est.value == pytest.approx(outages / cfg.trials, abs=0.0)


def test_zero_target_rate_outage_is_rare_at_high_snr():
    # With no rate demand, outage needs the eavesdropper to beat every
    # group, which is unlikely once the legitimate links are strong.
    cfg = make_cfg(target_rate=0.0, snr_legit_db=40.0, trials=20_000)
    est = estimate_sop(cfg)
    assert est.value < 0.01


def test_infeasible_split_saturates_simulation():
    cfg = make_cfg(c1_sq=0.5, target_rate=1.0, trials=10_000)
    est = estimate_sop(cfg)  # must not raise
    assert est.value == 1.0


def test_more_groups_reduce_outage():
    base = dict(trials=40_000, snr_legit_db=10.0, target_rate=0.3)
    p1 = estimate_sop(make_cfg(n_groups=1, **base)).value
    p3 = estimate_sop(make_cfg(n_groups=3, **base)).value
    assert p3 < p1


# -- Baselines ----------------------------------------------------------------

def test_ris_beats_direct_and_relay_baselines():
    # Same wiretap channel, weaker legitimate far link: the baselines
    # must show more outage at pre-saturation SNRs.
    cfg = make_cfg(n_elements=5, target_rate=0.3, snr_legit_db=10.0,
                   trials=60_000)
    ris = estimate_sop(cfg, Scheme.RIS_NOMA)
    direct = estimate_sop(cfg, Scheme.DIRECT_NOMA)
    relay = estimate_sop(cfg, Scheme.RELAY_NOMA)
    joint = 4.0 * math.sqrt(ris.stderr ** 2 + direct.stderr ** 2)
    assert ris.value < direct.value - joint
    assert ris.value < relay.value - 4.0 * math.sqrt(ris.stderr ** 2 + relay.stderr ** 2)
    # The relay's extra hop cannot beat the single direct link.
    assert relay.value >= direct.value - 4.0 * math.sqrt(
        relay.stderr ** 2 + direct.stderr ** 2)


def test_ris_advantage_holds_across_fig3_grid():
    # Baselines share the wiretap channel, so the RIS array gain on the
    # far user can only help: never worse anywhere on the grid, strictly
    # better before the curves saturate toward the common constant.
    base = dict(n_elements=5, target_rate=0.3, trials=100_000)
    for snr in (0.0, 10.0, 20.0, 30.0, 40.0, 50.0):
        ris = estimate_sop(make_cfg(snr_legit_db=snr, **base), Scheme.RIS_NOMA)
        for scheme in (Scheme.DIRECT_NOMA, Scheme.RELAY_NOMA):
            other = estimate_sop(make_cfg(snr_legit_db=snr, **base), scheme)
            joint = math.sqrt(ris.stderr ** 2 + other.stderr ** 2)
            assert ris.value <= other.value + 3.0 * joint, (scheme, snr)
            if 5.0 <= snr <= 20.0:
                assert ris.value < other.value - 3.0 * joint, (scheme, snr)


def test_ris_oma_runs_and_wins_at_high_snr():
    # Orthogonal slots let both users outgrow the fixed wiretap channel,
    # so OMA outage keeps falling where NOMA has saturated.
    cfg = make_cfg(n_elements=5, target_rate=0.3, snr_legit_db=50.0,
                   trials=60_000)
    noma = estimate_sop(cfg, Scheme.RIS_NOMA)
    oma = estimate_sop(cfg, Scheme.RIS_OMA)
    assert oma.value < noma.value


def test_baselines_are_deterministic_too():
    cfg = make_cfg(trials=20_000)
    for scheme in (Scheme.DIRECT_NOMA, Scheme.RELAY_NOMA, Scheme.RIS_OMA):
        assert estimate_sop(cfg, scheme, workers=1) == \
            estimate_sop(cfg, scheme, workers=3)


def test_estimate_accepts_geometry_parameterization():
    from risnoma.config import Geometry
    geo = Geometry(d_sr=1.0, d_ru1=1.0, d_su2=1.0, d_re=1.0, d_se=1.0,
                   chi=2.0, es_over_n0=100.0, es_over_ne=1.0)
    cfg_geo = make_cfg(snr_legit_db=None, snr_eve_db=None, geometry=geo,
                       trials=20_000)
    cfg_db = make_cfg(snr_legit_db=20.0, snr_eve_db=0.0, trials=20_000)
    # Equal resolved budgets draw identical channels, hence equal estimates.
    assert estimate_sop(cfg_geo) == estimate_sop(cfg_db)


def test_pinned_ris_budget_changes_far_link_only():
    rich = estimate_sop(make_cfg(snr_legit_db=10.0, trials=40_000))
    starved = estimate_sop(make_cfg(snr_legit_db=10.0, snr_ris_db=-10.0,
                                    trials=40_000))
    assert starved.value > rich.value  # weaker RIS path, more outage


# -- Sweeps -------------------------------------------------------------------

def test_singleton_sweep_equals_estimate():
    cfg = make_cfg(trials=20_000)
    curve = sweep(cfg, Scheme.RIS_NOMA, [20.0])
    assert len(curve.points) == 1
    assert curve.points[0].sop_sim == estimate_sop(cfg.with_snr(20.0))


def test_sweep_sorts_and_fills_analytic_columns():
    cfg = make_cfg(trials=10_000)
    curve = sweep(cfg, Scheme.RIS_NOMA, [30.0, 10.0, 20.0])
    snrs = [p.snr_db for p in curve.points]
    assert snrs == sorted(snrs) and len(set(snrs)) == 3
    for point in curve.points:
        dc = derive_constants(cfg.with_snr(point.snr_db))
        assert point.sop_analytic == pytest.approx(
            sop_system(dc, cfg.n_groups), rel=1e-12)
        assert point.sop_asymptotic is not None
        assert point.scheme is Scheme.RIS_NOMA


def test_sweep_baselines_have_no_analytic_columns():
    cfg = make_cfg(trials=10_000)
    curve = sweep(cfg, Scheme.DIRECT_NOMA, [10.0, 20.0])
    for point in curve.points:
        assert point.sop_analytic is None
        assert point.sop_asymptotic is None


def test_sweep_rejects_bad_inputs():
    cfg = make_cfg(trials=10_000)
    with pytest.raises(ValueError):
        sweep(cfg, Scheme.RIS_NOMA, [])
    with pytest.raises(ValueError):
        sweep(cfg, Scheme.RIS_NOMA, [10.0, 10.0])


def test_analytic_tracks_simulation_along_curve():
    # The closed form bounds the within-model outage from below, but the
    # exponential wiretap model understates mass near zero, so at low SNR
    # the analytic value can sit slightly above the exact simulation.
    # From 20 dB up the bound direction holds and the curves are tight.
    cfg = make_cfg(trials=100_000)
    curve = sweep(cfg, Scheme.RIS_NOMA, [0.0, 10.0, 20.0, 30.0, 40.0])
    for point in curve.points:
        gap = point.sop_analytic - point.sop_sim.value
        if point.snr_db >= 20.0:
            assert point.sop_analytic <= point.sop_sim.value + 3.0 * point.sop_sim.stderr
            assert abs(gap) <= 0.01
        else:
            assert abs(gap) <= 0.025


# -- Confidence intervals -----------------------------------------------------

def test_wald_ci_clamps():
    lo, hi = wald_ci(0, 1000)
    assert lo == 0.0 and hi == 0.0
    lo, hi = wald_ci(1000, 1000)
    assert lo == 1.0 and hi == 1.0


def test_clopper_pearson_brackets_tiny_rates():
    lo, hi = clopper_pearson_ci(0, 1000)
    assert lo == 0.0
    assert hi == pytest.approx(1.0 - 0.025 ** (1.0 / 1000.0), rel=1e-6)
    lo, hi = clopper_pearson_ci(3, 1000)
    assert 0.0 < lo < 3.0 / 1000.0 < hi < 0.02
