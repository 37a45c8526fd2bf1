"""Monte Carlo secrecy-outage estimation over independent user groups.

The engine partitions trials into fixed-size chunks. Chunk k draws all
its channels from a counter-based Philox stream derived from
(seed, chunk_index), so results are bit-identical no matter how many
workers process the chunks or in which order they finish. Reduction is
a sum of outage counts.

Baseline schemes replace only the legitimate far-user link and keep
the eavesdropper's composite channel untouched, so scheme comparisons
isolate what the RIS contributes to the protected side.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from . import analytic, model
from .config import SystemConfig

Z95 = 1.959963984540054  # two-sided 95% normal quantile

# Chunk sizing targets roughly 2^21 drawn cascade coefficients per chunk
# so memory stays flat as N and M grow. The size depends only on the
# config, never on the worker count, which keeps estimates reproducible.
_CHUNK_TARGET = 1 << 21
_CHUNK_MIN = 1 << 10
_CHUNK_MAX = 1 << 16


class Scheme(Enum):
    """Transmission schemes: the RIS-NOMA system plus its comparison baselines."""

    RIS_NOMA = "ris-noma"
    DIRECT_NOMA = "direct-noma"
    RELAY_NOMA = "relay-noma"
    RIS_OMA = "ris-oma"


@dataclass(frozen=True)
class SopEstimate:
    """Monte Carlo outage estimate with binomial error bars."""

    value: float
    trials: int
    stderr: float
    ci95: tuple[float, float]


@dataclass(frozen=True)
class CurvePoint:
    """One SNR point of a figure series."""

    snr_db: float
    sop_sim: SopEstimate
    sop_analytic: float | None
    sop_asymptotic: float | None
    scheme: Scheme


@dataclass(frozen=True)
class Curve:
    """A figure series: outage versus legitimate-link SNR for one scheme."""

    scheme: Scheme
    points: tuple[CurvePoint, ...]


def _chunk_size(cfg: SystemConfig) -> int:
    per_trial = max(1, cfg.n_groups * cfg.n_elements)
    return max(_CHUNK_MIN, min(_CHUNK_MAX, _CHUNK_TARGET // per_trial))


def _chunk_plan(trials: int, size: int) -> list[tuple[int, int]]:
    """(chunk_index, chunk_trials) pairs covering exactly `trials` trials."""
    plan = []
    index = 0
    remaining = trials
    while remaining > 0:
        take = min(size, remaining)
        plan.append((index, take))
        index += 1
        remaining -= take
    return plan


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,))
    return np.random.Generator(np.random.Philox(ss))


def _noma_ok(gamma_1, gamma_2, eve_sq, cfg: SystemConfig, c_th: float):
    """Group survival: both users clear the secrecy threshold.

    C > R is evaluated as (1 + gamma_legit) > 2^R * (1 + gamma_eve),
    which also gives the natural reading at R = 0 (outage when the
    eavesdropper matches or beats a user).
    """
    ok_far = (1.0 + gamma_1) > c_th * (1.0 + eve_sq * cfg.c1_sq)
    ok_near = (1.0 + gamma_2) > c_th * (1.0 + eve_sq * cfg.c2_sq)
    return ok_far & ok_near


def _saturating_sinr(power_gain, cfg: SystemConfig):
    """NOMA far-user SINR for a given channel power on the RIS budget."""
    p = power_gain * cfg.gamma_bar_ris()
    return p * cfg.c1_sq / (p * cfg.c2_sq + 1.0)


def _group_ok(cfg: SystemConfig, scheme: Scheme, rng: np.random.Generator,
              n: int) -> np.ndarray:
    """Boolean (n, M) matrix: group survives the secrecy target."""
    c_th = 2.0 ** cfg.target_rate
    shape = (n, cfg.n_groups)
    if scheme is Scheme.RIS_NOMA:
        batch = model.draw_groups(cfg, rng, n)
        g1 = model.gamma_far(batch.a_sum, cfg)
        g2 = model.gamma_near(batch.h2_sq, cfg)
        return _noma_ok(g1, g2, batch.eve_composite_sq, cfg, c_th)

    if scheme is Scheme.DIRECT_NOMA:
        # Far user loses the RIS: one Rayleigh link on the same budget.
        h_far = rng.exponential(size=shape)
        h2 = rng.exponential(size=shape)
        alpha = model.sample_rayleigh_amplitude(rng, shape + (cfg.n_elements,))
        eve_sq = model._eve_composite_sq(cfg, rng, alpha)
        g1 = _saturating_sinr(h_far, cfg)
        g2 = model.gamma_near(h2, cfg)
        return _noma_ok(g1, g2, eve_sq, cfg, c_th)

    if scheme is Scheme.RELAY_NOMA:
        # Half-duplex decode-and-forward relay at the RIS position: the
        # far user's end-to-end SINR is the weaker of the two hops.
        hop1 = rng.exponential(size=shape)
        hop2 = rng.exponential(size=shape)
        h2 = rng.exponential(size=shape)
        alpha = model.sample_rayleigh_amplitude(rng, shape + (cfg.n_elements,))
        eve_sq = model._eve_composite_sq(cfg, rng, alpha)
        g1 = np.minimum(_saturating_sinr(hop1, cfg), _saturating_sinr(hop2, cfg))
        g2 = model.gamma_near(h2, cfg)
        return _noma_ok(g1, g2, eve_sq, cfg, c_th)

    if scheme is Scheme.RIS_OMA:
        # Two orthogonal slots at full power, rate factor 1/2 per user;
        # the eavesdropper intercepts each slot at full power through
        # the unchanged composite channel.
        batch = model.draw_groups(cfg, rng, n)
        c_th_oma = c_th * c_th  # 2^(2R) absorbs the 1/2 rate factor
        snr_far = np.square(batch.a_sum) * cfg.gamma_bar_ris()
        snr_near = batch.h2_sq * cfg.gamma_bar_legit()
        ok_far = (1.0 + snr_far) > c_th_oma * (1.0 + batch.eve_composite_sq)
        ok_near = (1.0 + snr_near) > c_th_oma * (1.0 + batch.eve_composite_sq)
        return ok_far & ok_near

    raise ValueError(f"unknown scheme {scheme!r}")


def _count_outages(cfg: SystemConfig, scheme: Scheme,
                   chunk_index: int, chunk_trials: int) -> int:
    """Outage count for one chunk. Outage: no group clears the target."""
    rng = _chunk_rng(cfg.seed, chunk_index)
    ok = _group_ok(cfg, scheme, rng, chunk_trials)
    return int(np.count_nonzero(~ok.any(axis=1)))


def wald_ci(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wald binomial confidence interval, clamped to [0, 1]."""
    p = successes / trials
    half = z * math.sqrt(p * (1.0 - p) / trials)
    return (max(0.0, p - half), min(1.0, p + half))


def clopper_pearson_ci(successes: int, trials: int,
                       confidence: float = 0.95) -> tuple[float, float]:
    """Exact binomial interval, preferable when the outage rate is tiny."""
    alpha = 1.0 - confidence
    lo = 0.0 if successes == 0 else float(
        stats.beta.ppf(alpha / 2.0, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(
        stats.beta.ppf(1.0 - alpha / 2.0, successes + 1, trials - successes))
    return (lo, hi)


def estimate_sop(cfg: SystemConfig, scheme: Scheme = Scheme.RIS_NOMA,
                 workers: int = 1) -> SopEstimate:
    """Estimate the system secrecy outage probability by simulation.

    Per trial, all M groups are drawn independently; the trial is an
    outage when even the best group's minimum secrecy rate misses the
    target. Infeasible power splits are simulated as-is (they converge
    to SOP = 1). The worker count changes wall time only, never the
    estimate.
    """
    if cfg.trials < 1000:
        raise ValueError("estimate_sop needs at least 1000 trials")
    plan = _chunk_plan(cfg.trials, _chunk_size(cfg))
    if workers <= 1 or len(plan) == 1:
        counts = [_count_outages(cfg, scheme, i, n) for i, n in plan]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(
                _count_outages,
                [cfg] * len(plan), [scheme] * len(plan),
                [i for i, _ in plan], [n for _, n in plan],
                chunksize=max(1, len(plan) // (4 * workers)),
            ))
    outages = int(sum(counts))
    value = outages / cfg.trials
    stderr = math.sqrt(value * (1.0 - value) / cfg.trials)
    return SopEstimate(value=value, trials=cfg.trials, stderr=stderr,
                       ci95=wald_ci(outages, cfg.trials))


def sweep(cfg: SystemConfig, scheme: Scheme, snr_db_list: list[float],
          workers: int = 1) -> Curve:
    """Estimate one outage curve across legitimate-link SNRs.

    Points come out sorted by SNR with unique abscissae; the analytic
    and asymptotic columns are filled only for the RIS-NOMA scheme.
    """
    if len(snr_db_list) == 0:
        raise ValueError("sweep needs at least one SNR point")
    snrs = sorted(float(s) for s in snr_db_list)
    if len(set(snrs)) != len(snrs):
        raise ValueError("sweep SNR points must be unique")
    points = []
    for snr_db in snrs:
        point_cfg = cfg.with_snr(snr_db)
        est = estimate_sop(point_cfg, scheme, workers=workers)
        sop_an = sop_as = None
        if scheme is Scheme.RIS_NOMA:
            dc = analytic.derive_constants(point_cfg)
            sop_an = analytic.sop_system(dc, point_cfg.n_groups)
            sop_as = analytic.sop_asymptotic(dc, point_cfg.n_groups)
        points.append(CurvePoint(snr_db=snr_db, sop_sim=est,
                                 sop_analytic=sop_an, sop_asymptotic=sop_as,
                                 scheme=scheme))
    return Curve(scheme=scheme, points=tuple(points))
