"""Channel sampling and per-realization SINR / secrecy-rate computation.

One NOMA group consists of a far user served through its RIS and a near
user served directly by the source. The eavesdropper overhears the same
transmission through its own direct link plus the N reflections of the
group's RIS. All small-scale fading is Rayleigh; amplitudes are
normalized to unit second moment so that average SNRs factor out of the
fading entirely.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import SystemConfig

# Rayleigh scale for E[X^2] = 1 (per-component variance 1/2).
RAYLEIGH_SCALE = float(np.sqrt(0.5))

TWO_PI = 2.0 * np.pi


def sample_rayleigh_amplitude(rng: np.random.Generator, size=None):
    """Draw Rayleigh fading amplitudes with unit second moment.

    E[X] = sqrt(pi)/2 and E[X^2] = 1, the normalization under which the
    Gaussian approximation of the RIS cascade sum has mean N*pi/4 and
    variance N*(1 - pi^2/16).
    """
    return rng.rayleigh(RAYLEIGH_SCALE, size=size)


@dataclass
class TrialDraw:
    """One realization of every channel quantity for one group plus eavesdropper."""

    alpha: np.ndarray            # (N,) source -> RIS element amplitudes
    beta_user: np.ndarray        # (N,) RIS element -> far-user amplitudes
    a_sum: float                 # coherent cascade sum, sum_i alpha_i * beta_user_i
    h2_sq: float                 # near-user power gain, unit-mean exponential
    eve_composite_sq: float      # eavesdropper composite channel power (mean N*g_re + g_de)
    residual_phases: np.ndarray  # (N,) reflection phases left over at the eavesdropper


@dataclass
class GroupRates:
    """Secrecy rates achieved by the two users of one group."""

    c_far: float
    c_near: float


class GroupBatch(NamedTuple):
    """Vectorized draws for a block of trials, shaped (n_trials, n_groups)."""

    a_sum: np.ndarray
    h2_sq: np.ndarray
    eve_composite_sq: np.ndarray


def _eve_composite_sq(cfg: SystemConfig, rng: np.random.Generator,
                      alpha: np.ndarray) -> np.ndarray:
    """Composite eavesdropper channel power for given source -> RIS amplitudes.

    The RIS phases are the ones chosen for the far user, so the residual
    phase of each reflection at the eavesdropper is uniform. The direct
    path and the average SNRs of both eavesdropper links are absorbed
    into the composite so its mean is N*gamma_re + gamma_de.

    Draw order (fixed): direct-path normals (re, im), reflection
    amplitudes, residual phases.
    """
    g_re = cfg.gamma_bar_eve_reflected()
    g_de = cfg.gamma_bar_eve_direct()
    shape = alpha.shape[:-1]
    he_re = rng.standard_normal(shape)
    he_im = rng.standard_normal(shape)
    beta_eve = sample_rayleigh_amplitude(rng, alpha.shape)
    psi = rng.uniform(0.0, TWO_PI, alpha.shape)
    weight = alpha * beta_eve
    re = np.sqrt(g_de / 2.0) * he_re + np.sqrt(g_re) * (weight * np.cos(psi)).sum(axis=-1)
    im = np.sqrt(g_de / 2.0) * he_im + np.sqrt(g_re) * (weight * np.sin(psi)).sum(axis=-1)
    return re * re + im * im


def draw_groups(cfg: SystemConfig, rng: np.random.Generator,
                n_trials: int) -> GroupBatch:
    """Draw all channel quantities for n_trials independent trials.

    Every trial holds cfg.n_groups independent groups; each group's
    eavesdropper composite reuses that group's source -> RIS amplitudes,
    since the first hop is shared by the far-user path and the
    eavesdropper's reflected path.

    Draw order (fixed): alpha, beta_user, h2_sq, then the eavesdropper
    block. The order is part of the reproducibility contract.
    """
    shape = (n_trials, cfg.n_groups, cfg.n_elements)
    alpha = sample_rayleigh_amplitude(rng, shape)
    beta_user = sample_rayleigh_amplitude(rng, shape)
    a_sum = np.einsum("tmn,tmn->tm", alpha, beta_user)
    h2_sq = rng.exponential(size=shape[:2])
    eve_sq = _eve_composite_sq(cfg, rng, alpha)
    return GroupBatch(a_sum=a_sum, h2_sq=h2_sq, eve_composite_sq=eve_sq)


def draw_trial(cfg: SystemConfig, rng: np.random.Generator) -> TrialDraw:
    """Draw one Monte Carlo realization for a single group plus eavesdropper."""
    n = cfg.n_elements
    alpha = sample_rayleigh_amplitude(rng, n)
    beta_user = sample_rayleigh_amplitude(rng, n)
    a_sum = float(alpha @ beta_user)
    h2_sq = float(rng.exponential())

    g_re = cfg.gamma_bar_eve_reflected()
    g_de = cfg.gamma_bar_eve_direct()
    he_re = rng.standard_normal()
    he_im = rng.standard_normal()
    beta_eve = sample_rayleigh_amplitude(rng, n)
    psi = rng.uniform(0.0, TWO_PI, n)
    weight = alpha * beta_eve
    re = np.sqrt(g_de / 2.0) * he_re + np.sqrt(g_re) * float((weight * np.cos(psi)).sum())
    im = np.sqrt(g_de / 2.0) * he_im + np.sqrt(g_re) * float((weight * np.sin(psi)).sum())

    return TrialDraw(
        alpha=alpha,
        beta_user=beta_user,
        a_sum=a_sum,
        h2_sq=h2_sq,
        eve_composite_sq=float(re * re + im * im),
        residual_phases=psi,
    )


def gamma_far(a_sum, cfg: SystemConfig):
    """Far-user SINR through the phase-aligned RIS.

    With cascade sum A and per-cascade average SNR g_ris this is
    A^2 c1^2 g_ris / (A^2 c2^2 g_ris + 1): the near-user signal is
    decoded last, so its share interferes. Strictly below c1_sq/c2_sq.
    Accepts scalars or arrays.
    """
    g_ris = cfg.gamma_bar_ris()
    power = np.square(a_sum) * g_ris
    return power * cfg.c1_sq / (power * cfg.c2_sq + 1.0)


def gamma_near(h2_sq, cfg: SystemConfig):
    """Near-user SNR after successive interference cancellation.

    The near user removes the far-user signal first, leaving the clean
    h2_sq * c2^2 * gamma_bar_legit. Accepts scalars or arrays.
    """
    return h2_sq * cfg.c2_sq * cfg.gamma_bar_legit()


def gamma_eve(eve_composite_sq, c_n_sq):
    """Eavesdropper SNR for the user with power share c_n_sq.

    Parallel interference cancellation removes the other user's stream,
    so no interference term appears.
    """
    return eve_composite_sq * c_n_sq


def _secrecy_rate(gamma_legit, gamma_evesdrop):
    """max{0, log2(1+gamma_legit) - log2(1+gamma_evesdrop)}, vectorized."""
    rate = np.log2((1.0 + gamma_legit) / (1.0 + gamma_evesdrop))
    return np.maximum(rate, 0.0)


def secrecy_rates(trial: TrialDraw, cfg: SystemConfig) -> GroupRates:
    """Secrecy rates of the two users for one realized group."""
    b_sq = trial.eve_composite_sq
    c_far = _secrecy_rate(gamma_far(trial.a_sum, cfg), gamma_eve(b_sq, cfg.c1_sq))
    c_near = _secrecy_rate(gamma_near(trial.h2_sq, cfg), gamma_eve(b_sq, cfg.c2_sq))
    return GroupRates(c_far=float(c_far), c_near=float(c_near))


def select_group(rates: list[GroupRates]) -> int:
    """Index of the group maximizing the minimum of its two secrecy rates.

    Ties break toward the lowest index so selection is deterministic.
    """
    if not rates:
        raise ValueError("select_group needs at least one group")
    min_rates = np.array([min(r.c_far, r.c_near) for r in rates])
    return int(np.argmax(min_rates))
