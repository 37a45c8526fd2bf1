"""Closed-form secrecy-outage expressions and their numerical oracles.

The analysis models the squared RIS cascade sum A^2 as a scaled
noncentral chi-square variable (Gaussian approximation of A) and the
eavesdropper's composite channel power B^2 as exponential. The
secrecy outage probability of one group follows in closed form after
bounding the far-user SINR by its supremum c1_sq/c2_sq, and the system
outage is the M-th power of the per-group result because groups fade
independently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .config import SystemConfig


class QuadratureError(RuntimeError):
    """Raised when numerical integration cannot certify its tolerance."""


@dataclass(frozen=True)
class DerivedConstants:
    """Analytic intermediates shared by the closed forms.

    feasible is False when the near-user share alone already caps the
    far user's achievable ratio below the target threshold
    (c2_sq * c_th >= 1), in which case the outage probability is one.
    """

    c_th: float       # 2 ** target_rate
    eta: float        # (1 - c2^2 c_th) / (c_th c1^2 c2^2), wiretap power threshold
    mu: float         # c_th / gamma_bar_legit
    nu: float         # (c_th - 1) / (c2^2 gamma_bar_legit)
    lambda_e: float   # mean of the eavesdropper composite power, N*g_re + g_de
    lambda_nc: float  # noncentrality of A^2, (N pi / 4)^2
    sigma_sq: float   # Gaussian variance of A, N (1 - pi^2/16)
    feasible: bool    # eta > 0


def derive_constants(cfg: SystemConfig) -> DerivedConstants:
    """Evaluate all analytic intermediates for a scenario."""
    c_th = 2.0 ** cfg.target_rate
    c1, c2 = cfg.c1_sq, cfg.c2_sq
    g2 = cfg.gamma_bar_legit()
    eta = (1.0 - c2 * c_th) / (c_th * c1 * c2)
    n = cfg.n_elements
    return DerivedConstants(
        c_th=c_th,
        eta=eta,
        mu=c_th / g2,
        nu=(c_th - 1.0) / (c2 * g2),
        lambda_e=n * cfg.gamma_bar_eve_reflected() + cfg.gamma_bar_eve_direct(),
        lambda_nc=(n * math.pi / 4.0) ** 2,
        sigma_sq=n * (1.0 - math.pi ** 2 / 16.0),
        feasible=c2 * c_th < 1.0,
    )


def _log_bessel_i_m_half(z):
    """log I_{-1/2}(z) = 0.5*log(2/(pi z)) + log cosh(z), overflow-safe.

    log cosh(z) = z + log1p(exp(-2z)) - log 2 for z >= 0.
    """
    z = np.asarray(z, dtype=float)
    log_cosh = z + np.log1p(np.exp(-2.0 * z)) - math.log(2.0)
    return 0.5 * (math.log(2.0 / math.pi) - np.log(z)) + log_cosh


def pdf_a_squared(y, n_elements: int):
    """Density of the squared RIS cascade sum under the Gaussian model.

    Noncentral chi-square with one degree of freedom, noncentrality
    (N pi/4)^2 and scale N(1 - pi^2/16), written with the order -1/2
    modified Bessel function and evaluated in the log domain so it stays
    finite for Bessel arguments up to 1e4 and beyond. The density has an
    integrable 1/sqrt(y) edge at zero, reported as inf at y == 0.
    Accepts scalars or arrays; rejects negative y.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0):
        raise ValueError("pdf_a_squared is defined for y >= 0 only")
    if n_elements < 1:
        raise ValueError("n_elements must be a positive integer")
    lam = (n_elements * math.pi / 4.0) ** 2
    sig2 = n_elements * (1.0 - math.pi ** 2 / 16.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.sqrt(y_arr * lam) / sig2
        log_pdf = (
            -math.log(2.0 * sig2)
            - 0.25 * (np.log(y_arr) - math.log(lam))
            - (y_arr + lam) / (2.0 * sig2)
            + _log_bessel_i_m_half(z)
        )
    out = np.exp(log_pdf)
    out = np.where(y_arr == 0.0, np.inf, out)
    if np.isscalar(y) or np.ndim(y) == 0:
        return float(out)
    return out


def a_squared_cdf(y, n_elements: int):
    """Companion CDF of the A^2 model (library-backed, used for KS checks)."""
    lam = (n_elements * math.pi / 4.0) ** 2
    sig2 = n_elements * (1.0 - math.pi ** 2 / 16.0)
    return stats.ncx2.cdf(np.asarray(y, dtype=float) / sig2, df=1, nc=lam / sig2)


def pdf_b_squared(y, lambda_e: float):
    """Exponential density of the eavesdropper composite power, mean lambda_e."""
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0):
        raise ValueError("pdf_b_squared is defined for y >= 0 only")
    if lambda_e <= 0:
        raise ValueError("lambda_e must be positive")
    out = np.exp(-y_arr / lambda_e) / lambda_e
    if np.isscalar(y) or np.ndim(y) == 0:
        return float(out)
    return out


def sop_group(dc: DerivedConstants) -> float:
    """Closed-form secrecy outage probability of one group.

    Infeasible splits give SOP = 1. Otherwise
    1 - exp(-nu) / (mu*lambda_e + 1) * (1 - exp(-(mu + 1/lambda_e) * eta)),
    clamped to [0, 1] against floating-point cancellation.
    """
    if not dc.feasible:
        return 1.0
    survive = (math.exp(-dc.nu) / (dc.mu * dc.lambda_e + 1.0)
               * -math.expm1(-(dc.mu + 1.0 / dc.lambda_e) * dc.eta))
    return float(min(1.0, max(0.0, 1.0 - survive)))


def sop_system(dc: DerivedConstants, n_groups: int) -> float:
    """System-level outage with best-group selection over M i.i.d. groups."""
    if n_groups < 1:
        raise ValueError("n_groups must be a positive integer")
    return sop_group(dc) ** n_groups


def sop_asymptotic(dc: DerivedConstants, n_groups: int) -> float:
    """High-SNR limit of the system outage, exp(-M * eta / lambda_e).

    Only the wiretap link survives in the limit, so the constant depends
    on eta, lambda_e and the group count alone. Infeasible splits
    return 1.
    """
    if n_groups < 1:
        raise ValueError("n_groups must be a positive integer")
    if not dc.feasible:
        return 1.0
    return math.exp(-n_groups * dc.eta / dc.lambda_e)


def pr1_oracle(dc: DerivedConstants) -> float:
    """Joint survival probability by adaptive quadrature, independent of sop_group.

    Integrates P(B^2 < eta, h2_sq > mu*x + nu) as
    int_0^eta exp(-(mu x + nu)) * (1/lambda_e) exp(-x/lambda_e) dx,
    the inner (exponential tail) integral being analytic. Requested
    absolute tolerance is far below 1e-9; the call fails loudly if the
    integrator cannot certify that.
    """
    if not dc.feasible:
        raise ValueError("pr1_oracle requires a feasible power split")
    mu, nu, lam = dc.mu, dc.nu, dc.lambda_e

    def integrand(x: float) -> float:
        return math.exp(-(mu * x + nu)) * math.exp(-x / lam) / lam

    value, abserr, info = integrate.quad(
        integrand, 0.0, dc.eta, epsabs=1e-14, epsrel=1e-12,
        limit=200, full_output=True,
    )[:3]
    if abserr > 1e-9 or not math.isfinite(value):
        raise QuadratureError(
            f"quadrature did not converge: value={value!r} abserr={abserr!r} "
            f"neval={info.get('neval')} subintervals={info.get('last')}"
        )
    return float(value)
