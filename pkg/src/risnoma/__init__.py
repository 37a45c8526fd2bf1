"""Secrecy outage toolkit for RIS-assisted NOMA downlinks.

Exact Monte Carlo simulation of the per-group channels, the closed-form
outage bound and its high-SNR asymptote, baseline schemes, and a CSV
batch front-end for figure reproduction.
"""
from .analytic import (DerivedConstants, QuadratureError, derive_constants,
                       pdf_a_squared, pdf_b_squared, pr1_oracle, sop_asymptotic,
                       sop_group, sop_system)
from .config import Geometry, SystemConfig, db_to_linear
from .model import (GroupRates, TrialDraw, draw_trial, gamma_eve, gamma_far,
                    gamma_near, sample_rayleigh_amplitude, secrecy_rates,
                    select_group)
from .montecarlo import (Curve, CurvePoint, Scheme, SopEstimate,
                         clopper_pearson_ci, estimate_sop, sweep, wald_ci)

__all__ = [
    "Curve", "CurvePoint", "DerivedConstants", "Geometry", "GroupRates",
    "QuadratureError", "Scheme", "SopEstimate", "SystemConfig", "TrialDraw",
    "clopper_pearson_ci", "db_to_linear", "derive_constants", "draw_trial",
    "estimate_sop", "gamma_eve", "gamma_far", "gamma_near", "pdf_a_squared",
    "pdf_b_squared", "pr1_oracle", "sample_rayleigh_amplitude",
    "secrecy_rates", "select_group", "sop_asymptotic", "sop_group",
    "sop_system", "sweep", "wald_ci",
]

__version__ = "0.1.0"
