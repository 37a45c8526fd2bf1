"""Scenario configuration for the RIS-assisted NOMA secrecy simulator."""
from __future__ import annotations

from dataclasses import dataclass, replace


def db_to_linear(value_db: float) -> float:
    """Convert a dB quantity to linear scale."""
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class Geometry:
    """Distance-based link budget.

    Average SNRs are derived from node distances, a common path-loss
    exponent, and the two transmit-energy-to-noise ratios, instead of
    being given directly in dB.
    """

    d_sr: float          # source -> RIS distance
    d_ru1: float         # RIS -> far-user distance
    d_su2: float         # source -> near-user distance
    d_re: float          # RIS -> eavesdropper distance
    d_se: float          # source -> eavesdropper distance
    chi: float = 2.0     # path-loss exponent, >= 2
    es_over_n0: float = 1.0   # symbol energy over legitimate receiver noise
    es_over_ne: float = 1.0   # symbol energy over eavesdropper noise

    def __post_init__(self) -> None:
        for name in ("d_sr", "d_ru1", "d_su2", "d_re", "d_se",
                     "es_over_n0", "es_over_ne"):
            if not getattr(self, name) > 0:
                raise ValueError(f"geometry field {name} must be positive")
        if self.chi < 2:
            raise ValueError("path-loss exponent chi must be >= 2")


@dataclass(frozen=True)
class SystemConfig:
    """All scenario parameters for one simulation or analytic evaluation.

    The average SNRs are driven by exactly one of two parameterizations:
    either the dB fields (snr_legit_db, snr_eve_db, optional snr_ris_db)
    or a Geometry instance. The power split satisfies c1_sq + c2_sq = 1
    with the far user taking the larger share (c1_sq >= c2_sq).
    """

    n_elements: int                     # reflecting elements per RIS
    n_groups: int                       # number of user pairs / RISs
    c1_sq: float                        # far-user power coefficient squared
    target_rate: float                  # secrecy target rate, bits per channel use
    snr_legit_db: float | None = None   # near-user average SNR (dB)
    snr_eve_db: float | None = None     # eavesdropper average SNR per link (dB)
    snr_ris_db: float | None = None     # far-user RIS-path budget; None means snr_legit_db
    geometry: Geometry | None = None    # alternative distance-based parameterization
    seed: int = 0                       # master RNG seed (64-bit unsigned)
    trials: int = 1_000_000             # Monte Carlo sample count

    def __post_init__(self) -> None:
        if self.n_elements < 1:
            raise ValueError("n_elements must be a positive integer")
        if self.n_groups < 1:
            raise ValueError("n_groups must be a positive integer")
        if not 0.5 <= self.c1_sq < 1.0:
            raise ValueError("c1_sq must lie in [0.5, 1): the far user takes "
                             "the larger share and the near user a nonzero one")
        if self.target_rate < 0:
            raise ValueError("target_rate must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.geometry is None:
            if self.snr_legit_db is None or self.snr_eve_db is None:
                raise ValueError("either geometry or both snr_legit_db and "
                                 "snr_eve_db must be given")
        else:
            if (self.snr_legit_db is not None or self.snr_eve_db is not None
                    or self.snr_ris_db is not None):
                raise ValueError("geometry and snr_*_db parameterizations are "
                                 "mutually exclusive")

    @property
    def c2_sq(self) -> float:
        """Near-user power coefficient squared (the splits sum to one)."""
        return 1.0 - self.c1_sq

    def gamma_bar_legit(self) -> float:
        """Average SNR of the direct source -> near-user link (linear)."""
        if self.geometry is not None:
            g = self.geometry
            return g.es_over_n0 * g.d_su2 ** (-g.chi)
        return db_to_linear(self.snr_legit_db)

    def gamma_bar_ris(self) -> float:
        """Average per-cascade SNR of the source -> RIS -> far-user path (linear).

        Under dB parameterization this defaults to the near-user average
        SNR unless snr_ris_db pins it separately.
        """
        if self.geometry is not None:
            g = self.geometry
            return g.es_over_n0 * (g.d_sr * g.d_ru1) ** (-g.chi)
        if self.snr_ris_db is not None:
            return db_to_linear(self.snr_ris_db)
        return db_to_linear(self.snr_legit_db)

    def gamma_bar_eve_reflected(self) -> float:
        """Average SNR of one source -> RIS -> eavesdropper cascade (linear)."""
        if self.geometry is not None:
            g = self.geometry
            return g.es_over_ne * (g.d_sr * g.d_re) ** (-g.chi)
        return db_to_linear(self.snr_eve_db)

    def gamma_bar_eve_direct(self) -> float:
        """Average SNR of the direct source -> eavesdropper link (linear)."""
        if self.geometry is not None:
            g = self.geometry
            return g.es_over_ne * g.d_se ** (-g.chi)
        return db_to_linear(self.snr_eve_db)

    def with_snr(self, snr_legit_db: float) -> "SystemConfig":
        """Copy of this config at another legitimate-link SNR (sweep helper)."""
        if self.geometry is not None:
            raise ValueError("SNR sweeps require the dB parameterization; "
                             "geometry-based configs pin the link budget")
        return replace(self, snr_legit_db=snr_legit_db)
