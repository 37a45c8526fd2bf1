"""Render secrecy-outage CSV files into semilog figures.

Input files must follow the risnoma CSV schema exactly. Each series is
one combination of the identifying columns (scheme and the scenario
knobs): simulated estimates are drawn as markers, the closed-form curve
as a solid line, and the high-SNR constant as a horizontal dashed line.
Rendering is fully offline and byte-deterministic for a given input.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

EXPECTED_COLUMNS = [
    "scheme", "n_elements", "n_groups", "rate_bpcu", "c1_sq", "snr_eve_db",
    "snr_db", "sop_sim", "sop_stderr", "sop_ci_lo", "sop_ci_hi",
    "sop_analytic", "sop_asymptotic",
]

# Columns whose values identify a series; snr_db is the abscissa.
SERIES_KEY_CANDIDATES = ["scheme", "n_elements", "n_groups", "rate_bpcu",
                         "c1_sq", "snr_eve_db"]

SHORT_LABELS = {"n_elements": "N", "n_groups": "M", "rate_bpcu": "R",
                "c1_sq": "c1^2", "snr_eve_db": "eve dB", "scheme": "scheme"}


class SchemaMismatchError(ValueError):
    """The CSV header differs from the expected schema."""

    def __init__(self, found: list[str]):
        missing = [c for c in EXPECTED_COLUMNS if c not in found]
        unexpected = [c for c in found if c not in EXPECTED_COLUMNS]
        parts = []
        if missing:
            parts.append(f"missing columns: {', '.join(missing)}")
        if unexpected:
            parts.append(f"unexpected columns: {', '.join(unexpected)}")
        if not parts:
            parts.append(f"column order differs: found {', '.join(found)}")
        super().__init__("CSV schema mismatch; " + "; ".join(parts))
        self.missing = missing
        self.unexpected = unexpected


@dataclass(frozen=True)
class FigureSpec:
    """What to render: source CSV, series grouping and axis styling."""

    csv_path: str
    series_keys: tuple[str, ...] | None = None  # None selects the varying columns
    y_log: bool = True
    title: str | None = None
    y_limits: tuple[float, float] = (1e-4, 1.0)


@dataclass(frozen=True)
class RenderResult:
    """Where the image went and how many series of each kind it holds."""

    out_path: Path
    n_series: int
    n_simulated: int
    n_analytic: int
    n_asymptote: int


def load_rows(csv_path: str | Path) -> list[dict]:
    """Read and schema-check one outage CSV."""
    with open(csv_path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError([]) from None
        if header != EXPECTED_COLUMNS:
            raise SchemaMismatchError(header)
        rows = [dict(zip(header, line)) for line in reader if line]
    if not rows:
        raise ValueError(f"{csv_path} holds no data rows")
    return rows


def _auto_series_keys(rows: list[dict]) -> tuple[str, ...]:
    varying = tuple(key for key in SERIES_KEY_CANDIDATES
                    if len({row[key] for row in rows}) > 1)
    return varying if varying else ("scheme",)


def _series_label(key_values: tuple) -> str:
    return ", ".join(f"{SHORT_LABELS.get(k, k)}={v}" for k, v in key_values)


def _group_series(rows: list[dict], keys: tuple[str, ...]) -> dict[tuple, list[dict]]:
    series: dict[tuple, list[dict]] = {}
    for row in rows:
        ident = tuple((key, row[key]) for key in keys)
        series.setdefault(ident, []).append(row)
    for ident in series:
        series[ident].sort(key=lambda row: float(row["snr_db"]))
    return series


def render(spec: FigureSpec, out_path: str | Path) -> RenderResult:
    """Draw the figure described by spec and write it to out_path.

    Markers carry the simulated estimates, solid lines the closed form,
    dashed horizontal lines the high-SNR constants. The output bytes
    depend only on the input CSV and the spec (no timestamps).
    """
    rows = load_rows(spec.csv_path)
    keys = spec.series_keys if spec.series_keys is not None else _auto_series_keys(rows)
    keys = tuple(keys)
    if len(keys) == 0:
        raise ValueError("series_keys must select at least one column")
    unknown = [k for k in keys if k not in SERIES_KEY_CANDIDATES]
    if unknown:
        raise ValueError(f"series_keys {unknown} are not identity columns "
                         f"(choose from {', '.join(SERIES_KEY_CANDIDATES)})")
    series = _group_series(rows, keys)

    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(7.0, 5.0), dpi=150)
    n_sim = n_analytic = n_asymptote = 0
    for index, (ident, points) in enumerate(series.items()):
        color = f"C{index % 10}"
        label = _series_label(ident)
        x = [float(p["snr_db"]) for p in points]

        ax.plot(x, [float(p["sop_sim"]) for p in points],
                linestyle="none", marker="o", markersize=5,
                markerfacecolor="none", color=color,
                label=f"{label} (simulated)")
        n_sim += 1

        xa = [float(p["snr_db"]) for p in points if p["sop_analytic"]]
        ya = [float(p["sop_analytic"]) for p in points if p["sop_analytic"]]
        if ya:
            ax.plot(xa, ya, linestyle="-", color=color,
                    label=f"{label} (analytic)")
            n_analytic += 1

        asym = [float(p["sop_asymptotic"]) for p in points if p["sop_asymptotic"]]
        if asym:
            ax.axhline(asym[-1], linestyle="--", linewidth=1.0, color=color)
            n_asymptote += 1

    if spec.y_log:
        ax.set_yscale("log")
        ax.set_ylim(*spec.y_limits)
    ax.set_xlabel("legitimate-link average SNR (dB)")
    ax.set_ylabel("secrecy outage probability")
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", linestyle=":", linewidth=0.5, alpha=0.6)
    ax.legend(fontsize=8, loc="best")
    fig.tight_layout()

    suffix = out_path.suffix.lower()
    if suffix == ".png":
        # Dropping the Software key keeps the bytes free of version strings.
        fig.savefig(out_path, metadata={"Software": None})
    elif suffix == ".svg":
        plt.rcParams["svg.hashsalt"] = "risnoma-figures"
        fig.savefig(out_path, metadata={"Date": None})
    else:
        plt.close(fig)
        raise ValueError(f"unsupported image format {suffix!r}; use .png or .svg")
    plt.close(fig)
    return RenderResult(out_path=out_path, n_series=len(series),
                        n_simulated=n_sim, n_analytic=n_analytic,
                        n_asymptote=n_asymptote)
