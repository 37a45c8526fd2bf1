"""Batch front-end: experiment configuration, execution, CSV emission.

Experiments are described by a RunConfig (scenario + schemes + SNR sweep
+ optional parameter variations). A config file (YAML, nested key-value)
mirrors RunConfig; every leaf key can be overridden on the command line
by a flag of the same dotted name, e.g. --scenario.n_elements 8.

Subcommands: sop (single point), sweep, figure <preset>, validate.
The RISNOMA_OUT_DIR environment variable redirects all outputs into a
different directory without touching file names.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import yaml
from scipy import stats

from . import analytic, model
from .config import Geometry, SystemConfig
from .montecarlo import (Scheme, _chunk_plan, _chunk_rng, _chunk_size,
                         estimate_sop, sweep)

CSV_COLUMNS = [
    "scheme", "n_elements", "n_groups", "rate_bpcu", "c1_sq", "snr_eve_db",
    "snr_db", "sop_sim", "sop_stderr", "sop_ci_lo", "sop_ci_hi",
    "sop_analytic", "sop_asymptotic",
]

OUT_DIR_ENV = "RISNOMA_OUT_DIR"

FIGURE_PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6")


@dataclass(frozen=True)
class SweepSpec:
    """Inclusive SNR grid in dB for the x-axis of a run."""

    snr_start_db: float
    snr_stop_db: float
    snr_step_db: float

    def __post_init__(self) -> None:
        if self.snr_step_db <= 0:
            raise ValueError("snr_step_db must be positive")
        if self.snr_start_db > self.snr_stop_db:
            raise ValueError("snr_start_db must not exceed snr_stop_db")

    def points(self) -> list[float]:
        count = int(math.floor(
            (self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9)) + 1
        return [self.snr_start_db + i * self.snr_step_db for i in range(count)]


@dataclass(frozen=True)
class Variations:
    """Optional per-series parameter grids (cartesian product)."""

    n_elements: tuple[int, ...] | None = None
    n_groups: tuple[int, ...] | None = None
    target_rate: tuple[float, ...] | None = None
    snr_eve_db: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        for name in ("n_elements", "n_groups", "target_rate", "snr_eve_db"):
            value = getattr(self, name)
            if value is not None and len(value) == 0:
                raise ValueError(f"variation list {name} must be non-empty")

    def combos(self) -> list[dict]:
        axes = [(name, getattr(self, name))
                for name in ("n_elements", "n_groups", "target_rate", "snr_eve_db")
                if getattr(self, name) is not None]
        if not axes:
            return [{}]
        names = [a[0] for a in axes]
        return [dict(zip(names, values))
                for values in itertools.product(*(a[1] for a in axes))]


@dataclass(frozen=True)
class RunConfig:
    """Everything one batch run needs: scenario, schemes, grid, output."""

    scenario: SystemConfig
    schemes: tuple[Scheme, ...]
    sweep: SweepSpec
    variations: Variations = Variations()
    output_path: str = "sop.csv"
    emit_analytic: bool = True
    emit_asymptotic: bool = True
    workers: int = 1


def default_run_config() -> RunConfig:
    """Baseline run used when no preset or config file says otherwise."""
    return RunConfig(
        scenario=SystemConfig(n_elements=4, n_groups=2, c1_sq=0.95,
                              target_rate=0.3, snr_legit_db=30.0,
                              snr_eve_db=0.0, seed=42, trials=1_000_000),
        schemes=(Scheme.RIS_NOMA,),
        sweep=SweepSpec(0.0, 50.0, 5.0),
    )


def figure_preset(name: str) -> RunConfig:
    """RunConfig for one of the canned outage figures (seed pinned to 42)."""
    base = SystemConfig(n_elements=4, n_groups=2, c1_sq=0.95, target_rate=0.3,
                        snr_legit_db=0.0, snr_eve_db=0.0, seed=42,
                        trials=1_000_000)
    grid = SweepSpec(0.0, 50.0, 5.0)
    if name == "fig2":
        # Element-count study at a low target rate.
        return RunConfig(
            scenario=replace(base, n_elements=2, target_rate=0.05),
            schemes=(Scheme.RIS_NOMA,), sweep=grid,
            variations=Variations(n_elements=(2, 4, 6)),
            output_path="fig2.csv")
    if name == "fig3":
        # RIS-NOMA against direct-link and relay-aided NOMA.
        return RunConfig(
            scenario=replace(base, n_elements=5),
            schemes=(Scheme.RIS_NOMA, Scheme.DIRECT_NOMA, Scheme.RELAY_NOMA),
            sweep=grid, output_path="fig3.csv")
    if name == "fig4":
        # NOMA versus OMA, both RIS-assisted.
        return RunConfig(
            scenario=replace(base, n_elements=5),
            schemes=(Scheme.RIS_NOMA, Scheme.RIS_OMA),
            sweep=grid, output_path="fig4.csv")
    if name == "fig5":
        # Wiretap-quality and target-rate study.
        return RunConfig(
            scenario=replace(base, target_rate=0.1),
            schemes=(Scheme.RIS_NOMA,), sweep=grid,
            variations=Variations(target_rate=(0.1, 0.3),
                                  snr_eve_db=(-5.0, 0.0, 5.0)),
            output_path="fig5.csv")
    if name == "fig6":
        # Group-count study.
        return RunConfig(
            scenario=replace(base, n_elements=7),
            schemes=(Scheme.RIS_NOMA,), sweep=grid,
            variations=Variations(n_groups=(1, 2, 3)),
            output_path="fig6.csv")
    raise ValueError(f"unknown figure preset {name!r}; "
                     f"choose one of {', '.join(FIGURE_PRESETS)}")


# ---------------------------------------------------------------------------
# Overrides: config file keys and command-line flags share dotted names.
# ---------------------------------------------------------------------------

def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot read {text!r} as a boolean")


def _parse_scheme(text) -> Scheme:
    if isinstance(text, Scheme):
        return text
    try:
        return Scheme(str(text).strip().lower())
    except ValueError:
        names = ", ".join(s.value for s in Scheme)
        raise ValueError(f"unknown scheme {text!r}; choose from {names}") from None


def _parse_list(text, item_parser) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(item_parser(item) for item in text)
    return tuple(item_parser(piece) for piece in str(text).split(",") if piece.strip())


# dotted key -> parser producing the final value
OVERRIDE_SCHEMA = {
    "scenario.n_elements": int,
    "scenario.n_groups": int,
    "scenario.c1_sq": float,
    "scenario.target_rate": float,
    "scenario.snr_legit_db": float,
    "scenario.snr_eve_db": float,
    "scenario.snr_ris_db": float,
    "scenario.seed": int,
    "scenario.trials": int,
    "scenario.geometry.d_sr": float,
    "scenario.geometry.d_ru1": float,
    "scenario.geometry.d_su2": float,
    "scenario.geometry.d_re": float,
    "scenario.geometry.d_se": float,
    "scenario.geometry.chi": float,
    "scenario.geometry.es_over_n0": float,
    "scenario.geometry.es_over_ne": float,
    "sweep.snr_start_db": float,
    "sweep.snr_stop_db": float,
    "sweep.snr_step_db": float,
    "variations.n_elements": lambda v: _parse_list(v, int),
    "variations.n_groups": lambda v: _parse_list(v, int),
    "variations.target_rate": lambda v: _parse_list(v, float),
    "variations.snr_eve_db": lambda v: _parse_list(v, float),
    "schemes": lambda v: _parse_list(v, _parse_scheme),
    "output_path": str,
    "emit_analytic": _parse_bool,
    "emit_asymptotic": _parse_bool,
    "workers": int,
}


def apply_overrides(run: RunConfig, overrides: dict) -> RunConfig:
    """Apply {dotted key: value} overrides on top of a RunConfig."""
    scenario_kw, geometry_kw, sweep_kw, variation_kw, top_kw = {}, {}, {}, {}, {}
    for key, raw in overrides.items():
        if raw is None:
            continue
        if key not in OVERRIDE_SCHEMA:
            known = ", ".join(sorted(OVERRIDE_SCHEMA))
            raise ValueError(f"unknown configuration key {key!r}; known: {known}")
        value = OVERRIDE_SCHEMA[key](raw)
        section, _, leaf = key.partition(".")
        if key.startswith("scenario.geometry."):
            geometry_kw[key.rsplit(".", 1)[1]] = value
        elif section == "scenario":
            scenario_kw[leaf] = value
        elif section == "sweep":
            sweep_kw[leaf] = value
        elif section == "variations":
            variation_kw[leaf] = value
        else:
            top_kw[key] = value
    if geometry_kw:
        # A geometry block replaces the dB parameterization outright.
        try:
            scenario_kw["geometry"] = Geometry(**geometry_kw)
        except TypeError as exc:
            raise ValueError(f"incomplete geometry block: {exc}") from None
        scenario_kw.setdefault("snr_legit_db", None)
        scenario_kw.setdefault("snr_eve_db", None)
        scenario_kw.setdefault("snr_ris_db", None)
    if scenario_kw:
        run = replace(run, scenario=replace(run.scenario, **scenario_kw))
    if sweep_kw:
        run = replace(run, sweep=replace(run.sweep, **sweep_kw))
    if variation_kw:
        run = replace(run, variations=replace(run.variations, **variation_kw))
    if top_kw:
        run = replace(run, **top_kw)
    return run


def _flatten(tree: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in tree.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def load_config_file(path: str | Path) -> dict:
    """Read a nested YAML config file into dotted override keys."""
    with open(path, "r", encoding="utf-8") as handle:
        tree = yaml.safe_load(handle)
    if tree is None:
        return {}
    if not isinstance(tree, dict):
        raise ValueError(f"config file {path} must hold a mapping at top level")
    return _flatten(tree)


# ---------------------------------------------------------------------------
# Execution and CSV emission
# ---------------------------------------------------------------------------

def _fmt_prob(value: float | None) -> str:
    return "" if value is None else f"{value:.6g}"


def _fmt_param(value: float) -> str:
    return f"{value:g}"


def _scenario_eve_db(cfg: SystemConfig) -> float:
    if cfg.snr_eve_db is not None:
        return cfg.snr_eve_db
    return 10.0 * math.log10(cfg.gamma_bar_eve_reflected())


def _format_row(scenario: SystemConfig, scheme: Scheme, snr_db: float,
                est, sop_analytic, sop_asymptotic) -> dict:
    return {
        "scheme": scheme.value,
        "n_elements": str(scenario.n_elements),
        "n_groups": str(scenario.n_groups),
        "rate_bpcu": _fmt_param(scenario.target_rate),
        "c1_sq": _fmt_param(scenario.c1_sq),
        "snr_eve_db": _fmt_param(_scenario_eve_db(scenario)),
        "snr_db": _fmt_param(snr_db),
        "sop_sim": _fmt_prob(est.value),
        "sop_stderr": _fmt_prob(est.stderr),
        "sop_ci_lo": _fmt_prob(est.ci95[0]),
        "sop_ci_hi": _fmt_prob(est.ci95[1]),
        "sop_analytic": _fmt_prob(sop_analytic),
        "sop_asymptotic": _fmt_prob(sop_asymptotic),
    }


def build_rows(run: RunConfig) -> list[dict]:
    """All CSV rows for a run: schemes x variations x SNR grid."""
    rows = []
    snrs = run.sweep.points()
    for scheme in run.schemes:
        for combo in run.variations.combos():
            scenario = replace(run.scenario, **combo) if combo else run.scenario
            curve = sweep(scenario, scheme, snrs, workers=run.workers)
            for point in curve.points:
                rows.append(_format_row(
                    scenario, scheme, point.snr_db, point.sop_sim,
                    point.sop_analytic if run.emit_analytic else None,
                    point.sop_asymptotic if run.emit_asymptotic else None))
    return rows


def resolve_output_path(path: str | Path) -> Path:
    """Apply the output-directory environment override, keep the file name."""
    path = Path(path)
    out_dir = os.environ.get(OUT_DIR_ENV)
    if out_dir:
        return Path(out_dir) / path.name
    return path


def write_csv(rows: list[dict], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def _run_to_tree(run: RunConfig) -> dict:
    scenario = {k: v for k, v in vars(run.scenario).items() if v is not None}
    if run.scenario.geometry is not None:
        scenario["geometry"] = vars(run.scenario.geometry).copy()
    variations = {k: list(v) for k, v in vars(run.variations).items()
                  if v is not None}
    return {
        "scenario": scenario,
        "schemes": [s.value for s in run.schemes],
        "sweep": vars(run.sweep).copy(),
        "variations": variations,
        "output_path": run.output_path,
        "emit_analytic": run.emit_analytic,
        "emit_asymptotic": run.emit_asymptotic,
        "workers": run.workers,
    }


def write_manifest(run: RunConfig, csv_path: Path) -> Path:
    """Echo every resolved parameter next to the CSV it produced."""
    manifest_path = csv_path.with_suffix(".manifest.json")
    payload = {"csv": csv_path.name, "columns": CSV_COLUMNS,
               "run": _run_to_tree(run)}
    manifest_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    return manifest_path


def execute_run(run: RunConfig) -> Path:
    """Run every requested series and write the CSV plus its manifest."""
    rows = build_rows(run)
    csv_path = resolve_output_path(run.output_path)
    write_csv(rows, csv_path)
    write_manifest(run, csv_path)
    return csv_path


def run_figure(preset: str, overrides: dict | None = None) -> Path:
    """Execute one figure preset, returning the written CSV path."""
    run = figure_preset(preset)
    if overrides:
        run = apply_overrides(run, overrides)
    return execute_run(run)


# ---------------------------------------------------------------------------
# Distribution validation
# ---------------------------------------------------------------------------

CLT_MIN_ELEMENTS = 8  # below this the Gaussian/exponential models are not expected to hold


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one distribution check; passed None marks informational rows."""

    name: str
    passed: bool | None
    detail: str

    def status(self) -> str:
        if self.passed is None:
            return "INFO"
        return "PASS" if self.passed else "FAIL"


@dataclass(frozen=True)
class DistributionReport:
    params: dict
    checks: tuple[CheckResult, ...]

    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)

    def render(self) -> str:
        lines = ["distribution validation"]
        lines.append("  model parameters: " + ", ".join(
            f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
            for k, v in self.params.items()))
        for check in self.checks:
            lines.append(f"  [{check.status()}] {check.name}: {check.detail}")
        return "\n".join(lines)


def _sample_channel_stats(cfg: SystemConfig, n_samples: int):
    """Draw flattened cascade-sum and eavesdropper-power samples."""
    trials_needed = -(-n_samples // cfg.n_groups)
    a_parts, b_parts = [], []
    for index, count in _chunk_plan(trials_needed, _chunk_size(cfg)):
        rng = _chunk_rng(cfg.seed, index)
        batch = model.draw_groups(cfg, rng, count)
        a_parts.append(batch.a_sum.ravel())
        b_parts.append(batch.eve_composite_sq.ravel())
    a_sum = np.concatenate(a_parts)[:n_samples]
    eve_sq = np.concatenate(b_parts)[:n_samples]
    return a_sum, eve_sq


def validate_distributions(cfg: SystemConfig,
                           n_samples: int | None = None) -> DistributionReport:
    """Moment and Kolmogorov-Smirnov checks of samples against the models.

    Failures are report entries, never exceptions. Checks that require
    the central-limit regime are informational below N = 8 elements.
    """
    n = n_samples if n_samples is not None else cfg.trials
    dc = analytic.derive_constants(cfg)
    a_sum, eve_sq = _sample_channel_stats(cfg, n)
    clt_ok = cfg.n_elements >= CLT_MIN_ELEMENTS
    checks = []

    mean_target = cfg.n_elements * math.pi / 4.0
    mean_hat = float(a_sum.mean())
    se_mean = float(a_sum.std(ddof=1)) / math.sqrt(n)
    err = abs(mean_hat - mean_target)
    checks.append(CheckResult(
        "cascade sum mean", err <= 3.0 * se_mean,
        f"sample {mean_hat:.6g} vs model {mean_target:.6g} "
        f"({err / se_mean:.2f} standard errors)"))

    var_target = dc.sigma_sq
    centered = a_sum - mean_hat
    var_hat = float(np.mean(centered ** 2)) * n / (n - 1)
    fourth = float(np.mean(centered ** 4))
    se_var = math.sqrt(max(fourth - var_hat ** 2, 0.0) / n)
    err = abs(var_hat - var_target)
    checks.append(CheckResult(
        "cascade sum variance", err <= 3.0 * se_var,
        f"sample {var_hat:.6g} vs model {var_target:.6g} "
        f"({err / se_var:.2f} standard errors)"))

    b_mean = float(eve_sq.mean())
    rel = abs(b_mean / dc.lambda_e - 1.0)
    checks.append(CheckResult(
        "eavesdropper power mean", rel <= 0.01,
        f"sample {b_mean:.6g} vs model {dc.lambda_e:.6g} ({rel:.3%} off)"))

    stat, pvalue = stats.kstest(eve_sq, "expon", args=(0.0, dc.lambda_e))
    detail = f"KS distance {stat:.5f}, p={pvalue:.3g}, n={n}"
    if clt_ok:
        checks.append(CheckResult(
            "eavesdropper power KS vs exponential", pvalue >= 0.01, detail))
    else:
        checks.append(CheckResult(
            "eavesdropper power KS vs exponential", None,
            detail + " (CLT regime not reached, informational)"))

    a_sq = a_sum ** 2
    stat, pvalue = stats.kstest(
        a_sq, lambda y: analytic.a_squared_cdf(y, cfg.n_elements))
    detail = f"KS distance {stat:.5f}, p={pvalue:.3g}, n={n}"
    if clt_ok:
        checks.append(CheckResult(
            "cascade power KS vs noncentral chi-square", pvalue >= 0.01, detail))
    else:
        checks.append(CheckResult(
            "cascade power KS vs noncentral chi-square", None,
            detail + " (CLT regime not reached, informational)"))

    params = {
        "n_elements": cfg.n_elements,
        "samples": n,
        "noncentrality": dc.lambda_nc,
        "gaussian_variance": dc.sigma_sq,
        "eve_power_mean": dc.lambda_e,
    }
    return DistributionReport(params=params, checks=tuple(checks))


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------

def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH",
                        help="YAML config file mirroring the run structure")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    parser.add_argument("--seed", type=int, help="master RNG seed")
    parser.add_argument("--workers", type=int, help="parallel worker processes")
    parser.add_argument("--out", metavar="PATH", help="output file path")
    for key in OVERRIDE_SCHEMA:
        if key == "workers":
            continue  # already a first-class flag with the same meaning
        parser.add_argument(f"--{key}", dest=key, metavar="VALUE",
                            help=argparse.SUPPRESS)


def _gather_overrides(args: argparse.Namespace) -> dict:
    overrides = {}
    if args.config:
        overrides.update(load_config_file(args.config))
    for key in OVERRIDE_SCHEMA:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.trials is not None:
        overrides["scenario.trials"] = args.trials
    if args.seed is not None:
        overrides["scenario.seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.out is not None:
        overrides["output_path"] = args.out
    return overrides


def _cmd_figure(args: argparse.Namespace) -> int:
    path = run_figure(args.preset, _gather_overrides(args))
    print(f"wrote {path}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    run = apply_overrides(default_run_config(), _gather_overrides(args))
    path = execute_run(run)
    print(f"wrote {path}")
    return 0


def _cmd_sop(args: argparse.Namespace) -> int:
    overrides = _gather_overrides(args)
    if args.snr_db is not None:
        overrides["scenario.snr_legit_db"] = args.snr_db
    out = overrides.pop("output_path", None)
    run = apply_overrides(default_run_config(), overrides)
    cfg = run.scenario
    snr_db = (cfg.snr_legit_db if cfg.snr_legit_db is not None
              else 10.0 * math.log10(cfg.gamma_bar_legit()))
    rows = []
    for scheme in run.schemes:
        est = estimate_sop(cfg, scheme, workers=run.workers)
        sop_an = sop_as = None
        if scheme is Scheme.RIS_NOMA:
            dc = analytic.derive_constants(cfg)
            sop_an = analytic.sop_system(dc, cfg.n_groups)
            sop_as = analytic.sop_asymptotic(dc, cfg.n_groups)
        line = (f"{scheme.value}: snr_db={snr_db:g} "
                f"sop={est.value:.6g} stderr={est.stderr:.6g} "
                f"ci95=[{est.ci95[0]:.6g}, {est.ci95[1]:.6g}] "
                f"trials={est.trials}")
        if sop_an is not None:
            line += f" analytic={sop_an:.6g} asymptotic={sop_as:.6g}"
        print(line)
        rows.append(_format_row(
            cfg, scheme, snr_db, est,
            sop_an if run.emit_analytic else None,
            sop_as if run.emit_asymptotic else None))
    if out is not None:
        csv_path = resolve_output_path(out)
        write_csv(rows, csv_path)
        write_manifest(replace(run, output_path=out), csv_path)
        print(f"wrote {csv_path}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    overrides = _gather_overrides(args)
    out = overrides.pop("output_path", None)
    run = apply_overrides(default_run_config(), overrides)
    report = validate_distributions(run.scenario)
    text = report.render()
    print(text)
    if out is not None:
        path = resolve_output_path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risnoma",
        description="Secrecy outage simulator for RIS-assisted NOMA downlinks")
    commands = parser.add_subparsers(dest="command", required=True)

    p_sop = commands.add_parser("sop", help="estimate a single outage point")
    p_sop.add_argument("--snr-db", type=float,
                       help="legitimate-link SNR of the point (dB)")
    _add_common_flags(p_sop)
    p_sop.set_defaults(handler=_cmd_sop)

    p_sweep = commands.add_parser("sweep", help="estimate an outage curve")
    _add_common_flags(p_sweep)
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_fig = commands.add_parser("figure", help="reproduce a canned figure CSV")
    p_fig.add_argument("preset", choices=FIGURE_PRESETS)
    _add_common_flags(p_fig)
    p_fig.set_defaults(handler=_cmd_figure)

    p_val = commands.add_parser("validate",
                                help="check sampled channels against the models")
    _add_common_flags(p_val)
    p_val.set_defaults(handler=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"risnoma: error: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
