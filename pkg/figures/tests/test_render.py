import hashlib
import subprocess
import sys

import pytest

from risnoma_figures.cli import main
from risnoma_figures.render import (EXPECTED_COLUMNS, FigureSpec,
                                    SchemaMismatchError, load_rows, render)

PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6")


@pytest.fixture(scope="session")
def preset_csvs(tmp_path_factory):
    """Tiny-trial preset CSVs produced through the simulator's CLI."""
    out_dir = tmp_path_factory.mktemp("csvs")
    paths = {}
    for preset in PRESETS:
        path = out_dir / f"{preset}.csv"
        subprocess.run(
            [sys.executable, "-m", "risnoma", "figure", preset,
             "--trials", "2000", "--out", str(path)],
            check=True, capture_output=True)
        paths[preset] = path
    return paths


@pytest.mark.parametrize("preset", PRESETS)
def test_presets_render_offline(preset, preset_csvs, tmp_path):
    out = tmp_path / f"{preset}.png"
    result = render(FigureSpec(csv_path=str(preset_csvs[preset])), out)
    assert out.exists() and out.stat().st_size > 10_000
    assert result.n_series >= 2
    assert result.n_simulated == result.n_series


def test_fig2_series_counts(preset_csvs, tmp_path):
    result = render(FigureSpec(csv_path=str(preset_csvs["fig2"])),
                    tmp_path / "fig2.png")
    assert result.n_series == 3       # one per element count
    assert result.n_simulated == 3    # marker series
    assert result.n_analytic == 3     # solid lines
    assert result.n_asymptote == 3    # dashed constants


def test_baseline_series_have_no_analytic_lines(preset_csvs, tmp_path):
    result = render(FigureSpec(csv_path=str(preset_csvs["fig3"])),
                    tmp_path / "fig3.png")
    assert result.n_series == 3
    assert result.n_analytic == 1     # only the RIS-NOMA series
    assert result.n_asymptote == 1


def test_rendering_is_byte_deterministic(preset_csvs, tmp_path):
    spec = FigureSpec(csv_path=str(preset_csvs["fig2"]), title="outage")
    render(spec, tmp_path / "a.png")
    render(spec, tmp_path / "b.png")
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


def test_input_csv_never_mutated(preset_csvs, tmp_path):
    path = preset_csvs["fig4"]
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    render(FigureSpec(csv_path=str(path)), tmp_path / "fig4.png")
    assert hashlib.sha256(path.read_bytes()).hexdigest() == digest


def test_schema_mismatch_reports_column_diff(tmp_path):
    bad = tmp_path / "bad.csv"
    header = ",".join(["mislabeled"] + EXPECTED_COLUMNS[1:])
    bad.write_text(header + "\n" + ",".join(["1"] * len(EXPECTED_COLUMNS)) + "\n")
    with pytest.raises(SchemaMismatchError) as excinfo:
        load_rows(bad)
    assert "scheme" in str(excinfo.value)       # missing column named
    assert "mislabeled" in str(excinfo.value)   # unexpected column named


def test_empty_series_selection_writes_nothing(preset_csvs, tmp_path):
    out = tmp_path / "nothing.png"
    with pytest.raises(ValueError):
        render(FigureSpec(csv_path=str(preset_csvs["fig2"]), series_keys=()), out)
    assert not out.exists()


def test_unknown_series_key_rejected(preset_csvs, tmp_path):
    with pytest.raises(ValueError):
        render(FigureSpec(csv_path=str(preset_csvs["fig2"]),
                          series_keys=("sop_sim",)), tmp_path / "x.png")


def test_svg_output_supported(preset_csvs, tmp_path):
    result = render(FigureSpec(csv_path=str(preset_csvs["fig6"])),
                    tmp_path / "fig6.svg")
    assert result.out_path.exists()
    render(FigureSpec(csv_path=str(preset_csvs["fig6"])), tmp_path / "again.svg")
    assert (tmp_path / "fig6.svg").read_bytes() == (tmp_path / "again.svg").read_bytes()


def test_unsupported_format_rejected(preset_csvs, tmp_path):
    with pytest.raises(ValueError):
        render(FigureSpec(csv_path=str(preset_csvs["fig2"])), tmp_path / "f.tiff")


def test_cli_render(preset_csvs, tmp_path, capsys):
    out = tmp_path / "cli.png"
    code = main(["--csv", str(preset_csvs["fig5"]), "--out", str(out),
                 "--title", "wiretap study", "--linear-y"])
    assert code == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out


def test_cli_reports_errors(tmp_path, capsys):
    code = main(["--csv", str(tmp_path / "missing.csv"),
                 "--out", str(tmp_path / "x.png")])
    assert code == 1
    assert "error" in capsys.readouterr().err
