"""Unit tests for CSV loading, fitting, and deterministic rendering.

The CSV headers are written out literally here: they are the contract with
the simulator CLI, and this package must keep reading them byte-for-byte.
"""

import math

import numpy as np
import pytest

from twochoices_plots import (
    CsvSchemaError,
    EmptyCsvError,
    FigureSpec,
    fit_overlay,
    load_series,
    render,
)
from twochoices_plots.cli import main

SIM_HEADER = (
    "graph_kind,n,degree_or_pedge,alpha,p,trials,mean_T,ci_low,ci_high,"
    "capped,master_seed,normalized_T"
)
EXACT_HEADER = "n,alpha,p,T_exact,log10_T,lower_bound"


def write_sim_csv(path, points, graph_kind="complete", alpha=0.125, p=0.0):
    """points: iterable of (n, mean_T, ci_low, ci_high)."""
    lines = [SIM_HEADER]
    for n, mean, lo, hi in points:
        lines.append(
            f"{graph_kind},{n},{n - 1},{alpha},{p},200,"
            f"{format(mean, '.12g')},{format(lo, '.12g')},{format(hi, '.12g')},"
            f"0,7,{format(mean / n, '.12g')}"
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def write_exact_csv(path, points, alpha=0.1, p=0.4):
    """points: iterable of (n, T_exact, log10_T)."""
    lines = [EXACT_HEADER]
    for n, t, log10_t in points:
        lines.append(
            f"{n},{alpha},{p},{format(t, '.12g')},{format(log10_t, '.12g')},1"
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def test_load_simulate_series(tmp_path):
    points = [(100, 520.0, 500.0, 540.0), (200, 1250.0, 1200.0, 1300.0)]
    series = load_series(write_sim_csv(tmp_path / "s.csv", points))
    assert series.n.tolist() == [100, 200]
    assert series.per_node == pytest.approx([5.2, 6.25])
    assert series.has_error_bars
    assert series.err_low == pytest.approx([0.2, 0.25])
    assert series.err_high == pytest.approx([0.2, 0.25])
    assert "complete" in series.label


def test_load_simulate_skips_nan_rows(tmp_path):
    nan = float("nan")
    points = [(100, 520.0, 500.0, 540.0), (200, nan, nan, nan),
              (400, 3000.0, 2900.0, 3100.0)]
    series = load_series(write_sim_csv(tmp_path / "s.csv", points))
    assert series.n.tolist() == [100, 400]


def test_load_simulate_sorts_by_n(tmp_path):
    points = [(400, 3000.0, 2900.0, 3100.0), (100, 520.0, 500.0, 540.0)]
    series = load_series(write_sim_csv(tmp_path / "s.csv", points))
    assert series.n.tolist() == [100, 400]
    assert series.per_node == pytest.approx([5.2, 7.5])


def test_load_exact_series(tmp_path):
    points = [(10, 55.0, math.log10(55.0)), (20, 240.0, math.log10(240.0))]
    series = load_series(write_exact_csv(tmp_path / "e.csv", points))
    assert series.per_node == pytest.approx([5.5, 12.0])
    assert not series.has_error_bars
    assert "exact" in series.label


def test_load_exact_overflow_falls_back_to_log10(tmp_path):
    # T_exact prints as inf past float range; log10_T stays informative.
    inf = float("inf")
    points = [(100, 1e6, 6.0), (100, inf, 309.0), (100, inf, 500.0)]
    series = load_series(write_exact_csv(tmp_path / "e.csv", points))
    # 10**309 / 100 = 10**307 is representable; 10**498 is not and is skipped.
    assert series.n.tolist() == [100, 100]
    assert series.per_node == pytest.approx([1e4, 1e307], rel=1e-9)


def test_empty_file_raises(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(EmptyCsvError, match="empty"):
        load_series(path)


def test_header_only_raises(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text(SIM_HEADER + "\n")
    with pytest.raises(EmptyCsvError, match="no plottable rows"):
        load_series(path)


def test_empty_csv_render_writes_nothing(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    out = tmp_path / "fig.png"
    with pytest.raises(EmptyCsvError):
        render(FigureSpec(csv_paths=[path], out_path=out))
    assert not out.exists()


def test_schema_mismatch_names_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    header = SIM_HEADER.replace(",ci_low,ci_high", "")
    path.write_text(header + "\n")
    with pytest.raises(CsvSchemaError) as err:
        load_series(path)
    message = str(err.value)
    assert "simulate" in message
    assert "ci_low" in message and "ci_high" in message


def test_alien_header_reports_nearer_schema(tmp_path):
    path = tmp_path / "alien.csv"
    path.write_text("a,b,n\n1,2,3\n")
    with pytest.raises(CsvSchemaError) as err:
        load_series(path)
    message = str(err.value)
    assert "exact" in message
    assert "T_exact" in message


def test_fit_log_recovers_constant():
    n = np.array([100, 200, 400, 800, 1600], dtype=float)
    fit = fit_overlay("log", n, 2.5 * np.log(n))
    assert fit.kind == "log"
    assert fit.scale == pytest.approx(2.5, rel=1e-12)
    assert fit.rate is None
    assert fit.fit_n_min == 400 and fit.points == 3


def test_fit_linear_recovers_constant():
    n = np.array([100, 200, 400, 800], dtype=float)
    fit = fit_overlay("linear", n, 0.3 * n)
    assert fit.scale == pytest.approx(0.3, rel=1e-12)


def test_fit_exp_recovers_scale_and_rate():
    n = np.array([100, 200, 300, 400, 500, 600], dtype=float)
    fit = fit_overlay("exp", n, 1e-3 * np.exp(0.01 * n))
    assert fit.scale == pytest.approx(1e-3, rel=1e-6)
    assert fit.rate == pytest.approx(0.01, rel=1e-9)


def test_fit_window_excludes_small_n():
    n = np.array([10, 20, 40, 800, 1600, 3200], dtype=float)
    y = 2.0 * np.log(n)
    y[:3] = 100.0  # transient junk at small n
    clean = fit_overlay("log", n, y, fit_window=0.5)
    assert clean.scale == pytest.approx(2.0, rel=1e-12)
    polluted = fit_overlay("log", n, y, fit_window=1.0)
    assert polluted.scale > 3.0


def test_fit_window_counts_distinct_sizes():
    # Duplicate sizes (pooled series) must not shrink the window.
    n = np.array([100, 100, 200, 200, 400, 400, 800, 800], dtype=float)
    fit = fit_overlay("log", n, 1.5 * np.log(n))
    assert fit.fit_n_min == 400
    assert fit.points == 4


def test_fit_rejects_bad_input():
    n = np.array([100.0, 200.0])
    with pytest.raises(ValueError, match="overlay"):
        fit_overlay("cubic", n, n)
    with pytest.raises(ValueError, match="at least two"):
        fit_overlay("exp", n, np.array([1.0, 2.0]), fit_window=0.4)


def test_figure_spec_validation(tmp_path):
    with pytest.raises(ValueError, match="at least one"):
        FigureSpec(csv_paths=[], out_path=tmp_path / "f.png")
    with pytest.raises(ValueError, match="overlay"):
        FigureSpec(csv_paths=["x.csv"], out_path="f.png", overlay="cubic")
    for bad in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError, match="fit_window"):
            FigureSpec(csv_paths=["x.csv"], out_path="f.png", fit_window=bad)


def _demo_csv(tmp_path):
    rng = np.random.default_rng(3)
    points = []
    for n in (100, 200, 400, 800):
        mean = 1.7 * n * math.log(n) * (1 + 0.02 * rng.standard_normal())
        half = 0.03 * mean
        points.append((n, mean, mean - half, mean + half))
    return write_sim_csv(tmp_path / "demo.csv", points)


def test_render_png_and_svg_deterministic(tmp_path):
    csv_path = _demo_csv(tmp_path)
    outs = []
    for stem in ("one", "two"):
        for suffix in (".png", ".svg"):
            out = tmp_path / f"{stem}{suffix}"
            render(FigureSpec(csv_paths=[csv_path], out_path=out))
            outs.append(out)
    png_one, svg_one, png_two, svg_two = outs
    assert png_one.read_bytes().startswith(b"\x89PNG")
    assert b"<svg" in svg_one.read_bytes()
    assert png_one.read_bytes() == png_two.read_bytes()
    assert svg_one.read_bytes() == svg_two.read_bytes()


def test_svg_has_no_creation_date(tmp_path):
    out = tmp_path / "fig.svg"
    render(FigureSpec(csv_paths=[_demo_csv(tmp_path)], out_path=out))
    assert b"dc:date" not in out.read_bytes()


def test_render_echoes_constants(tmp_path, capsys):
    render(FigureSpec(csv_paths=[_demo_csv(tmp_path)], out_path=tmp_path / "f.png"))
    line = capsys.readouterr().out
    assert line.startswith("overlay fit: kind=log c=")
    assert "fit_n_min=400 points=2" in line

    n = np.array([50, 100, 150, 200])
    exact = write_exact_csv(
        tmp_path / "exp.csv",
        [(int(k), 2.0 * k * math.exp(0.05 * k), 0.0) for k in n],
    )
    render(FigureSpec(csv_paths=[exact], out_path=tmp_path / "g.png", overlay="exp"))
    line = capsys.readouterr().out
    assert "kind=exp" in line and " b=" in line


def test_render_pools_multiple_series(tmp_path, capsys):
    sim = _demo_csv(tmp_path)
    exact = write_exact_csv(
        tmp_path / "e.csv",
        [(n, 1.7 * n * math.log(n), math.log10(1.7 * n * math.log(n)))
         for n in (100, 200, 400, 800)],
    )
    out = tmp_path / "both.png"
    render(FigureSpec(csv_paths=[sim, exact], out_path=out))
    assert out.exists()
    # window = top half of 4 distinct sizes, both series contribute
    assert "points=4" in capsys.readouterr().out


def test_cli_end_to_end(tmp_path, capsys):
    csv_path = _demo_csv(tmp_path)
    out = tmp_path / "fig.png"
    rc = main(["--csv", str(csv_path), "--out", str(out),
               "--overlay", "log", "--title", "demo"])
    assert rc == 0
    assert out.exists()
    assert "overlay fit: kind=log" in capsys.readouterr().out


def test_cli_usage_errors(tmp_path):
    cases = [
        [],
        ["--csv", "x.csv"],
        ["--out", "f.png"],
        ["--csv", "x.csv", "--out", "f.png", "--overlay", "cubic"],
        ["--csv", "x.csv", "--out", "f.png", "--fit-window", "0"],
        ["--csv", "x.csv", "--out", "f.png", "--fit-window", "1.5"],
    ]
    for argv in cases:
        with pytest.raises(SystemExit) as exit_info:
            main(argv)
        assert exit_info.value.code == 2, argv


def test_cli_runtime_failures_exit_1(tmp_path, capsys):
    out = tmp_path / "fig.png"

    rc = main(["--csv", str(tmp_path / "missing.csv"), "--out", str(out)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
    assert not out.exists()

    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    rc = main(["--csv", str(bad), "--out", str(out)])
    assert rc == 1
    assert "missing column" in capsys.readouterr().err
    assert not out.exists()

    empty = tmp_path / "empty.csv"
    empty.write_text("")
    rc = main(["--csv", str(empty), "--out", str(out)])
    assert rc == 1
    assert "empty" in capsys.readouterr().err
    assert not out.exists()
