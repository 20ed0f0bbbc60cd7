from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from leakplot import (
    ARCH_LINESTYLES,
    CSV_COLUMNS,
    SIGMA_COLORS,
    FigureSpec,
    SweepRow,
    fitted_slope,
    read_sweep_rows,
    render,
)


def _row(arch="zeeman", model="ms", d=3, p_s=1e-3, p_M=0.0, sigma=None,
         p_L=1e-3, ci_lo=None, ci_hi=None, trials=100000, seed=7):
    failures = int(round(p_L * trials))
    if ci_lo is None:
        ci_lo = p_L * 0.9
    if ci_hi is None:
        ci_hi = p_L * 1.1
    return {
        "arch": arch, "model": model, "d": d, "rounds": d,
        "p_s": repr(p_s), "p_s_1q": repr(p_s * 9.76e-6 / 2.52e-4),
        "p_M": repr(p_M),
        "sigma_uG": "" if sigma is None else repr(float(sigma)),
        "trials": trials, "failures_x": failures // 2,
        "failures_z": failures - failures // 2, "failures": failures,
        "p_L": repr(p_L), "ci_lo": repr(ci_lo), "ci_hi": repr(ci_hi),
        "seed": seed,
    }


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS,
                                lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return str(path)


def _power_law_rows(arch, d, k, amp, sigma=None, p_M=0.0, model="ms"):
    return [_row(arch=arch, model=model, d=d, p_s=p, p_M=p_M, sigma=sigma,
                 p_L=amp * p ** k)
            for p in (1e-3, 3e-3, 1e-2)]


def test_read_sweep_rows_round_trips_types(tmp_path):
    path = _write_csv(tmp_path / "a.csv",
                      [_row(sigma=10.0), _row(p_s=3e-3, sigma=None)])
    rows = read_sweep_rows(path)
    assert rows[0].sigma_uG == 10.0
    assert rows[1].sigma_uG is None
    assert rows[0].p_s == 1e-3
    assert rows[0].d == 3
    assert isinstance(rows[0], SweepRow)


def test_schema_mismatch_reports_column_names(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("arch,model,d\nzeeman,ms,3\n")
    with pytest.raises(ValueError, match="missing columns"):
        read_sweep_rows(str(path))
    try:
        read_sweep_rows(str(path))
    except ValueError as exc:
        assert "ci_hi" in str(exc)
        assert "p_L" in str(exc)


def test_header_only_csv_renders_empty_axes(tmp_path):
    path = _write_csv(tmp_path / "empty.csv", [])
    out = tmp_path / "empty.png"
    spec = FigureSpec(inputs=(path,), kind="distance-comparison",
                      out_path=str(out))
    fig = render(spec)
    assert fig.axes[0].containers == []
    assert out.stat().st_size > 0


def test_figure_spec_validates_kind_and_inputs(tmp_path):
    with pytest.raises(ValueError, match="figure kind"):
        FigureSpec(inputs=("a.csv",), kind="histogram", out_path="x.png")
    with pytest.raises(ValueError, match="input"):
        FigureSpec(inputs=(), kind="scheme-comparison", out_path="x.png")


def test_fitted_slope_exact_power_laws():
    for k in (1, 2, 3, 4):
        rows = [SweepRow("zeeman", "ms", 3, p, 0.0, None,
                         0.7 * p ** k, 0.0, 1.0)
                for p in (1e-3, 3e-3, 1e-2)]
        assert fitted_slope(rows) == pytest.approx(k, abs=1e-9)


def test_fitted_slope_skips_plateau_and_zero_points():
    quad = [SweepRow("zeeman", "ms", 3, p, 7.75e-5, 10.0,
                     400.0 * p * p, 0.0, 1.0)
            for p in (1e-3, 3e-3, 1e-2)]
    plateau = SweepRow("zeeman", "ms", 3, 1e-5, 7.75e-5, 10.0,
                       4e-4, 0.0, 1.0)
    empty = SweepRow("zeeman", "ms", 3, 3e-5, 7.75e-5, 10.0,
                     0.0, 0.0, 1.0)
    assert fitted_slope([plateau, empty] + quad) == pytest.approx(
        2.0, abs=1e-9)
    assert fitted_slope([plateau, empty, quad[0]]) is None
    assert fitted_slope(quad[:1]) is None


def test_distance_comparison_curves_and_annotations(tmp_path):
    rows = (_power_law_rows("zeeman", 3, 2, 50.0)
            + _power_law_rows("zeeman", 5, 3, 900.0)
            + _power_law_rows("zeeman", 7, 4, 20000.0))
    path = _write_csv(tmp_path / "dist.csv", rows)
    out = tmp_path / "dist.png"
    fig = render(FigureSpec(inputs=(path,), kind="distance-comparison",
                            out_path=str(out)))
    containers = fig.axes[0].containers
    assert len(containers) == 3
    labels = [c.get_label() for c in containers]
    assert labels[0] == "zeeman d=3 (slope 2.00)"
    assert labels[1] == "zeeman d=5 (slope 3.00)"
    assert labels[2] == "zeeman d=7 (slope 4.00)"
    for c in containers:
        assert c.lines[0].get_linestyle() == ARCH_LINESTYLES["zeeman"]
    assert out.stat().st_size > 0


def test_scheme_comparison_nine_curves_with_four_sigmas(tmp_path):
    rows = []
    for sigma, p_M in ((100.0, 7.75e-3), (32.0, 7.75e-4),
                       (10.0, 7.75e-5), (1.0, 7.75e-6)):
        rows += _power_law_rows("zeeman", 3, 2, 60.0, sigma=sigma,
                                p_M=p_M)
        rows += _power_law_rows("mixed", 3, 2, 9.0, sigma=sigma,
                                p_M=p_M)
        rows += _power_law_rows("hyperfine", 3, 2, 30.0, sigma=sigma,
                                p_M=0.0)
    path = _write_csv(tmp_path / "schemes.csv", rows)
    out = tmp_path / "schemes.png"
    fig = render(FigureSpec(inputs=(path,), kind="scheme-comparison",
                            out_path=str(out)))
    containers = fig.axes[0].containers
    assert len(containers) == 9
    by_label = {c.get_label(): c for c in containers}
    for sigma, color in SIGMA_COLORS.items():
        # At 100 and 32 uG the dephasing floor excludes enough points
        # that no slope can be fitted, so those labels carry none.
        tail = " (slope 2.00)" if sigma in (10.0, 1.0) else ""
        zee = by_label[f"zeeman {sigma:g} uG{tail}"]
        assert zee.lines[0].get_color() == color
        assert zee.lines[0].get_linestyle() == "-"
        mix = by_label[f"mixed {sigma:g} uG{tail}"]
        assert mix.lines[0].get_color() == color
        assert mix.lines[0].get_linestyle() == "--"
    hyp = by_label["hyperfine (slope 2.00)"]
    assert hyp.lines[0].get_color() == "black"
    assert hyp.lines[0].get_linestyle() == "-"
    # The collapsed curve keeps one point per rate, not one per sigma.
    assert len(hyp.lines[0].get_xdata()) == 3


def test_error_bars_match_the_interval_columns(tmp_path):
    rows = [_row(p_s=1e-3, p_L=1e-3, ci_lo=6e-4, ci_hi=1.5e-3),
            _row(p_s=1e-2, p_L=9e-2, ci_lo=7e-2, ci_hi=1.2e-1)]
    path = _write_csv(tmp_path / "bars.csv", rows)
    fig = render(FigureSpec(inputs=(path,), kind="distance-comparison",
                            out_path=str(tmp_path / "bars.png")))
    container = fig.axes[0].containers[0]
    segments = container.lines[2][0].get_segments()
    assert len(segments) == 2
    (x0, lo0), (_, hi0) = segments[0]
    assert x0 == pytest.approx(1e-3)
    assert lo0 == pytest.approx(6e-4)
    assert hi0 == pytest.approx(1.5e-3)
    (_, lo1), (_, hi1) = segments[1]
    assert lo1 == pytest.approx(7e-2)
    assert hi1 == pytest.approx(1.2e-1)


def test_zero_rate_points_are_dropped_from_the_curve(tmp_path):
    rows = [_row(p_s=1e-4, p_L=0.0, ci_lo=0.0, ci_hi=3e-5),
            _row(p_s=1e-3, p_L=1e-3), _row(p_s=1e-2, p_L=1e-1)]
    path = _write_csv(tmp_path / "zero.csv", rows)
    fig = render(FigureSpec(inputs=(path,), kind="distance-comparison",
                            out_path=str(tmp_path / "zero.png")))
    line = fig.axes[0].containers[0].lines[0]
    assert list(line.get_xdata()) == [1e-3, 1e-2]


def test_axis_limits_are_applied(tmp_path):
    path = _write_csv(tmp_path / "lims.csv", _power_law_rows(
        "mixed", 3, 2, 9.0))
    fig = render(FigureSpec(inputs=(path,), kind="scheme-comparison",
                            out_path=str(tmp_path / "lims.png"),
                            xlim=(1e-4, 1e-1), ylim=(1e-6, 1.0)))
    ax = fig.axes[0]
    assert ax.get_xlim() == pytest.approx((1e-4, 1e-1))
    assert ax.get_ylim() == pytest.approx((1e-6, 1.0))
    assert ax.get_xscale() == "log"
    assert ax.get_yscale() == "log"


def test_multiple_input_files_merge_in_order(tmp_path):
    a = _write_csv(tmp_path / "a.csv", _power_law_rows("zeeman", 3, 2, 50.0))
    b = _write_csv(tmp_path / "b.csv", _power_law_rows("mixed", 3, 2, 9.0))
    fig = render(FigureSpec(inputs=(a, b), kind="distance-comparison",
                            out_path=str(tmp_path / "ab.png")))
    labels = [c.get_label() for c in fig.axes[0].containers]
    assert labels[0].startswith("zeeman d=3")
    assert labels[1].startswith("mixed d=3")


def test_rendering_is_deterministic(tmp_path):
    path = _write_csv(tmp_path / "det.csv", _power_law_rows(
        "zeeman", 3, 2, 50.0, sigma=100.0, p_M=7.75e-3))
    out1, out2 = tmp_path / "one.png", tmp_path / "two.png"
    render(FigureSpec(inputs=(path,), kind="scheme-comparison",
                      out_path=str(out1)))
    render(FigureSpec(inputs=(path,), kind="scheme-comparison",
                      out_path=str(out2)))
    assert out1.read_bytes() == out2.read_bytes()


def test_short_curves_get_no_slope_annotation(tmp_path):
    path = _write_csv(tmp_path / "short.csv", [_row(p_s=1e-3, p_L=1e-3)])
    fig = render(FigureSpec(inputs=(path,), kind="distance-comparison",
                            out_path=str(tmp_path / "short.png")))
    assert fig.axes[0].containers[0].get_label() == "zeeman d=3"
