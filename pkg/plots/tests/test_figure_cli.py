from __future__ import annotations

import csv
import subprocess
import sys

import pytest

from leakplot import CSV_COLUMNS
from leakplot.cli import main


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS,
                                lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return str(path)


def _rows():
    out = []
    for p in (1e-3, 3e-3, 1e-2):
        p_L = 50.0 * p * p
        out.append({
            "arch": "zeeman", "model": "ms", "d": 3, "rounds": 3,
            "p_s": repr(p), "p_s_1q": repr(p * 0.03873), "p_M": "0.0",
            "sigma_uG": "", "trials": 100000,
            "failures_x": 10, "failures_z": 10, "failures": 20,
            "p_L": repr(p_L), "ci_lo": repr(p_L * 0.9),
            "ci_hi": repr(p_L * 1.1), "seed": 7,
        })
    return out


def test_renders_an_image(tmp_path, capsys):
    path = _write_csv(tmp_path / "in.csv", _rows())
    out = tmp_path / "fig.png"
    code = main([path, "--kind", "distance-comparison",
                 "--out", str(out)])
    assert code == 0
    assert out.stat().st_size > 0
    assert capsys.readouterr().err == ""


def test_unknown_kind_exits_two(tmp_path):
    path = _write_csv(tmp_path / "in.csv", _rows())
    with pytest.raises(SystemExit) as err:
        main([path, "--kind", "pie-chart", "--out", "x.png"])
    assert err.value.code == 2


def test_missing_input_file_reports_and_fails(tmp_path, capsys):
    code = main([str(tmp_path / "nope.csv"),
                 "--kind", "scheme-comparison",
                 "--out", str(tmp_path / "x.png")])
    assert code == 1
    assert "nope.csv" in capsys.readouterr().err


def test_schema_error_reports_columns(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    code = main([str(bad), "--kind", "scheme-comparison",
                 "--out", str(tmp_path / "x.png")])
    assert code == 1
    err = capsys.readouterr().err
    assert "missing columns" in err
    assert "p_L" in err


def test_malformed_axis_range_exits_two(tmp_path):
    path = _write_csv(tmp_path / "in.csv", _rows())
    for bad in ("1e-3", "1e-3,1e-4", "a,b"):
        with pytest.raises(SystemExit) as err:
            main([path, "--kind", "scheme-comparison",
                  "--out", "x.png", "--xlim", bad])
        assert err.value.code == 2


def test_module_entry_point_subprocess(tmp_path):
    path = _write_csv(tmp_path / "in.csv", _rows())
    out = tmp_path / "fig.svg"
    result = subprocess.run(
        [sys.executable, "-m", "leakplot.cli", path,
         "--kind", "distance-comparison", "--out", str(out)],
        capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    assert out.stat().st_size > 0
