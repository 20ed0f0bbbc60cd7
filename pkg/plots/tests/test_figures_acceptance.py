"""End-to-end figure check against the simulator's command line.

The simulator is consumed the way any downstream user would: its CLI
writes sweep CSVs, its fit subcommand reports reference slopes, and the
figures must reproduce those slopes in their annotations (two decimal
places) with the fixed style mapping. One verdict line is printed.
"""

from __future__ import annotations

import re
import subprocess
import sys

import pytest

from leakplot import FigureSpec, render

SIM = [sys.executable, "-m", "leaksim.cli"]


def _sweep(path, arch, model, d, ps, trials, seed, sigma=None):
    args = SIM + ["sweep", "--arch", arch, "--model", model,
                  "--d", str(d), "--ps", ps, "--trials", str(trials),
                  "--seed", str(seed), "--out", str(path)]
    if sigma is not None:
        args += ["--sigma", str(sigma)]
    result = subprocess.run(args, capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    return str(path)


def _reference_slope(path):
    result = subprocess.run(SIM + ["fit", str(path)],
                            capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    match = re.search(r"slope=(-?\d+\.\d+)", result.stdout)
    assert match, result.stdout
    return float(match.group(1))


@pytest.fixture(scope="module")
def sweep_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("sweeps")
    _sweep(root / "d3.csv", "mixed", "dp", 3, "3e-3,1e-2,3e-2",
           20000, 7)
    _sweep(root / "d5.csv", "mixed", "dp", 5, "3e-3,1e-2,3e-2",
           5000, 7)
    for arch in ("zeeman", "mixed", "hyperfine"):
        _sweep(root / f"{arch}.csv", arch, "ms", 3, "1e-3,3e-3,1e-2",
               20000, 13, sigma=10)
    return root


def test_criterion_8_figures_from_live_sweeps(sweep_dir):
    d3, d5 = str(sweep_dir / "d3.csv"), str(sweep_dir / "d5.csv")
    fig = render(FigureSpec(inputs=(d3, d5), kind="distance-comparison",
                            out_path=str(sweep_dir / "distances.png")))
    containers = fig.axes[0].containers
    assert len(containers) == 2
    for container, path, d in ((containers[0], d3, 3),
                               (containers[1], d5, 5)):
        want = f"mixed d={d} (slope {_reference_slope(path):.2f})"
        assert container.get_label() == want
        assert container.lines[0].get_linestyle() == "--"
    assert (sweep_dir / "distances.png").stat().st_size > 0

    inputs = tuple(str(sweep_dir / f"{a}.csv")
                   for a in ("zeeman", "mixed", "hyperfine"))
    fig = render(FigureSpec(inputs=inputs, kind="scheme-comparison",
                            out_path=str(sweep_dir / "schemes.png")))
    by_label = {}
    for container in fig.axes[0].containers:
        label = container.get_label()
        by_label[label.split(" (slope")[0]] = container
    assert len(by_label) == 3
    zee = by_label["zeeman 10 uG"]
    assert zee.lines[0].get_color() == "blue"
    assert zee.lines[0].get_linestyle() == "-"
    mix = by_label["mixed 10 uG"]
    assert mix.lines[0].get_color() == "blue"
    assert mix.lines[0].get_linestyle() == "--"
    hyp = by_label["hyperfine"]
    assert hyp.lines[0].get_color() == "black"
    assert hyp.lines[0].get_linestyle() == "-"
    for arch, container in (("zeeman", zee), ("mixed", mix),
                            ("hyperfine", hyp)):
        slope = _reference_slope(sweep_dir / f"{arch}.csv")
        assert container.get_label().endswith(f"(slope {slope:.2f})")
    assert (sweep_dir / "schemes.png").stat().st_size > 0
    print("[criterion 8] PASS: live-sweep figures carry the fixed "
          "style mapping and fit-matched slope annotations")
