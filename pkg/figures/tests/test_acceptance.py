"""Acceptance: render real harness artifacts for all four figure kinds.

The artifacts come from the primary toolkit's CLI (its external interface);
the embedded plot data must match the CSV contents exactly, and this
package must work without the primary installed (it never imports it).
"""

import subprocess
import sys

import numpy as np

from mmdfigs import FigureSpec, build, load_rows, render


def test_figures_from_real_artifacts(harness_artifacts, tmp_path):
    root = harness_artifacts

    # null histogram from the raw statistic dump
    raw = root / "ns_raw_xmmd_48_48.csv"
    h_spec = FigureSpec(kind="hist", csv=str(raw), out=str(tmp_path / "hist.png"),
                        sidecar=str(root / "ns.json"))
    h_data = build(h_spec)
    raw_vals = np.array([r["statistic"] for r in load_rows(raw)], dtype=float)
    assert len(h_data.values) == np.isfinite(raw_vals).sum()
    render(h_spec)

    # power curves with bands and the predicted dashed series
    p_spec = FigureSpec(kind="power", csv=str(root / "pw.csv"),
                        out=str(tmp_path / "power.png"),
                        sidecar=str(root / "pw.json"))
    p_data = build(p_spec)
    pw_rows = load_rows(root / "pw.csv")
    for s in p_data.series:
        rows = [r for r in pw_rows if r["test"] == s.test]
        assert len(s.sizes) == len(rows) == 2
        assert sorted(s.power.tolist()) == sorted(r["reject_rate"] for r in rows)
    assert any(s.predicted is not None for s in p_data.series)
    render(p_spec)

    # ROC step curves with the aggregate AUC in the legend
    r_spec = FigureSpec(kind="roc", csv=str(root / "rc_points.csv"),
                        agg=str(root / "rc.csv"), out=str(tmp_path / "roc.png"),
                        sidecar=str(root / "rc.json"))
    r_data = build(r_spec)
    agg_rows = load_rows(root / "rc.csv")
    auc_csv = {r["test"]: r["auc"] for r in agg_rows}
    assert {c.test for c in r_data.curves} == set(auc_csv)
    for c in r_data.curves:
        assert c.auc == auc_csv[c.test]
        assert f"{auc_csv[c.test]:.3f}" in c.legend
        pts = [r for r in load_rows(root / "rc_points.csv") if r["test"] == c.test]
        assert len(c.fpr) == len(pts)
    render(r_spec)

    # power-vs-time scatter with size-proportional markers
    b_spec = FigureSpec(kind="bench", csv=str(root / "bn.csv"),
                        out=str(tmp_path / "bench.png"),
                        sidecar=str(root / "bn.json"))
    b_data = build(b_spec)
    assert len(b_data.points) == len(load_rows(root / "bn.csv"))
    render(b_spec)

    written = sorted(p.name for p in tmp_path.iterdir())
    assert written == ["bench.png", "bench.svg", "hist.png", "hist.svg",
                       "power.png", "power.svg", "roc.png", "roc.svg"]
    for p in tmp_path.iterdir():
        assert p.stat().st_size > 0
    print(f"[PASS] figure pipeline: 4 kinds rendered, plot data matches CSVs")


def test_package_never_imports_the_toolkit():
    code = ("import sys, mmdfigs\n"
            "assert not any(m.startswith('crossmmd') for m in sys.modules), "
            "'figures package must stay independent of the toolkit'\n"
            "print('independent')\n")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert "independent" in out.stdout
