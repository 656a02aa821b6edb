"""Parse experiment CSV artifacts into plot-ready data structures.

Everything drawable is assembled here, without touching matplotlib, so
tests can assert on the exact plot data. No statistics are computed beyond
histogram binning: every number (powers, bands, AUCs, timings) comes from
the CSV files written by the experiment harness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

KINDS = ("hist", "power", "roc", "bench")

# experiment kinds (as recorded in the CSV/sidecar) acceptable per figure kind
_KIND_MATCH = {
    "hist": ("null-hist",),
    "power": ("power-curve", "type-i-error"),
    "roc": ("roc",),
    "bench": ("bench",),
}


class FigureDataError(ValueError):
    """Input CSV is missing, empty, or lacks a required column."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: kind, input CSV paths, output image path, overrides."""

    kind: str
    csv: str
    out: str
    agg: str | None = None      # aggregates CSV (roc needs it for the AUCs)
    sidecar: str | None = None  # optional harness JSON for kind validation
    title: str | None = None
    bins: int | None = None     # histogram override (default Freedman-Diaconis)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureDataError(f"unknown figure kind {self.kind!r}")
        if self.kind == "roc" and self.agg is None:
            raise FigureDataError("roc figures need --agg (aggregates CSV with the auc column)")


def _parse_cell(s: str):
    if s == "":
        return None
    if s == "true":
        return True
    if s == "false":
        return False
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def load_rows(path) -> list[dict]:
    """Read a harness CSV (header + comma-separated rows) into dicts."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FigureDataError(f"cannot read {path}: {e}") from None
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise FigureDataError(f"{path}: empty table")
    cols = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = [_parse_cell(c) for c in ln.split(",")]
        rows.append({k: v for k, v in zip(cols, cells) if v is not None})
    return rows


def _require(rows: list[dict], cols: tuple, path) -> None:
    have = set()
    for r in rows:
        have.update(r)
    for c in cols:
        if c not in have:
            raise FigureDataError(f"{path}: required column {c!r} is missing")


def _check_kind(spec: FigureSpec, rows: list[dict], path) -> None:
    allowed = _KIND_MATCH[spec.kind]
    kinds = {r.get("kind") for r in rows if "kind" in r}
    if kinds and not kinds.issubset(allowed):
        raise FigureDataError(
            f"{path}: experiment kind {sorted(kinds)} does not match figure kind "
            f"{spec.kind!r} (expected one of {list(allowed)})")
    if spec.sidecar is not None:
        doc = json.loads(Path(spec.sidecar).read_text(encoding="utf-8"))
        side_kind = doc.get("spec", {}).get("kind")
        if side_kind not in allowed:
            raise FigureDataError(
                f"{spec.sidecar}: sidecar kind {side_kind!r} does not match "
                f"figure kind {spec.kind!r}")


@dataclass(frozen=True)
class HistData:
    values: np.ndarray          # finite statistic sample, sorted
    bin_edges: np.ndarray
    overlay_x: np.ndarray       # standard normal density reference curve
    overlay_y: np.ndarray
    title: str

    def __eq__(self, other):
        return (isinstance(other, HistData)
                and np.array_equal(self.values, other.values)
                and np.array_equal(self.bin_edges, other.bin_edges)
                and self.title == other.title)


@dataclass(frozen=True)
class PowerSeries:
    test: str
    sizes: np.ndarray           # n + m per grid point
    power: np.ndarray
    band: np.ndarray            # one bootstrap standard deviation
    predicted: np.ndarray | None  # predicted permutation power (xmmd rows)


@dataclass(frozen=True)
class PowerData:
    series: tuple
    title: str


@dataclass(frozen=True)
class RocCurve:
    test: str
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float                  # from the aggregates CSV, not recomputed

    @property
    def legend(self) -> str:
        return f"{self.test} (AUC={self.auc:.3f})"


@dataclass(frozen=True)
class RocData:
    curves: tuple
    title: str


@dataclass(frozen=True)
class BenchPoint:
    test: str
    median_s: float
    power: float
    size: int                   # n + m, drives the marker size


@dataclass(frozen=True)
class BenchData:
    points: tuple
    title: str


def _fd_bin_count(values: np.ndarray) -> int:
    # Freedman-Diaconis; falls back to sqrt rule for degenerate IQR
    n = len(values)
    q75, q25 = np.percentile(values, [75, 25])
    iqr = q75 - q25
    if iqr <= 0:
        return max(1, int(math.sqrt(n)))
    width = 2.0 * iqr / n ** (1.0 / 3.0)
    span = values.max() - values.min()
    if span <= 0:
        return 1
    return max(1, int(math.ceil(span / width)))


def build_hist_data(spec: FigureSpec) -> HistData:
    """Raw statistic dump -> histogram bins + standard normal overlay."""
    rows = load_rows(spec.csv)
    _require(rows, ("statistic",), spec.csv)
    if spec.sidecar is not None:
        _check_kind(spec, [], spec.csv)
    values = np.array([r["statistic"] for r in rows], dtype=float)
    values = np.sort(values[np.isfinite(values)])
    if len(values) == 0:
        raise FigureDataError(f"{spec.csv}: no finite statistic values")
    nbins = spec.bins if spec.bins is not None else _fd_bin_count(values)
    edges = np.histogram_bin_edges(values, bins=nbins)
    lo = min(values.min(), -4.0)
    hi = max(values.max(), 4.0)
    x = np.linspace(lo, hi, 400)
    y = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return HistData(values=values, bin_edges=edges, overlay_x=x, overlay_y=y,
                    title=spec.title or "Null distribution vs N(0,1)")


def build_power_data(spec: FigureSpec) -> PowerData:
    """Aggregates CSV -> one power-vs-size band per test, plus the
    predicted dashed curve where the CSV carries it."""
    rows = load_rows(spec.csv)
    _check_kind(spec, rows, spec.csv)
    _require(rows, ("kind", "test", "n", "m", "reject_rate", "reject_sd"), spec.csv)
    tests = []
    for r in rows:
        if r["test"] not in tests:
            tests.append(r["test"])
    series = []
    for t in tests:
        sub = [r for r in rows if r["test"] == t]
        sub.sort(key=lambda r: r["n"] + r["m"])
        sizes = np.array([r["n"] + r["m"] for r in sub], dtype=float)
        power = np.array([r["reject_rate"] for r in sub], dtype=float)
        band = np.array([r["reject_sd"] for r in sub], dtype=float)
        pred = None
        if all("predicted_perm_power" in r for r in sub):
            pred = np.array([r["predicted_perm_power"] for r in sub], dtype=float)
        series.append(PowerSeries(test=t, sizes=sizes, power=power, band=band,
                                  predicted=pred))
    return PowerData(series=tuple(series), title=spec.title or "Power vs sample size")


def build_roc_data(spec: FigureSpec) -> RocData:
    """Step points CSV + aggregates CSV -> one ROC curve per test with the
    aggregate AUC in the legend."""
    pts = load_rows(spec.csv)
    _require(pts, ("test", "n", "m", "fpr", "tpr"), spec.csv)
    agg = load_rows(spec.agg)
    _check_kind(spec, agg, spec.agg)
    _require(agg, ("test", "auc"), spec.agg)
    auc_by_test = {r["test"]: float(r["auc"]) for r in agg}
    tests = []
    for r in pts:
        if r["test"] not in tests:
            tests.append(r["test"])
    curves = []
    for t in tests:
        if t not in auc_by_test:
            raise FigureDataError(f"{spec.agg}: no auc row for test {t!r}")
        sub = [r for r in pts if r["test"] == t]
        curves.append(RocCurve(
            test=t,
            fpr=np.array([r["fpr"] for r in sub], dtype=float),
            tpr=np.array([r["tpr"] for r in sub], dtype=float),
            auc=auc_by_test[t]))
    return RocData(curves=tuple(curves), title=spec.title or "ROC")


def build_bench_data(spec: FigureSpec) -> BenchData:
    """Aggregates CSV -> power-vs-time points, marker size tracking n+m."""
    rows = load_rows(spec.csv)
    _check_kind(spec, rows, spec.csv)
    _require(rows, ("kind", "test", "n", "m", "median_s", "reject_rate"), spec.csv)
    points = tuple(
        BenchPoint(test=r["test"], median_s=float(r["median_s"]),
                   power=float(r["reject_rate"]), size=int(r["n"] + r["m"]))
        for r in rows)
    return BenchData(points=points, title=spec.title or "Power vs computation time")


_BUILDERS = {
    "hist": build_hist_data,
    "power": build_power_data,
    "roc": build_roc_data,
    "bench": build_bench_data,
}


def build(spec: FigureSpec):
    """Dispatch to the kind-specific builder."""
    return _BUILDERS[spec.kind](spec)
