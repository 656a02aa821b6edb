"""Declarative Monte Carlo experiment runner.

An :class:`ExperimentSpec` fixes everything about a study (source, size
grid, trial count, tests, level, seed, kernel); given the spec, every
number in the output except wall-clock timings is reproducible. Per-trial
randomness comes from Philox streams derived with a splitmix64 mix of
(size index, arm, trial, part), so scheduling order is irrelevant.

Test identifiers: ``xmmd``, ``mmd-perm{B}``, ``block{b}`` (``b`` an integer
or ``sqrt`` for floor(sqrt(n))), ``linear``, and ``mmd`` (the raw
U-statistic, valid only where no accept/reject calibration is needed,
i.e. null-hist and roc).

With ``kernel="median-auto"`` the bandwidth is re-selected on each trial's
pooled sample; all tests in that trial share the resulting kernel, and the
gram-based tests share one pooled gram. Bench runs do not share anything:
each test is timed standalone.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import __version__ as _version
from . import _accel
from ._rng import substream
from .baselines import (PermutationPlan, TestResult, block_mmd_test,
                        linear_mmd_test, mmd_u_statistic, permutation_test)
from .calibration import EmpiricalSample, ks_distance, predict_perm_power
from .cross import SplitPlan, studentize, xmmd_test_from_gram
from .datagen import RNG_ALGORITHM, RngState, SourceSpec, sample
from .errors import InvalidInputError
from .kernels import (KernelSpec, gram_matrix, median_auto_gram,
                      median_kernel_spec)

NULL_HIST = "null-hist"
TYPE_I = "type-i-error"
POWER_CURVE = "power-curve"
ROC = "roc"
BENCH = "bench"
KINDS = (NULL_HIST, TYPE_I, POWER_CURVE, ROC, BENCH)

MEDIAN_AUTO = "median-auto"

# arm/part tags for stream derivation
_ARM_MAIN, _ARM_NULL, _ARM_ALT = 0, 1, 2
_PART_X, _PART_Y, _PART_BOOT, _PART_PERM = 0, 1, 2, 3


def parse_test_id(tid: str) -> dict:
    """Parse ``name`` or ``name{param}`` into a descriptor dict."""
    tid = tid.strip()
    param = None
    name = tid
    if tid.endswith("}") and "{" in tid:
        name, _, rest = tid.partition("{")
        param = rest[:-1]
    if name == "xmmd":
        if param is not None:
            raise InvalidInputError("xmmd takes no parameter")
        return {"kind": "xmmd", "label": "xmmd"}
    if name == "mmd":
        if param is not None:
            raise InvalidInputError("mmd takes no parameter")
        return {"kind": "mmd", "label": "mmd"}
    if name == "mmd-perm":
        B = 200 if param is None else int(param)
        if B < 1:
            raise InvalidInputError("mmd-perm needs B >= 1")
        return {"kind": "mmd-perm", "B": B, "label": f"mmd-perm{{{B}}}"}
    if name == "block":
        if param is None or param == "sqrt":
            return {"kind": "block", "b": "sqrt", "label": "block{sqrt}"}
        b = int(param)
        if b < 2:
            raise InvalidInputError("block needs b >= 2")
        return {"kind": "block", "b": b, "label": f"block{{{b}}}"}
    if name == "linear":
        if param is not None:
            raise InvalidInputError("linear takes no parameter")
        return {"kind": "linear", "label": "linear"}
    raise InvalidInputError(f"unknown test identifier {tid!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one Monte Carlo study."""

    kind: str
    source: SourceSpec
    sizes: tuple
    trials: int
    tests: tuple = ("xmmd",)
    alpha: float = 0.05
    seed: int = 0
    kernel: Union[KernelSpec, str] = MEDIAN_AUTO

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise InvalidInputError("trials must be >= 1")
        if not self.sizes:
            raise InvalidInputError("sizes must be nonempty")
        for n, m in self.sizes:
            if n < 2 or m < 2:
                raise InvalidInputError(f"sizes must have n, m >= 2, got ({n}, {m})")
        if not (0.0 < self.alpha < 1.0):
            raise InvalidInputError(f"level must lie in (0,1), got {self.alpha}")
        if not self.tests:
            raise InvalidInputError("tests must be nonempty")
        for tid in self.tests:
            desc = parse_test_id(tid)
            if desc["kind"] == "mmd" and self.kind in (TYPE_I, POWER_CURVE, BENCH):
                raise InvalidInputError(
                    "'mmd' is a raw statistic with no calibration; "
                    "use 'mmd-perm{B}' for accept/reject experiments")
        if isinstance(self.kernel, str):
            self._parse_kernel_mode(self.kernel)
        elif not isinstance(self.kernel, KernelSpec):
            raise InvalidInputError("kernel must be a KernelSpec or a median-auto string")
        if self.kind in (NULL_HIST, TYPE_I) and not self.source.is_null:
            raise InvalidInputError(
                f"{self.kind} requires a null-configured source (eps == 0)")
        if self.kind == ROC and self.source.is_null:
            raise InvalidInputError("roc requires an alternative source (eps > 0)")

    @staticmethod
    def _parse_kernel_mode(s: str):
        parts = s.split(":")
        if parts[0] != MEDIAN_AUTO or len(parts) > 3:
            raise InvalidInputError(f"unknown kernel string {s!r}")
        family = parts[1] if len(parts) > 1 else "gaussian"
        degree = int(parts[2]) if len(parts) > 2 else 2
        if family not in ("gaussian", "laplace", "polynomial"):
            raise InvalidInputError(f"unknown kernel family {family!r}")
        return family, degree

    def kernel_mode(self):
        """('fixed', spec) or ('median', family, degree)."""
        if isinstance(self.kernel, KernelSpec):
            return ("fixed", self.kernel)
        family, degree = self._parse_kernel_mode(self.kernel)
        return ("median", family, degree)

    def describe(self) -> dict:
        mode = self.kernel_mode()
        kern = self.kernel.describe() if mode[0] == "fixed" else {
            "median_auto": True, "family": mode[1], "degree": mode[2]}
        return {
            "kind": self.kind,
            "source": self.source.describe(),
            "sizes": [[int(n), int(m)] for n, m in self.sizes],
            "trials": self.trials,
            "tests": [parse_test_id(t)["label"] for t in self.tests],
            "alpha": self.alpha,
            "seed": self.seed,
            "kernel": kern,
        }


@dataclass
class ResultTable:
    """Aggregate rows plus provenance metadata."""

    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def _metadata(spec: ExperimentSpec) -> dict:
    return {
        "seed": spec.seed,
        "rng_algorithm": RNG_ALGORITHM,
        "version": _version,
        "backend": _accel.backend_name(),
        "spec": spec.describe(),
    }


def _draw_pair(spec: ExperimentSpec, size_idx: int, arm: int, trial: int, n: int, m: int):
    which_y = "P" if arm == _ARM_NULL else "Q"
    X = sample(spec.source, "P", n,
               RngState(spec.seed, substream(size_idx, arm, trial, _PART_X)))
    Y = sample(spec.source, which_y, m,
               RngState(spec.seed, substream(size_idx, arm, trial, _PART_Y)))
    return X, Y


class _TrialKit:
    """Shared per-trial kernel/gram context for one (X, Y) draw."""

    def __init__(self, spec: ExperimentSpec, X, Y, need_gram: bool):
        self.X, self.Y = X, Y
        mode = spec.kernel_mode()
        if need_gram:
            if mode[0] == "median":
                self.kspec, self.gram = median_auto_gram(X, Y, mode[1], mode[2])
            else:
                self.kspec, self.gram = mode[1], gram_matrix(mode[1], X, Y)
        else:
            self.gram = None
            self.kspec = (mode[1] if mode[0] == "fixed"
                          else median_kernel_spec(X, Y, mode[1], mode[2]))


def _needs_gram(descs) -> bool:
    return any(d["kind"] in ("xmmd", "mmd", "mmd-perm") for d in descs)


def _resolve_block(b, n: int) -> int:
    return int(np.sqrt(n)) if b == "sqrt" else int(b)


def _statistic(desc: dict, kit: _TrialKit, spec: ExperimentSpec) -> float:
    """Raw statistic of one test (no accept/reject)."""
    kind = desc["kind"]
    if kind == "xmmd":
        plan = SplitPlan.balanced(kit.gram.n, kit.gram.m)
        return studentize(kit.gram, plan).t
    if kind in ("mmd", "mmd-perm"):
        return mmd_u_statistic(kit.gram)
    if kind == "block":
        b = _resolve_block(desc["b"], kit.X.shape[0])
        return block_mmd_test(kit.X, kit.Y, kit.kspec, b, spec.alpha).statistic
    return linear_mmd_test(kit.X, kit.Y, kit.kspec, spec.alpha).statistic


def _test_result(desc: dict, kit: _TrialKit, spec: ExperimentSpec,
                 perm_seed: int) -> TestResult:
    kind = desc["kind"]
    if kind == "xmmd":
        plan = SplitPlan.balanced(kit.gram.n, kit.gram.m)
        return xmmd_test_from_gram(kit.gram, plan, spec.alpha)
    if kind == "mmd-perm":
        return permutation_test(kit.gram, spec.alpha,
                                PermutationPlan(B=desc["B"], seed=perm_seed))
    if kind == "block":
        b = _resolve_block(desc["b"], kit.X.shape[0])
        return block_mmd_test(kit.X, kit.Y, kit.kspec, b, spec.alpha)
    if kind == "linear":
        return linear_mmd_test(kit.X, kit.Y, kit.kspec, spec.alpha)
    raise InvalidInputError(f"test {desc['label']!r} has no accept/reject form")


def run_null_hist(spec: ExperimentSpec):
    """Null distribution study.

    Returns ``(table, raw)`` where ``raw[(label, n, m)]`` is the statistic
    sample across trials. Rows carry the KS distance to the standard normal
    CDF over the finite statistics and the count of +-inf degenerates.
    """
    if spec.kind != NULL_HIST:
        raise InvalidInputError(f"expected kind {NULL_HIST!r}")
    descs = [parse_test_id(t) for t in spec.tests]
    need_gram = _needs_gram(descs)
    table = ResultTable(metadata=_metadata(spec))
    raw = {}
    for size_idx, (n, m) in enumerate(spec.sizes):
        stats = {d["label"]: np.empty(spec.trials) for d in descs}
        for trial in range(spec.trials):
            X, Y = _draw_pair(spec, size_idx, _ARM_MAIN, trial, n, m)
            kit = _TrialKit(spec, X, Y, need_gram)
            for d in descs:
                stats[d["label"]][trial] = _statistic(d, kit, spec)
        for d in descs:
            vals = stats[d["label"]]
            emp = EmpiricalSample.from_values(vals)
            raw[(d["label"], n, m)] = vals
            table.rows.append({
                "kind": spec.kind, "test": d["label"], "n": n, "m": m,
                "d": spec.source.d, "trials": spec.trials,
                "ks": ks_distance(emp),
                "n_pos_inf": emp.n_pos_inf, "n_neg_inf": emp.n_neg_inf,
                "mean_stat": float(np.mean(emp.values)),
                "sd_stat": float(np.std(emp.values)),
            })
    return table, raw


def _bootstrap_sd(rejects: np.ndarray, rng: np.random.Generator,
                  resamples: int = 200) -> float:
    """SD of the reject rate over bootstrap resamples of the trial indicators."""
    t = len(rejects)
    means = rng.choice(rejects, size=(resamples, t), replace=True).mean(axis=1)
    return float(np.std(means))


def _clamped_power(p: float, trials: int) -> float:
    # predict_perm_power needs an argument in (0,1)
    lo = 1.0 / (2.0 * trials)
    return min(max(p, lo), 1.0 - lo)


def run_power_curve(spec: ExperimentSpec) -> ResultTable:
    """Empirical power per (size, test), with a 200-resample bootstrap band.

    xmmd rows additionally carry the permutation-test power predicted from
    the xmmd power. With a null source (eps == 0, kind 'type-i-error') the
    same machinery measures the type-I error.
    """
    if spec.kind not in (POWER_CURVE, TYPE_I):
        raise InvalidInputError(f"expected kind {POWER_CURVE!r} or {TYPE_I!r}")
    descs = [parse_test_id(t) for t in spec.tests]
    need_gram = _needs_gram(descs)
    table = ResultTable(metadata=_metadata(spec))
    for size_idx, (n, m) in enumerate(spec.sizes):
        rejects = {d["label"]: np.empty(spec.trials) for d in descs}
        stats = {d["label"]: np.empty(spec.trials) for d in descs}
        for trial in range(spec.trials):
            X, Y = _draw_pair(spec, size_idx, _ARM_MAIN, trial, n, m)
            kit = _TrialKit(spec, X, Y, need_gram)
            perm_seed = substream(spec.seed, size_idx, trial, _PART_PERM)
            for d in descs:
                r = _test_result(d, kit, spec, perm_seed)
                rejects[d["label"]][trial] = 1.0 if r.reject else 0.0
                stats[d["label"]][trial] = r.statistic
        for t_idx, d in enumerate(descs):
            rej = rejects[d["label"]]
            boot_rng = RngState(spec.seed,
                                substream(size_idx, t_idx, _PART_BOOT)).generator()
            finite = stats[d["label"]][np.isfinite(stats[d["label"]])]
            row = {
                "kind": spec.kind, "test": d["label"], "n": n, "m": m,
                "d": spec.source.d, "trials": spec.trials,
                "reject_rate": float(np.mean(rej)),
                "reject_sd": _bootstrap_sd(rej, boot_rng),
                "mean_stat": float(np.mean(finite)) if len(finite) else 0.0,
            }
            if d["kind"] == "xmmd":
                row["predicted_perm_power"] = predict_perm_power(
                    _clamped_power(row["reject_rate"], spec.trials), spec.alpha)
            table.rows.append(row)
    return table


def run_type_one_error(spec: ExperimentSpec) -> ResultTable:
    """Type-I error study: power machinery on a null source."""
    return run_power_curve(spec)


def _roc_curve(null_stats: np.ndarray, alt_stats: np.ndarray):
    """Exact step-function ROC: every observed value is a threshold."""
    thresholds = np.unique(np.concatenate([null_stats, alt_stats]))[::-1]
    fpr = [0.0]
    tpr = [0.0]
    T = len(null_stats)
    for tau in thresholds:
        fpr.append(float(np.sum(null_stats >= tau)) / T)
        tpr.append(float(np.sum(alt_stats >= tau)) / len(alt_stats))
    fpr.append(1.0)
    tpr.append(1.0)
    fpr = np.asarray(fpr)
    tpr = np.asarray(tpr)
    auc = float(np.trapezoid(tpr, fpr))
    return fpr, tpr, auc


def run_roc(spec: ExperimentSpec):
    """ROC study: statistics over `trials` null and `trials` alternative draws.

    Returns ``(table, points)`` with ``points[(label, n, m)] = (fpr, tpr)``.
    """
    if spec.kind != ROC:
        raise InvalidInputError(f"expected kind {ROC!r}")
    descs = [parse_test_id(t) for t in spec.tests]
    need_gram = _needs_gram(descs)
    table = ResultTable(metadata=_metadata(spec))
    points = {}
    for size_idx, (n, m) in enumerate(spec.sizes):
        arm_stats = {}
        for arm in (_ARM_NULL, _ARM_ALT):
            stats = {d["label"]: np.empty(spec.trials) for d in descs}
            for trial in range(spec.trials):
                X, Y = _draw_pair(spec, size_idx, arm, trial, n, m)
                kit = _TrialKit(spec, X, Y, need_gram)
                for d in descs:
                    stats[d["label"]][trial] = _statistic(d, kit, spec)
            arm_stats[arm] = stats
        for d in descs:
            fpr, tpr, auc = _roc_curve(arm_stats[_ARM_NULL][d["label"]],
                                       arm_stats[_ARM_ALT][d["label"]])
            points[(d["label"], n, m)] = (fpr, tpr)
            table.rows.append({
                "kind": spec.kind, "test": d["label"], "n": n, "m": m,
                "d": spec.source.d, "trials": spec.trials, "auc": auc,
            })
    return table, points


def _timed_standalone(desc: dict, spec: ExperimentSpec, X, Y, perm_seed: int):
    """Run one test end-to-end (own bandwidth, own gram) and time it."""
    t0 = time.perf_counter_ns()
    kit = _TrialKit(spec, X, Y, _needs_gram([desc]))
    result = _test_result(desc, kit, spec, perm_seed)
    return time.perf_counter_ns() - t0, result


def run_bench(spec: ExperimentSpec) -> ResultTable:
    """Median/IQR wall-clock time per test, paired with its reject rate.

    Timings exclude data generation; each (test, size) region is warmed
    once before measurement. Unlike the other kinds, nothing is shared
    between tests.
    """
    if spec.kind != BENCH:
        raise InvalidInputError(f"expected kind {BENCH!r}")
    descs = [parse_test_id(t) for t in spec.tests]
    table = ResultTable(metadata=_metadata(spec))
    for size_idx, (n, m) in enumerate(spec.sizes):
        for d in descs:
            times = np.empty(spec.trials)
            rejects = np.empty(spec.trials)
            warm_X, warm_Y = _draw_pair(spec, size_idx, _ARM_MAIN, 0, n, m)
            _timed_standalone(d, spec, warm_X, warm_Y, perm_seed=0)
            for trial in range(spec.trials):
                X, Y = _draw_pair(spec, size_idx, _ARM_MAIN, trial, n, m)
                perm_seed = substream(spec.seed, size_idx, trial, _PART_PERM)
                dt, r = _timed_standalone(d, spec, X, Y, perm_seed)
                times[trial] = dt * 1e-9
                rejects[trial] = 1.0 if r.reject else 0.0
            q25, q50, q75 = np.percentile(times, [25, 50, 75])
            table.rows.append({
                "kind": spec.kind, "test": d["label"], "n": n, "m": m,
                "d": spec.source.d, "trials": spec.trials,
                "median_s": float(q50), "iqr_s": float(q75 - q25),
                "total_s": float(np.sum(times)),
                "reject_rate": float(np.mean(rejects)),
            })
    return table


def run(spec: ExperimentSpec):
    """Dispatch on spec.kind; returns what the kind-specific runner returns."""
    return {
        NULL_HIST: run_null_hist,
        TYPE_I: run_type_one_error,
        POWER_CURVE: run_power_curve,
        ROC: run_roc,
        BENCH: run_bench,
    }[spec.kind](spec)


# ---------------------------------------------------------------------------
# CSV / JSON artifacts


def _format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


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


def _columns(rows) -> list:
    cols = []
    for row in rows:
        for k in row:
            if k not in cols:
                cols.append(k)
    return cols


def write_csv(table: ResultTable, path) -> None:
    """Write aggregate rows: header line, comma-separated, floats at 9
    significant digits."""
    cols = _columns(table.rows)
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(cols) + "\n")
        for row in table.rows:
            f.write(",".join(_format_cell(row.get(c)) for c in cols) + "\n")


def read_csv(path) -> ResultTable:
    """Read rows written by :func:`write_csv` (numbers parsed back)."""
    with open(path, "r", encoding="utf-8") as f:
        lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    if not lines:
        raise InvalidInputError(f"{path} is empty")
    cols = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        row = {c: _parse_cell(v) for c, v in zip(cols, cells) if _parse_cell(v) is not None}
        rows.append(row)
    return ResultTable(rows=rows)


def write_raw_csv(values: np.ndarray, path) -> None:
    """Single-column dump of raw statistic values."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("statistic\n")
        for v in np.asarray(values).ravel():
            f.write(f"{float(v):.9g}\n")


def write_roc_points_csv(points: dict, path) -> None:
    """FPR/TPR step points for every (test, n, m) curve."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("test,n,m,fpr,tpr\n")
        for (label, n, m), (fpr, tpr) in points.items():
            for x, y in zip(fpr, tpr):
                f.write(f"{label},{n},{m},{x:.9g},{y:.9g}\n")


def write_sidecar(spec: ExperimentSpec, path, extra: dict | None = None) -> None:
    """JSON provenance sidecar: full spec echo plus run metadata."""
    doc = _metadata(spec)
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
