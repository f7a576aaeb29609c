"""Steps-to-arrival benchmark: exponential updates vs. retraction updates.

For every sampled cloud the Frechet mean is first solved to high accuracy.
Then, for every learning rate, both update schemes start from the first
point of the cloud and the number of updates needed to come within
``arrival_tol`` of the mean is recorded.

Work is split into one unit per sampled centre.  Units are computed
independently and collected in index order, so the output does not depend on
the number of worker processes.
"""

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import UnsupportedDimensionError
from .frechet import METHODS, descend_batch, solve_reference_batch
from .poincare import retraction_error, to_ball
from .sampling import sample_cloud, sample_center, sample_experiment_inputs

DEFAULT_ALPHAS = tuple(round(0.2 + 0.1 * i, 10) for i in range(9))
CSV_FIELDS = ("center", "collection", "alpha", "method", "steps", "final_distance")
NOT_ARRIVED = -1


@dataclass
class SweepConfig:
    dim: int = 2
    r_max: float = 3.0
    num_centers: int = 50
    collections_per_center: int = 50
    cloud_size: int = 5
    alphas: Sequence[float] = DEFAULT_ALPHAS
    arrival_tol: float = 1e-4
    step_cap: int = 1000
    master_seed: int = 0
    worker_count: int = 1
    output_path: Optional[str] = None
    output_format: str = "csv"

    def __post_init__(self):
        self.alphas = tuple(float(a) for a in self.alphas)
        if not self.alphas or any(not a > 0 for a in self.alphas):
            raise ValueError("alphas must be a non-empty list of positive numbers")
        if not self.arrival_tol > 0:
            raise ValueError("arrival_tol must be positive")
        if self.step_cap < 1:
            raise ValueError("step_cap must be >= 1")
        if min(self.num_centers, self.collections_per_center, self.cloud_size) < 1:
            raise ValueError("centre, collection and cloud counts must be >= 1")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if self.output_format not in ("csv", "json"):
            raise ValueError("output_format must be 'csv' or 'json'")


@dataclass(frozen=True)
class TrialRecord:
    center: int
    collection: int
    alpha: float
    method: str
    steps: int
    final_distance: float
    # Not part of the serialized record format.
    reference_iterations: int = field(default=-1, compare=False)

    @property
    def arrived(self):
        return self.steps != NOT_ARRIVED


@dataclass
class ScatterData:
    """Paired step counts at one learning rate, NotArrived pairs dropped."""

    alpha: float
    pairs: np.ndarray  # (m, 2): exponential, retraction
    win_rate: float
    slope: float


@dataclass
class SweepTable:
    mean_steps: Dict[str, Dict[float, float]]
    win_rate: Dict[float, float]
    slope: Dict[float, float]
    diagnostics: dict = field(default_factory=dict)

    def cell(self, method, alpha):
        return self.mean_steps[method][float(alpha)]


def _center_unit(args):
    """Reference solves and paired trials for all clouds of one centre."""
    c, clouds, alphas, tol, cap = args
    K = clouds.shape[0]
    ref = solve_reference_batch(clouds, clouds[:, 0])
    valid = np.flatnonzero(ref.converged)
    A = len(alphas)

    # Trial b = (collection valid[b // A], alpha b % A).
    X = np.repeat(clouds[valid], A, axis=0)
    theta0 = X[:, 0]
    targets = np.repeat(ref.theta[valid], A, axis=0)
    alpha_arr = np.tile(np.asarray(alphas, dtype=np.float64), len(valid))
    outcomes = {m: descend_batch(m, X, theta0, alpha_arr, targets, tol, cap) for m in METHODS}

    records = []
    for b in range(len(valid) * A):
        k = int(valid[b // A])
        for m in METHODS:
            out = outcomes[m]
            records.append(TrialRecord(
                c, k, float(alphas[b % A]), m, int(out.steps[b]),
                float(out.final_distance[b]), int(ref.iterations[k]),
            ))
    diag = {
        "reference_failures": [[c, int(k)] for k in np.flatnonzero(~ref.converged)],
        "diverged": {m: int(np.sum(outcomes[m].diverged)) for m in METHODS},
        "reference_iterations_max": int(ref.iterations.max()) if K else 0,
    }
    return records, diag


def run_sweep(config: SweepConfig):
    """Run the full benchmark; returns ``(records, table)``.

    Records are ordered by centre, collection, learning rate and method.
    Clouds whose reference solve fails produce no records and are listed in
    ``table.diagnostics["reference_failures"]``.
    """
    if config.dim != 2:
        raise UnsupportedDimensionError("the sweep samples discs of H^2 and needs dim = 2")
    inputs = sample_experiment_inputs(
        config.r_max, config.num_centers, config.collections_per_center,
        config.cloud_size, config.master_seed,
    )
    units = [
        (c, inputs.clouds[c], config.alphas, config.arrival_tol, config.step_cap)
        for c in range(len(inputs))
    ]
    if config.worker_count == 1:
        results = [_center_unit(u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
            results = list(pool.map(_center_unit, units))

    records = [r for recs, _ in results for r in recs]
    diagnostics = {
        "reference_failures": [f for _, d in results for f in d["reference_failures"]],
        "diverged": {m: sum(d["diverged"][m] for _, d in results) for m in METHODS},
        "reference_iterations_max": max(d["reference_iterations_max"] for _, d in results),
        "initial_point": "first point of each cloud",
        "master_seed": config.master_seed,
    }
    table = aggregate(records, config.alphas)
    table.diagnostics = diagnostics
    return records, table


def _pairs(records, alpha):
    by_cloud = {}
    for r in records:
        if r.alpha == alpha:
            by_cloud.setdefault((r.center, r.collection), {})[r.method] = r.steps
    pairs = [
        (v["exponential"], v["retraction"])
        for _, v in sorted(by_cloud.items())
        if v.get("exponential", NOT_ARRIVED) != NOT_ARRIVED
        and v.get("retraction", NOT_ARRIVED) != NOT_ARRIVED
    ]
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def emit_scatter(records, alpha) -> ScatterData:
    """Paired (exponential, retraction) step counts at one learning rate.

    Also reports the fraction of pairs where the exponential scheme arrives
    strictly first, and the through-origin least-squares slope of
    exponential steps against retraction steps.
    """
    alpha = float(alpha)
    pairs = _pairs(records, alpha)
    if not len(pairs):
        warnings.warn(f"no complete (exponential, retraction) pairs at alpha={alpha}")
        return ScatterData(alpha, pairs, math.nan, math.nan)
    e = pairs[:, 0].astype(np.float64)
    r = pairs[:, 1].astype(np.float64)
    win = float(np.mean(e < r))
    denom = float(np.dot(r, r))
    slope = float(np.dot(e, r) / denom) if denom > 0 else math.nan
    return ScatterData(alpha, pairs, win, slope)


def aggregate(records, alphas=None) -> SweepTable:
    """Mean steps per (method, alpha); ``inf`` if any trial did not arrive."""
    if alphas is None:
        alphas = sorted({r.alpha for r in records})
    alphas = [float(a) for a in alphas]
    cells = {m: {a: [] for a in alphas} for m in METHODS}
    for r in records:
        if r.alpha in cells[r.method]:
            cells[r.method][r.alpha].append(r.steps)
    mean_steps = {}
    for m in METHODS:
        mean_steps[m] = {}
        for a in alphas:
            steps = cells[m][a]
            if not steps or NOT_ARRIVED in steps:
                mean_steps[m][a] = math.inf
            else:
                mean_steps[m][a] = sum(steps) / len(steps)
    win, slope = {}, {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for a in alphas:
            sc = emit_scatter(records, a)
            win[a], slope[a] = sc.win_rate, sc.slope
    return SweepTable(mean_steps, win, slope)


# -- serialization ---------------------------------------------------------

def _fmt(x):
    return "inf" if math.isinf(x) else format(x, ".17g")


def _alpha_key(a):
    return repr(float(a))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow([r.center, r.collection, _fmt(r.alpha), r.method, r.steps,
                    _fmt(r.final_distance)])
    return buf.getvalue()


def records_to_json(records) -> str:
    rows = [
        {"center": r.center, "collection": r.collection, "alpha": r.alpha,
         "method": r.method, "steps": r.steps,
         "final_distance": "inf" if math.isinf(r.final_distance) else r.final_distance}
        for r in records
    ]
    return json.dumps(rows, indent=1)


def _write(path, text):
    try:
        with open(path, "w", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def emit_records(records, format="csv", path=None):
    """Serialize trial records as CSV or JSON; write to ``path`` if given.

    Returns the serialized text.
    """
    if format == "csv":
        text = records_to_csv(records)
    elif format == "json":
        text = records_to_json(records)
    else:
        raise ValueError(f"unknown format {format!r}")
    if path is not None:
        _write(path, text)
    return text


def _parse_row(row):
    fd = row["final_distance"]
    return TrialRecord(
        int(row["center"]), int(row["collection"]), float(row["alpha"]),
        row["method"], int(row["steps"]), math.inf if fd == "inf" else float(fd),
    )


def parse_records(text, format="csv") -> List[TrialRecord]:
    if format == "csv":
        rows = csv.DictReader(io.StringIO(text))
        return [_parse_row(row) for row in rows]
    if format == "json":
        return [_parse_row(row) for row in json.loads(text)]
    raise ValueError(f"unknown format {format!r}")


def read_records(path, format=None) -> List[TrialRecord]:
    if format is None:
        format = "json" if str(path).endswith(".json") else "csv"
    with open(path) as f:
        return parse_records(f.read(), format)


def table_to_json(table: SweepTable) -> str:
    obj = {
        m: {_alpha_key(a): ("inf" if math.isinf(v) else v) for a, v in cells.items()}
        for m, cells in table.mean_steps.items()
    }
    return json.dumps(obj, indent=2)


def emit_table(table, path=None):
    text = table_to_json(table)
    if path is not None:
        _write(path, text)
    return text


def summary_to_json(config: SweepConfig, table: SweepTable) -> str:
    def clean(x):
        return None if math.isnan(x) else x
    obj = {
        "config": {k: v for k, v in asdict(config).items() if k not in ("output_path",)},
        "win_rate": {_alpha_key(a): clean(v) for a, v in table.win_rate.items()},
        "slope": {_alpha_key(a): clean(v) for a, v in table.slope.items()},
        "diagnostics": table.diagnostics,
    }
    obj["config"]["alphas"] = list(config.alphas)
    return json.dumps(obj, indent=2)


def format_table(table: SweepTable) -> str:
    alphas = list(next(iter(table.mean_steps.values())).keys())
    lines = ["method / alpha " + " ".join(f"{a:>6.2f}" for a in alphas)]
    for m, cells in table.mean_steps.items():
        vals = " ".join(f"{'inf':>6}" if math.isinf(v) else f"{v:6.1f}" for v in cells.values())
        lines.append(f"{m:<15}{vals}")
    return "\n".join(lines)


# -- other artifacts -------------------------------------------------------

def emit_retraction_error_curve(d_values, step=1.0, directions=360):
    """Rows ``(d, worst_error)`` of the retraction error for each ``d``.

    Raises ``AssertionError`` if the curve is not non-decreasing (up to
    1e-12 of round-off).
    """
    rows = [(float(d), retraction_error(d, step, directions)) for d in d_values]
    for (d0, e0), (d1, e1) in zip(rows, rows[1:]):
        if d1 >= d0:
            assert e1 >= e0 - 1e-12, f"retraction error decreases between d={d0} and d={d1}"
    return rows


def run_trace(config: SweepConfig, center=0, collection=0, alpha=0.45, methods=METHODS):
    """Iterates of single trials, in Poincare-disc coordinates.

    Returns a list of ``(series, step, y)`` rows where ``series`` is
    ``"sample"`` for the cloud points, ``"mean"`` for the reference solution
    or a method name for its iterates.
    """
    if config.dim != 2:
        raise UnsupportedDimensionError("traces are only available for dim = 2")
    if not (0 <= center < config.num_centers and 0 <= collection < config.collections_per_center):
        raise ValueError("centre or collection index out of range")
    c_point = sample_center(center, config.r_max, config.master_seed)
    X = sample_cloud(c_point, center, collection, config.cloud_size, config.r_max,
                     config.master_seed)
    ref = solve_reference_batch(X[None], X[None, 0])
    rows = [("sample", i, to_ball(x)) for i, x in enumerate(X)]
    rows.append(("mean", int(ref.iterations[0]), to_ball(ref.theta[0])))
    for m in methods:
        out = descend_batch(m, X[None], X[None, 0], np.array([alpha]), ref.theta,
                            config.arrival_tol, config.step_cap, keep_trace=True)
        rows.extend((m, k, to_ball(t)) for k, t in enumerate(out.traces[0]))
    return rows
