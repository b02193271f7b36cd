"""Experiment drivers: phase-transition grids, NMSE sweeps and runtime scaling.

Every realisation gets its own seeds, derived from (base seed, grid index,
realisation index) through ``numpy.random.SeedSequence``, so results do not
depend on execution order or on how work is split across processes.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .em import EmConfig, em_gm_amp, rho_se
from .gamp import GampConfig
from .mos import MosConfig, mos_select
from .signals import MatrixSpec, SignalSpec, add_noise, gen_matrix, gen_signal

log = logging.getLogger(__name__)

SUCCESS_NMSE = 1e-6
NMSE_FLOOR_DB = -320.0
BREAKPOINT_DB = -15.0


def nmse(x_true, x_hat) -> float:
    x_true = np.asarray(x_true, dtype=float)
    ref = float(np.sum(x_true**2))
    if ref == 0.0:
        raise ValueError("NMSE is undefined for an all-zero true signal")
    return float(np.sum((x_true - np.asarray(x_hat, dtype=float)) ** 2)) / ref


def nmse_db(x_true, x_hat) -> float:
    """NMSE in dB, with exact recovery reported as -320 dB instead of -inf."""
    r = nmse(x_true, x_hat)
    return NMSE_FLOOR_DB if r <= 0.0 else max(10.0 * math.log10(r), NMSE_FLOOR_DB)


def fmt(v) -> str:
    """17-significant-digit text for floats, so values survive a round trip."""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


# solver -------------------------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    """Which estimator to run and with what tolerances.

    ``algorithm`` is ``"em-gm-amp"`` (fixed L) or ``"mos"`` (L selected).
    """

    algorithm: str = "em-gm-amp"
    mode: str = "sparse"
    L: Optional[int] = None
    i_max: int = 20
    em_tol: float = 1e-5
    t_max: int = 20
    gamp_tol: float = 1e-5
    snr0: float = 100.0
    damping: float = 1.0
    j_max: int = 5
    L_max: int = 8
    label: str = ""

    def __post_init__(self):
        if self.algorithm not in ("em-gm-amp", "mos"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        # validate eagerly so a bad grid fails before any work is done
        self.em_config()
        self.gamp_config()

    def em_config(self) -> EmConfig:
        return EmConfig(mode=self.mode, L=self.L, i_max=self.i_max, tol=self.em_tol, snr0=self.snr0)

    def gamp_config(self) -> GampConfig:
        return GampConfig(t_max=self.t_max, tol=self.gamp_tol, damping=self.damping)

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.algorithm == "mos":
            return f"mos-{self.mode}"
        return f"{self.mode}-L{self.em_config().L}"

    def solve(self, y, op):
        if self.algorithm == "mos":
            L0 = self.L
            res = mos_select(y, op, self.em_config(), MosConfig(L0=L0, j_max=self.j_max, L_max=self.L_max),
                             self.gamp_config())
            return res.result.x_hat
        return em_gm_amp(y, op, self.em_config(), self.gamp_config()).x_hat


# Noiseless success-rate experiments: success needs NMSE < 1e-6, and near the
# transition EM converges slowly, so run many short EM passes with tight
# tolerances instead of a few long ones.
NOISELESS_SOLVER = SolverConfig(em_tol=1e-12, gamp_tol=1e-12, i_max=300, t_max=5)


def realization_seeds(base_seed: int, grid_index: int, r: int) -> tuple[int, int, int]:
    """Independent (signal, matrix, noise) seeds for one realisation."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(grid_index, r))
    return tuple(int(s) for s in ss.generate_state(3, dtype=np.uint64))


@dataclass(frozen=True)
class Task:
    index: int
    r: int
    signal: SignalSpec
    matrix: MatrixSpec
    snr_db: float
    solver: SolverConfig
    base_seed: int
    success_nmse: float = SUCCESS_NMSE


def run_one(task: Task) -> dict:
    """Generate one problem instance, solve it, and score the estimate."""
    s_sig, s_mat, s_noise = realization_seeds(task.base_seed, task.index, task.r)
    x = gen_signal(task.signal, s_sig)
    op = gen_matrix(task.matrix, s_mat)
    z = op.forward(x)
    rec = {"index": task.index, "r": task.r, "error": ""}
    t0 = time.perf_counter()
    try:
        if not np.any(z):
            # nothing was measured: the only sensible estimate is zero
            x_hat = np.zeros_like(x)
        else:
            y, _ = add_noise(z, task.snr_db, s_noise)
            x_hat = task.solver.solve(y, op)
    except (FloatingPointError, ValueError, np.linalg.LinAlgError) as err:
        log.warning("realisation %d/%d failed: %s", task.index, task.r, err)
        rec.update(nmse_db=math.inf, success=False, runtime_s=time.perf_counter() - t0, error=str(err))
        return rec
    rec["runtime_s"] = time.perf_counter() - t0
    if not np.any(x):
        exact = not np.any(x_hat)
        rec["nmse_db"] = NMSE_FLOOR_DB if exact else math.inf
        rec["success"] = exact
    else:
        r = nmse(x, x_hat)
        rec["nmse_db"] = nmse_db(x, x_hat)
        rec["success"] = bool(r < task.success_nmse)
    return rec


def run_tasks(tasks: Sequence[Task], jobs: int = 1) -> list[dict]:
    """Run tasks serially or on a process pool; output order follows ``tasks``."""
    if jobs <= 1 or len(tasks) <= 1:
        return [run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_one, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


# tables ------------------------------------------------------------------------

def summarize(records: list[dict]) -> dict:
    db = np.array([r["nmse_db"] for r in records], dtype=float)
    lin = np.where(np.isfinite(db), 10.0 ** (db / 10.0), np.inf)
    mean_lin = float(np.mean(lin))
    return {
        "success_rate": sum(r["success"] for r in records) / len(records),
        "mean_nmse_db": NMSE_FLOOR_DB if mean_lin == 0 else 10 * math.log10(mean_lin),
        "median_nmse_db": float(np.median(db)),
        "mean_runtime_s": float(np.mean([r["runtime_s"] for r in records])),
        "failures": sum(bool(r["error"]) for r in records),
    }


TIMING_COLUMNS = ("mean_runtime_s", "median_runtime_s")


@dataclass
class ResultTable:
    """One row per grid point (or per sweep/scaling point) plus raw records."""

    columns: list
    rows: list
    records: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def column(self, name) -> np.ndarray:
        return np.array([row[name] for row in self.rows])

    def to_csv(self, path=None, timing: bool = True) -> str:
        cols = [c for c in self.columns if timing or c not in TIMING_COLUMNS]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in self.rows:
            w.writerow([fmt(row[c]) for c in cols])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as f:
                f.write(text)
        return text

    def payload(self) -> dict:
        """Everything except wall-clock data, in a JSON-ready form."""
        rows = [{k: v for k, v in row.items() if k not in TIMING_COLUMNS} for row in self.rows]
        recs = [{k: v for k, v in r.items() if k != "runtime_s"} for r in self.records]
        return {"columns": list(self.columns), "rows": rows, "records": recs, "extra": self.extra}

    def to_json(self, path=None) -> str:
        timing = {
            "row_timing": [{k: row[k] for k in TIMING_COLUMNS if k in row} for row in self.rows],
            "record_runtime_s": [r.get("runtime_s") for r in self.records],
        }
        doc = {"payload": self.payload(), "metadata": {**self.meta, **timing}}
        # json writes floats with round-trip precision already
        text = json.dumps(doc, indent=1, default=_json_default) + "\n"
        if path is not None:
            with open(path, "w") as f:
                f.write(text)
        return text


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


# phase transitions -------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentGrid:
    """Sparsity-undersampling grid for noiseless phase-transition experiments."""

    n: int
    m_over_n: tuple
    k_over_m: tuple
    realizations: int = 25
    base_seed: int = 0
    signal: str = "bernoulli_gaussian"
    matrix: str = "iid_gaussian"
    lam_a: float = 1.0
    snr_db: float = math.inf
    solver: SolverConfig = NOISELESS_SOLVER
    success_nmse: float = SUCCESS_NMSE

    def __post_init__(self):
        object.__setattr__(self, "m_over_n", tuple(float(v) for v in self.m_over_n))
        object.__setattr__(self, "k_over_m", tuple(float(v) for v in self.k_over_m))
        if self.realizations < 1:
            raise ValueError("need at least one realisation per point")
        if not self.m_over_n or not self.k_over_m:
            raise ValueError("grid axes must be non-empty")
        for i, (M, K) in enumerate(self.dims()):
            if not 0 <= K <= M <= self.n or M < 1:
                raise ValueError(f"grid point {i} has invalid (M, K) = ({M}, {K}) for N = {self.n}")
        SignalSpec(self.signal, self.n)
        MatrixSpec(self.matrix, 1, self.n, self.lam_a)

    @classmethod
    def uniform(cls, n: int, size: int = 8, lo: float = 0.05, hi: float = 0.95, **kw) -> "ExperimentGrid":
        axis = tuple(np.linspace(lo, hi, size))
        return cls(n=n, m_over_n=axis, k_over_m=axis, **kw)

    def dims(self) -> list[tuple[int, int]]:
        """(M, K) for every point, M/N outer and K/M inner."""
        out = []
        for d in self.m_over_n:
            M = int(round(d * self.n))
            for r in self.k_over_m:
                out.append((M, int(round(r * M))))
        return out

    def tasks(self) -> list[Task]:
        tasks = []
        for i, (M, K) in enumerate(self.dims()):
            sig = SignalSpec(self.signal, self.n, k=K)
            mat = MatrixSpec(self.matrix, M, self.n, self.lam_a)
            for r in range(self.realizations):
                tasks.append(Task(i, r, sig, mat, self.snr_db, self.solver, self.base_seed, self.success_nmse))
        return tasks

    def to_dict(self) -> dict:
        d = asdict(self)
        d["m_over_n"] = list(self.m_over_n)
        d["k_over_m"] = list(self.k_over_m)
        return d


PTC_COLUMNS = ["m_over_n", "k_over_m", "success_rate", "median_nmse_db", "mean_runtime_s"]


def ptc_contour(m_over_n, k_over_m, success, level: float = 0.5) -> np.ndarray:
    """Per-column K/M at which the success rate first falls through ``level``.

    ``success`` has shape (len(m_over_n), n_rho); ``k_over_m`` is either one
    shared axis or one row of K/M values per column (the realised ratios after
    rounding K). Linear interpolation between neighbouring grid values; a
    column that never drops below the level reports its largest K/M, one that
    starts below it reports nan.
    """
    success = np.asarray(success, dtype=float)
    rho = np.broadcast_to(np.asarray(k_over_m, dtype=float), success.shape)
    out = np.full(len(m_over_n), np.nan)
    for j, col in enumerate(success):
        if col[0] < level:
            continue
        below = np.flatnonzero(col < level)
        if below.size == 0:
            out[j] = rho[j, -1]
            continue
        b = below[0]
        s0, s1 = col[b - 1], col[b]
        out[j] = rho[j, b - 1] + (s0 - level) / (s0 - s1) * (rho[j, b] - rho[j, b - 1])
    return out


def run_ptc(grid: ExperimentGrid, jobs: int = 1) -> ResultTable:
    tasks = grid.tasks()
    t0 = time.time()
    records = run_tasks(tasks, jobs)
    R = grid.realizations
    rows = []
    for i, (M, K) in enumerate(grid.dims()):
        s = summarize(records[i * R:(i + 1) * R])
        rows.append({"m_over_n": M / grid.n, "k_over_m": K / M, "m": M, "k": K, **s})
    shape = (len(grid.m_over_n), len(grid.k_over_m))
    succ = np.array([r["success_rate"] for r in rows]).reshape(shape)
    rho = np.array([r["k_over_m"] for r in rows]).reshape(shape)
    deltas = [row["m_over_n"] for row in rows[::len(grid.k_over_m)]]
    contour = ptc_contour(deltas, rho, succ)
    lasso = [rho_se(d) if 0 < d < 1 else float("nan") for d in deltas]
    extra = {"contour": [{"m_over_n": d, "k_over_m": c, "lasso_k_over_m": l}
                         for d, c, l in zip(deltas, contour, lasso)],
             "grid": grid.to_dict()}
    meta = {"started": t0, "elapsed_s": time.time() - t0, "jobs": jobs}
    return ResultTable(columns=PTC_COLUMNS, rows=rows, records=records, meta=meta, extra=extra)


def contour_csv(table: ResultTable, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m_over_n", "k_over_m", "lasso_k_over_m"])
    for c in table.extra["contour"]:
        w.writerow([fmt(c["m_over_n"]), fmt(c["k_over_m"]), fmt(c["lasso_k_over_m"])])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as f:
            f.write(text)
    return text


# NMSE sweeps ---------------------------------------------------------------------

SWEEP_COLUMNS = ["solver", "m_over_n", "mean_nmse_db", "median_nmse_db", "success_rate", "mean_runtime_s"]


def breakpoint(m_over_n, median_db, threshold: float = BREAKPOINT_DB) -> float:
    """Smallest M/N whose median NMSE is below ``threshold`` (nan if none)."""
    for d, v in sorted(zip(m_over_n, median_db)):
        if v < threshold:
            return float(d)
    return float("nan")


def run_nmse_sweep(
    signal: SignalSpec,
    m_values: Sequence[int],
    snr_db: float,
    realizations: int,
    solvers: Sequence[SolverConfig] = (SolverConfig(),),
    matrix: str = "iid_gaussian",
    base_seed: int = 0,
    jobs: int = 1,
) -> ResultTable:
    """NMSE versus M for each solver. Solvers see identical problem instances."""
    n = signal.n
    for M in m_values:
        if not 1 <= M <= n or (signal.k is not None and signal.k > M):
            raise ValueError(f"invalid M = {M} for N = {n}, K = {signal.k}")
    tasks = []
    for si, solver in enumerate(solvers):
        for i, M in enumerate(m_values):
            mat = MatrixSpec(matrix, M, n)
            for r in range(realizations):
                # grid index ignores the solver so all solvers share instances
                tasks.append(Task(i, r, signal, mat, snr_db, solver, base_seed))
    t0 = time.time()
    records = run_tasks(tasks, jobs)
    rows = []
    R = realizations
    for si, solver in enumerate(solvers):
        for i, M in enumerate(m_values):
            k = si * len(m_values) + i
            for rec in records[k * R:(k + 1) * R]:
                rec["solver"] = solver.name
            rows.append({"solver": solver.name, "m_over_n": M / n, **summarize(records[k * R:(k + 1) * R])})
    bps = {}
    for solver in solvers:
        sel = [r for r in rows if r["solver"] == solver.name]
        bps[solver.name] = breakpoint([r["m_over_n"] for r in sel], [r["median_nmse_db"] for r in sel])
    extra = {"breakpoint": bps, "signal": signal.to_dict(), "snr_db": snr_db,
             "solvers": [asdict(s) for s in solvers]}
    meta = {"started": t0, "elapsed_s": time.time() - t0, "jobs": jobs}
    return ResultTable(columns=SWEEP_COLUMNS, rows=rows, records=records, meta=meta, extra=extra)


# runtime scaling ---------------------------------------------------------------

SCALING_COLUMNS = ["n", "m", "k", "median_runtime_s", "median_nmse_db"]

# fixed work per run: every EM pass and GAMP iteration is executed
FIXED_WORK_SOLVER = SolverConfig(em_tol=1e-300, gamp_tol=1e-300, i_max=5, t_max=20)


def loglog_slope(n, t) -> float:
    if len(n) < 2:
        return float("nan")
    return float(np.polyfit(np.log(n), np.log(t), 1)[0])


def run_scaling(
    n_values: Sequence[int],
    m_over_n: float = 0.5,
    k_over_n: float = 0.1,
    realizations: int = 3,
    matrix: str = "iid_gaussian",
    signal: str = "bernoulli_rademacher",
    snr_db: float = 25.0,
    solver: SolverConfig = FIXED_WORK_SOLVER,
    base_seed: int = 0,
) -> ResultTable:
    """Median wall time per N and the fitted log-log slope.

    Runs serially on purpose so that timings are not disturbed by other workers.
    """
    rows, records = [], []
    for i, n in enumerate(n_values):
        M, K = int(round(m_over_n * n)), int(round(k_over_n * n))
        tasks = [Task(i, r, SignalSpec(signal, n, k=K), MatrixSpec(matrix, M, n), snr_db, solver, base_seed)
                 for r in range(realizations)]
        # one untimed warm-up so imports and FFT plans do not count
        run_one(tasks[0])
        recs = [run_one(t) for t in tasks]
        records.extend(recs)
        rows.append({"n": n, "m": M, "k": K,
                     "median_runtime_s": float(np.median([r["runtime_s"] for r in recs])),
                     "median_nmse_db": float(np.median([r["nmse_db"] for r in recs]))})
    slope = loglog_slope([r["n"] for r in rows], [r["median_runtime_s"] for r in rows])
    extra = {"slope": slope, "matrix": matrix, "solver": asdict(solver)}
    return ResultTable(columns=SCALING_COLUMNS, rows=rows, records=records, extra=extra)
