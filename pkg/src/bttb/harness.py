"""Benchmark and survey-simulation workflows behind the CLI.

Timing methodology: every timed phase gets one untimed warm-up first (plan
setup, page faults), so the recorded means measure steady-state cost.  All
random vectors come from one seeded generator in a documented order, making
runs bit-reproducible for a given seed.
"""
import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from .dense import DEFAULT_MEM_GUARD_BYTES, MemoryGuardError, assemble_dense, dense_apply
from .grid import scaled_problem
from .multiply import apply, relative_error
from .transform import build_transform_stack, warm_fft

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = ("schema_version", "problem", "padding", "kernel", "path", "phase",
               "trials", "mean_seconds", "mean_rel_error_vs_dense", "m", "n", "seed")


@dataclass(frozen=True)
class BenchRecord:
    problem: int
    padding: float
    kernel: str
    path: str            # dense | transform
    phase: str           # build | forward | transpose | skipped
    trials: int
    mean_seconds: float  # None for skipped phases
    mean_rel_error: float  # None unless transform apply with dense available
    m: int
    n: int
    seed: int

    def csv_row(self):
        fmt = lambda v: "" if v is None else f"{v:.9e}"
        return (CSV_SCHEMA_VERSION, self.problem, self.padding, self.kernel,
                self.path, self.phase, self.trials, fmt(self.mean_seconds),
                fmt(self.mean_rel_error), self.m, self.n, self.seed)


def write_bench_csv(records, fh):
    writer = csv.writer(fh)
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.csv_row())


def bench_csv_text(records):
    buf = io.StringIO()
    write_bench_csv(records, buf)
    return buf.getvalue()


def sizes_rows(padding):
    """The 12-row benchmark dimension table for one padding fraction."""
    rows = []
    for k in range(1, 13):
        g = scaled_problem(k, padding)
        rows.append({"problem": k, "sx": g.sx, "sy": g.sy, "nz": g.nz,
                     "pxl": g.pxl, "pyl": g.pyl, "nx": g.nx, "ny": g.ny,
                     "m": g.m, "n": g.n})
    return rows


def _timed(fn, warmup=True):
    if warmup:
        fn()
    t0 = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - t0


def _mean_timed_loop(fn_per_trial, trials):
    fn_per_trial(0)  # warm-up
    total = 0.0
    for t in range(trials):
        t0 = time.perf_counter()
        fn_per_trial(t)
        total += time.perf_counter() - t0
    return total / trials


def run_bench(problems, padding, trials, params, seed,
              mem_guard_bytes=DEFAULT_MEM_GUARD_BYTES):
    """Time builds and products for each problem; compare paths when possible.

    Per problem: build the transform stack (timed after a warm-up build);
    build the dense matrices if the memory guard allows, else record a
    skipped row; run `trials` seeded random forward/transpose products per
    path and record mean times plus the transform path's mean relative error
    against dense.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    records = []
    for k in problems:
        grid = scaled_problem(k, padding)
        common = dict(problem=k, padding=padding, kernel=params.kind,
                      m=grid.m, n=grid.n, seed=seed)
        warm_fft(grid.embed_shape)

        stack, t_build = _timed(lambda: build_transform_stack(grid, params))
        records.append(BenchRecord(path="transform", phase="build", trials=1,
                                   mean_seconds=t_build, mean_rel_error=None,
                                   **common))
        dense = None
        try:
            dense, t_build = _timed(
                lambda: assemble_dense(grid, params, mem_guard_bytes),
                warmup=False)  # no plan setup on this path; one build is enough
            records.append(BenchRecord(path="dense", phase="build", trials=1,
                                       mean_seconds=t_build, mean_rel_error=None,
                                       **common))
        except MemoryGuardError:
            records.append(BenchRecord(path="dense", phase="skipped", trials=0,
                                       mean_seconds=None, mean_rel_error=None,
                                       **common))

        us = [rng.uniform(0.0, 1.0, grid.n) for _ in range(trials)]
        vs = [rng.uniform(0.0, 1.0, grid.m) for _ in range(trials)]
        fwd_t = [None] * trials
        tra_t = [None] * trials

        def fwd_trial(t):
            fwd_t[t] = apply(stack, us[t], "forward")

        def tra_trial(t):
            tra_t[t] = apply(stack, vs[t], "transpose")

        t_fwd = _mean_timed_loop(fwd_trial, trials)
        t_tra = _mean_timed_loop(tra_trial, trials)
        err_fwd = err_tra = None
        if dense is not None:
            fwd_d = [None] * trials
            tra_d = [None] * trials

            def fwd_trial_dense(t):
                fwd_d[t] = dense_apply(dense, us[t], "forward")

            def tra_trial_dense(t):
                tra_d[t] = dense_apply(dense, vs[t], "transpose")

            t_fwd_d = _mean_timed_loop(fwd_trial_dense, trials)
            t_tra_d = _mean_timed_loop(tra_trial_dense, trials)
            records.append(BenchRecord(path="dense", phase="forward", trials=trials,
                                       mean_seconds=t_fwd_d, mean_rel_error=None,
                                       **common))
            records.append(BenchRecord(path="dense", phase="transpose", trials=trials,
                                       mean_seconds=t_tra_d, mean_rel_error=None,
                                       **common))
            err_fwd = float(np.mean([relative_error(a, b)
                                     for a, b in zip(fwd_d, fwd_t)]))
            err_tra = float(np.mean([relative_error(a, b)
                                     for a, b in zip(tra_d, tra_t)]))
        records.append(BenchRecord(path="transform", phase="forward", trials=trials,
                                   mean_seconds=t_fwd, mean_rel_error=err_fwd,
                                   **common))
        records.append(BenchRecord(path="transform", phase="transpose", trials=trials,
                                   mean_seconds=t_tra, mean_rel_error=err_tra,
                                   **common))
        del dense
    return records


def read_vector(path):
    """Load a model/data vector; .txt is one value per line, .bin raw f64."""
    if path.endswith(".txt"):
        return np.loadtxt(path, dtype=float).ravel()
    if path.endswith(".bin"):
        return np.fromfile(path, dtype="<f8")
    raise ValueError(f"vector files must end in .txt or .bin, got {path!r}")


def write_vector(x, path):
    x = np.asarray(x, dtype=float).ravel()
    if path.endswith(".txt"):
        np.savetxt(path, x, fmt="%.17g")
    elif path.endswith(".bin"):
        x.astype("<f8").tofile(path)
    else:
        raise ValueError(f"vector files must end in .txt or .bin, got {path!r}")


def simulate(grid, params, model, stack=None):
    """Station data d = (forward operator) m through the transform path.

    Model ordering: prisms x-fastest, then y, layers stacked top down;
    station data comes back x-fastest.
    """
    model = np.asarray(model, dtype=float).ravel()
    if model.shape != (grid.n,):
        raise ValueError(
            f"model has {model.size} values but the grid needs n={grid.n} "
            f"= nx*ny*nz = {grid.nx}*{grid.ny}*{grid.nz}")
    if stack is None:
        stack = build_transform_stack(grid, params)
    return apply(stack, model, "forward")
