"""Command-line front end: dimension tables, benchmarks, and simulations.

Grid and kernel settings come from flags or from a flat key=value config
file with the same key names (zblocks as a comma list); flags override the
file.  Model/data vectors are plain text (.txt, one value per line) or raw
little-endian f64 (.bin), chosen by extension.
"""
import argparse
import csv
import sys

from .dense import DEFAULT_MEM_GUARD_BYTES, MemoryGuardError, assemble_dense, dump_layer_csv
from .grid import make_grid
from .harness import (read_vector, run_bench, simulate, sizes_rows,
                      write_bench_csv, write_vector)
from .kernels import GRAVITATIONAL_CONST, KernelParams
from .multiply import apply as apply_stack
from .transform import build_transform_stack, load_stack, save_stack

_GRID_KEYS = ("sx", "sy", "nz", "pxl", "pxr", "pyl", "pyr", "dx", "dy", "zblocks")
_KERNEL_KEYS = ("kernel", "d", "i", "f", "gamma_scale")


def _add_grid_args(p):
    p.add_argument("--config", metavar="FILE",
                   help="flat key=value file; same keys as the flags below")
    for name in ("sx", "sy", "nz"):
        p.add_argument(f"--{name}", type=int)
    for name in ("pxl", "pxr", "pyl", "pyr"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--dx", type=float)
    p.add_argument("--dy", type=float)
    p.add_argument("--zblocks", help="comma-separated depth coordinates (nz+1 values)")


def _add_kernel_args(p):
    p.add_argument("--kernel", choices=("gravity", "magnetic"))
    p.add_argument("--D", type=float, dest="d", help="declination, degrees")
    p.add_argument("--I", type=float, dest="i", help="inclination, degrees")
    p.add_argument("--F", type=float, dest="f", help="field intensity, nT")
    p.add_argument("--gamma-scale", type=float, dest="gamma_scale",
                   help="output scale on the gravitational constant (1e5 for mGal)")


def _parse_config(path):
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, _, val = line.partition("=")
            values[key.strip().lower()] = val.strip()
    return values


def _merged_settings(args):
    merged = dict.fromkeys(_GRID_KEYS + _KERNEL_KEYS)
    if getattr(args, "config", None):
        cfg = _parse_config(args.config)
        unknown = set(cfg) - set(merged)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(cfg)
    for key in merged:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            merged[key] = cli_val
    return merged


def _grid_from(settings):
    for key in ("sx", "sy", "nz", "dx", "dy", "zblocks"):
        if settings.get(key) is None:
            raise ValueError(f"missing grid setting {key!r} (flag --{key} or config)")
    ints = {k: int(settings[k]) for k in ("sx", "sy", "nz")}
    pads = {k: int(settings[k] or 0) for k in ("pxl", "pxr", "pyl", "pyr")}
    zb = settings["zblocks"]
    if isinstance(zb, str):
        zb = [float(t) for t in zb.split(",") if t.strip()]
    return make_grid(dx=float(settings["dx"]), dy=float(settings["dy"]),
                     z_blocks=zb, **ints, **pads)


def _params_from(settings):
    kind = settings.get("kernel") or "gravity"
    if kind == "gravity":
        scale = float(settings.get("gamma_scale") or 1.0)
        return KernelParams.gravity(GRAVITATIONAL_CONST, scale)
    if kind == "magnetic":
        return KernelParams.magnetic(D=float(settings.get("d") or 0.0),
                                     I=float(settings.get("i") or 90.0),
                                     F=float(settings.get("f") or 50000.0))
    raise ValueError(f"kernel must be gravity or magnetic, got {kind!r}")


def _parse_problems(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, _, hi = part.partition("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    for k in out:
        if not 1 <= k <= 12:
            raise ValueError(f"unknown problem index {k} (expected 1..12)")
    return out


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_sizes(args):
    rows = sizes_rows(args.padding)
    fh = _open_out(args.out)
    writer = csv.writer(fh)
    writer.writerow(rows[0].keys())
    for row in rows:
        writer.writerow(row.values())
    if fh is not sys.stdout:
        fh.close()
    return 0


def cmd_bench(args):
    settings = _merged_settings(args)
    params = _params_from(settings)
    records = run_bench(_parse_problems(args.problems), args.padding, args.trials,
                        params, args.seed, args.mem_guard_bytes)
    if args.dump_dense_layer:
        from .grid import scaled_problem
        grid = scaled_problem(_parse_problems(args.problems)[0], args.padding)
        dense = assemble_dense(grid, params, args.mem_guard_bytes)
        dump_layer_csv(dense, args.dump_layer_index, args.dump_dense_layer)
    fh = _open_out(args.out)
    write_bench_csv(records, fh)
    if fh is not sys.stdout:
        fh.close()
    return 0


def cmd_simulate(args):
    settings = _merged_settings(args)
    grid = _grid_from(settings)
    params = _params_from(settings)
    model = read_vector(args.model)
    data = simulate(grid, params, model)
    write_vector(data, args.out)
    return 0


def cmd_build_stack(args):
    settings = _merged_settings(args)
    grid = _grid_from(settings)
    params = _params_from(settings)
    save_stack(build_transform_stack(grid, params), args.out)
    return 0


def cmd_apply(args):
    stack = load_stack(args.stack)
    x = read_vector(args.infile)
    write_vector(apply_stack(stack, x, args.mode), args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bttb",
        description="Gravity/magnetic prism forward modeling with fast "
                    "structured products")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sizes", help="print the benchmark dimension table")
    p.add_argument("--padding", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sizes)

    p = sub.add_parser("bench", help="time dense vs transform paths, emit CSV")
    p.add_argument("--problems", default="1,2", help="e.g. 1,2 or 1-4")
    p.add_argument("--padding", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mem-guard-bytes", type=int, default=DEFAULT_MEM_GUARD_BYTES)
    p.add_argument("--out")
    p.add_argument("--dump-dense-layer", metavar="CSV",
                   help="debug: dump one dense layer of the first problem")
    p.add_argument("--dump-layer-index", type=int, default=0)
    _add_grid_args(p)
    _add_kernel_args(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("simulate", help="model file in, station data out")
    _add_grid_args(p)
    _add_kernel_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("build-stack", help="precompute and persist transforms")
    _add_grid_args(p)
    _add_kernel_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_build_stack)

    p = sub.add_parser("apply", help="apply a persisted stack to a vector file")
    p.add_argument("--stack", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=("forward", "transpose"), default="forward")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_apply)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, MemoryGuardError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
