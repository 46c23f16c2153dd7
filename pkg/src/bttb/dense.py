"""Explicit per-layer sensitivity matrices: the baseline and oracle path.

Each depth layer is expanded from its defining response window, never from
per-entry kernel calls, so assembling a layer costs at most one window of
kernel evaluations regardless of m x n_r.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec
from .kernels import distance_tables_for, layer_response_window

#: Refuse dense assembly above this estimated size unless overridden.
DEFAULT_MEM_GUARD_BYTES = 4 * 2**30


class MemoryGuardError(RuntimeError):
    """Dense assembly would exceed the configured memory guard."""


@dataclass(frozen=True)
class DenseSensitivity:
    """Ordered per-layer matrices, each m x n_r, plus build bookkeeping."""

    layers: tuple
    grid: GridSpec
    kind: str
    kernel_evals_per_layer: int

    def __post_init__(self):
        for layer in self.layers:
            layer.flags.writeable = False


def estimate_dense_bytes(grid):
    return grid.m * grid.n * 8


def assemble_dense(grid, params, mem_guard_bytes=DEFAULT_MEM_GUARD_BYTES):
    """Expand every layer's Toeplitz structure into explicit matrices.

    Only the defining response window is evaluated per layer; entries are
    then replicated along the (block) diagonals.  Refuses to build if the
    estimated m*n*8 bytes exceed the guard rather than swapping.
    """
    need = estimate_dense_bytes(grid)
    if need > mem_guard_bytes:
        raise MemoryGuardError(
            f"dense sensitivity needs {need} bytes "
            f"(m={grid.m} x n={grid.n} f64) but the memory guard allows "
            f"{mem_guard_bytes}; raise mem_guard_bytes to override")
    tables = distance_tables_for(grid, params)
    # station i sits at padded slot pxl+i, so entry (i, p) is the response
    # at signed offset p - (pxl + i); the window is already pxl-shifted.
    ax = np.arange(grid.nx)[None, :] - np.arange(grid.sx)[:, None] + grid.sx - 1
    ay = np.arange(grid.ny)[None, :] - np.arange(grid.sy)[:, None] + grid.sy - 1
    gather = (ax[None, :, None, :], ay[:, None, :, None])
    layers = []
    evals = 0
    for r in range(grid.nz):
        window, evals = layer_response_window(
            grid, tables, params, grid.z_blocks[r], grid.z_blocks[r + 1])
        layers.append(window[gather].reshape(grid.m, grid.n_r))
    return DenseSensitivity(layers=tuple(layers), grid=grid, kind=params.kind,
                            kernel_evals_per_layer=evals)


def dense_apply(dense, x, mode):
    """Forward (sum of layer products) or transpose (stacked) multiplication."""
    grid = dense.grid
    x = np.asarray(x, dtype=float)
    if mode == "forward":
        if x.shape != (grid.n,):
            raise ValueError(f"forward expects a vector of length n={grid.n}, "
                             f"got shape {x.shape}")
        out = np.zeros(grid.m)
        for r, layer in enumerate(dense.layers):
            out += layer @ x[r * grid.n_r:(r + 1) * grid.n_r]
        return out
    if mode == "transpose":
        if x.shape != (grid.m,):
            raise ValueError(f"transpose expects a vector of length m={grid.m}, "
                             f"got shape {x.shape}")
        return np.concatenate([layer.T @ x for layer in dense.layers])
    raise ValueError(f"mode must be 'forward' or 'transpose', got {mode!r}")


def dump_layer_csv(dense, layer_index, path):
    """Debug dump of one layer matrix as CSV."""
    layer = dense.layers[layer_index]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in layer:
            writer.writerow(f"{v:.17g}" for v in row)
