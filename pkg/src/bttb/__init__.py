"""Fast forward modeling for convolution-type gravity/magnetic kernels.

Depth layers of the prism sensitivity matrix are block-Toeplitz with
Toeplitz blocks on staggered station grids; this package assembles either
the explicit matrices (dense baseline/oracle) or their circulant embeddings,
whose 2-D Fourier transforms give forward and transpose products in
near-linear time without ever forming the matrix.
"""
from .dense import (DEFAULT_MEM_GUARD_BYTES, DenseSensitivity, MemoryGuardError,
                    assemble_dense, dense_apply, dump_layer_csv)
from .grid import (DistanceTables, GridSpec, full_distances, make_grid,
                   scaled_problem, sym_distances)
from .harness import (BenchRecord, read_vector, run_bench, simulate,
                      sizes_rows, write_bench_csv, write_vector)
from .kernels import (GRAVITATIONAL_CONST, KernelParams, gravity_layer_response,
                      magnetic_constants, magnetic_response)
from .multiply import apply, relative_error
from .transform import (TransformStack, build_transform_stack,
                        circulant_extension_column, load_stack, save_stack,
                        transpose_layout)

__all__ = [
    "BenchRecord", "DEFAULT_MEM_GUARD_BYTES", "DenseSensitivity",
    "DistanceTables", "GRAVITATIONAL_CONST", "GridSpec", "KernelParams",
    "MemoryGuardError", "TransformStack", "apply", "assemble_dense",
    "build_transform_stack", "circulant_extension_column", "dense_apply",
    "dump_layer_csv", "full_distances", "gravity_layer_response", "load_stack",
    "magnetic_constants", "magnetic_response", "make_grid", "read_vector",
    "relative_error", "run_bench", "save_stack", "scaled_problem", "simulate",
    "sizes_rows", "sym_distances", "transpose_layout", "write_bench_csv",
    "write_vector",
]

__version__ = "0.1.0"
