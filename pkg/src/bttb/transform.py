"""Circulant embedding of each layer and its 2-D Fourier transforms.

One layer's whole m x n_r matrix is represented by a single
(sx+nx-1) x (sy+ny-1) array: the defining values of its block-circulant
extension.  Multiplication then becomes an element-wise product in the
Fourier domain (see multiply).  The forward transform is unnormalized and
the inverse carries the 1/(rows*cols) factor, a hard contract because the
transformed stacks are persisted to disk.
"""
import struct
import threading
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, make_grid
from .kernels import distance_tables_for, layer_response_window

_MAGIC = b"BTTB"
_VERSION = 1
_KIND_CODES = {"gravity": 0, "magnetic": 1}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}

# fft setup is cached per shape so first-call costs stay off timed paths
_warmed = set()
_warm_lock = threading.Lock()


def warm_fft(shape):
    """Run one throwaway transform pair for this shape, once per process."""
    key = tuple(shape)
    with _warm_lock:
        if key in _warmed:
            return
        _warmed.add(key)
    z = np.zeros(key)
    np.fft.ifft2(np.fft.fft2(z))


@dataclass(frozen=True)
class TransformStack:
    """Per-layer transforms of the embedding and of its transpose layout."""

    forward: tuple
    transpose: tuple
    grid: GridSpec
    kind: str
    kernel_evals_per_layer: int

    def __post_init__(self):
        for arr in self.forward + self.transpose:
            arr.flags.writeable = False

    @property
    def element_count(self):
        """Complex values stored across the forward stack."""
        mx, my = self.grid.embed_shape
        return self.grid.nz * mx * my


def circulant_extension_column(c, r):
    """First column (c; reverse(r[1:])) of the circulant extending toeplitz(c, r).

    The reversal is the exchange-matrix action that wraps the first row back
    around the cycle; c[0] and r[0] must be the same shared corner element.
    """
    c = np.asarray(c, dtype=float)
    r = np.asarray(r, dtype=float)
    if c[0] != r[0]:
        raise ValueError(
            f"c[0] and r[0] must be the shared corner element, got {c[0]} != {r[0]}")
    return np.concatenate([c, r[:0:-1]])


def transpose_layout(T):
    """Defining array of the transposed embedding.

    Keep the first column and reverse the rest, then keep the first row and
    reverse the rest; applying it twice is the identity.
    """
    T = np.asarray(T)
    return np.roll(T[::-1, ::-1], (1, 1), axis=(0, 1))


def _embedding_from_window(window, sx, sy):
    # column t of the circulant extension holds offset -pxl - t cyclically;
    # on the shifted window that is a flip plus a roll by the station count
    return np.roll(window[::-1, ::-1], (sx, sy), axis=(0, 1))


def build_transform_stack(grid, params):
    """Assemble and transform every layer's embedding, forward and transpose."""
    tables = distance_tables_for(grid, params)
    warm_fft(grid.embed_shape)
    fwd, tra = [], []
    evals = 0
    for r in range(grid.nz):
        window, evals = layer_response_window(
            grid, tables, params, grid.z_blocks[r], grid.z_blocks[r + 1])
        emb = _embedding_from_window(window, grid.sx, grid.sy)
        fwd.append(np.fft.fft2(emb))
        tra.append(np.fft.fft2(transpose_layout(emb)))
    return TransformStack(forward=tuple(fwd), transpose=tuple(tra), grid=grid,
                          kind=params.kind, kernel_evals_per_layer=evals)


def save_stack(stack, path):
    """Persist a stack: little-endian header, then complex f64 layer arrays.

    Layout: magic "BTTB", version u32, kind u8, grid counts as 7 x i64
    (sx sy nz pxl pxr pyl pyr), spacings as 2 x f64, nz+1 depth f64s, then
    3 x i64 (layer count, rows, cols), then the forward stack and the
    transpose stack as row-major (re, im) f64 pairs per layer.
    """
    grid = stack.grid
    mx, my = grid.embed_shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IB", _VERSION, _KIND_CODES[stack.kind]))
        fh.write(struct.pack("<7q", grid.sx, grid.sy, grid.nz,
                             grid.pxl, grid.pxr, grid.pyl, grid.pyr))
        fh.write(struct.pack("<2d", grid.dx, grid.dy))
        fh.write(np.asarray(grid.z_blocks, dtype="<f8").tobytes())
        fh.write(struct.pack("<3q", grid.nz, mx, my))
        for arr in stack.forward + stack.transpose:
            fh.write(np.ascontiguousarray(arr, dtype="<c16").tobytes())


def load_stack(path):
    """Read back a persisted stack; see save_stack for the layout."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"not a transform-stack file (magic {magic!r})")
        version, kind_code = struct.unpack("<IB", fh.read(5))
        if version != _VERSION:
            raise ValueError(f"unsupported stack version {version}")
        sx, sy, nz, pxl, pxr, pyl, pyr = struct.unpack("<7q", fh.read(56))
        dx, dy = struct.unpack("<2d", fh.read(16))
        z_blocks = np.frombuffer(fh.read(8 * (nz + 1)), dtype="<f8")
        layers, mx, my = struct.unpack("<3q", fh.read(24))
        grid = make_grid(sx, sy, nz, pxl, pxr, pyl, pyr, dx, dy, z_blocks)
        if (mx, my) != grid.embed_shape or layers != nz:
            raise ValueError("stack header is inconsistent with its grid")
        count = mx * my

        def read_stack():
            out = []
            for _ in range(layers):
                buf = fh.read(16 * count)
                if len(buf) != 16 * count:
                    raise ValueError("truncated transform-stack file")
                out.append(np.frombuffer(buf, dtype="<c16").reshape(mx, my).copy())
            return tuple(out)
        fwd = read_stack()
        tra = read_stack()
    return TransformStack(forward=fwd, transpose=tra, grid=grid,
                          kind=_KIND_NAMES[kind_code],
                          kernel_evals_per_layer=0)
