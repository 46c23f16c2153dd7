"""Forward and transpose products through the transformed embeddings.

Neither the dense matrix nor the block-circulant extension is ever formed:
each layer product is an element-wise multiply in the Fourier domain plus an
inverse transform, with the station (or prism) block read off the top-left
corner of the result.
"""
import numpy as np


def _check_stack(stack):
    mx, my = stack.grid.embed_shape
    for arr in stack.forward + stack.transpose:
        if arr.shape != (mx, my):
            raise ValueError(
                f"stack array shape {arr.shape} inconsistent with grid "
                f"embedding {(mx, my)}")
    if len(stack.forward) != stack.grid.nz or len(stack.transpose) != stack.grid.nz:
        raise ValueError("stack layer count inconsistent with grid nz")


def apply(stack, x, mode):
    """Multiply by the represented matrix (forward) or its transpose.

    Model vectors order prisms x-fastest within a layer, layers stacked;
    data vectors order stations x-fastest.  One embedding-sized workspace is
    reused across layers; for the transpose the embedded data vector is
    transformed once and shared by every layer.
    """
    grid = stack.grid
    _check_stack(stack)
    x = np.asarray(x, dtype=float)
    mx, my = grid.embed_shape
    sx, sy, nx, ny = grid.sx, grid.sy, grid.nx, grid.ny
    n_r = grid.n_r
    work = np.zeros((mx, my))
    if mode == "forward":
        if x.shape != (grid.n,):
            raise ValueError(f"forward expects a vector of length n={grid.n} "
                             f"= nx*ny*nz = {nx}*{ny}*{grid.nz}, got shape {x.shape}")
        out = np.zeros(grid.m)
        for r in range(grid.nz):
            work[:nx, :ny] = x[r * n_r:(r + 1) * n_r].reshape(ny, nx).T
            conv = np.fft.ifft2(stack.forward[r] * np.fft.fft2(work))
            out += conv.real[:sx, :sy].T.ravel()
        return out
    if mode == "transpose":
        if x.shape != (grid.m,):
            raise ValueError(f"transpose expects a vector of length m={grid.m}, "
                             f"got shape {x.shape}")
        work[:sx, :sy] = x.reshape(sy, sx).T
        xhat = np.fft.fft2(work)
        out = np.empty(grid.n)
        for r in range(grid.nz):
            conv = np.fft.ifft2(stack.transpose[r] * xhat)
            out[r * n_r:(r + 1) * n_r] = conv.real[:nx, :ny].T.ravel()
        return out
    raise ValueError(f"mode must be 'forward' or 'transpose', got {mode!r}")


def relative_error(a, b):
    """Relative 2-norm of the difference, ||a - b|| / ||a||."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    diff = np.linalg.norm(a - b)
    if na == 0.0:
        return 0.0 if diff == 0.0 else np.inf
    return diff / na
