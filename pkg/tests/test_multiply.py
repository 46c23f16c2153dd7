import numpy as np
import pytest

from bttb import (KernelParams, apply, assemble_dense, build_transform_stack,
                  dense_apply, make_grid, relative_error, scaled_problem)

GRAV = KernelParams.gravity()
MAG = KernelParams.magnetic(33.0, 47.0, 45000.0)

PAD_SET = [(0, 0, 0, 0), (1, 1, 1, 1), (2, 1, 1, 2), (3, 0, 0, 2)]


def grid_6x5x2(pads):
    return make_grid(6, 5, 2, *pads, 1.0, 1.5, (0.0, 1.0, 2.5))


def test_zero_vector_maps_to_zero():
    g = grid_6x5x2((1, 1, 1, 1))
    stack = build_transform_stack(g, GRAV)
    assert np.all(apply(stack, np.zeros(g.n), "forward") == 0.0)
    assert np.all(apply(stack, np.zeros(g.m), "transpose") == 0.0)


@pytest.mark.parametrize("params", [GRAV, MAG], ids=["gravity", "magnetic"])
def test_unit_vectors_reproduce_dense_columns(params):
    g = make_grid(4, 3, 2, 2, 1, 1, 2, 1.0, 1.5, (0.0, 1.0, 2.5))
    dense = assemble_dense(g, params)
    stack = build_transform_stack(g, params)
    full = np.hstack(dense.layers)
    for col in range(g.n):
        e = np.zeros(g.n)
        e[col] = 1.0
        got = apply(stack, e, "forward")
        assert np.linalg.norm(got - full[:, col]) <= 1e-12 * np.linalg.norm(full[:, col])


@pytest.mark.parametrize("pads", PAD_SET)
@pytest.mark.parametrize("params", [GRAV, MAG], ids=["gravity", "magnetic"])
def test_matches_dense_on_padded_grids(pads, params):
    g = grid_6x5x2(pads)
    dense = assemble_dense(g, params)
    stack = build_transform_stack(g, params)
    rng = np.random.default_rng(5)
    tol = 1e-13 if params.kind == "gravity" else 1e-12
    for _ in range(5):
        u = rng.uniform(size=g.n)
        v = rng.uniform(size=g.m)
        assert relative_error(dense_apply(dense, u, "forward"),
                              apply(stack, u, "forward")) <= tol
        assert relative_error(dense_apply(dense, v, "transpose"),
                              apply(stack, v, "transpose")) <= tol


@pytest.mark.parametrize("params", [GRAV, MAG], ids=["gravity", "magnetic"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_adjoint_identity(params, k):
    g = scaled_problem(k, 0.05 if k != 2 else 0.0)
    stack = build_transform_stack(g, params)
    rng = np.random.default_rng(6)
    bound_scale = np.sqrt(g.m * g.n)
    for _ in range(3):
        u = rng.uniform(size=g.n)
        v = rng.uniform(size=g.m)
        lhs = np.dot(apply(stack, u, "forward"), v)
        rhs = np.dot(u, apply(stack, v, "transpose"))
        assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(u) * np.linalg.norm(v) * bound_scale


def test_linearity():
    g = grid_6x5x2((2, 1, 1, 2))
    stack = build_transform_stack(g, MAG)
    rng = np.random.default_rng(7)
    u = rng.uniform(size=g.n)
    w = rng.uniform(size=g.n)
    a, b = 2.25, -0.75
    combined = apply(stack, a * u + b * w, "forward")
    split = a * apply(stack, u, "forward") + b * apply(stack, w, "forward")
    assert relative_error(combined, split) <= 1e-12


@pytest.mark.parametrize("params", [GRAV, MAG], ids=["gravity", "magnetic"])
def test_imaginary_residue_is_small(params):
    # large imaginary parts before the real() extraction would mean the
    # embedding was assembled wrong
    g = grid_6x5x2((2, 1, 1, 2))
    stack = build_transform_stack(g, params)
    rng = np.random.default_rng(8)
    work = np.zeros(g.embed_shape)
    work[:g.nx, :g.ny] = rng.uniform(size=(g.ny, g.nx)).T
    for r in range(g.nz):
        conv = np.fft.ifft2(stack.forward[r] * np.fft.fft2(work))
        assert np.linalg.norm(conv.imag) <= 1e-10 * np.linalg.norm(conv.real)


def test_dimension_mismatch_errors():
    g = grid_6x5x2((1, 1, 1, 1))
    stack = build_transform_stack(g, GRAV)
    with pytest.raises(ValueError, match=rf"n={g.n}"):
        apply(stack, np.zeros(g.n - 1), "forward")
    with pytest.raises(ValueError, match=rf"m={g.m}"):
        apply(stack, np.zeros(g.m + 2), "transpose")
    with pytest.raises(ValueError, match="mode"):
        apply(stack, np.zeros(g.n), "backward")


def test_relative_error():
    assert relative_error(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0
    assert relative_error(np.array([3.0, 4.0]), np.array([0.0, 0.0])) == 1.0
    assert relative_error(np.array([1.0, 0.0]), np.array([1.0, 1e-13])) == pytest.approx(1e-13)
    assert relative_error(np.zeros(2), np.zeros(2)) == 0.0
    assert relative_error(np.zeros(2), np.array([0.0, 1.0])) == np.inf
    with pytest.raises(ValueError, match="shape"):
        relative_error(np.zeros(2), np.zeros(3))
