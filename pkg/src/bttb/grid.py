"""Survey/volume geometry: padded prism grids and staggered station distances.

Stations sit at cell centers of the unpadded survey footprint, offset by half
a spacing from the prism corner coordinates.  That staggering makes every
station-to-corner distance an odd multiple of half the grid spacing, which is
what gives each depth layer of the sensitivity matrix its block-Toeplitz
structure and keeps every kernel denominator away from zero.
"""
from dataclasses import dataclass

import numpy as np


def _positive_int(name, value):
    if not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _nonneg_int(name, value):
    if not isinstance(value, (int, np.integer)) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class GridSpec:
    """Geometry of one survey: station counts, padding, spacings, depths.

    Parameters
    ----------
    sx, sy : int
        Number of stations (and unpadded prisms) along x and y.
    nz : int
        Number of depth layers.
    pxl, pxr, pyl, pyr : int
        Padding prisms added to the left/right of the footprint in x and y.
        Padding holds no stations.
    dx, dy : float
        Horizontal grid spacings.
    z_blocks : tuple of float
        nz + 1 strictly increasing depth coordinates (z >= 0, down), so
        layers may have different heights.
    """

    sx: int
    sy: int
    nz: int
    pxl: int
    pxr: int
    pyl: int
    pyr: int
    dx: float
    dy: float
    z_blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "sx", _positive_int("sx", self.sx))
        object.__setattr__(self, "sy", _positive_int("sy", self.sy))
        object.__setattr__(self, "nz", _positive_int("nz", self.nz))
        for name in ("pxl", "pxr", "pyl", "pyr"):
            object.__setattr__(self, name, _nonneg_int(name, getattr(self, name)))
        for name in ("dx", "dy"):
            v = float(getattr(self, name))
            if not v > 0.0:
                raise ValueError(f"{name} must be positive, got {v}")
            object.__setattr__(self, name, v)
        zb = tuple(float(z) for z in self.z_blocks)
        if len(zb) != self.nz + 1:
            raise ValueError(
                f"z_blocks must have nz+1={self.nz + 1} entries, got {len(zb)}")
        if zb[0] < 0.0:
            raise ValueError(f"z_blocks[0] must be >= 0, got {zb[0]}")
        if any(b <= a for a, b in zip(zb, zb[1:])):
            raise ValueError(f"z_blocks must be strictly increasing, got {zb}")
        object.__setattr__(self, "z_blocks", zb)

    @property
    def nx(self):
        return self.sx + self.pxl + self.pxr

    @property
    def ny(self):
        return self.sy + self.pyl + self.pyr

    @property
    def m(self):
        """Number of stations."""
        return self.sx * self.sy

    @property
    def n_r(self):
        """Number of prisms in one depth layer (padding included)."""
        return self.nx * self.ny

    @property
    def n(self):
        """Total number of prisms."""
        return self.n_r * self.nz

    @property
    def embed_shape(self):
        """Shape of the circulant embedding of one layer."""
        return (self.sx + self.nx - 1, self.sy + self.ny - 1)


def make_grid(sx, sy, nz, pxl, pxr, pyl, pyr, dx, dy, z_blocks):
    """Build a validated :class:`GridSpec`.

    Raises
    ------
    ValueError
        Naming the offending field for zero station counts, non-positive
        spacings, or non-monotone depth coordinates.
    """
    return GridSpec(sx, sy, nz, pxl, pxr, pyl, pyr, dx, dy, tuple(z_blocks))


def _round_half_away(x):
    # round-half-away-from-zero; only non-negative x occurs here
    return int(np.floor(x + 0.5))


def scaled_problem(k, pad_fraction, dx=100.0, dy=100.0, dz=100.0):
    """Benchmark family member k: stations (25k, 15k), 2k depth layers.

    Per-side padding is round-half-away-from-zero(pad_fraction * station
    count), applied symmetrically, which reproduces the benchmark dimension
    table exactly for k = 1..10.

    Parameters
    ----------
    k : int
        Scale index, 1 upward.
    pad_fraction : float
        Padding per side as a fraction of the station count (>= 0).
    dx, dy, dz : float
        Grid spacings; the dimension table is spacing-independent.
    """
    k = _positive_int("k", k)
    if pad_fraction < 0:
        raise ValueError(f"pad_fraction must be >= 0, got {pad_fraction}")
    sx, sy, nz = 25 * k, 15 * k, 2 * k
    px = _round_half_away(pad_fraction * sx)
    py = _round_half_away(pad_fraction * sy)
    z_blocks = tuple(r * dz for r in range(nz + 1))
    return make_grid(sx, sy, nz, px, px, py, py, dx, dy, z_blocks)


@dataclass(frozen=True)
class DistanceTables:
    """Station-to-corner distance vectors and the derived per-grid arrays.

    x, y hold signed corner distances; xy = outer(x, y) and r2 = x^2 + y^2
    are computed once per grid and shared by every depth layer.  flavor is
    "sym" (first-station distances only; enough for kernels even in both
    horizontal offsets) or "full" (all station/corner pairs).
    """

    x: np.ndarray
    y: np.ndarray
    xy: np.ndarray
    r2: np.ndarray
    flavor: str

    def __post_init__(self):
        for arr in (self.x, self.y, self.xy, self.r2):
            arr.flags.writeable = False


def _make_tables(x, y, flavor):
    xy = x[:, None] * y[None, :]
    r2 = x[:, None] ** 2 + y[None, :] ** 2
    return DistanceTables(x=x, y=y, xy=xy, r2=r2, flavor=flavor)


def sym_distances(grid):
    """First-station corner distances, enough for an even kernel.

    x has length sx + max(pxl, pxr) + 1 with entries (l - 1/2) dx for
    l = 0, 1, ...; all odd half-multiples of the spacing, never zero.
    """
    lx = grid.sx + max(grid.pxl, grid.pxr) + 1
    ly = grid.sy + max(grid.pyl, grid.pyr) + 1
    x = (np.arange(lx) - 0.5) * grid.dx
    y = (np.arange(ly) - 0.5) * grid.dy
    return _make_tables(x, y, "sym")


def full_distances(grid):
    """All station/corner distance pairs, for kernels with no evenness.

    x has length 2 (sx + max(pxl, pxr)), antisymmetric about its midpoint.
    """
    hx = grid.sx + max(grid.pxl, grid.pxr)
    hy = grid.sy + max(grid.pyl, grid.pyr)
    x = (np.arange(2 * hx) - hx + 0.5) * grid.dx
    y = (np.arange(2 * hy) - hy + 0.5) * grid.dy
    return _make_tables(x, y, "full")
