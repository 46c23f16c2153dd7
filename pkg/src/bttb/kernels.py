"""Gravity and magnetic prism responses evaluated over whole distance tables.

Each function returns the response of every prism offset to a single station
in one shot: with corner-distance vectors X (len a+1) and Y (len b+1) the
result is an a x b matrix whose (p, q) entry is the contribution of the prism
with corners (X[p], X[p+1]) x (Y[q], Y[q+1]) x (z1, z2).  Both kernels share
the per-grid XY and R^2 tables across all depth layers.
"""
from dataclasses import dataclass

import numpy as np

from .grid import full_distances, sym_distances

#: CODATA gravitational constant, m^3 kg^-1 s^-2.
GRAVITATIONAL_CONST = 6.67430e-11


@dataclass(frozen=True)
class KernelParams:
    """Kernel selection plus its physical constants.

    gravity: gamma (scaled by `scale`, e.g. 1e5 to emit mGal).
    magnetic: declination D and inclination I in degrees, field intensity F
    in nT, and the five derived constants gc recomputed from (D, I, F).
    """

    kind: str
    gamma: float = GRAVITATIONAL_CONST
    scale: float = 1.0
    D: float = 0.0
    I: float = 90.0
    F: float = 50000.0
    gc: tuple = ()

    @classmethod
    def gravity(cls, gamma=GRAVITATIONAL_CONST, scale=1.0):
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        return cls(kind="gravity", gamma=gamma, scale=scale)

    @classmethod
    def magnetic(cls, D, I, F):
        gc = tuple(magnetic_constants(D, I, F))
        return cls(kind="magnetic", D=float(D), I=float(I), F=float(F), gc=gc)


def magnetic_constants(D, I, F):
    """Five field constants for the total-field prism anomaly.

    Direction cosines use x North, y East, z down; induced magnetization
    only, so the magnetization direction equals the field direction.
    Returns the coefficients of (ln F1, ln F2, ln F3, F4, F5) scaled by
    F / (4 pi), the intensity for a field measured in nT.
    """
    if not F > 0:
        raise ValueError(f"F must be positive, got {F}")
    Dr, Ir = np.radians(D), np.radians(I)
    l = np.cos(Ir) * np.cos(Dr)
    m = np.cos(Ir) * np.sin(Dr)
    n = np.sin(Ir)
    ht = F / (4.0 * np.pi)
    return ht * np.array([2 * m * n, 2 * l * n, 2 * l * m,
                          n * n - m * m, n * n - l * l])


def _check_depths(z1, z2):
    if z2 < z1:
        raise ValueError(f"layer depths must satisfy z2 >= z1, got ({z1}, {z2})")
    if z1 < 0:
        raise ValueError(f"layer top must satisfy z1 >= 0, got {z1}")


def _check_finite(g, kind):
    if not np.all(np.isfinite(g)):
        raise FloatingPointError(
            f"non-finite value in {kind} response; staggered distances "
            "should make this impossible")


def gravity_layer_response(z1, z2, tables, params):
    """Vertical-gravity response of one depth layer at the reference station.

    Evaluates the prism formula with the log-ratio simplification: the pair
    of log differences collapses to ln((X+R1)/(X+R2)) and its Y counterpart,
    and the depth terms use the quadrant-aware two-argument arctangent so
    z1 = 0 is safe.  Entry (p, q) covers corners (X[p], X[p+1]) in x and
    (Y[q], Y[q+1]) in y; equal depths give exactly zero.
    """
    _check_depths(z1, z2)
    x = tables.x[:, None]
    y = tables.y[None, :]
    r1 = np.sqrt(tables.r2 + z1 * z1)
    r2 = np.sqrt(tables.r2 + z2 * z2)
    # x + r >= |x| - x + ... > 0 because no staggered distance is zero
    cmx = np.log((x + r1) / (x + r2)) * y
    cmy = np.log((y + r1) / (y + r2)) * x
    cm56 = np.arctan2(tables.xy, r1 * z1) * z1 - np.arctan2(tables.xy, r2 * z2) * z2
    cm = (cm56 - cmy - cmx) * (params.gamma * params.scale)
    g = -(cm[:-1, :-1] - cm[:-1, 1:] - cm[1:, :-1] + cm[1:, 1:])
    _check_finite(g, "gravity")
    return g


def magnetic_response(z1, z2, X, Y, R2, gc):
    """Total-field magnetic response of one depth layer at the reference station.

    g = gc[0] ln F1 + gc[1] ln F2 + gc[2] ln F3 + gc[3] F4 + gc[4] F5, with
    the corner factors grouped per depth so equal depths cancel bitwise to
    zero.  Every arctangent is the two-argument form; forming the ratio first
    would lose the quadrant when numerator or denominator changes sign.
    """
    _check_depths(z1, z2)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    rho1 = np.sqrt(R2 + z1 * z1)
    rho2 = np.sqrt(R2 + z2 * z2)
    x1, x2 = X[:-1, None], X[1:, None]
    y1, y2 = Y[None, :-1], Y[None, 1:]

    def log_factors(rk, t11, t22, t21, t12):
        # corner products split by (i + j) parity: even (11, 22), odd (21, 12)
        even = (rk[:-1, :-1] + t11) * (rk[1:, 1:] + t22)
        odd = (rk[1:, :-1] + t21) * (rk[:-1, 1:] + t12)
        return even, odd

    e1, o1 = log_factors(rho1, x1, x2, x2, x1)
    e2, o2 = log_factors(rho2, x1, x2, x2, x1)
    f1 = (e2 * o1) / (e1 * o2)
    e1, o1 = log_factors(rho1, y1, y2, y1, y2)
    e2, o2 = log_factors(rho2, y1, y2, y1, y2)
    f2 = (e2 * o1) / (e1 * o2)
    e1, o1 = log_factors(rho1, z1, z1, z1, z1)
    e2, o2 = log_factors(rho2, z2, z2, z2, z2)
    f3 = (e2 * o1) / (e1 * o2)

    def atan_xz(rk, zk):
        return (np.arctan2(x2 * zk, rk[1:, 1:] * y2)
                - np.arctan2(x1 * zk, rk[:-1, 1:] * y2)
                - np.arctan2(x2 * zk, rk[1:, :-1] * y1)
                + np.arctan2(x1 * zk, rk[:-1, :-1] * y1))

    def atan_yz(rk, zk):
        return (np.arctan2(y2 * zk, rk[1:, 1:] * x2)
                - np.arctan2(y2 * zk, rk[:-1, 1:] * x1)
                - np.arctan2(y1 * zk, rk[1:, :-1] * x2)
                + np.arctan2(y1 * zk, rk[:-1, :-1] * x1))

    f4 = atan_xz(rho2, z2) - atan_xz(rho1, z1)
    f5 = atan_yz(rho2, z2) - atan_yz(rho1, z1)

    g = (gc[0] * np.log(f1) + gc[1] * np.log(f2) + gc[2] * np.log(f3)
         + gc[3] * f4 + gc[4] * f5)
    _check_finite(g, "magnetic")
    return g


def layer_response_window(grid, tables, params, z1, z2):
    """Response over every offset a layer's structure needs.

    Returns (window, evaluation_count): window has the layer's embedding
    shape, entry (a, b) being the response at signed block offsets
    (a - (sx + pxl - 1), b - (sy + pyl - 1)).  The gravity kernel is even in
    both offsets, so only the non-negative quadrant is evaluated and the rest
    is mirrored; the magnetic kernel is evaluated on the full window.
    """
    mx, my = grid.embed_shape
    if params.kind == "gravity":
        if tables.flavor != "sym":
            raise ValueError("gravity window needs sym-flavor distance tables")
        resp = gravity_layer_response(z1, z2, tables, params)
        ax = np.abs(np.arange(mx) - (grid.sx + grid.pxl - 1))
        ay = np.abs(np.arange(my) - (grid.sy + grid.pyl - 1))
        return resp[np.ix_(ax, ay)], resp.size
    if tables.flavor != "full":
        raise ValueError("magnetic window needs full-flavor distance tables")
    # corner window covering offsets -(sx+pxl-1) .. (sx+pxr-1), y likewise
    hx = grid.sx + max(grid.pxl, grid.pxr)
    hy = grid.sy + max(grid.pyl, grid.pyr)
    ix = slice(hx - grid.sx - grid.pxl, hx + grid.sx + grid.pxr)
    iy = slice(hy - grid.sy - grid.pyl, hy + grid.sy + grid.pyr)
    resp = magnetic_response(z1, z2, tables.x[ix], tables.y[iy],
                             tables.r2[ix, iy], params.gc)
    return resp, resp.size


def distance_tables_for(grid, params):
    """The distance flavor a kernel needs: sym for gravity, full otherwise."""
    if params.kind == "gravity":
        return sym_distances(grid)
    return full_distances(grid)
