"""Boundary parametrizations, collocation meshes, grids, and SPD matrix roots.

Three smooth closed boundaries are supported, parametrized over [0, 2pi)
counterclockwise with outward unit normals:

    circle  : center + R (cos t, sin t)
    kite    : (-1.5 sin t, cos t + 0.65 cos 2t - 0.65)
    peanut  : 2 sqrt(sin^2(t)/2 + cos^2(t)/10) (cos t, sin t)

The collocation mesh splits [0, 2pi) into N_f uniform faces. Each face
carries a quadratic isoparametric geometry map (interpolating the true
curve at local parameters {0, 1/2, 1}, continuous across faces) and three
collocation nodes strictly inside the face at local parameters
{1/6, 1/2, 5/6}, so there are exactly 3*N_f nodes. Densities are
represented by discontinuous piecewise-quadratic interpolation through
the nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConfigError

#: local parameters of the three collocation nodes inside each face
NODE_LOCS = np.array([1.0 / 6.0, 0.5, 5.0 / 6.0])


class BoundaryCurve:
    """Closed C^2 boundary given by an exact parametrization over [0, 2pi)."""

    kind = "generic"

    def point(self, t):
        raise NotImplementedError

    def deriv(self, t):
        raise NotImplementedError

    def speed(self, t):
        return np.linalg.norm(self.deriv(t), axis=-1)

    def tangent(self, t):
        d = self.deriv(t)
        return d / np.linalg.norm(d, axis=-1, keepdims=True)

    def normal(self, t):
        """Outward unit normal (counterclockwise parametrization assumed)."""
        d = self.deriv(t)
        n = np.stack([d[..., 1], -d[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)


class Circle(BoundaryCurve):
    kind = "circle"

    def __init__(self, radius: float, center=(0.0, 0.0)):
        if radius <= 0:
            raise ConfigError(f"circle radius must be positive, got {radius}")
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([self.center[0] + self.radius * np.cos(t),
                         self.center[1] + self.radius * np.sin(t)], axis=-1)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([-self.radius * np.sin(t),
                         self.radius * np.cos(t)], axis=-1)

    def speed(self, t):
        return np.full(np.shape(t), self.radius, dtype=float)

    def normal(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([np.cos(t), np.sin(t)], axis=-1)


class Kite(BoundaryCurve):
    kind = "kite"

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([-1.5 * np.sin(t),
                         np.cos(t) + 0.65 * np.cos(2 * t) - 0.65], axis=-1)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([-1.5 * np.cos(t),
                         -np.sin(t) - 1.3 * np.sin(2 * t)], axis=-1)


class Peanut(BoundaryCurve):
    kind = "peanut"

    @staticmethod
    def _g(t):
        return 0.5 * np.sin(t) ** 2 + 0.1 * np.cos(t) ** 2

    def point(self, t):
        t = np.asarray(t, dtype=float)
        rho = 2.0 * np.sqrt(self._g(t))
        return np.stack([rho * np.cos(t), rho * np.sin(t)], axis=-1)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        g = self._g(t)
        rho = 2.0 * np.sqrt(g)
        drho = 0.4 * np.sin(2 * t) / np.sqrt(g)
        return np.stack([drho * np.cos(t) - rho * np.sin(t),
                         drho * np.sin(t) + rho * np.cos(t)], axis=-1)


def make_curve(kind: str, radius: float | None = None, center=(0.0, 0.0)) -> BoundaryCurve:
    """Build a boundary curve by name: 'circle' (needs radius), 'kite', 'peanut'."""
    kind = kind.lower()
    if kind == "circle":
        if radius is None:
            raise ConfigError("circle requires a radius")
        return Circle(radius, center)
    if kind == "kite":
        return Kite()
    if kind == "peanut":
        return Peanut()
    raise ConfigError(f"unknown boundary kind {kind!r} (expected circle, kite, or peanut)")


# ---------------------------------------------------------------------------
# quadratic shape functions
# ---------------------------------------------------------------------------
def density_basis(u):
    """Quadratic Lagrange basis at the collocation nodes {1/6, 1/2, 5/6}."""
    u = np.asarray(u, dtype=float)
    return np.stack([
        4.5 * (u - 0.5) * (u - 5.0 / 6.0),
        -9.0 * (u - 1.0 / 6.0) * (u - 5.0 / 6.0),
        4.5 * (u - 1.0 / 6.0) * (u - 0.5),
    ], axis=-1)


def _geom_basis(u):
    """Quadratic geometry shape functions with nodes at {0, 1/2, 1}."""
    u = np.asarray(u, dtype=float)
    return np.stack([(1 - u) * (1 - 2 * u), 4 * u * (1 - u), u * (2 * u - 1)], axis=-1)


def _geom_basis_deriv(u):
    u = np.asarray(u, dtype=float)
    return np.stack([4 * u - 3, 4 - 8 * u, 4 * u - 1], axis=-1)


@dataclass
class CollocationMesh:
    """Isoparametric collocation mesh with 3*N_f nodes.

    Attributes
    ----------
    nf : number of faces (uniform partition of [0, 2pi))
    node_params : (3nf,) global parameters of the collocation nodes,
        strictly increasing
    node_points : (3nf, 2) node positions on the interpolated boundary
    node_normals : (3nf, 2) outward unit normals of the interpolated boundary
    node_speeds : (3nf,) jacobian |dY/du| of the face map at the nodes
    geom_pts : (nf, 3, 2) geometry control points (true curve at local
        {0, 1/2, 1} of each face)
    """

    curve: BoundaryCurve
    nf: int
    h: float = field(init=False)
    node_params: np.ndarray = field(init=False)
    node_points: np.ndarray = field(init=False)
    node_normals: np.ndarray = field(init=False)
    node_speeds: np.ndarray = field(init=False)
    geom_pts: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.nf < 4:
            raise ConfigError(f"need at least 4 faces, got {self.nf}")
        self.h = 2 * np.pi / self.nf
        starts = self.h * np.arange(self.nf)
        tg = starts[:, None] + self.h * np.array([0.0, 0.5, 1.0])[None, :]
        self.geom_pts = self.curve.point(tg)                       # (nf, 3, 2)
        self.node_params = (starts[:, None] + self.h * NODE_LOCS[None, :]).ravel()
        Nb = _geom_basis(NODE_LOCS)                                # (3, 3)
        Db = _geom_basis_deriv(NODE_LOCS)
        self.node_points = np.einsum("um,fmc->fuc", Nb, self.geom_pts).reshape(-1, 2)
        dx = np.einsum("um,fmc->fuc", Db, self.geom_pts).reshape(-1, 2)
        sp = np.linalg.norm(dx, axis=-1)
        self.node_speeds = sp
        self.node_normals = np.stack([dx[:, 1], -dx[:, 0]], axis=-1) / sp[:, None]

    @property
    def n_nodes(self) -> int:
        return 3 * self.nf

    def face_geometry(self, f: int, u):
        """Points and jacobians |dY/du| of face f at local coordinates u."""
        N = _geom_basis(u)
        D = _geom_basis_deriv(u)
        y = N @ self.geom_pts[f]
        dy = D @ self.geom_pts[f]
        return y, np.linalg.norm(dy, axis=-1)

    def quadrature(self, order: int = 16):
        """Global smooth-face quadrature: points (nf*order, 2), weights, basis.

        Weights include the jacobian, so sum(w * f(points)) approximates the
        boundary integral of f. The returned basis matrix B has shape
        (order, 3): density values at the quadrature points of face f are
        B @ coeffs[f].
        """
        gx, gw = leggauss(order)
        uq = 0.5 * (gx + 1.0)
        pts = np.empty((self.nf, order, 2))
        jac = np.empty((self.nf, order))
        for f in range(self.nf):
            pts[f], jac[f] = self.face_geometry(f, uq)
        w = jac * (0.5 * gw[None, :])
        return pts.reshape(-1, 2), w.ravel(), density_basis(uq)

    def interpolate(self, coeffs: np.ndarray, order: int = 16) -> np.ndarray:
        """Density values at the quadrature points of self.quadrature(order).

        coeffs has shape (3nf,) or (3nf, m); the result is (nf*order,) or
        (nf*order, m).
        """
        gx, _ = leggauss(order)
        B = density_basis(0.5 * (gx + 1.0))        # (order, 3)
        c = coeffs.reshape(self.nf, 3, -1)
        vals = np.einsum("qm,fmd->fqd", B, c)
        out = vals.reshape(self.nf * len(B), -1)
        return out[:, 0] if coeffs.ndim == 1 else out

    def arclength(self) -> float:
        """Length of the true boundary (per-face Gauss on the exact speed)."""
        gx, gw = leggauss(16)
        starts = self.h * np.arange(self.nf)
        tq = (starts[:, None] + self.h * 0.5 * (gx + 1.0)[None, :]).ravel()
        w = np.tile(0.5 * self.h * gw, self.nf)
        return float(np.sum(self.curve.speed(tq) * w))


def make_mesh(curve: BoundaryCurve, nf: int) -> CollocationMesh:
    """Collocation mesh with nf faces (3*nf nodes)."""
    return CollocationMesh(curve, nf)


# ---------------------------------------------------------------------------
# anisotropy matrix
# ---------------------------------------------------------------------------
def sqrt_spd(A: np.ndarray):
    """Principal square root of a real SPD 2x2 matrix.

    Returns (A^{1/2}, A^{-1/2}, det(A^{1/2})). Raises ConfigError when A is
    not symmetric or not positive definite.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2):
        raise ConfigError(f"expected a 2x2 matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ConfigError("anisotropy matrix must be symmetric")
    w, V = np.linalg.eigh(A)
    if np.any(w <= 0):
        raise ConfigError(f"anisotropy matrix must be positive definite, eigenvalues {w}")
    s = np.sqrt(w)
    root = (V * s) @ V.T
    inv_root = (V / s) @ V.T
    return root, inv_root, float(s[0] * s[1])


@dataclass(frozen=True)
class AnisotropyMatrix:
    """Real SPD 2x2 anisotropy with cached square roots."""

    A: np.ndarray
    sqrt: np.ndarray = field(init=False)
    inv_sqrt: np.ndarray = field(init=False)
    det_sqrt: float = field(init=False)

    def __post_init__(self):
        root, inv_root, det_root = sqrt_spd(self.A)
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "sqrt", root)
        object.__setattr__(self, "inv_sqrt", inv_root)
        object.__setattr__(self, "det_sqrt", det_root)


# ---------------------------------------------------------------------------
# directions and sampling grids
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DirectionSet:
    """M equidistant unit directions, angles 2*pi*i/M for i = 0..M-1."""

    M: int = 64

    def __post_init__(self):
        if self.M < 1:
            raise ConfigError("need at least one direction")

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.M) / self.M

    @property
    def vectors(self) -> np.ndarray:
        th = self.angles
        return np.stack([np.cos(th), np.sin(th)], axis=-1)


@dataclass(frozen=True)
class SamplingGrid:
    """Rectangular sampling grid, default [-2,2]^2 at 100x100 points.

    Points are listed row-major: index g = iy*nx + ix, x varying fastest.
    """

    bounds: tuple = (-2.0, 2.0, -2.0, 2.0)   # xmin, xmax, ymin, ymax
    nx: int = 100
    ny: int = 100

    def __post_init__(self):
        xmin, xmax, ymin, ymax = self.bounds
        if not (xmax > xmin and ymax > ymin) or self.nx < 2 or self.ny < 2:
            raise ConfigError(f"degenerate sampling grid: {self.bounds}, {self.nx}x{self.ny}")

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.bounds[0], self.bounds[1], self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.bounds[2], self.bounds[3], self.ny)

    @property
    def points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.xs, self.ys)
        return np.stack([X.ravel(), Y.ravel()], axis=-1)

    @property
    def n_points(self) -> int:
        return self.nx * self.ny


# ---------------------------------------------------------------------------
# region queries used by the reconstruction checks
# ---------------------------------------------------------------------------
def boundary_polygon(curve: BoundaryCurve, n: int = 720) -> np.ndarray:
    t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    return curve.point(t)


def contains(curve: BoundaryCurve, points: np.ndarray, n_poly: int = 720) -> np.ndarray:
    """Even-odd ray-crossing test against a dense polygonal approximation."""
    poly = boundary_polygon(curve, n_poly)
    pts = np.atleast_2d(points)
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    j = len(poly) - 1
    for i in range(len(poly)):
        xi, yi = poly[i]
        xj, yj = poly[j]
        crosses = ((yi > y) != (yj > y)) & (x < (xj - xi) * (y - yi) / (yj - yi) + xi)
        inside ^= crosses
        j = i
    return inside if np.ndim(points) > 1 else inside[0]


def region_centroid(curve: BoundaryCurve, n: int = 4096) -> np.ndarray:
    """Area centroid of the enclosed region (Green's theorem, trapezoid in t)."""
    poly = boundary_polygon(curve, n)
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * np.sum(cross)
    cx = np.sum((x + xn) * cross) / (6.0 * area)
    cy = np.sum((y + yn) * cross) / (6.0 * area)
    return np.array([cx, cy])


def distance_to_boundary(curve: BoundaryCurve, points: np.ndarray, n_poly: int = 2048) -> np.ndarray:
    """Distance from each point to the boundary (dense sampling of the curve)."""
    poly = boundary_polygon(curve, n_poly)
    pts = np.atleast_2d(points)
    d = np.sqrt(((pts[:, None, :] - poly[None, :, :]) ** 2).sum(axis=-1)).min(axis=1)
    return d if np.ndim(points) > 1 else d[0]
