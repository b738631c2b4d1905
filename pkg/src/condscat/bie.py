"""Boundary-element collocation solver for smooth penetrable scatterers.

Formulation
-----------
The exterior scattered field and interior total field are sought as
single-layer potentials

    u_s = SL_k[phi]      (free-space kernel PHI(x,y) = (i/4) H0(k|x-y|))
    u   = SLt_k[psi]     (kernel PHIt(x,y) = PHI(A^{-1/2}x, A^{-1/2}y)/det A^{1/2})

with A real SPD and refractive index 1 inside. Enforcing the transmission
conditions (flux continuity and the conductive jump with parameter eta)
at the collocation nodes yields the 2x2 block system

    [ -I/2 + K'   -I/2 - Kt' ] [phi]   [ -du_i/dnu ]
    [    S        -St - i eta (I/2 + Kt') ] [psi] = [ -u_i ]

where S, St are the single-layer boundary operators, K', Kt' the normal /
co-normal derivative operators, and the +-1/2 jump constants sit in the
block matrix, never inside the quadrature.

Discretization
--------------
Isoparametric quadratic collocation on the mesh of geometry.make_mesh:
densities are discontinuous piecewise quadratics through the 3 nodes per
face; the boundary itself is the mesh's continuous piecewise-quadratic
interpolant. Smooth (far) interactions use Gauss-Legendre per face. The
face containing the collocation node splits the kernel into a smooth part
and a log part via H0(z) = (2i/pi) ln(z) J0(z) + smooth; the log part is
integrated with a dedicated Gauss rule for the weight -ln(u), the rest
with Gauss-Legendre on the two sub-faces. The two neighboring faces use
composite Gauss rules graded toward the near end.

The assembled system is dense; one LU factorization is reused for all
incident directions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from numpy.polynomial.legendre import leggauss
from scipy.special import hankel1 as _h1
from scipy.special import jv as _jv

from .errors import ConfigError, NumericalError, SingularSystemError
from .geometry import (AnisotropyMatrix, CollocationMesh, DirectionSet,
                       NODE_LOCS, density_basis)
from .measurement import CauchyDataSet, FarFieldMatrix

QUAD_FAR = 16      # Gauss order for well-separated faces
QUAD_NEAR = 12     # Gauss order per graded sub-interval / singular half-face
GRADE_FRACTIONS = np.array([0.0, 1.0 / 27.0, 1.0 / 9.0, 1.0 / 3.0, 1.0])

# 16-point Gauss rule for the weight -ln(u) on (0, 1); integrates
# u^j * (-ln u), j <= 31, to machine precision.
_LOG_NODES = np.array([
    0.0038978344871159159241, 0.02302894561687323982, 0.058280398306240412348,
    0.10867836509105403649, 0.17260945490984393776, 0.24793705447057849515,
    0.33209454912991715598, 0.42218391058194860012, 0.51508247338146260348,
    0.60755612044772872409, 0.69637565322821406116, 0.7784325658732654052,
    0.85085026971539108323, 0.91108685722227190542, 0.95702557170354215759,
    0.98704780024798447676,
])
_LOG_WEIGHTS = np.array([
    0.060791710043591232851, 0.10291567751758214439, 0.12235566204600919356,
    0.12756924693701598872, 0.12301357460007091542, 0.11184724485548572262,
    0.096596385152124341253, 0.079356664351473138782, 0.061850494581965207095,
    0.045435246507726668629, 0.031098974751581806409, 0.019459765927360842078,
    0.010776254963205525646, 0.0049725428900876417125, 0.001678201110051194515,
    0.00028235376466843632178,
])


@dataclass(frozen=True)
class BieMaterial:
    """Wavenumber, real SPD anisotropy, conductivity; index fixed to n = 1."""

    k: float
    aniso: AnisotropyMatrix
    eta: complex

    def __post_init__(self):
        if self.k <= 0:
            raise ConfigError(f"wavenumber must be positive, got {self.k}")
        if not isinstance(self.aniso, AnisotropyMatrix):
            object.__setattr__(self, "aniso", AnisotropyMatrix(np.asarray(self.aniso)))

    @property
    def n(self) -> float:
        return 1.0


# ---------------------------------------------------------------------------
# fundamental solutions
# ---------------------------------------------------------------------------
def phi(k: float, x, y):
    """Free-space fundamental solution (i/4) H0^(1)(k |x-y|)."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0.0):
        raise ConfigError("phi is singular at coincident points")
    return 0.25j * _h1(0, k * r)


def grad_phi_x(k: float, x, y):
    """Gradient of phi with respect to x: -(ik/4) H1(kr) (x-y)/r."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0.0):
        raise ConfigError("grad_phi_x is singular at coincident points")
    return (-0.25j * k * _h1(1, k * r) / r)[..., None] * d


def phi_tilde(k: float, aniso: AnisotropyMatrix, x, y):
    """Fundamental solution of div(A grad u) + k^2 u via change of variables."""
    B = aniso.inv_sqrt
    d = (np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) @ B
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0.0):
        raise ConfigError("phi_tilde is singular at coincident points")
    return 0.25j * _h1(0, k * r) / aniso.det_sqrt


def conormal_phi_tilde(k: float, aniso: AnisotropyMatrix, x, y, nu):
    """Co-normal derivative nu(x) . A grad_x phi_tilde(x, y).

    Reduces to -(ik/4) H1(k rt) (nu.(x-y)) / (rt det A^{1/2}) with
    rt = |A^{-1/2}(x-y)|, because A^{1/2} is symmetric.
    """
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    dt = d @ aniso.inv_sqrt
    rt = np.linalg.norm(dt, axis=-1)
    if np.any(rt == 0.0):
        raise ConfigError("conormal_phi_tilde is singular at coincident points")
    w = np.sum(d * np.asarray(nu, dtype=float), axis=-1)
    return -0.25j * k * _h1(1, k * rt) * w / (rt * aniso.det_sqrt)


class _KernelBatch:
    """Vectorized evaluation of the four boundary kernels and their log parts.

    Every kernel is written as full(x,y) = smooth(x,y) + logcoef(x,y)*ln|x-y|
    with smooth analytic along the boundary; the splitting follows
    H0(z) = (2i/pi) ln(z) J0(z) + analytic, H1(z) = (2i/pi) ln(z) J1(z)
    - 2i/(pi z) + analytic.
    """

    def __init__(self, mat: BieMaterial):
        self.k = mat.k
        self.B = mat.aniso.inv_sqrt
        self.dethalf = mat.aniso.det_sqrt

    def full(self, x, nx, y):
        """Values of (S, St, K', Kt') kernels at source points y."""
        k = self.k
        d = x - y                                   # (..., 2)
        r = np.linalg.norm(d, axis=-1)
        dt = d @ self.B
        rt = np.linalg.norm(dt, axis=-1)
        w = d @ nx
        S = 0.25j * _h1(0, k * r)
        St = 0.25j * _h1(0, k * rt) / self.dethalf
        Kp = -0.25j * k * _h1(1, k * r) * w / r
        Kt = -0.25j * k * _h1(1, k * rt) * w / (rt * self.dethalf)
        return S, St, Kp, Kt

    def logcoef(self, x, nx, y):
        """Coefficients of ln|x-y| in the four kernels."""
        k = self.k
        d = x - y
        r = np.linalg.norm(d, axis=-1)
        dt = d @ self.B
        rt = np.linalg.norm(dt, axis=-1)
        w = d @ nx
        c = -0.5 / np.pi
        S = c * _jv(0, k * r)
        St = c * _jv(0, k * rt) / self.dethalf
        Kp = (k / (2 * np.pi)) * _jv(1, k * r) * w / r
        Kt = (k / (2 * np.pi)) * _jv(1, k * rt) * w / (rt * self.dethalf)
        return S, St, Kp, Kt


@dataclass
class DensityPair:
    """Exterior density phi and interior density psi on the mesh nodes."""

    phi: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        if self.phi.shape != self.psi.shape:
            raise ConfigError("phi and psi must have matching shapes")
        if not (np.all(np.isfinite(self.phi)) and np.all(np.isfinite(self.psi))):
            raise NumericalError("density solve produced non-finite values")


@dataclass
class KernelBlockSystem:
    """Assembled 2x2 block collocation system with a reusable factorization."""

    mesh: CollocationMesh
    material: BieMaterial
    S: np.ndarray
    St: np.ndarray
    Kp: np.ndarray
    Kt: np.ndarray
    matrix: np.ndarray = field(init=False)
    _lu: tuple | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        n = self.mesh.n_nodes
        eye = np.eye(n)
        self.matrix = np.block([
            [-0.5 * eye + self.Kp, -0.5 * eye - self.Kt],
            [self.S, -self.St - 1j * self.material.eta * (0.5 * eye + self.Kt)],
        ])
        if not np.all(np.isfinite(self.matrix)):
            raise NumericalError("assembled collocation matrix contains non-finite values")

    def factorization(self):
        """LU factorization, computed once; raises when numerically singular."""
        if self._lu is None:
            anorm = np.linalg.norm(self.matrix, 1)
            lu, piv = sla.lu_factor(self.matrix)
            rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
            if info != 0 or rcond == 0.0 or 1.0 / rcond > 1e14:
                cond = np.inf if rcond == 0.0 else 1.0 / rcond
                raise SingularSystemError(self.material.k, cond)
            self._lu = (lu, piv)
        return self._lu

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Direct solve; verifies the relative residual is <= 1e-10."""
        lu, piv = self.factorization()
        sol = sla.lu_solve((lu, piv), rhs)
        resid = np.linalg.norm(self.matrix @ sol - rhs) / np.linalg.norm(rhs)
        if resid > 1e-10:
            raise NumericalError(
                f"solve residual {resid:.3e} exceeds 1e-10 at k={self.material.k}")
        return sol


def _nearby_entries(mesh: CollocationMesh, kernels: _KernelBatch, i: int):
    """Accurate quadrature of the four kernels against the 3 basis functions
    on the self face and the two neighboring faces of collocation node i.

    Yields (face_index, values) with values of shape (4, 3).
    """
    gx, gw = leggauss(QUAD_NEAR)
    xi = mesh.node_points[i]
    ni = mesh.node_normals[i]
    fi = i // 3
    ui = NODE_LOCS[i % 3]
    for dj in (-1, 0, 1):
        f = (fi + dj) % mesh.nf
        u_sing = ui - dj          # node's local coordinate relative to face f
        vals = np.zeros((4, 3), dtype=complex)
        if dj == 0:
            # the singular face: split at the node, subtract the log
            for lo, hi, sing_at_lo in ((0.0, u_sing, False), (u_sing, 1.0, True)):
                span = hi - lo
                if span <= 1e-15:
                    continue
                ug = lo + span * 0.5 * (gx + 1.0)
                s = np.abs(ug - u_sing)
                yg, jac = mesh.face_geometry(f, ug)
                Lb = density_basis(ug)                     # (Q, 3)
                r = np.linalg.norm(xi - yg, axis=-1)
                fulls = kernels.full(xi, ni, yg)
                logs = kernels.logcoef(xi, ni, yg)
                wq = jac * (0.5 * span * gw)
                for kk in range(4):
                    smooth = fulls[kk] - logs[kk] * np.log(s)   # = A + B ln(r/s)
                    vals[kk] += (smooth * wq) @ Lb
                # remaining integral of B * ln s over (0, span):
                #   span*ln(span) * int_0^1 g du  +  span * int_0^1 g ln(u) du
                for kk in range(4):
                    vals[kk] += span * np.log(span) * ((logs[kk] * jac * 0.5 * gw) @ Lb)
                sl = span * _LOG_NODES
                ul = u_sing + sl if sing_at_lo else u_sing - sl
                yl, jacl = mesh.face_geometry(f, ul)
                Ll = density_basis(ul)
                logl = kernels.logcoef(xi, ni, yl)
                for kk in range(4):
                    vals[kk] += -span * ((logl[kk] * jacl * _LOG_WEIGHTS) @ Ll)
        else:
            # neighboring face: analytic integrand, grade toward the near end
            cuts = GRADE_FRACTIONS if u_sing < 0.5 else 1.0 - GRADE_FRACTIONS[::-1]
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                span = hi - lo
                ug = lo + span * 0.5 * (gx + 1.0)
                yg, jac = mesh.face_geometry(f, ug)
                Lb = density_basis(ug)
                fulls = kernels.full(xi, ni, yg)
                wq = jac * (0.5 * span * gw)
                for kk in range(4):
                    vals[kk] += (fulls[kk] * wq) @ Lb
        yield f, vals


def assemble_system(mesh: CollocationMesh, mat: BieMaterial) -> KernelBlockSystem:
    """Assemble the four collocation blocks and the 2x2 block matrix."""
    kernels = _KernelBatch(mat)
    n = mesh.n_nodes
    nf = mesh.nf
    yq, wq, Bq = mesh.quadrature(QUAD_FAR)          # (nf*Q, 2), (nf*Q,), (Q, 3)
    nq = QUAD_FAR
    blocks = [np.empty((n, n), dtype=complex) for _ in range(4)]
    # far path: full broadcast in row chunks to bound memory
    chunk = max(1, 2 ** 22 // (nf * nq))
    wB = (wq.reshape(nf, nq)[:, :, None] * Bq[None, :, :])   # (nf, Q, 3)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        x = mesh.node_points[lo:hi][:, None, :]              # (c, 1, 2)
        nx = mesh.node_normals[lo:hi]
        d = x - yq[None, :, :]                               # (c, nq*nf, 2)
        r = np.linalg.norm(d, axis=-1)
        dt = d @ kernels.B
        rt = np.linalg.norm(dt, axis=-1)
        w = np.einsum("cqi,ci->cq", d, nx)
        k = mat.k
        vals = (0.25j * _h1(0, k * r),
                0.25j * _h1(0, k * rt) / kernels.dethalf,
                -0.25j * k * _h1(1, k * r) * w / r,
                -0.25j * k * _h1(1, k * rt) * w / (rt * kernels.dethalf))
        for kk in range(4):
            v = vals[kk].reshape(hi - lo, nf, nq)
            blocks[kk][lo:hi] = np.einsum("cfq,fqm->cfm", v, wB,
                                          optimize=True).reshape(hi - lo, n)
    # overwrite self and neighbor faces with the singularity-aware quadrature
    for i in range(n):
        for f, vals in _nearby_entries(mesh, kernels, i):
            for kk in range(4):
                blocks[kk][i, 3 * f:3 * f + 3] = vals[kk]
    return KernelBlockSystem(mesh, mat, *blocks)


# ---------------------------------------------------------------------------
# right-hand sides and solves
# ---------------------------------------------------------------------------
def _incident_rhs(mesh: CollocationMesh, k: float, directions: np.ndarray):
    """-du_i/dnu and -u_i at the collocation nodes, one column per direction."""
    yhat = np.stack([np.cos(directions), np.sin(directions)], axis=-1)
    ui = np.exp(1j * k * (mesh.node_points @ yhat.T))
    dui = 1j * k * (mesh.node_normals @ yhat.T) * ui
    return np.vstack([-dui, -ui])


def solve_densities(system: KernelBlockSystem, incident_angle: float) -> DensityPair:
    """Densities for a single incident plane-wave direction."""
    n = system.mesh.n_nodes
    rhs = _incident_rhs(system.mesh, system.material.k, np.atleast_1d(incident_angle))
    sol = system.solve(rhs)
    return DensityPair(sol[:n, 0], sol[n:, 0])


def solve_all_directions(system: KernelBlockSystem, dirs: DirectionSet):
    """Density matrices (3nf, M) for all incident directions, one LU solve."""
    n = system.mesh.n_nodes
    sol = system.solve(_incident_rhs(system.mesh, system.material.k, dirs.angles))
    return sol[:n], sol[n:]


# ---------------------------------------------------------------------------
# field evaluation
# ---------------------------------------------------------------------------
def eval_farfield(mesh: CollocationMesh, k: float, phi_density: np.ndarray,
                  obs_angles) -> np.ndarray:
    """Far-field pattern int exp(-ik xhat.y) phi(y) ds(y) of the single layer.

    phi_density may carry several columns (one per incident direction); the
    result then has shape (n_obs, n_columns).
    """
    obs_angles = np.atleast_1d(np.asarray(obs_angles, dtype=float))
    yq, wq, _ = mesh.quadrature(QUAD_FAR)
    dens = mesh.interpolate(phi_density, QUAD_FAR)
    if dens.ndim == 1:
        dens = dens[:, None]
    xh = np.stack([np.cos(obs_angles), np.sin(obs_angles)], axis=-1)
    E = np.exp(-1j * k * (xh @ yq.T))
    return E @ (dens * wq[:, None])


def eval_scattered(mesh: CollocationMesh, k: float, phi_density: np.ndarray,
                   points: np.ndarray, normals: np.ndarray | None = None):
    """Single-layer field and its normal derivative at exterior points.

    normals defaults to the radial direction x/|x| (measurement circles
    centered at the origin). Points closer to the boundary than two face
    lengths trigger an accuracy warning; the smooth quadrature degrades there.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if normals is None:
        normals = points / np.linalg.norm(points, axis=-1, keepdims=True)
    else:
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
    face_len = mesh.arclength() / mesh.nf
    dist = np.sqrt(((points[:, None, :] - mesh.node_points[None, :, :]) ** 2
                    ).sum(-1)).min(axis=1)
    if np.any(dist < 2.0 * face_len):
        warnings.warn(
            f"evaluation point within two face lengths of the boundary "
            f"(min distance {dist.min():.3g}); accuracy is reduced",
            stacklevel=2)
    yq, wq, _ = mesh.quadrature(QUAD_FAR)
    dens = mesh.interpolate(phi_density, QUAD_FAR)
    if dens.ndim == 1:
        dens = dens[:, None]
    d = points[:, None, :] - yq[None, :, :]
    r = np.linalg.norm(d, axis=-1)
    us = (0.25j * _h1(0, k * r)) @ (dens * wq[:, None])
    ndot = np.einsum("pqi,pi->pq", d, normals)
    dus = (-0.25j * k * _h1(1, k * r) * ndot / r) @ (dens * wq[:, None])
    return us, dus


def assemble_bie_data(mesh: CollocationMesh, mat: BieMaterial, dirs: DirectionSet,
                      r0: float):
    """Far-field matrix and Cauchy data from one assembly and one LU."""
    system = assemble_system(mesh, mat)
    return data_from_system(system, dirs, r0)


def data_from_system(system: KernelBlockSystem, dirs: DirectionSet, r0: float):
    """Data products from an already assembled system."""
    mesh, mat = system.mesh, system.material
    phi_all, _ = solve_all_directions(system, dirs)
    F = (2 * np.pi / dirs.M) * eval_farfield(mesh, mat.k, phi_all, dirs.angles)
    xm = r0 * dirs.vectors
    us, dus = eval_scattered(mesh, mat.k, phi_all, xm)
    ff = FarFieldMatrix(F, mat.k, dirs, provenance="bie")
    cauchy = CauchyDataSet(us, dus, r0, mat.k, dirs, provenance="bie")
    return ff, cauchy
