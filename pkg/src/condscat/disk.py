"""Separation-of-variables forward solver for a penetrable disk.

For D = B(0, R) with scalar anisotropy A = a*I, refractive index n, and
conductivity eta, the scattered and interior fields expand in cylindrical
modes. Writing z_in = k*sqrt(n/a)*R, each mode p solves the 2x2 system

    [ H_p(kR)    -i eta k sqrt(na) J'_p(z_in) - J_p(z_in) ] [us_p]   [ -J_p(kR)  ]
    [ k H'_p(kR)            -k sqrt(na) J'_p(z_in)        ] [u_p ] = [ -k J'_p(kR)]

by Cramer's rule. The truncated series then give the scattered field,
its radial derivative, and the far-field pattern

    u_inf(theta - phi) = (4/i) sum_{|p| <= P} us_p e^{ip(theta - phi)}.

Square roots sqrt(n/a), sqrt(na) take the principal branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import special
from .errors import ConfigError, DomainError, SingularModeError
from .geometry import DirectionSet
from .measurement import CauchyDataSet, FarFieldMatrix

DEFAULT_TRUNCATION = 15


@dataclass(frozen=True)
class Material2D:
    """Physical configuration of the disk problem."""

    k: float                 # wavenumber, rad/length
    a: complex               # scalar anisotropy, A = a*I
    n: complex               # refractive index
    eta: complex             # boundary conductivity
    radius: float            # disk radius

    def __post_init__(self):
        if self.k <= 0:
            raise ConfigError(f"wavenumber must be positive, got {self.k}")
        if self.radius <= 0:
            raise ConfigError(f"radius must be positive, got {self.radius}")
        if self.a == 0:
            raise ConfigError("anisotropy a must be nonzero")


@dataclass(frozen=True)
class ModalCoefficients:
    """Scattered/interior modal amplitudes for modes p = -P..P."""

    material: Material2D
    order: int
    us: np.ndarray       # scattered amplitudes, index p + order
    interior: np.ndarray  # interior amplitudes, same layout

    def scattered_mode(self, p: int) -> complex:
        return self.us[p + self.order]

    def interior_mode(self, p: int) -> complex:
        return self.interior[p + self.order]


def modal_solve(mat: Material2D, order: int = DEFAULT_TRUNCATION) -> ModalCoefficients:
    """Solve the per-mode 2x2 systems for |p| <= order.

    Raises SingularModeError when |det| < 1e-14 * ||M||_F for some mode
    (the wavenumber is then an interior resonance of the modal system).
    """
    k, R = mat.k, mat.radius
    root_na = np.sqrt(complex(mat.n) * complex(mat.a))
    z_in = k * np.sqrt(complex(mat.n) / complex(mat.a)) * R
    # exactly-real arguments take the real evaluation path, so the null
    # configuration (a, n, eta) = (1, 1, 0) cancels bitwise
    if z_in.imag == 0.0:
        z_in = z_in.real
    if root_na.imag == 0.0:
        root_na = root_na.real
    us = np.empty(2 * order + 1, dtype=complex)
    interior = np.empty(2 * order + 1, dtype=complex)
    for p in range(-order, order + 1):
        H = special.hankel1(p, k * R)
        Hp = special.hankel1_prime(p, k * R)
        J_in = special.bessel_j(p, z_in)
        Jp_in = special.bessel_j_prime(p, z_in)
        J = special.bessel_j(p, k * R)
        Jp = special.bessel_j_prime(p, k * R)
        m01 = -1j * mat.eta * k * root_na * Jp_in - J_in
        m11 = -k * root_na * Jp_in
        det = H * m11 - m01 * k * Hp
        # scale of the cancellation in det; |det| far below it means the mode
        # amplitudes det_x/det are pure rounding noise
        scale = max(abs(H * m11), abs(m01 * k * Hp))
        if abs(det) < 1e-14 * scale:
            raise SingularModeError(p, k)
        rhs0, rhs1 = -J, -k * Jp
        us[p + order] = (rhs0 * m11 - m01 * rhs1) / det
        interior[p + order] = (H * rhs1 - rhs0 * k * Hp) / det
    return ModalCoefficients(mat, order, us, interior)


def far_field_disk(coeffs: ModalCoefficients, theta, phi) -> complex:
    """Far-field pattern u_inf(theta; phi) = (4/i) sum us_p e^{ip(theta-phi)}."""
    ps = np.arange(-coeffs.order, coeffs.order + 1)
    d = np.asarray(theta) - np.asarray(phi)
    phase = np.exp(1j * np.multiply.outer(d, ps))
    return (4.0 / 1j) * (phase @ coeffs.us)


def scattered_field_disk(coeffs: ModalCoefficients, r: float, theta, phi):
    """Scattered field and its radial derivative at radius r > R.

    Returns (u_s, du_s) where du_s = d(u_s)/dr.
    """
    mat = coeffs.material
    if r <= mat.radius:
        raise DomainError(
            f"series evaluation requires r > R = {mat.radius}, got r = {r}")
    ps = np.arange(-coeffs.order, coeffs.order + 1)
    k = mat.k
    H = np.array([special.hankel1(int(p), k * r) for p in ps])
    Hp = np.array([special.hankel1_prime(int(p), k * r) for p in ps])
    ip = 1j ** np.mod(ps, 4)
    d = np.asarray(theta) - np.asarray(phi)
    phase = np.exp(1j * np.multiply.outer(d, ps))
    u = phase @ (ip * coeffs.us * H)
    du = k * (phase @ (ip * coeffs.us * Hp))
    return u, du


def assemble_disk_data(mat: Material2D, dirs: DirectionSet, r0: float,
                       order: int = DEFAULT_TRUNCATION):
    """Far-field matrix and Cauchy data on the circle of radius r0 > R.

    F[i, j] = (2 pi / M) u_inf(theta_i; theta_j); the Cauchy matrices carry
    no quadrature weight: us[i, j] = u_s(x_i; theta_j) with x_i on the
    measurement circle.
    """
    if r0 <= mat.radius:
        raise ConfigError(
            f"measurement radius {r0} must exceed the disk radius {mat.radius}")
    coeffs = modal_solve(mat, order)
    th = dirs.angles
    M = dirs.M
    ps = np.arange(-order, order + 1)
    E = np.exp(1j * np.outer(th, ps))                        # (M, 2P+1)
    F = (2 * np.pi / M) * (4.0 / 1j) * (E * coeffs.us) @ E.conj().T
    k = mat.k
    H = np.array([special.hankel1(int(p), k * r0) for p in ps])
    Hp = np.array([special.hankel1_prime(int(p), k * r0) for p in ps])
    ip = 1j ** np.mod(ps, 4)
    us = (E * (ip * coeffs.us * H)) @ E.conj().T
    dus = k * (E * (ip * coeffs.us * Hp)) @ E.conj().T
    ff = FarFieldMatrix(F, k, dirs, provenance="series")
    cauchy = CauchyDataSet(us, dus, r0, k, dirs, provenance="series")
    return ff, cauchy
