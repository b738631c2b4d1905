import numpy as np
import pytest

from condscat import (ConfigError, DirectionSet, DomainError, Material2D,
                      SingularModeError, assemble_disk_data, far_field_disk,
                      hankel1, hankel1_prime, bessel_j, bessel_j_prime,
                      modal_solve, scattered_field_disk)
from reference import disk_modal_cramer

TABLE_MAT = Material2D(k=2.0, a=3.0, n=1.0, eta=1.0, radius=2.0)
GAMMA2 = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * 2.0)   # gamma_2 at k=2


def test_material_validation():
    with pytest.raises(ConfigError):
        Material2D(k=-1.0, a=1.0, n=1.0, eta=0.0, radius=1.0)
    with pytest.raises(ConfigError):
        Material2D(k=1.0, a=0.0, n=1.0, eta=0.0, radius=1.0)
    with pytest.raises(ConfigError):
        Material2D(k=1.0, a=1.0, n=1.0, eta=0.0, radius=0.0)


def test_null_scatterer_modes():
    coeffs = modal_solve(Material2D(k=3.0, a=1.0, n=1.0, eta=0.0, radius=1.5))
    assert np.max(np.abs(coeffs.us)) == 0.0


def test_golden_mode_zero():
    coeffs = modal_solve(TABLE_MAT)
    # frozen from the Cramer evaluation with the series oracle
    assert coeffs.scattered_mode(0) == pytest.approx(
        -0.33983077492998176 - 0.06231618831706007j, rel=1e-12)
    assert coeffs.interior_mode(0) == pytest.approx(
        -0.020171358987961407 - 0.14065659094825575j, rel=1e-12)
    # and cross-checked against the oracle at runtime
    us0, uin0 = disk_modal_cramer(2.0, 2.0, 3.0, 1.0, 1.0, 0)
    assert coeffs.scattered_mode(0) == pytest.approx(us0, rel=1e-11)
    assert coeffs.interior_mode(0) == pytest.approx(uin0, rel=1e-11)


def test_mode_symmetry():
    coeffs = modal_solve(Material2D(k=2 * np.pi, a=0.5 - 1j, n=2 + 1j, eta=2.0,
                                    radius=1.0))
    for p in range(1, coeffs.order + 1):
        assert coeffs.scattered_mode(-p) == pytest.approx(
            coeffs.scattered_mode(p), rel=1e-12)


@pytest.mark.parametrize("mat", [
    TABLE_MAT,
    Material2D(k=2 * np.pi, a=0.5 - 1j, n=2 + 1j, eta=2.0, radius=1.0),
    Material2D(k=4.0, a=2.0, n=0.5, eta=1.0, radius=0.75),
])
def test_boundary_condition_residual(mat):
    # per-mode residuals of the transmission conditions at r = R, written with
    # the physical a * d/dr form (checks the branch pairing sqrt(na) = a sqrt(n/a))
    coeffs = modal_solve(mat)
    k, R, a, n, eta = mat.k, mat.radius, mat.a, mat.n, mat.eta
    z_in = k * np.sqrt(complex(n) / complex(a)) * R
    for p in range(0, 11):
        usp = coeffs.scattered_mode(p)
        up = coeffs.interior_mode(p)
        exterior = usp * hankel1(p, k * R) + bessel_j(p, k * R)
        d_exterior = k * (usp * hankel1_prime(p, k * R) + bessel_j_prime(p, k * R))
        interior = up * bessel_j(p, z_in)
        d_interior = up * k * np.sqrt(complex(n) / complex(a)) * bessel_j_prime(p, z_in)
        scale = max(1.0, abs(exterior))
        assert abs(exterior - interior - 1j * eta * a * d_interior) <= 1e-10 * scale
        assert abs(d_exterior - a * d_interior) <= 1e-10 * max(1.0, abs(d_exterior))


def test_singular_mode_error():
    # pick eta so the p=0 modal determinant vanishes identically
    k, R, a, n = 2.0, 2.0, 3.0, 1.0
    root_na = np.sqrt(n * a)
    z = k * np.sqrt(n / a) * R
    H, Hp = hankel1(0, k * R), hankel1_prime(0, k * R)
    J, Jp = bessel_j(0, z), bessel_j_prime(0, z)
    eta_star = (k * root_na * Jp * H - J * k * Hp) / (1j * k * root_na * Jp * k * Hp)
    with pytest.raises(SingularModeError, match="p=0"):
        modal_solve(Material2D(k=k, a=a, n=n, eta=eta_star, radius=R), order=2)


def test_far_field_null_and_shift():
    null = modal_solve(Material2D(k=2.0, a=1.0, n=1.0, eta=0.0, radius=1.0))
    assert far_field_disk(null, 0.3, 1.2) == 0.0
    coeffs = modal_solve(TABLE_MAT)
    for c in (0.4, 1.7):
        assert far_field_disk(coeffs, 0.9 + c, 0.2 + c) == pytest.approx(
            far_field_disk(coeffs, 0.9, 0.2), rel=1e-12)


def test_far_field_golden_forward():
    coeffs = modal_solve(TABLE_MAT)
    # frozen from the oracle evaluation of the truncated series at theta = phi
    assert far_field_disk(coeffs, 0.0, 0.0) == pytest.approx(
        -1.6395823933197615 + 18.890081188082636j, rel=1e-11)


def test_scattered_field_domain():
    coeffs = modal_solve(TABLE_MAT)
    with pytest.raises(DomainError):
        scattered_field_disk(coeffs, 1.5, 0.0, 0.0)


def test_far_field_limit():
    # sqrt(r) e^{-ikr} u_s / gamma_2 approaches u_inf within 1% at r = 1e4
    coeffs = modal_solve(TABLE_MAT)
    r = 1.0e4
    theta, phi = 0.7, 0.1
    u, _ = scattered_field_disk(coeffs, r, theta, phi)
    approx_inf = np.sqrt(r) * np.exp(-1j * TABLE_MAT.k * r) * u / GAMMA2
    exact_inf = far_field_disk(coeffs, theta, phi)
    assert abs(approx_inf - exact_inf) <= 0.01 * abs(exact_inf)


def test_radiation_condition_decay():
    coeffs = modal_solve(TABLE_MAT)
    k = TABLE_MAT.k
    radii = np.array([1.0e2, 1.0e3, 1.0e4])
    resid = []
    for r in radii:
        u, du = scattered_field_disk(coeffs, r, 0.35, 0.1)
        resid.append(abs(du - 1j * k * u))
    slope = np.polyfit(np.log(radii), np.log(resid), 1)[0]
    assert slope <= -1.4


def test_assemble_null():
    mat = Material2D(k=2.0, a=1.0, n=1.0, eta=0.0, radius=1.0)
    ff, cauchy = assemble_disk_data(mat, DirectionSet(64), 3.0)
    assert np.linalg.norm(ff.entries, 2) <= 1e-12
    assert np.linalg.norm(cauchy.us, 2) <= 1e-12


def test_assemble_circulant():
    ff, _ = assemble_disk_data(TABLE_MAT, DirectionSet(64), 3.0)
    F = ff.entries
    first_col = F[:, 0]
    for j in range(64):
        assert np.max(np.abs(F[:, j] - np.roll(first_col, j))) < 1e-12


def test_truncation_stability():
    dirs = DirectionSet(64)
    # kR = 4: fully converged at the default truncation
    f15, _ = assemble_disk_data(TABLE_MAT, dirs, 3.0, order=15)
    f25, _ = assemble_disk_data(TABLE_MAT, dirs, 3.0, order=25)
    assert np.linalg.norm(f25.entries - f15.entries, 2) < 1e-8
    # kR = 8: the default truncation leaves a measurable but small tail
    mat = Material2D(k=4.0, a=3.0, n=1.0, eta=1.0, radius=2.0)
    f15, _ = assemble_disk_data(mat, dirs, 3.0, order=15)
    f25, _ = assemble_disk_data(mat, dirs, 3.0, order=25)
    assert np.linalg.norm(f25.entries - f15.entries, 2) < 1e-5


def test_assemble_measurement_radius_check():
    with pytest.raises(ConfigError):
        assemble_disk_data(TABLE_MAT, DirectionSet(8), 1.5)
