import numpy as np
import pytest

from condscat import (DomainError, bessel_j, bessel_j_prime, bessel_y, hankel1,
                      hankel1_prime)
from reference import series_bessel_j, series_hankel1


def test_bessel_j_at_zero():
    assert bessel_j(0, 0.0) == pytest.approx(1.0, abs=0)
    assert bessel_j(1, 0.0) == pytest.approx(0.0, abs=0)
    assert bessel_j(5, 0.0) == pytest.approx(0.0, abs=0)


def test_bessel_j_golden():
    # frozen from the power-series oracle
    assert bessel_j(0, 2.0 + 0j) == pytest.approx(0.22389077914123562, rel=1e-12)
    assert bessel_j(0, 2.0 + 0j) == pytest.approx(series_bessel_j(0, 2.0), rel=1e-13)


def test_bessel_j_prime_values():
    assert bessel_j_prime(0, 0.0) == pytest.approx(0.0, abs=0)
    assert bessel_j_prime(1, 0.0) == pytest.approx(0.5, rel=1e-14)
    # J'_0(2) = -J_1(2), frozen from the oracle
    assert bessel_j_prime(0, 2.0) == pytest.approx(-0.5767248077568736, rel=1e-12)


def test_oracle_agreement_grid():
    rng = np.random.default_rng(7)
    for order in range(0, 31, 3):
        for _ in range(6):
            z = complex(rng.uniform(-12, 12), rng.uniform(-6, 6))
            ref = series_bessel_j(order, z)
            got = bessel_j(order, z)
            assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_hankel_golden():
    # frozen from the J/Y series oracle
    got = hankel1(0, 1.0)
    assert got == pytest.approx(0.7651976865579666 + 0.08825696421567693j, rel=1e-12)
    got = hankel1(1, 1.0)
    assert got == pytest.approx(0.44005058574493355 - 0.7812128213002887j, rel=1e-12)
    assert hankel1(2, 3.0) == pytest.approx(series_hankel1(2, 3.0), rel=1e-12)


def test_hankel_asymptotic_envelope():
    for x in (50.0, 80.0, 120.0, 190.0):
        assert abs(hankel1(0, x)) == pytest.approx(np.sqrt(2 / (np.pi * x)), rel=0.05)


def test_hankel_prime_identities():
    assert hankel1_prime(0, 1.0) == pytest.approx(-hankel1(1, 1.0), rel=1e-14)
    assert hankel1_prime(1, 1.0) == pytest.approx(
        0.5 * (hankel1(0, 1.0) - hankel1(2, 1.0)), rel=1e-14)


def test_hankel_prime_finite_difference():
    step = 1e-6
    fd = (hankel1(2, 3.0 + step) - hankel1(2, 3.0 - step)) / (2 * step)
    assert hankel1_prime(2, 3.0) == pytest.approx(fd, rel=1e-6)


def test_wronskian():
    # J_p Y'_p - J'_p Y_p = 2/(pi x)
    for x in (0.5, 1.0, 5.0, 20.0):
        for p in range(6):
            jp = bessel_j(p, x)
            jpp = bessel_j_prime(p, x)
            yp = bessel_y(p, x)
            ypp = 0.5 * (bessel_y(p - 1, x) - bessel_y(p + 1, x)) if p > 0 else -bessel_y(1, x)
            w = jp * ypp - jpp * yp
            assert w == pytest.approx(2 / (np.pi * x), rel=1e-10)


def test_reflection_identity():
    rng = np.random.default_rng(11)
    for p in range(1, 21):
        z = complex(rng.uniform(-20, 20), rng.uniform(-10, 10))
        if abs(z) > 30:
            z *= 30 / abs(z)
        assert bessel_j(-p, z) == pytest.approx((-1.0) ** p * bessel_j(p, z), rel=1e-12)


def test_derivative_vs_finite_difference():
    rng = np.random.default_rng(3)
    step = 1e-6
    for p in (0, 1, 4, 9):
        x = rng.uniform(0.5, 20.0)
        fd = (bessel_j(p, x + step) - bessel_j(p, x - step)) / (2 * step)
        assert bessel_j_prime(p, x) == pytest.approx(fd, rel=1e-6)


def test_complex_conjugation():
    rng = np.random.default_rng(5)
    for p in (0, 2, 7):
        z = complex(rng.uniform(-10, 10), rng.uniform(-5, 5))
        assert bessel_j(p, np.conj(z)) == pytest.approx(np.conj(bessel_j(p, z)), rel=1e-13)


def test_envelope_errors():
    with pytest.raises(DomainError):
        bessel_j(61, 1.0)
    with pytest.raises(DomainError):
        bessel_j(0, 250.0)
    with pytest.raises(DomainError):
        bessel_j(0.5, 1.0)        # non-integer order
    with pytest.raises(DomainError):
        hankel1(0, 0.0)
    with pytest.raises(DomainError):
        hankel1(0, -1.0)
    with pytest.raises(DomainError):
        hankel1_prime(0, 0.0)
