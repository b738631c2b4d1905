import os

import numpy as np
import pytest

from condscat import (CauchyDataSet, ConfigError, DataFormatError, DirectionSet,
                      FarFieldMatrix, Material2D, NoiseDescriptor, add_noise,
                      assemble_disk_data, load, perturb_cauchy,
                      perturb_farfield, save)
from reference import power_iteration_norm

GOLDEN = os.path.join(os.path.dirname(__file__), "data", "disk_farfield_golden.txt")


def random_matrix(seed=0, m=64):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))


def test_noise_zero_is_identity():
    X = random_matrix(1)
    out = add_noise(X, 0.0, 123)
    assert np.array_equal(out, X)


def test_noise_unit_spectral_norm():
    X = random_matrix(2)
    delta = 0.05
    out = add_noise(X, delta, 42)
    # recover E from the data and verify ||E||_2 = 1 by power iteration
    E = (out / X - 1.0) / delta
    assert power_iteration_norm(E) == pytest.approx(1.0, abs=1e-10)
    # entries of the raw draw lie in the square [-1,1]^2 before normalization,
    # so after normalization none exceed the norm bound
    assert np.abs(E).max() <= np.sqrt(2.0)


def test_noise_frobenius_bound():
    X = random_matrix(3)
    delta = 0.1
    out = add_noise(X, delta, 7)
    E = (out / X - 1.0) / delta
    assert np.linalg.norm(out - X, "fro") <= \
        delta * np.linalg.norm(X, "fro") * np.abs(E).max() + 1e-12


def test_noise_determinism():
    X = random_matrix(4)
    a = add_noise(X, 0.05, 99)
    b = add_noise(X, 0.05, 99)
    assert np.array_equal(a, b)
    c = add_noise(X, 0.05, 100)
    assert not np.array_equal(a, c)


def test_noise_range_check():
    with pytest.raises(ConfigError):
        add_noise(random_matrix(5), 1.0, 0)
    with pytest.raises(ConfigError):
        NoiseDescriptor(-0.1, 0)


def test_cauchy_noise_substreams():
    dirs = DirectionSet(16)
    us = random_matrix(6, 16)
    dus = random_matrix(7, 16)
    data = CauchyDataSet(us, dus, 3.0, 2.0, dirs)
    noisy = perturb_cauchy(data, 0.05, 11)
    E1 = (noisy.us / us - 1.0) / 0.05
    E2 = (noisy.dus / dus - 1.0) / 0.05
    # distinct sub-streams: the two draws differ
    assert not np.allclose(E1, E2)
    assert power_iteration_norm(E1) == pytest.approx(1.0, abs=1e-10)
    assert power_iteration_norm(E2) == pytest.approx(1.0, abs=1e-10)
    assert noisy.noise == NoiseDescriptor(0.05, 11)


def test_farfield_shape_validation():
    with pytest.raises(ConfigError):
        FarFieldMatrix(random_matrix(1, 32), 2.0, DirectionSet(64))


def test_roundtrip_farfield(tmp_path):
    dirs = DirectionSet(32)
    ff = FarFieldMatrix(random_matrix(8, 32), 2.5, dirs, provenance="bie",
                        noise=NoiseDescriptor(0.05, 17))
    path = tmp_path / "ff.txt"
    save(ff, str(path))
    back = load(str(path))
    assert isinstance(back, FarFieldMatrix)
    assert np.array_equal(back.entries, ff.entries)
    assert back.k == ff.k
    assert back.directions.M == 32
    assert back.provenance == "bie"
    assert back.noise == ff.noise


def test_roundtrip_cauchy(tmp_path):
    dirs = DirectionSet(16)
    data = CauchyDataSet(random_matrix(9, 16), random_matrix(10, 16), 3.0, 4.0, dirs)
    path = tmp_path / "cauchy.txt"
    save(data, str(path))
    back = load(str(path))
    assert isinstance(back, CauchyDataSet)
    assert np.array_equal(back.us, data.us)
    assert np.array_equal(back.dus, data.dus)
    assert back.r0 == 3.0
    assert back.noise is None


def test_dimension_mismatch(tmp_path):
    dirs = DirectionSet(64)
    ff = FarFieldMatrix(random_matrix(11, 64), 2.0, dirs)
    path = tmp_path / "ff.txt"
    save(ff, str(path))
    text = path.read_text().replace("M 64", "M 32")
    bad = tmp_path / "bad.txt"
    bad.write_text(text)
    with pytest.raises(DataFormatError):
        load(str(bad))


def test_malformed_file(tmp_path):
    path = tmp_path / "junk.txt"
    path.write_text("not a data file\n1 2 3\n")
    with pytest.raises(DataFormatError):
        load(str(path))
    truncated = tmp_path / "trunc.txt"
    truncated.write_text("condscat-data 1\nkind farfield\nk 2\nM 4\nprovenance x\n"
                         "matrix F 4 4\n1 0 1 0 1 0 1 0\n")
    with pytest.raises(DataFormatError):
        load(str(truncated))


def test_golden_file_reload():
    back = load(GOLDEN)
    assert isinstance(back, FarFieldMatrix)
    assert back.k == 2.0
    assert back.directions.M == 64
    # frozen after oracle validation of every entry
    assert np.linalg.norm(back.entries, 2) == pytest.approx(19.442892144401824,
                                                            rel=1e-12)
    assert back.entries[0, 0] == pytest.approx(
        -0.16096562505651693 + 1.854529383943599j, rel=1e-12)
    # regenerating the data reproduces the stored file exactly
    mat = Material2D(k=2.0, a=3.0, n=1.0, eta=1.0, radius=2.0)
    fresh, _ = assemble_disk_data(mat, DirectionSet(64), 3.0)
    assert np.allclose(fresh.entries, back.entries, rtol=0, atol=1e-14)


def test_perturb_farfield_metadata():
    ff = load(GOLDEN)
    noisy = perturb_farfield(ff, 0.05, 3)
    assert noisy.noise == NoiseDescriptor(0.05, 3)
    assert np.linalg.norm(noisy.entries - ff.entries, 2) > 0
    again = perturb_farfield(ff, 0.05, 3)
    assert np.array_equal(noisy.entries, again.entries)
