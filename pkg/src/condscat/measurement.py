"""Scattering data products: far-field matrix, Cauchy pair, noise, file I/O.

Noise model
-----------
A matrix X is perturbed entrywise as X * (1 + delta * E) where E has
uniformly distributed complex entries (real and imaginary parts drawn
together per entry, row-major, from [-1, 1]) and is then normalized so
its spectral norm is exactly 1. The generator is PCG64 seeded from the
given 64-bit seed, so results are reproducible. For a Cauchy pair the
seed is split into two independent child streams (SeedSequence.spawn):
child 0 perturbs us, child 1 perturbs dus.

File format
-----------
A single self-describing text container: "key value" header lines, then
one or two "matrix <name> <rows> <cols>" sections with one matrix row per
line as alternating "re im" pairs printed with %.17g (lossless for IEEE
doubles, diffs cleanly).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataFormatError
from .geometry import DirectionSet

FORMAT_MAGIC = "condscat-data"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class NoiseDescriptor:
    """Relative noise level in [0, 1) and the RNG seed that produced it."""

    delta: float
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.delta < 1.0):
            raise ConfigError(f"noise level must lie in [0, 1), got {self.delta}")


@dataclass(frozen=True)
class FarFieldMatrix:
    """M x M far-field operator discretization, the 2*pi/M weight included."""

    entries: np.ndarray
    k: float
    directions: DirectionSet
    provenance: str = "series"          # series | bie
    noise: NoiseDescriptor | None = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        M = self.directions.M
        if e.shape != (M, M):
            raise ConfigError(f"far-field matrix shape {e.shape} does not match M={M}")
        if not np.all(np.isfinite(e)):
            raise ConfigError("far-field matrix contains non-finite entries")
        object.__setattr__(self, "entries", e)


@dataclass(frozen=True)
class CauchyDataSet:
    """Scattered field and its normal derivative on the measurement circle."""

    us: np.ndarray
    dus: np.ndarray
    r0: float
    k: float
    directions: DirectionSet
    provenance: str = "series"
    noise: NoiseDescriptor | None = None

    def __post_init__(self):
        us = np.asarray(self.us, dtype=complex)
        dus = np.asarray(self.dus, dtype=complex)
        M = self.directions.M
        if us.shape != (M, M) or dus.shape != (M, M):
            raise ConfigError(
                f"Cauchy matrices {us.shape}/{dus.shape} do not match M={M}")
        if self.r0 <= 0:
            raise ConfigError(f"measurement radius must be positive, got {self.r0}")
        if not (np.all(np.isfinite(us)) and np.all(np.isfinite(dus))):
            raise ConfigError("Cauchy data contains non-finite entries")
        object.__setattr__(self, "us", us)
        object.__setattr__(self, "dus", dus)


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------
def _noise_matrix(shape, rng: np.random.Generator) -> np.ndarray:
    draws = rng.uniform(-1.0, 1.0, size=shape + (2,))
    E = draws[..., 0] + 1j * draws[..., 1]
    return E / np.linalg.norm(E, 2)


def add_noise(matrix: np.ndarray, delta: float, seed: int) -> np.ndarray:
    """Multiplicative noise X*(1 + delta*E) with ||E||_2 = 1; delta=0 is identity."""
    if not (0.0 <= delta < 1.0):
        raise ConfigError(f"noise level must lie in [0, 1), got {delta}")
    matrix = np.asarray(matrix, dtype=complex)
    if delta == 0.0:
        return matrix.copy()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    E = _noise_matrix(matrix.shape, rng)
    return matrix * (1.0 + delta * E)


def perturb_farfield(ff: FarFieldMatrix, delta: float, seed: int) -> FarFieldMatrix:
    noisy = add_noise(ff.entries, delta, seed)
    return replace(ff, entries=noisy, noise=NoiseDescriptor(delta, seed))


def perturb_cauchy(data: CauchyDataSet, delta: float, seed: int) -> CauchyDataSet:
    """Perturb us and dus with independent sub-streams of the same seed."""
    if not (0.0 <= delta < 1.0):
        raise ConfigError(f"noise level must lie in [0, 1), got {delta}")
    if delta == 0.0:
        return replace(data, noise=NoiseDescriptor(delta, seed))
    child_us, child_dus = np.random.SeedSequence(seed).spawn(2)
    E1 = _noise_matrix(data.us.shape, np.random.Generator(np.random.PCG64(child_us)))
    E2 = _noise_matrix(data.dus.shape, np.random.Generator(np.random.PCG64(child_dus)))
    return replace(data,
                   us=data.us * (1.0 + delta * E1),
                   dus=data.dus * (1.0 + delta * E2),
                   noise=NoiseDescriptor(delta, seed))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------
def _write_matrix(fh, name: str, m: np.ndarray) -> None:
    fh.write(f"matrix {name} {m.shape[0]} {m.shape[1]}\n")
    for row in m:
        fh.write(" ".join(f"{v.real:.17g} {v.imag:.17g}" for v in row))
        fh.write("\n")


def _header_lines(kind, k, M, provenance, noise, extra=()):
    lines = [f"{FORMAT_MAGIC} {FORMAT_VERSION}", f"kind {kind}", f"k {k:.17g}",
             f"M {M}", f"provenance {provenance}"]
    lines.extend(extra)
    if noise is not None:
        lines.append(f"delta {noise.delta:.17g}")
        lines.append(f"seed {noise.seed}")
    return lines


def save(data, path: str) -> None:
    """Write a FarFieldMatrix or CauchyDataSet to a text container."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        if isinstance(data, FarFieldMatrix):
            for line in _header_lines("farfield", data.k, data.directions.M,
                                      data.provenance, data.noise):
                fh.write(line + "\n")
            _write_matrix(fh, "F", data.entries)
        elif isinstance(data, CauchyDataSet):
            for line in _header_lines("cauchy", data.k, data.directions.M,
                                      data.provenance, data.noise,
                                      extra=(f"r0 {data.r0:.17g}",)):
                fh.write(line + "\n")
            _write_matrix(fh, "us", data.us)
            _write_matrix(fh, "dus", data.dus)
        else:
            raise ConfigError(f"cannot serialize {type(data).__name__}")


def _parse_matrix(lines, idx, expect_m):
    parts = lines[idx].split()
    if len(parts) != 4 or parts[0] != "matrix":
        raise DataFormatError(f"expected matrix header at line {idx + 1}: {lines[idx]!r}")
    name, rows, cols = parts[1], int(parts[2]), int(parts[3])
    if rows != expect_m or cols != expect_m:
        raise DataFormatError(
            f"matrix {name} is {rows}x{cols} but header says M={expect_m}")
    out = np.empty((rows, cols), dtype=complex)
    for r in range(rows):
        vals = np.fromstring(lines[idx + 1 + r], dtype=float, sep=" ")
        if vals.size != 2 * cols:
            raise DataFormatError(
                f"matrix {name} row {r} has {vals.size} numbers, expected {2 * cols}")
        out[r] = vals[0::2] + 1j * vals[1::2]
    return name, out, idx + 1 + rows


def load(path: str):
    """Load a data file written by save(); returns the matching dataclass."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or not lines[0].startswith(FORMAT_MAGIC):
        raise DataFormatError(f"{path}: not a {FORMAT_MAGIC} file")
    header: dict[str, str] = {}
    idx = 1
    while idx < len(lines) and not lines[idx].startswith("matrix "):
        key, _, value = lines[idx].partition(" ")
        header[key] = value
        idx += 1
    try:
        kind = header["kind"]
        k = float(header["k"])
        M = int(header["M"])
        provenance = header.get("provenance", "series")
    except (KeyError, ValueError) as exc:
        raise DataFormatError(f"{path}: bad header ({exc})") from exc
    noise = None
    if "delta" in header:
        noise = NoiseDescriptor(float(header["delta"]), int(header["seed"]))
    dirs = DirectionSet(M)
    try:
        if kind == "farfield":
            name, F, idx = _parse_matrix(lines, idx, M)
            return FarFieldMatrix(F, k, dirs, provenance, noise)
        if kind == "cauchy":
            r0 = float(header["r0"])
            matrices = {}
            for _ in range(2):
                name, m, idx = _parse_matrix(lines, idx, M)
                matrices[name] = m
            return CauchyDataSet(matrices["us"], matrices["dus"], r0, k,
                                 dirs, provenance, noise)
    except (IndexError, KeyError, ValueError) as exc:
        raise DataFormatError(f"{path}: truncated or malformed ({exc})") from exc
    raise DataFormatError(f"{path}: unknown kind {kind!r}")
