"""Command-line surface: synthesize data, add noise, image, convergence tables.

Commands
--------
synth        forward-solve a configuration and write far-field / Cauchy files
noise        apply the multiplicative noise model to a data file
image        sweep an imaging functional, write map.txt / map.pgm / map.png
convergence  collocation-vs-series error table for the disk, with a figure

Complex flag values are "re" or "re,im" pairs; the anisotropy matrix is a
row-major "a11,a12,a21,a22" list. Defaults mirror the reference setups:
M=64 directions, measurement radius 3, truncation 15, sampling grid
[-2,2]^2 at 100x100, p=2 for far-field imaging and p=3 for reciprocity gap.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O
or data-format error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bie, disk, imaging, measurement
from .errors import (CondscatError, ConfigError, DataFormatError,
                     NumericalError)
from .geometry import (DirectionSet, SamplingGrid, distance_to_boundary,
                       make_curve, make_mesh)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're' or 're,im', got {text!r}")


def _parse_matrix(text: str) -> np.ndarray:
    vals = text.split(",")
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(
            f"expected 4 comma-separated entries a11,a12,a21,a22, got {text!r}")
    try:
        return np.array([float(v) for v in vals]).reshape(2, 2)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _parse_grid(text: str):
    vals = text.split(",")
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(
            f"expected xmin,xmax,ymin,ymax, got {text!r}")
    return tuple(float(v) for v in vals)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="condscat",
        description="2-D acoustic scattering synthesis and direct sampling reconstruction")
    sub = ap.add_subparsers(dest="command", required=True)

    sy = sub.add_parser("synth", help="synthesize far-field and Cauchy data")
    sy.add_argument("--solver", choices=("series", "bie"), required=True)
    sy.add_argument("--shape", choices=("circle", "kite", "peanut"), required=True)
    sy.add_argument("--radius", type=float, help="circle radius")
    sy.add_argument("--k", type=float, required=True, help="wavenumber")
    sy.add_argument("--a", type=_parse_complex, default=complex(1.0),
                    help="scalar anisotropy (A = a I); complex as re,im")
    sy.add_argument("--A", type=_parse_matrix, dest="amat", default=None,
                    help="full 2x2 anisotropy, row-major a11,a12,a21,a22 (bie only)")
    sy.add_argument("--n", type=_parse_complex, default=complex(1.0),
                    help="refractive index (series only; bie fixes n=1)")
    sy.add_argument("--eta", type=_parse_complex, default=complex(0.0),
                    help="boundary conductivity")
    sy.add_argument("--M", type=int, default=64, help="number of directions")
    sy.add_argument("--r0", type=float, default=3.0, help="measurement radius")
    sy.add_argument("--truncation", type=int, default=disk.DEFAULT_TRUNCATION,
                    help="series truncation order")
    sy.add_argument("--nf", type=int, default=80, help="collocation faces (bie)")
    sy.add_argument("--data", choices=("farfield", "cauchy", "both"), default="both")
    sy.add_argument("--out", required=True, help="output directory")

    no = sub.add_parser("noise", help="perturb a data file with multiplicative noise")
    no.add_argument("--in", dest="infile", required=True)
    no.add_argument("--delta", type=float, required=True, help="relative level in [0,1)")
    no.add_argument("--seed", type=int, required=True)
    no.add_argument("--out", required=True, help="output file")

    im = sub.add_parser("image", help="sweep an imaging functional over a grid")
    im.add_argument("--kind", choices=("ff", "rg"), required=True,
                    help="ff: far-field functional; rg: reciprocity gap")
    im.add_argument("--data", required=True, help="input data file")
    im.add_argument("--p", type=int, default=None,
                    help="sharpening exponent (default 2 for ff, 3 for rg)")
    im.add_argument("--grid", type=_parse_grid, default=(-2.0, 2.0, -2.0, 2.0),
                    help="xmin,xmax,ymin,ymax")
    im.add_argument("--res", type=int, default=100, help="points per axis")
    im.add_argument("--n-incident", type=int, default=None,
                    help="use only the first N incident directions (rg)")
    im.add_argument("--out", required=True, help="output directory")

    cv = sub.add_parser("convergence",
                        help="collocation-vs-series error table for a disk")
    cv.add_argument("--shape", choices=("circle",), default="circle")
    cv.add_argument("--radius", type=float, default=2.0)
    cv.add_argument("--a", type=float, default=3.0, help="scalar anisotropy (real)")
    cv.add_argument("--eta", type=_parse_complex, default=complex(1.0))
    cv.add_argument("--k", type=lambda s: [float(v) for v in s.split(",")],
                    default=[2.0, 4.0, 6.0], help="comma list of wavenumbers")
    cv.add_argument("--nf", type=lambda s: [int(v) for v in s.split(",")],
                    default=[10, 20, 40, 80, 160], help="comma list of face counts")
    cv.add_argument("--M", type=int, default=64)
    cv.add_argument("--r0", type=float, default=3.0)
    cv.add_argument("--truncation", type=int, default=None,
                    help="series reference truncation (default: adequate for max k)")
    cv.add_argument("--out", default=None, help="output directory (optional)")
    return ap


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_synth(args) -> int:
    dirs = DirectionSet(args.M)
    if args.solver == "series":
        if args.shape != "circle":
            raise ConfigError("the series solver supports circles only")
        if args.radius is None:
            raise ConfigError("--radius is required for circles")
        mat = disk.Material2D(args.k, args.a, args.n, args.eta, args.radius)
        ff, cauchy = disk.assemble_disk_data(mat, dirs, args.r0, args.truncation)
    else:
        if args.amat is not None:
            A = args.amat
        else:
            if args.a.imag != 0:
                raise ConfigError("the collocation solver needs a real SPD anisotropy")
            A = args.a.real * np.eye(2)
        if args.n != complex(1.0):
            raise ConfigError("the collocation solver fixes the refractive index to 1")
        curve = make_curve(args.shape, args.radius)
        mesh = make_mesh(curve, args.nf)
        mat = bie.BieMaterial(args.k, A, args.eta)
        ff, cauchy = bie.assemble_bie_data(mesh, mat, dirs, args.r0)
    os.makedirs(args.out, exist_ok=True)
    written = []
    if args.data in ("farfield", "both"):
        path = os.path.join(args.out, "farfield.txt")
        measurement.save(ff, path)
        written.append(path)
    if args.data in ("cauchy", "both"):
        path = os.path.join(args.out, "cauchy.txt")
        measurement.save(cauchy, path)
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_noise(args) -> int:
    data = measurement.load(args.infile)
    if isinstance(data, measurement.FarFieldMatrix):
        noisy = measurement.perturb_farfield(data, args.delta, args.seed)
    else:
        noisy = measurement.perturb_cauchy(data, args.delta, args.seed)
    measurement.save(noisy, args.out)
    print(f"wrote {args.out} (delta={args.delta}, seed={args.seed})")
    return EXIT_OK


def cmd_image(args) -> int:
    data = measurement.load(args.data)
    if args.kind == "ff" and not isinstance(data, measurement.FarFieldMatrix):
        raise ConfigError("far-field imaging needs a farfield data file")
    if args.kind == "rg" and not isinstance(data, measurement.CauchyDataSet):
        raise ConfigError("reciprocity-gap imaging needs a cauchy data file")
    p = args.p if args.p is not None else (2 if args.kind == "ff" else 3)
    grid = SamplingGrid(args.grid, args.res, args.res)
    imap = imaging.sweep(data, grid, p, kind=args.kind, n_incident=args.n_incident)
    os.makedirs(args.out, exist_ok=True)
    txt = os.path.join(args.out, "map.txt")
    pgm = os.path.join(args.out, "map.pgm")
    png = os.path.join(args.out, "map.png")
    imaging.write_text_grid(imap, txt)
    imaging.write_pgm(imap, pgm)
    _render_map_figure(imap, png)
    am = imap.argmax_point()
    hm = imap.half_max_points()
    print(f"wrote {txt}, {pgm}, {png}")
    print(f"argmax at ({am[0]:.4f}, {am[1]:.4f})")
    print(f"half-max bounding box x in [{hm[:, 0].min():.4f}, {hm[:, 0].max():.4f}], "
          f"y in [{hm[:, 1].min():.4f}, {hm[:, 1].max():.4f}]")
    return EXIT_OK


def cmd_convergence(args) -> int:
    if args.shape != "circle":
        raise ConfigError("convergence tables need the series reference (circle only)")
    dirs = DirectionSet(args.M)
    curve = make_curve("circle", args.radius)
    # reference truncation adequate for the largest kR (the fixed default 15
    # under-resolves kR > 8)
    trunc = args.truncation
    if trunc is None:
        kr = max(args.k) * args.radius
        trunc = max(disk.DEFAULT_TRUNCATION, int(np.ceil(kr)) + 12)
    refs = {}
    for k in args.k:
        mat = disk.Material2D(k, args.a, 1.0, args.eta, args.radius)
        refs[k] = disk.assemble_disk_data(mat, dirs, args.r0, trunc)
    rows = []
    for nf in args.nf:
        mesh = make_mesh(curve, nf)
        row = {"nf": nf}
        for k in args.k:
            mat = bie.BieMaterial(k, args.a * np.eye(2), args.eta)
            ff, cauchy = bie.assemble_bie_data(mesh, mat, dirs, args.r0)
            ff_ref, cauchy_ref = refs[k]
            row[k] = (np.linalg.norm(ff_ref.entries - ff.entries, 2),
                      np.linalg.norm(cauchy_ref.us - cauchy.us, 2),
                      np.linalg.norm(cauchy_ref.dus - cauchy.dus, 2))
        rows.append(row)

    header = "nf (nodes) | " + " | ".join(
        f"k={k:g}: eps_ff eps_us eps_dus" for k in args.k)
    lines = [header, "-" * len(header)]
    for row in rows:
        cells = [f"{row['nf']:4d} ({3 * row['nf']:4d})"]
        for k in args.k:
            e = row[k]
            cells.append(f"{e[0]:.5f} {e[1]:.5f} {e[2]:.5f}")
        lines.append(" | ".join(cells))
    table = "\n".join(lines)
    print(table)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        tab_path = os.path.join(args.out, "convergence.txt")
        with open(tab_path, "w") as fh:
            fh.write(table + "\n")
        fig_path = os.path.join(args.out, "convergence.png")
        _render_convergence_figure(rows, args.k, fig_path)
        print(f"wrote {tab_path}, {fig_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------
def _render_map_figure(imap: imaging.ImagingMap, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    v = imap.values.reshape(imap.grid.ny, imap.grid.nx)
    m = v.max()
    if m > 0:
        v = v / m
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    pc = ax.pcolormesh(imap.grid.xs, imap.grid.ys, v, shading="auto", cmap="viridis")
    fig.colorbar(pc, ax=ax)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title(f"{imap.kind} functional, p={imap.exponent}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_convergence_figure(rows, k_values, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    nfs = [row["nf"] for row in rows]
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    for k in k_values:
        ax.loglog(nfs, [row[k][0] for row in rows], "o-", label=f"k={k:g}")
    ax.set_xlabel("faces")
    ax.set_ylabel("far-field error (spectral norm)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------
def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "synth": cmd_synth,
        "noise": cmd_noise,
        "image": cmd_image,
        "convergence": cmd_convergence,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataFormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CondscatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
