"""Command-line front end: ``hlo-denoise {add-noise,denoise,metrics}``.

Exit codes: 0 on success, 2 for usage errors and bad input, 1 for runtime
failures. Errors are printed to stderr as a single ``error: ...`` line.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from . import __version__
from .errors import MeshError, PreconditionError
from .fileio import ScalarField, read_mesh, write_mesh, write_scalar_field
from .hlo import EnergyMode, HloConfig, denoise
from .laplacian import FlowConfig, smooth
from .mesh import mean_edge_length
from .metrics import (
    NoiseDirection,
    NoiseSpec,
    avg_vertex_error,
    add_noise,
    enclosed_volume,
    evaluate,
    mean_curvature_energy,
    noise_sigma,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {value}")
    return value


def _nonneg_float(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _seed(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def build_parser():
    parser = _Parser(prog="hlo-denoise", description="Half-kernel Laplacian mesh denoising.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=_positive_int, default=None,
                        help="cap numba's internal thread count")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("add-noise", help="add Gaussian noise scaled by the mean edge length")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--sigma", type=_nonneg_float, required=True,
                   help="noise std as a multiple of the mean edge length")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--direction", choices=[d.value for d in NoiseDirection],
                   default=NoiseDirection.ISOTROPIC.value)

    p = sub.add_parser("denoise", help="smooth a mesh")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--iterations", type=_positive_int, required=True)
    p.add_argument("--method", choices=["hlo", "uniform", "cotangent"], default="hlo")
    p.add_argument("--step", type=_positive_float, default=1.0, help="lambda * dt (default 1)")
    p.add_argument("--energy-mode", choices=[m.value for m in EnergyMode],
                   default=EnergyMode.LITERAL.value)
    p.add_argument("--fix-boundaries", dest="fix_boundaries", action="store_true", default=True)
    p.add_argument("--free-boundaries", dest="fix_boundaries", action="store_false")
    p.add_argument("--random-ties", action="store_true",
                   help="break partner ties randomly (seeded) instead of by lowest index")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--emit-trace", metavar="CSV", default=None,
                   help="write per-iteration diagnostics to CSV")
    p.add_argument("--backend", choices=["numba", "numpy"], default=None)

    p = sub.add_parser("metrics", help="compare a denoised mesh with ground truth")
    p.add_argument("denoised")
    p.add_argument("ground_truth")
    p.add_argument("-o", "--output", default=None, help="write the report as CSV")
    p.add_argument("--signed-error", metavar="CSV", default=None,
                   help="write the signed per-vertex error field")
    p.add_argument("--runtime", type=_nonneg_float, default=0.0,
                   help="runtime (s) to record in the report")
    p.add_argument("--text", action="store_true",
                   help="print a human-readable report instead of CSV")
    return parser


def cmd_add_noise(args):
    mesh = read_mesh(args.input)
    spec = NoiseSpec(args.sigma, args.seed, args.direction)
    noisy = add_noise(mesh, spec)
    write_mesh(noisy, args.output)
    le = mean_edge_length(mesh)
    print(f"l_e = {le:.9g}")
    print(f"sigma_n = {noise_sigma(mesh, spec):.9g} ({args.sigma:g} * l_e)")
    print(f"seed = {args.seed}")
    return 0


def cmd_denoise(args):
    mesh = read_mesh(args.input)
    rows = []
    state = {"prev": mesh.positions, "hook_seconds": 0.0}

    def record(t, positions):
        tic = time.perf_counter()
        disp = np.linalg.norm(positions - state["prev"], axis=1)
        state["prev"] = positions
        # applied delta = displacement / step (zero on fixed vertices)
        rows.append([t, disp.mean(), disp.sum() / args.step,
                     mean_curvature_energy(mesh, positions)])
        state["hook_seconds"] += time.perf_counter() - tic

    hook = record if args.emit_trace else None
    start = time.perf_counter()
    if args.method == "hlo":
        cfg = HloConfig(
            iterations=args.iterations, step=args.step, fix_boundaries=args.fix_boundaries,
            energy_mode=args.energy_mode, random_ties=args.random_ties, rng_seed=args.seed,
        )
        out, _ = denoise(mesh, cfg, on_iteration=hook, backend=args.backend)
    else:
        cfg = FlowConfig(step=args.step, iterations=args.iterations,
                         fix_boundaries=args.fix_boundaries)
        out = smooth(mesh, args.method, cfg, on_iteration=hook)
    # algorithm time only: trace bookkeeping and file I/O are excluded
    elapsed = time.perf_counter() - start - state["hook_seconds"]

    write_mesh(out, args.output)
    if args.emit_trace:
        _write_trace(args.emit_trace, rows)
    print(f"method = {args.method}")
    print(f"iterations = {args.iterations}")
    print(f"runtime_seconds = {elapsed:.6f}")
    if out.is_closed:
        print(f"volume_before = {enclosed_volume(mesh):.9g}")
        print(f"volume_after = {enclosed_volume(out):.9g}")
    return 0


def _write_trace(path, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "avg_displacement", "total_delta_norm",
                        "mean_curvature_energy"])
            for row in rows:
                w.writerow([row[0]] + [repr(float(x)) for x in row[1:]])
    except OSError as exc:
        from .errors import IoError
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from exc


def cmd_metrics(args):
    denoised = read_mesh(args.denoised)
    gt = read_mesh(args.ground_truth)
    report = evaluate(denoised, gt, runtime_seconds=args.runtime)
    print(report if args.text else report.to_csv().rstrip("\n"))
    if args.output:
        try:
            with open(args.output, "w", newline="") as fh:
                fh.write(report.to_csv())
        except OSError as exc:
            from .errors import IoError
            raise IoError(f"cannot write {args.output}: {exc.strerror or exc}") from exc
    if args.signed_error:
        _, signed = avg_vertex_error(denoised, gt)
        write_scalar_field(ScalarField("vertex", signed, "signed_vertex_error"),
                           args.signed_error, denoised)
    return 0


COMMANDS = {"add-noise": cmd_add_noise, "denoise": cmd_denoise, "metrics": cmd_metrics}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.threads is not None:
            try:
                import numba
                numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
            except ImportError:
                pass
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except MeshError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
