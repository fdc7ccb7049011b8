"""Command-line front end: ``lsfft solve|series|ratemap|micro``.

CSV output uses ``%.16e`` for reals (17 significant digits), ``\\n`` line
endings and a header row, so runs are reproducible byte for byte.

Exit codes: 0 success, 2 bad flags, 3 numerical divergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

import numpy as np

from .diagnostics import DEFAULT_KNEE_THRESHOLD, knee_detect
from .greens import GreenVariant
from .microstructure import KINDS, Microstructure, RasterError, generate, load_pgm, save_pgm
from .ratemap import best_scheme_grid
from .schemes import CRITERIA, SchemeDomainError, solve
from .series import analytic_obnosov, numerical_coefficients

EXIT_OK, EXIT_USAGE, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("lsfft")


class UsageError(Exception):
    pass


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return "%.16e" % float(value)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)] + [",".join(fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def _micro(name: str, n: int | None) -> Microstructure:
    if name.startswith("file:"):
        m = load_pgm(name[5:])
        if n is not None and m.grid.shape != (n, n):
            raise UsageError(f"--n {n} does not match the {m.grid.n1}x{m.grid.n2} raster")
        return m
    if n is None:
        raise UsageError("--n is required for generated microstructures")
    try:
        return generate(name, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _scheme_flag(value: str) -> str:
    value = value.lower()
    if value not in ("b", "ms", "em", "em-pol"):
        raise argparse.ArgumentTypeError(f"invalid scheme {value!r} (choose b, ms, em, em-pol)")
    return value


def _micro_flag(value: str) -> str:
    if value.startswith("file:") or value.replace("-", "_") in KINDS:
        return value
    raise argparse.ArgumentTypeError(
        f"invalid microstructure {value!r} (choose obnosov, checkerboard, four-disks or file:PATH)")


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lsfft", description="FFT-based Lippmann-Schwinger schemes "
                                "for two-phase conductivity.")
    verbose = argparse.ArgumentParser(add_help=False)
    verbose.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, scheme=True):
        sp.add_argument("--micro", type=_micro_flag, required=True)
        sp.add_argument("--n", type=_positive_int)
        if scheme:
            sp.add_argument("--scheme", type=_scheme_flag, required=True)
        sp.add_argument("--green", choices=[v.value for v in GreenVariant], default="continuous")
        sp.add_argument("--out", default=None, help="CSV path (default: stdout)")
        sp.add_argument("--plot", default=None, metavar="PNG", help="also render a figure")

    s = sub.add_parser("solve", parents=[verbose], help="iterate one scheme, one row per iteration")
    common(s)
    s.add_argument("--z", type=float, required=True)
    s.add_argument("--criterion", choices=sorted(CRITERIA), default="div")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=_positive_int, default=1000)

    s = sub.add_parser("series", parents=[verbose], help="extract the coefficients b_k, d_k")
    common(s)
    s.add_argument("--k", type=_positive_int, required=True)
    s.add_argument("--compare-analytic", action="store_true",
                   help="add the exact coefficients (obnosov cell only)")
    s.add_argument("--knee-against", type=_positive_int, metavar="N",
                   help="append the knee against an N x N extraction")
    s.add_argument("--knee-threshold", type=float, default=DEFAULT_KNEE_THRESHOLD)

    s = sub.add_parser("ratemap", parents=[verbose], help="theoretical rates on a (beta, z) grid")
    for flag in ("--beta-min", "--beta-max", "--z-min", "--z-max"):
        s.add_argument(flag, type=float, required=True)
    s.add_argument("--grid", type=_positive_int, required=True)
    s.add_argument("--out", default=None)
    s.add_argument("--plot", default=None, metavar="PNG")

    s = sub.add_parser("micro", parents=[verbose], help="write a reference microstructure as PGM")
    s.add_argument("--kind", required=True, type=_micro_flag)
    s.add_argument("--n", type=_positive_int, required=True)
    s.add_argument("--out", required=True)
    return p


def cmd_solve(args) -> int:
    micro = _micro(args.micro, args.n)
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    polarization = args.scheme == "em-pol"
    report = solve(args.scheme, micro, args.z, args.green, args.criterion, args.tol,
                   args.max_iter, polarization=polarization)
    rows = [(r.k, r.delta1, r.delta2, r.coef_indicator, r.z_eff) for r in report.rows]
    write_csv(args.out, ("k", "delta1", "delta2", "coef_indicator", "z_eff"), rows)
    if args.plot:
        from .plotting import plot_solve
        plot_solve(report, args.plot)
    log.info("%s after %d iterations, z_eff = %.10g", report.status, report.iterations, report.z_eff)
    return EXIT_DIVERGED if report.status == "diverged" else EXIT_OK


def cmd_series(args) -> int:
    micro = _micro(args.micro, args.n)
    num = numerical_coefficients(args.scheme, micro, args.green, args.k)
    header = ["k", "b_num", "d_num"]
    columns = [range(args.k + 1), num.b, num.d]
    exact = None
    if args.compare_analytic:
        if args.micro.startswith("file:") or args.micro != "obnosov":
            raise UsageError("--compare-analytic needs --micro obnosov")
        exact = analytic_obnosov(args.scheme, args.k)
        d_exact = exact.d_array()
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.abs(num.d_array() - d_exact) / np.abs(d_exact)
        header += ["b_exact", "d_exact", "rel_dev"]
        columns += [exact.b_array(), d_exact, rel]
    rows = [list(r) for r in zip(*columns)]
    if args.knee_against:
        fine = numerical_coefficients(args.scheme, _micro(args.micro, args.knee_against),
                                      args.green, args.k)
        coarse, fine = (num, fine) if num.grid_n < fine.grid_n else (fine, num)
        knee = knee_detect(coarse, fine, args.knee_threshold)
        rows.append(["knee", knee.K] + ["nan"] * (len(header) - 2))
    write_csv(args.out, header, rows)
    if not np.all(np.isfinite(num.d_array())):
        return EXIT_DIVERGED
    if args.plot:
        from .plotting import plot_series
        plot_series(num, args.plot, exact)
    return EXIT_OK


def cmd_ratemap(args) -> int:
    if args.grid < 2 and (args.beta_min != args.beta_max or args.z_min != args.z_max):
        raise UsageError("--grid must be >= 2 for a non-degenerate range")
    if args.beta_min < 1 or args.beta_max < args.beta_min or args.z_max < args.z_min:
        raise UsageError("need 1 <= beta-min <= beta-max and z-min <= z-max")
    betas = np.linspace(args.beta_min, args.beta_max, args.grid)
    zs = np.linspace(args.z_min, args.z_max, args.grid)
    labels, r = best_scheme_grid(betas, zs)
    rows = [(betas[i], zs[j], r[0, i, j], r[1, i, j], r[2, i, j], labels[i, j])
            for i in range(betas.size) for j in range(zs.size)]
    write_csv(args.out, ("beta", "z", "r_b", "r_ms", "r_em", "winner"), rows)
    if args.plot:
        from .plotting import plot_ratemap
        plot_ratemap(labels, betas, zs, args.plot)
    return EXIT_OK


def cmd_micro(args) -> int:
    if args.kind.startswith("file:"):
        raise UsageError("--kind must name a generated microstructure")
    save_pgm(_micro(args.kind, args.n), args.out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "series": cmd_series, "ratemap": cmd_ratemap, "micro": cmd_micro}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.verb](args)
    except (UsageError, SchemeDomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"lsfft: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, RasterError) as exc:
        print(f"lsfft: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    with contextlib.suppress(BrokenPipeError):
        sys.exit(run())
