"""Command-line front end.

Exit status is 0 on success, 1 when a verification or bound check fails and
2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import sys

from threadpoolctl import threadpool_limits

from .io import dumps, load_json
from .lattice import LatticeBox, Signal, TorusGrid, torus_function_from_dict
from .localization import loc_apply, loc_bilinear, loc_kernel, symbol_from_dict
from .spectral import bounds_report, operator_box, schatten_norm, singular_values
from .stft import stft
from .structured import (
    apply_multiplier,
    lps_compare,
    multiplier_symbol,
    paracommutator_kernel,
    paraproduct,
)
from .verify import ConfigError, run_verify_suite

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _signal(path: str) -> Signal:
    return Signal.from_dict(load_json(path))


def _grid(args, dim: int) -> TorusGrid | None:
    return TorusGrid(dim, args.Q) if args.Q is not None else None


def _box(dim: int, radius: int | None) -> LatticeBox | None:
    return None if radius is None else LatticeBox(dim, radius)


def _write(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_stft(args) -> int:
    f, g = _signal(args.signal), _signal(args.window)
    field = stft(f, g, _box(f.dim, args.m_radius), _grid(args, f.dim))
    _write(args, field.to_csv() if args.format == "csv" else dumps(field.to_dict()))
    return EXIT_OK


def cmd_spectrogram(args) -> int:
    f, g = _signal(args.signal), _signal(args.window)
    field = stft(f, g, _box(f.dim, args.m_radius), _grid(args, f.dim))
    _write(args, field.to_csv(magnitude=True))
    return EXIT_OK


def _locop_inputs(args):
    return symbol_from_dict(load_json(args.symbol)), _signal(args.g1), _signal(args.g2)


def cmd_locop_apply(args) -> int:
    sym, g1, g2 = _locop_inputs(args)
    f = _signal(args.signal)
    out = loc_apply(sym, g1, g2, f, _grid(args, f.dim), _box(f.dim, args.out_radius))
    _write(args, dumps(out.to_dict()))
    return EXIT_OK


def cmd_locop_kernel(args) -> int:
    sym, g1, g2 = _locop_inputs(args)
    K = loc_kernel(sym, g1, g2, _box(sym.dim, args.out_radius), _box(sym.dim, args.in_radius))
    _write(args, K.to_csv() if args.format == "csv" else dumps(K.to_dict()))
    return EXIT_OK


def cmd_locop_bilinear(args) -> int:
    sym, g1, g2 = _locop_inputs(args)
    f, h = _signal(args.signal), _signal(args.test)
    val = loc_bilinear(sym, g1, g2, f, h, _grid(args, f.dim))
    _write(args, dumps({"re": val.real, "im": val.imag}))
    return EXIT_OK


def cmd_locop_svd(args) -> int:
    sym, g1, g2 = _locop_inputs(args)
    box = operator_box(sym, g1, g2, radius=args.radius)
    spec = singular_values(loc_kernel(sym, g1, g2, box, box))
    norms = {label: schatten_norm(spec, p) for label, p in (("1", 1), ("2", 2), ("inf", "inf"))}
    _write(args, dumps({"box": box.to_dict(), **spec.to_dict(), "schatten": norms}))
    return EXIT_OK


def cmd_locop_bounds(args) -> int:
    sym, g1, g2 = _locop_inputs(args)
    report = bounds_report(sym, g1, g2, _grid(args, sym.dim), args.radius, not args.no_monitored)
    _write(args, dumps(report.to_dict()))
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_lps_compare(args) -> int:
    cmp = lps_compare(args.T, args.omega, _grid(args, args.n), args.n)
    _write(args, dumps(cmp.to_dict()))
    return EXIT_OK


def cmd_para_kernel(args) -> int:
    g1, g2 = _signal(args.g1), _signal(args.g2)
    beta = torus_function_from_dict(load_json(args.beta))
    A = paracommutator_kernel(beta, g1, g2, _grid(args, g1.dim))
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["xi", "eta", "re", "im"])
        for i, row in enumerate(A.values):
            for j, v in enumerate(row):
                writer.writerow([i, j, f"{v.real:.17g}", f"{v.imag:.17g}"])
        _write(args, buf.getvalue())
    else:
        _write(args, dumps(A.to_dict()))
    return EXIT_OK


def cmd_para_product(args) -> int:
    g1, g2, f, h = (_signal(p) for p in (args.g1, args.g2, args.signal, args.test))
    _write(args, dumps(paraproduct(g1, g2, f, h, _grid(args, f.dim)).to_dict()))
    return EXIT_OK


def cmd_multiplier(args) -> int:
    g1, g2 = _signal(args.g1), _signal(args.g2)
    beta = torus_function_from_dict(load_json(args.beta))
    mu = multiplier_symbol(beta, g1, g2, _grid(args, g1.dim))
    out = {"mu": mu.to_dict()}
    if args.apply:
        f = _signal(args.apply)
        out["applied"] = apply_multiplier(mu, f, _box(f.dim, args.out_radius)).to_dict()
    _write(args, dumps(out))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        report = run_verify_suite(args.seed, args.n, args.N, args.Q, args.instances)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    _write(args, dumps(report.to_dict(timing=args.timing)))
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def _common(p: argparse.ArgumentParser, grid: bool = True) -> None:
    p.add_argument("-o", "--output", default="-", help="output file (default: standard output)")
    if grid:
        p.add_argument("--Q", type=int, default=None,
                       help="torus grid points per axis (default 2(2N+1) from the input radii)")


def _locop_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--symbol", required=True, help="symbol JSON file or - for standard input")
    p.add_argument("--g1", required=True, help="analysis window JSON")
    p.add_argument("--g2", required=True, help="synthesis window JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticeloc",
        description="Time-frequency localization operators on Z^n.",
    )
    parser.add_argument("--threads", type=int, default=None,
                        help="thread cap for the linear algebra backend (default: library default)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stft", help="short-time Fourier transform of a signal")
    p.add_argument("--signal", required=True, help="signal JSON file or -")
    p.add_argument("--window", required=True, help="window JSON file or -")
    p.add_argument("--m-radius", type=int, default=None, help="lag box radius (default N_f + N_g)")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    _common(p)
    p.set_defaults(func=cmd_stft)

    p = sub.add_parser("spectrogram", help="CSV of |V_g f| over lags and grid nodes")
    p.add_argument("--signal", required=True, help="signal JSON file or -")
    p.add_argument("--window", required=True, help="window JSON file or -")
    p.add_argument("--m-radius", type=int, default=None, help="lag box radius (default N_f + N_g)")
    _common(p)
    p.set_defaults(func=cmd_spectrogram)

    locop = sub.add_parser("locop", help="localization operator computations")
    lsub = locop.add_subparsers(dest="action", required=True)

    p = lsub.add_parser("apply", help="apply the operator to a signal (synthesis form)")
    _locop_common(p)
    p.add_argument("--signal", required=True, help="input signal JSON")
    p.add_argument("--out-radius", type=int, default=None, help="output box radius")
    _common(p)
    p.set_defaults(func=cmd_locop_apply)

    p = lsub.add_parser("kernel", help="kernel matrix of the operator")
    _locop_common(p)
    p.add_argument("--out-radius", type=int, default=None, help="output box radius")
    p.add_argument("--in-radius", type=int, default=None, help="input box radius")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    _common(p, grid=False)
    p.set_defaults(func=cmd_locop_kernel)

    p = lsub.add_parser("bilinear", help="weak form <L f, h>")
    _locop_common(p)
    p.add_argument("--signal", required=True, help="signal f JSON")
    p.add_argument("--test", required=True, help="test signal h JSON")
    _common(p)
    p.set_defaults(func=cmd_locop_bilinear)

    p = lsub.add_parser("svd", help="singular values and Schatten norms")
    _locop_common(p)
    p.add_argument("--radius", type=int, default=None, help="operator box radius")
    _common(p, grid=False)
    p.set_defaults(func=cmd_locop_svd)

    p = lsub.add_parser("bounds", help="norm-bound report (exit 1 if an asserted bound fails)")
    _locop_common(p)
    p.add_argument("--radius", type=int, default=None, help="operator box radius")
    p.add_argument("--no-monitored", action="store_true", help="skip modulation-norm checks")
    _common(p)
    p.set_defaults(func=cmd_locop_bounds)

    lps = sub.add_parser("lps", help="Landau-Pollak-Slepian comparison")
    psub = lps.add_subparsers(dest="action", required=True)
    p = psub.add_parser("compare", help="compare the band-region operator with Q_2T P_Omega Q_2T")
    p.add_argument("--T", type=int, required=True, help="time radius T >= 0")
    p.add_argument("--omega", type=float, required=True, help="band limit in (0, 1/2]")
    p.add_argument("--n", type=int, default=1, help="dimension (default 1)")
    _common(p)
    p.set_defaults(func=cmd_lps_compare)

    para = sub.add_parser("para", help="paracommutator kernel and paraproduct")
    asub = para.add_subparsers(dest="action", required=True)
    p = asub.add_parser("kernel", help="Fourier kernel A(xi, eta) on the grid")
    p.add_argument("--beta", required=True, help="torus function JSON (grid samples or band)")
    p.add_argument("--g1", required=True, help="window g1 JSON")
    p.add_argument("--g2", required=True, help="window g2 JSON")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    _common(p)
    p.set_defaults(func=cmd_para_kernel)

    p = asub.add_parser("product", help="paraproduct p(f, h)")
    p.add_argument("--g1", required=True, help="window g1 JSON")
    p.add_argument("--g2", required=True, help="window g2 JSON")
    p.add_argument("--signal", required=True, help="signal f JSON")
    p.add_argument("--test", required=True, help="signal h JSON")
    _common(p)
    p.set_defaults(func=cmd_para_product)

    p = sub.add_parser("multiplier", help="Fourier multiplier symbol mu")
    p.add_argument("--beta", required=True, help="torus function JSON (grid samples or band)")
    p.add_argument("--g1", required=True, help="window g1 JSON")
    p.add_argument("--g2", required=True, help="window g2 JSON")
    p.add_argument("--apply", default=None, help="optional signal JSON to apply the multiplier to")
    p.add_argument("--out-radius", type=int, default=None, help="output box radius for --apply")
    _common(p)
    p.set_defaults(func=cmd_multiplier)

    p = sub.add_parser("verify", help="seeded verification suite")
    p.add_argument("--seed", type=int, default=1, help="global seed (default 1)")
    p.add_argument("--n", type=int, default=1, help="dimension (default 1)")
    p.add_argument("--N", type=int, default=2, help="signal and window radius (default 2)")
    p.add_argument("--Q", type=int, default=None, help="grid size, at least 2(2N+1) (default 2(2N+1))")
    p.add_argument("--instances", type=int, default=3, help="random instances per check (default 3)")
    p.add_argument("--timing", action="store_true", help="include per-check wall time")
    p.add_argument("-o", "--output", default="-", help="output file (default: standard output)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be positive")
    limits = threadpool_limits(limits=args.threads) if args.threads else contextlib.nullcontext()
    try:
        with limits:
            return args.func(args)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"latticeloc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
