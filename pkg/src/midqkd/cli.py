"""Command-line front end.

Exit codes: 0 success, 1 bad arguments or failed verification, 2 numerical
failure (unphysical state, non-monotone rate during bisection).
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Iterable, Optional, Sequence, TextIO

from .channel import ChannelParams
from .errors import InvalidArgument, NumericalFailure
from .keyrate import KeyRateBreakdown, Measurement, ProtocolSpec, Reconciliation, StatePrep, key_rate
from .oracle import Axis, SweepGrid, generic_key_rate, sweep, threshold_transmission

CSV_HEADER = ("protocol", "recon", "V", "T1", "T2", "W1", "W2", "T_eff", "method",
              "i_ab", "s_e", "s_e_cond", "holevo", "key_rate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def format_float(x: float) -> str:
    """Locale-independent decimal with at most 12 significant digits."""
    x = float(x)
    if x == 0.0:
        return "0"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def row_values(spec: ProtocolSpec, p: ChannelParams, method: str, k: KeyRateBreakdown,
               floor_zero: bool = False) -> list[str]:
    rate = max(k.key_rate, 0.0) if floor_zero else k.key_rate
    nums = (p.V, p.T1, p.T2, p.W1, p.W2, p.T_eff)
    terms = (k.i_ab, k.s_e, k.s_e_cond, k.holevo, rate)
    return ([spec.name, spec.recon_label] + [format_float(v) for v in nums] + [method]
            + [format_float(v) for v in terms])


def emit_csv(rows: Iterable[Sequence[str]], header: Sequence[str] = CSV_HEADER) -> str:
    lines = [",".join(header)] + [",".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def emit_text(rows: Iterable[Sequence[str]], header: Sequence[str] = CSV_HEADER) -> str:
    table = [list(header)] + [list(r) for r in rows]
    widths = [max(len(r[j]) for r in table) for j in range(len(header))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in table)


def _protocol_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", required=True, choices=["squeezed", "coherent"])
    p.add_argument("--meas", required=True, choices=["homodyne", "heterodyne", "hom", "het"])
    p.add_argument("--recon", required=True, choices=["direct", "reverse", "dr", "rr"])


def _noise_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--V", type=float, required=True, help="source variance (SNU)")
    p.add_argument("--W", type=float, default=1.0, help="cloner variance for both arms")
    p.add_argument("--W1", type=float, help="cloner variance, Alice's arm (overrides --W)")
    p.add_argument("--W2", type=float, help="cloner variance, Bob's arm (overrides --W)")


def _output_args(p: argparse.ArgumentParser, method: bool = True) -> None:
    if method:
        p.add_argument("--method", choices=["closed", "generic", "both"], default="closed")
    p.add_argument("--format", choices=["csv", "text"], default="csv")
    p.add_argument("--floor-zero", action="store_true", help="clamp negative key rates to 0")


def _axis_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--axis", required=True, choices=[a.value for a in Axis],
                   help="symmetric: T1=T2=sqrt(t); trusted: T1=1, T2=t; per-arm: T1=T2=t")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="midqkd", description="CV-QKD key rates with an untrusted source in the middle.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keyrate", help="key rate at a single channel point")
    _protocol_args(p)
    _noise_args(p)
    p.add_argument("--T1", type=float, required=True)
    p.add_argument("--T2", type=float, required=True)
    _output_args(p)

    p = sub.add_parser("sweep", help="key rate along a transmission axis")
    _protocol_args(p)
    _noise_args(p)
    _axis_arg(p)
    p.add_argument("--t-start", type=float, required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    _output_args(p)

    p = sub.add_parser("threshold", help="smallest transmission with a positive key rate")
    _protocol_args(p)
    _noise_args(p)
    _axis_arg(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--method", choices=["closed", "generic"], default="closed")
    p.add_argument("--format", choices=["csv", "text"], default="csv")

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("--seed", type=int, default=20111)
    p.add_argument("--samples", type=int, default=10**6)
    return parser


def _spec(args) -> ProtocolSpec:
    meas = {"homodyne": Measurement.Homodyne, "hom": Measurement.Homodyne,
            "heterodyne": Measurement.Heterodyne, "het": Measurement.Heterodyne}[args.meas]
    recon = Reconciliation.Direct if args.recon in ("direct", "dr") else Reconciliation.Reverse
    return ProtocolSpec(StatePrep(args.state), meas, recon)


def _noise(args) -> tuple[float, float]:
    w1 = args.W if args.W1 is None else args.W1
    w2 = args.W if args.W2 is None else args.W2
    return w1, w2


def _methods(method: str) -> list[str]:
    return ["closed", "generic"] if method == "both" else [method]


def _evaluate(spec, p, method):
    return key_rate(spec, p) if method == "closed" else generic_key_rate(spec, p)


def _write_table(rows, fmt: str, out: TextIO, header=CSV_HEADER) -> None:
    out.write(emit_csv(rows, header) if fmt == "csv" else emit_text(rows, header))


def _cmd_keyrate(args, out: TextIO) -> int:
    spec = _spec(args)
    w1, w2 = _noise(args)
    p = ChannelParams(args.V, args.T1, args.T2, w1, w2)
    rows = [row_values(spec, p, m, _evaluate(spec, p, m), args.floor_zero) for m in _methods(args.method)]
    _write_table(rows, args.format, out)
    return 0


def _cmd_sweep(args, out: TextIO) -> int:
    spec = _spec(args)
    w1, w2 = _noise(args)
    grid = SweepGrid(spec, args.V, w1, w2, Axis(args.axis), args.t_start, args.t_end, args.steps)
    rows = []
    for r in sweep(grid, args.method):
        for m in _methods(args.method):
            rows.append(row_values(spec, r.params, m, getattr(r, m), args.floor_zero))
    _write_table(rows, args.format, out)
    return 0


def _cmd_threshold(args, out: TextIO) -> int:
    spec = _spec(args)
    w1, w2 = _noise(args)
    # validates V and W before the bisection starts
    ChannelParams(args.V, 1.0, 1.0, w1, w2)
    t = threshold_transmission(spec, args.V, w1, w2, Axis(args.axis), tol=args.tol, method=args.method)
    header = ("protocol", "recon", "V", "W1", "W2", "axis", "method", "threshold")
    row = [spec.name, spec.recon_label, format_float(args.V), format_float(w1), format_float(w2),
           args.axis, args.method, format_float(t)]
    _write_table([row], args.format, out, header)
    return 0


def _cmd_verify(args, out: TextIO) -> int:
    from .checks import all_checks

    if args.samples < 10_000:
        raise InvalidArgument("--samples must be at least 10000")
    results = [check() for check in all_checks(args.seed, args.samples)]
    rows = [[str(j + 1), "PASS" if r.passed else "FAIL", r.name, r.detail] for j, r in enumerate(results)]
    out.write(emit_text(rows, ("#", "status", "check", "detail")))
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {"keyrate": _cmd_keyrate, "sweep": _cmd_sweep, "threshold": _cmd_threshold, "verify": _cmd_verify}


def _one_line(msg: object) -> str:
    return " ".join(str(msg).split())


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None,
        err: Optional[TextIO] = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except (UsageError, InvalidArgument) as exc:
        err.write(f"error: {_one_line(exc)}\n")
        return 1
    except NumericalFailure as exc:
        err.write(f"error: numerical failure: {_one_line(exc)}\n")
        return 2


def main() -> None:
    sys.exit(run())
