"""Command-line interface: ``rpa-rm {encode,decode,simulate,bound,threshold,channel}``.

Exit status: 0 success, 1 domain error (e.g. wrong message length),
2 usage error (bad or inconsistent flags), 3 runtime failure.

Every subcommand accepts ``--config FILE`` with a JSON object of flag
values (keys are flag names with dashes replaced by underscores); flags
given on the command line override the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import records
from .bounds import bound_report, theorem_threshold
from .channels import BiAwgn, combine_and_merge, parse_channel, quantize
from .decoder import TIE_BREAKS, DecoderConfig, rpa_decode
from .errors import DomainError, ParameterError
from .rm_code import RmCode, encode, parse_bits, to_bits_string, to_hex
from .simulation import SimConfig, run_trials

log = logging.getLogger("rpa_rm")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


# Defaults applied after merging --config, so "not given" stays detectable.
DEFAULTS = {
    "format": None,
    "seed": 0,
    "iters": None,
    "workers": 1,
    "random_messages": False,
    "max_frame_errors": 0,
    "tie_break": "random",
    "with_bound": False,
    "combine": 0,
    "quantize": None,
    "decode_seed": 0,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rpa-rm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)
    fmt_epilog = "Output records: {}"

    def add(name, kind, helptext):
        sp = sub.add_parser(
            name,
            help=helptext,
            description=helptext,
            epilog=fmt_epilog.format(records.column_help(kind)),
        )
        sp.add_argument("--config", type=Path, help="JSON file of flag values")
        sp.add_argument("--out", type=Path, help="write the record here instead of stdout")
        return sp

    sp = add("encode", "encode", "Encode a message with RM(m, r).")
    sp.add_argument("--m", type=int)
    sp.add_argument("--r", type=int)
    sp.add_argument("--message", help="k message bits as a 0/1 string or hex (basis order: 1, x1..xm, x1x2, ...)")
    sp.add_argument("--format", choices=["bits", "hex", "json", "csv"])

    sp = add("decode", "decode", "RPA-decode one LLR vector.")
    sp.add_argument("--m", type=int)
    sp.add_argument("--r", type=int)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--llrs", help="comma-separated LLR values")
    g.add_argument("--llr-file", type=Path, help="file of LLR values (whitespace or comma separated)")
    sp.add_argument("--iters", type=int, help="iterations per recursion level (default ceil(m/2))")
    sp.add_argument("--tie-break", choices=TIE_BREAKS, default=None, dest="tie_break")
    sp.add_argument("--seed", type=int, dest="decode_seed", help="tie-break seed for --tie-break random")
    sp.add_argument("--format", choices=["bits", "hex", "json", "csv"])

    sp = add("simulate", "simulate+bound", "Monte Carlo frame/bit error rates of RPA decoding.")
    sp.add_argument("--m", type=int)
    sp.add_argument("--r", type=int)
    sp.add_argument("--channel", help="bsc:<p> | bec:<eps> | awgn:<sigma> | custom:<path>")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--iters", type=int, help="iterations per recursion level (default ceil(m/2))")
    sp.add_argument("--workers", type=int)
    sp.add_argument("--random-messages", action="store_true", default=None, dest="random_messages")
    sp.add_argument("--max-frame-errors", type=int, dest="max_frame_errors")
    sp.add_argument(
        "--tie-break",
        choices=TIE_BREAKS,
        dest="tie_break",
        help="'random' (default) keeps the decoder symmetric so all-zeros simulation is unbiased",
    )
    sp.add_argument("--with-bound", action="store_true", default=None, dest="with_bound")
    sp.add_argument("--format", choices=["json", "csv"])

    sp = add("bound", "bound", "Analytic bound on the one-iteration RPA error probability.")
    sp.add_argument("--m", type=int)
    sp.add_argument("--r", type=int)
    sp.add_argument("--z", type=float, help="channel Bhattacharyya parameter")
    sp.add_argument("--channel", help="channel spec; Z from its closed form")
    sp.add_argument("--format", choices=["json", "csv"])

    sp = add("threshold", "threshold", "Largest order r with a vanishing-error guarantee: r < threshold.")
    sp.add_argument("--m", type=int)
    sp.add_argument("--r", type=int, help="optional candidate order to compare")
    sp.add_argument("--z", type=float)
    sp.add_argument("--channel")
    sp.add_argument("--format", choices=["json", "csv"])

    sp = add("channel", "channel", "Bhattacharyya parameter of a channel and of its minus-combined versions.")
    sp.add_argument("--channel")
    sp.add_argument("--combine", type=int, help="number of minus-combining steps")
    sp.add_argument("--quantize", type=int, help="LLR quantization levels (continuous channels)")
    sp.add_argument("--format", choices=["json", "csv"])
    return p


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in data.items():
            key = key.replace("-", "_")
            if not hasattr(args, key):
                raise UsageError(f"unknown config key {key!r} for {args.command}")
            if getattr(args, key) is None:
                setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _channel(spec: str):
    try:
        return parse_channel(spec)
    except (DomainError, OSError) as exc:
        raise UsageError(f"bad channel spec {spec!r}: {exc}") from None


def _code(args) -> RmCode:
    try:
        return RmCode(args.m, args.r)
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, kind: str, rec: dict, text: str | None = None):
    rec = records.stamp(rec, args.command)
    fmt = args.format or "json"
    out = text if text is not None and fmt not in ("json", "csv") else records.dumps([rec], kind, fmt)
    if args.out:
        args.out.write_text(out if out.endswith("\n") else out + "\n")
    else:
        sys.stdout.write(out if out.endswith("\n") else out + "\n")


def cmd_encode(args) -> int:
    _require(args, "m", "r", "message")
    code = _code(args)
    msg = parse_bits(args.message, code.k)
    cw = encode(code, msg)
    fmt = args.format or "bits"
    args.format = fmt
    rec = {
        "m": code.m,
        "r": code.r,
        "n": code.n,
        "k": code.k,
        "message": to_bits_string(msg),
        "codeword": to_bits_string(cw),
        "codeword_hex": to_hex(cw),
    }
    _emit(args, "encode", rec, to_hex(cw) if fmt == "hex" else to_bits_string(cw))
    return EXIT_OK


def _read_llrs(args) -> np.ndarray:
    if args.llrs is not None:
        text = args.llrs
    elif args.llr_file is not None:
        try:
            text = Path(args.llr_file).read_text()
        except OSError as exc:
            raise UsageError(str(exc)) from None
    else:
        raise UsageError("one of --llrs or --llr-file is required")
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError:
        raise ParameterError("LLR values must be numbers") from None


def cmd_decode(args) -> int:
    _require(args, "m", "r")
    code = _code(args)
    if code.r < 1:
        raise UsageError("RPA decoding needs r >= 1")
    L = _read_llrs(args)
    cfg = DecoderConfig(
        n_max=args.iters or DecoderConfig.default(code.m).n_max,
        tie_break=args.tie_break or "first",
    )
    cw = rpa_decode(code, L, cfg, seed=args.decode_seed)
    args.format = args.format or "bits"
    rec = {
        "m": code.m,
        "r": code.r,
        "n_max": cfg.n_max,
        "tie_break": cfg.tie_break,
        "seed": args.decode_seed,
        "codeword": to_bits_string(cw),
        "codeword_hex": to_hex(cw),
    }
    _emit(args, "decode", rec, to_hex(cw) if args.format == "hex" else to_bits_string(cw))
    return EXIT_OK


def cmd_simulate(args) -> int:
    _require(args, "m", "r", "channel", "trials")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.iters is not None and args.iters < 1:
        raise UsageError("--iters must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.max_frame_errors < 0:
        raise UsageError("--max-frame-errors must be >= 0")
    code = _code(args)
    if code.r < 1:
        raise UsageError("RPA decoding needs r >= 1")
    channel = _channel(args.channel)
    cfg = SimConfig(
        code=code,
        channel=channel,
        trials=args.trials,
        seed=args.seed,
        n_max=args.iters,
        max_frame_errors=args.max_frame_errors,
        all_zeros_mode=not args.random_messages,
        workers=args.workers,
        tie_break=args.tie_break,
    )
    res = run_trials(cfg)
    rec = res.as_record()
    rec["channel"] = args.channel
    rec["Z"] = channel.bhattacharyya()
    kind = "simulate"
    if args.with_bound:
        kind = "simulate+bound"
        bound = bound_report(code.m, code.r, rec["Z"]).as_record()
        for key, value in bound.items():
            rec["bound_" + key] = value
    _emit(args, kind, records.normalize(records.stamp(rec, "simulate"), kind))
    return EXIT_OK


def _z_from(args) -> tuple[float, str | None]:
    if args.z is not None and args.channel is not None:
        raise UsageError("give either --z or --channel, not both")
    if args.z is None and args.channel is None:
        raise UsageError("one of --z or --channel is required")
    if args.channel is not None:
        return _channel(args.channel).bhattacharyya(), args.channel
    if not 0.0 < args.z < 1.0:
        raise UsageError("--z must lie in (0, 1)")
    return args.z, None


def cmd_bound(args) -> int:
    _require(args, "m", "r")
    z, spec = _z_from(args)
    if not 1 <= args.r <= args.m:
        raise UsageError("need 1 <= r <= m")
    rec = bound_report(args.m, args.r, z).as_record()
    rec["channel"] = spec
    _emit(args, "bound", rec)
    return EXIT_OK


def cmd_threshold(args) -> int:
    _require(args, "m")
    z, spec = _z_from(args)
    if args.m < 2:
        raise UsageError("--m must be >= 2")
    thr = theorem_threshold(args.m, z)
    rec = {
        "m": args.m,
        "Z": z,
        "channel": spec,
        "lambda": -math.log1p(-z),
        "threshold": thr,
        "r": args.r,
        "r_below_threshold": None if args.r is None else args.r < thr,
    }
    _emit(args, "threshold", rec)
    return EXIT_OK


def cmd_channel(args) -> int:
    _require(args, "channel")
    ch = _channel(args.channel)
    if args.combine < 0:
        raise UsageError("--combine must be >= 0")
    levels = args.quantize
    if levels is None and isinstance(ch, BiAwgn) and args.combine:
        levels = 64
    alphabet = None if isinstance(ch, BiAwgn) else len(ch.to_discrete())
    rec = {
        "channel": args.channel,
        "Z": ch.bhattacharyya(),
        "alphabet_size": alphabet,
        "quantize_levels": levels,
        "combine": args.combine,
        "combined_z": [],
        "z_upper_bound": [],
        "combined_alphabet_size": [],
    }
    if args.combine or levels:
        try:
            disc = quantize(ch, levels) if levels else ch.to_discrete()
        except ParameterError as exc:
            raise UsageError(str(exc)) from None
        z0 = disc.bhattacharyya()
        for k in range(1, args.combine + 1):
            disc = combine_and_merge(disc)
            rec["combined_z"].append(disc.bhattacharyya())
            # Closed-form bound after k steps, from the uncombined channel's Z.
            rec["z_upper_bound"].append(-math.expm1(2.0**k * math.log1p(-z0)))
            rec["combined_alphabet_size"].append(len(disc))
    _emit(args, "channel", rec)
    return EXIT_OK


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "simulate": cmd_simulate,
    "bound": cmd_bound,
    "threshold": cmd_threshold,
    "channel": cmd_channel,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for usage errors
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _merge_config(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rpa-rm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"rpa-rm {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as exc:  # anything unexpected is a runtime failure
        log.debug("runtime failure", exc_info=True)
        print(f"rpa-rm {args.command}: runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
