"""Command-line front end.

Exit codes: 0 accepted/pass, 1 rejected/fail, 2 usage error, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import difflib
import sys
from pathlib import Path

from . import teleport
from .protocol import (
    DEFAULT_DECOYS,
    DEFAULT_N,
    DEFAULT_SEED,
    ConfigError,
    ForgeProxyOutcome,
    InterceptResend,
    KeyGuessForgery,
    MalformedTranscript,
    SchemeConfig,
    TamperTeleportedState,
    Transcript,
    eavesdrop_experiment,
    key_guess_experiment,
    keyguess_config,
    run,
    verify_transcript,
)
from .sigcrypto import KeyExhausted, KeyReuse, UnknownKeyId

EXIT_OK, EXIT_REJECTED, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

INTERNAL_ERRORS = (teleport.NoCorrectionFound, KeyExhausted, KeyReuse, UnknownKeyId)


class UsageError(Exception):
    pass


def _read(path: str | None) -> bytes:
    if path is None:
        return b""
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _protocol_args(p: argparse.ArgumentParser):
    p.add_argument("--scheme", type=int, choices=(1, 2), default=1)
    p.add_argument("--message-file", metavar="PATH", help="message for scheme 1 (default: empty)")
    p.add_argument("--message-a", metavar="PATH", help="Alice's message for scheme 2")
    p.add_argument("--message-b", metavar="PATH", help="Bob's message for scheme 2")
    p.add_argument("--n", type=int, default=DEFAULT_N, help=f"digest length in bits (default {DEFAULT_N})")
    p.add_argument("--decoys", type=int, default=DEFAULT_DECOYS,
                   help=f"decoy qubits in the eavesdropping check (default {DEFAULT_DECOYS})")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    p.add_argument("--out", metavar="PATH", help="write the transcript JSON here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qproxysig", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one honest protocol execution")
    _protocol_args(p)

    p = sub.add_parser("attack", help="run one protocol execution under an attack")
    _protocol_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--forge", choices=("sa", "sb", "sc", "sd"), help="flip a bit of this field in its signature bundle")
    g.add_argument("--tamper-block", type=int, metavar="INT", help="apply X to a reconstructed qubit of this block")
    g.add_argument("--intercept", action="store_true", help="intercept-resend every distributed qubit")
    g.add_argument("--keyguess", action="store_true", help="re-encipher S_C in S_1 under a guessed pad")
    p.add_argument("--bit", type=int, default=0, help="bit index for --forge (default 0)")
    p.add_argument("--particle", type=int, help="target particle for --tamper-block")

    p = sub.add_parser("montecarlo", help="estimate forgery or detection rates")
    _protocol_args(p)
    p.add_argument("--experiment", choices=("keyguess", "eavesdrop"), required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--control", action="store_true", help="keyguess: give Eve the true pad")
    p.add_argument("--full-protocol", action="store_true", help="keyguess: run every trial end to end")

    p = sub.add_parser("derive-tables", help="regenerate correction tables and diff against the frozen copy")
    p.add_argument("--write", metavar="PATH", help="also write the regenerated tables here")

    p = sub.add_parser("verify", help="replay a transcript file")
    p.add_argument("path")
    return parser


def _config(args, attack=None) -> SchemeConfig:
    if args.scheme == 1:
        if args.message_a or args.message_b:
            raise UsageError("scheme 1 takes --message-file")
        return SchemeConfig(1, message=_read(args.message_file), n=args.n, decoy_count=args.decoys,
                            seed=args.seed, attack=attack)
    if args.message_file:
        raise UsageError("scheme 2 takes --message-a and --message-b")
    return SchemeConfig(2, message_a=_read(args.message_a), message_b=_read(args.message_b), n=args.n,
                        decoy_count=args.decoys, seed=args.seed, attack=attack)


def _attack(args):
    if args.forge:
        return ForgeProxyOutcome("S_" + args.forge[1].upper(), args.bit)
    if args.tamper_block is not None:
        return TamperTeleportedState(args.tamper_block, args.particle)
    if args.intercept:
        return InterceptResend()
    return KeyGuessForgery()


def _execute(args, attack=None) -> int:
    transcript = run(_config(args, attack))
    if args.out:
        Path(args.out).write_text(transcript.to_json())
    print(transcript.verdict)
    return EXIT_OK if transcript.verdict.accepted else EXIT_REJECTED


def _montecarlo(args) -> int:
    if args.trials <= 0:
        raise UsageError("--trials must be positive")
    if args.experiment == "keyguess":
        cfg = keyguess_config(args.n, args.seed, args.scheme)
        res = key_guess_experiment(cfg, args.trials, control=args.control, full_protocol=args.full_protocol)
        label = f"keyguess scheme={args.scheme} guessed_bits={args.n}"
    else:
        res = eavesdrop_experiment(_config(args), args.trials)
        label = f"eavesdrop scheme={args.scheme} decoys={args.decoys}"
    print(res.summary(label))
    print("within 3 sigma" if res.within(3) else "OUTSIDE 3 sigma")
    return EXIT_OK if res.within(3) else EXIT_REJECTED


def _derive_tables(args) -> int:
    fresh = teleport.derive_tables_text()
    if args.write:
        Path(args.write).write_text(fresh)
    frozen = teleport.frozen_tables_text()
    if fresh == frozen:
        print("correction tables match the frozen copy")
        return EXIT_OK
    sys.stdout.writelines(difflib.unified_diff(frozen.splitlines(True), fresh.splitlines(True), "frozen", "derived"))
    return EXIT_REJECTED


def _verify(args) -> int:
    try:
        transcript = Transcript.from_json(Path(args.path).read_text())
        result = verify_transcript(transcript)
    except OSError as exc:
        raise UsageError(f"cannot read {args.path}: {exc.strerror}") from None
    except MalformedTranscript as exc:
        print(f"fail: malformed transcript ({exc})")
        return EXIT_REJECTED
    if result.ok:
        print(f"pass: {transcript.verdict}")
        return EXIT_OK
    print(f"fail: {result.reason}" + (f" ({result.detail})" if result.detail else ""))
    return EXIT_REJECTED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handlers = {
        "run": _execute,
        "attack": lambda a: _execute(a, _attack(a)),
        "montecarlo": _montecarlo,
        "derive-tables": _derive_tables,
        "verify": _verify,
    }
    try:
        return handlers[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"qproxysig: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except INTERNAL_ERRORS as exc:
        print(f"qproxysig: internal invariant violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
