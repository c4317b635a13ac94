"""Offline replay of a transcript: recompute every check from the logged evidence."""
from __future__ import annotations

from typing import NamedTuple, Optional

from ..sigcrypto import hex_to_bits, xor_bits
from . import checks
from .config import ConfigError, SchemeConfig
from .engine import split_fields
from .transcript import (
    ClassicalSend,
    EavesdropCheck,
    KeyIssued,
    MalformedTranscript,
    Measurement,
    Transcript,
    Verdict,
    Verification,
)


class VerifyResult(NamedTuple):
    ok: bool
    reason: Optional[str] = None
    detail: Optional[str] = None

    def __bool__(self):
        return self.ok


def _fail(reason: str, detail: str | None = None) -> VerifyResult:
    return VerifyResult(False, reason, detail)


def verify_transcript(transcript: Transcript, config: SchemeConfig | None = None) -> VerifyResult:
    """
    Replay ``transcript`` and confirm that every logged check, and the final
    verdict, follows from the logged keys, ciphertexts, and measurements.

    Raises MalformedTranscript if the transcript has no verdict or an
    unreadable configuration.
    """
    if transcript.verdict is None:
        raise MalformedTranscript("transcript has no verdict")
    try:
        cfg = SchemeConfig.from_dict(transcript.config)
    except (ConfigError, KeyError, TypeError, ValueError) as exc:
        raise MalformedTranscript(f"bad config: {exc}") from None
    if cfg.scheme != transcript.scheme:
        raise MalformedTranscript("scheme field disagrees with config")
    if config is not None and config.to_dict() != transcript.config:
        return _fail("config mismatch")

    scheme = cfg.scheme
    keys: dict[str, str] = {}
    used: dict[str, set] = {}
    ev = {"n": cfg.n, "payloads": {}, "blind": {}, "decoded": {}}
    readouts: dict[tuple, list] = {}
    seen_checks: list[str] = []
    abort_reason = None

    for index, e in enumerate(transcript.events):
        if abort_reason is not None:
            return _fail("events after abort", f"event {index}")
        if isinstance(e, KeyIssued):
            keys[e.name] = hex_to_bits(e.bits)[:e.length]
            used[e.name] = set()
        elif isinstance(e, EavesdropCheck):
            if e.passed != (e.mismatches == 0):
                return _fail("verdict mismatch", "eavesdropping check")
            if not e.passed:
                abort_reason = "eavesdropping detected"
        elif isinstance(e, ClassicalSend):
            if e.key is None:
                plain = e.ciphertext
            else:
                if e.key not in keys:
                    return _fail("unknown key", e.key)
                span = set(range(e.offset, e.offset + len(e.ciphertext)))
                if e.offset + len(e.ciphertext) > len(keys[e.key]) or span & used[e.key]:
                    return _fail("key reuse", f"{e.key} at {e.offset}")
                used[e.key] |= span
                plain = xor_bits(e.ciphertext, keys[e.key][e.offset:e.offset + len(e.ciphertext)])
            try:
                ev["payloads"][e.label] = split_fields(plain, e.fields)
            except ValueError as exc:
                raise MalformedTranscript(f"{e.label}: {exc}") from None
        elif isinstance(e, Measurement) and e.party == "Trent" and e.kind == "z":
            readouts.setdefault(tuple(e.particles), []).append(e.outcome)
        elif isinstance(e, Verification):
            try:
                check = checks.check_by_name(scheme, e.check)
            except KeyError:
                return _fail("unknown check", e.check)
            for name, particles in checks.READOUTS[scheme].items():
                ev["decoded"][name] = "".join(readouts.get(particles, ()))
            for name in checks.BLIND_KEYS[scheme]:
                ev["blind"][name] = keys.get(name, "")[:cfg.n]
            try:
                recomputed = bool(check.predicate(ev))
            except (KeyError, ValueError):
                return _fail("missing evidence", e.check)
            if recomputed != e.passed or check.party != e.party:
                return _fail("verdict mismatch", e.check)
            seen_checks.append(e.check)
            if not e.passed:
                abort_reason = check.reason

    if abort_reason is not None:
        expected = Verdict(False, abort_reason)
    else:
        if seen_checks != [c.name for c in checks.CHECKS[scheme]]:
            return _fail("incomplete verification", ", ".join(seen_checks))
        expected = Verdict(True, None, checks.accepted_records(scheme, ev))
    if expected.to_dict() != transcript.verdict.to_dict():
        return _fail("verdict mismatch", "final verdict")
    return VerifyResult(True)
