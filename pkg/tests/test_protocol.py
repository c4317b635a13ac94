import dataclasses
import json

import numpy as np
import pytest

from qproxysig.protocol import (
    ConfigError,
    ForgeProxyOutcome,
    InterceptResend,
    KeyGuessForgery,
    MalformedTranscript,
    SchemeConfig,
    TamperTeleportedState,
    Transcript,
    key_guess_experiment,
    keyguess_config,
    party_view,
    run,
    run_scheme1,
    run_scheme2,
    verify_transcript,
)
from qproxysig.protocol.scheme1 import Scheme1Run
from qproxysig.protocol.scheme2 import Scheme2Run
from qproxysig.protocol.transcript import ClassicalSend, Correction, KeyIssued, Measurement, Verification
from qproxysig.sigcrypto import hex_to_bits, xor_bits

SIGNATURE_FIELDS = ("S_A", "S_B", "S_C", "S_D")


def s1(**kw):
    kw.setdefault("message", b"abc")
    return SchemeConfig(1, **kw)


def s2(**kw):
    kw.setdefault("message_a", b"x")
    kw.setdefault("message_b", b"y")
    kw.setdefault("n", 8)
    return SchemeConfig(2, **kw)


# -- honest runs -----------------------------------------------------------------

def test_scheme1_honest_run_shape():
    t = run_scheme1(s1(n=16, decoy_count=0))
    assert t.verdict.accepted
    bells = [e for e in t.of_type(Measurement) if e.kind == "bell"]
    assert len(bells) == 16
    assert len({e.block for e in bells}) == 8
    (record,) = t.verdict.records
    assert record["m"] == b"abc".hex() and len(record["S_C"]) == len(record["S_D"]) == 8


def test_scheme2_honest_run_both_directions():
    t = run_scheme2(s2())
    assert t.verdict.accepted
    ra, rb = t.verdict.records
    assert ra["m"] == b"x".hex() and rb["m"] == b"y".hex()
    assert ra["S_C"] == rb["S_C"]


def test_run_dispatch_checks_scheme():
    with pytest.raises(ConfigError):
        Scheme1Run(s2())


@pytest.mark.parametrize("cls, make", [(Scheme1Run, s1), (Scheme2Run, s2)])
def test_honest_runs_leave_clean_key_audit(cls, make):
    r = cls(make())
    r.run()
    assert r.registry.audit_ok()
    # every allocated key bit went to exactly one purpose
    for stream in r.registry.streams.values():
        assert stream.cursor <= len(stream.bits)


def test_every_ciphertext_decrypted_once():
    for cfg in (s1(), s2()):
        t = run(cfg)
        assert verify_transcript(t).ok
        spans = {}
        for e in t.of_type(ClassicalSend):
            if e.key:
                spans.setdefault(e.key, []).append((e.offset, e.offset + len(e.ciphertext)))
        for segs in spans.values():
            segs.sort()
            assert all(a[1] <= b[0] for a, b in zip(segs, segs[1:]))


# -- attacks ---------------------------------------------------------------------

@pytest.mark.parametrize("cfg, reason", [
    (s1(seed=7, attack=ForgeProxyOutcome("S_A", 0)), "S_A mismatch"),
    (s1(seed=7, attack=ForgeProxyOutcome("S_A", 3, "S_2")), "S_A mismatch"),
    (s1(seed=7, attack=ForgeProxyOutcome("S_C", 1)), "proxy record mismatch"),
    (s1(seed=7, attack=ForgeProxyOutcome("S_D", 2)), "proxy record mismatch"),
    (s1(seed=7, attack=ForgeProxyOutcome("S_A", 0, "E_K_TA{S_A}")), "S_A cross-check failed"),
    (s1(seed=7, attack=TamperTeleportedState(0)), "M' != M"),
    (s2(seed=7, attack=ForgeProxyOutcome("S_A", 0)), "S_A mismatch"),
    (s2(seed=7, attack=ForgeProxyOutcome("S_B", 0)), "S_B mismatch"),
    (s2(seed=7, attack=ForgeProxyOutcome("S_C", 4)), "proxy record mismatch"),
    (s2(seed=7, attack=TamperTeleportedState(0)), "M'''' != M''"),
    (s2(seed=7, attack=TamperTeleportedState(3, particle=2)), "M''' != M'"),
])
def test_attack_reasons(cfg, reason):
    t = run(cfg)
    assert not t.verdict.accepted and t.verdict.reason == reason
    assert verify_transcript(t).ok


def test_proxy_forgery_rejected_before_trent():
    t = run(s1(seed=7, attack=ForgeProxyOutcome("S_A", 0)))
    assert all(e.party == "Bob" for e in t.of_type(Verification))
    assert not any(isinstance(e, Measurement) and e.party == "Trent" for e in t.events)


def test_tamper_flips_exactly_one_decoded_bit():
    honest = run(s1(seed=3, decoy_count=0))
    tampered = run(s1(seed=3, decoy_count=0, attack=TamperTeleportedState(2)))
    read = lambda t: [e.outcome for e in t.of_type(Measurement) if e.party == "Trent"]
    diff = [i for i, (a, b) in enumerate(zip(read(honest), read(tampered))) if a != b]
    assert diff == [2]
    assert read(tampered)[2][0] != read(honest)[2][0]


@pytest.mark.parametrize("make", [s1, s2])
def test_exhaustive_single_bit_forgery(make):
    base = run(make(n=8, seed=11, decoy_count=0))
    cases = 0
    for e in base.of_type(ClassicalSend):
        if e.key is None:
            continue
        for field, length in e.fields:
            if field not in SIGNATURE_FIELDS:
                continue
            for bit in range(length):
                t = run(make(n=8, seed=11, decoy_count=0, attack=ForgeProxyOutcome(field, bit, e.label)))
                assert not t.verdict.accepted, (e.label, field, bit)
                cases += 1
    assert cases > 100


def test_intercept_resend_without_decoys_still_caught():
    # disturbing the channel itself breaks the teleported digest
    rejected = sum(not run(s1(seed=s, decoy_count=0, attack=InterceptResend())).verdict.accepted
                   for s in range(20))
    assert rejected >= 15


@pytest.mark.parametrize("bad", [
    lambda: s1(attack=ForgeProxyOutcome("S_B", 0)),
    lambda: s2(attack=ForgeProxyOutcome("S_D", 0)),
    lambda: run(s1(attack=ForgeProxyOutcome("S_A", 999))),
    lambda: run(s1(attack=ForgeProxyOutcome("S_A", 0, "nope"))),
    lambda: run(s1(attack=TamperTeleportedState(99))),
    lambda: run(s1(attack=TamperTeleportedState(0, particle=3))),
    lambda: SchemeConfig(1, n=7),
    lambda: SchemeConfig(3),
    lambda: SchemeConfig(1, message_a=b"x"),
    lambda: SchemeConfig(1, seed=-1),
    lambda: SchemeConfig(1, decoy_count=-1),
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        bad()


def test_config_roundtrip():
    cfg = s2(attack=TamperTeleportedState(1, 5))
    assert SchemeConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


# -- key guessing ---------------------------------------------------------------

def _pad_guess_correct(t: Transcript) -> bool:
    """Recompute from the transcript whether Eve's forged S_C decrypts to Charlie's."""
    keys = {e.name: hex_to_bits(e.bits) for e in t.of_type(KeyIssued)}
    s1_send = next(e for e in t.of_type(ClassicalSend) if e.label == "S_1")
    start = s1_send.fields[0][1]
    length = s1_send.fields[1][1]
    key = keys[s1_send.key][s1_send.offset:s1_send.offset + len(s1_send.ciphertext)]
    bob_sc = xor_bits(s1_send.ciphertext, key)[start:start + length]
    charlie = next(e for e in t.of_type(ClassicalSend) if e.label == "E_K_TC{S_A,S_C}")
    ckey = keys[charlie.key][charlie.offset:charlie.offset + len(charlie.ciphertext)]
    charlie_sc = xor_bits(charlie.ciphertext, ckey)[charlie.fields[0][1]:]
    return bob_sc == charlie_sc


@pytest.mark.parametrize("scheme", [1, 2])
def test_full_keyguess_verdict_is_decided_by_the_pad(scheme):
    cfg = keyguess_config(2, seed=0, scheme=scheme)
    seen = set()
    for seed in range(60):
        t = run(dataclasses.replace(cfg, seed=seed, attack=KeyGuessForgery()))
        assert t.verdict.accepted == _pad_guess_correct(t)
        assert verify_transcript(t).ok
        seen.add(t.verdict.accepted)
    assert seen == {True, False}


def test_keyguess_control_always_accepted():
    cfg = keyguess_config(4, seed=1)
    assert key_guess_experiment(cfg, 50, control=True, full_protocol=True).frequency == 1.0
    assert key_guess_experiment(cfg, 500, control=True).frequency == 1.0


def test_reduced_and_full_keyguess_agree_in_distribution():
    cfg = keyguess_config(1, seed=8)
    full = key_guess_experiment(cfg, 400, full_protocol=True)
    reduced = key_guess_experiment(cfg, 4000)
    assert full.expected == reduced.expected == 0.5
    assert full.within(3) and reduced.within(3)


def test_keyguess_config_sizes():
    assert keyguess_config(8, 0).n == 16 and keyguess_config(8, 0).blocks == 8
    assert keyguess_config(4, 0, scheme=2).blocks == 4


# -- determinism, blindness ---------------------------------------------------------

@pytest.mark.parametrize("make", [s1, s2])
def test_determinism(make):
    assert run(make(seed=42)).to_json() == run(make(seed=42)).to_json()
    assert run(make(seed=42)).to_json() != run(make(seed=43)).to_json()


@pytest.mark.parametrize("seed", range(5))
def test_blindness_scheme1(seed):
    a = run(s1(message=b"first", seed=seed))
    b = run(s1(message=b"other message", seed=seed))
    for proxy in ("Charlie", "David"):
        assert party_view(a, proxy) == party_view(b, proxy)
    # the digests really differ, so Alice's view does not match
    assert party_view(a, "Trent") != party_view(b, "Trent")


def test_blindness_scheme2():
    a = run(s2(message_a=b"p", message_b=b"q", seed=9))
    b = run(s2(message_a=b"long", message_b=b"text", seed=9))
    assert party_view(a, "Charlie") == party_view(b, "Charlie")


# -- offline verification -------------------------------------------------------------

@pytest.fixture
def honest_dict():
    return json.loads(run(s1(seed=5)).to_json())


def test_verify_honest_from_json(honest_dict):
    t = Transcript.from_dict(honest_dict)
    assert verify_transcript(t).ok
    assert verify_transcript(t, s1(seed=5)).ok
    assert verify_transcript(t, s1(seed=6)).reason == "config mismatch"


def test_verify_flipped_verification(honest_dict):
    for e in honest_dict["events"]:
        if e["type"] == "Verification":
            e["passed"] = False
            break
    assert verify_transcript(Transcript.from_dict(honest_dict)).reason == "verdict mismatch"


def test_verify_flipped_verdict(honest_dict):
    honest_dict["verdict"] = {"accepted": False, "reason": "S_A mismatch", "records": []}
    assert verify_transcript(Transcript.from_dict(honest_dict)).reason == "verdict mismatch"


def test_verify_altered_record(honest_dict):
    rec = honest_dict["verdict"]["records"][0]
    rec["S_C"] = ("1" if rec["S_C"][0] == "0" else "0") + rec["S_C"][1:]
    assert verify_transcript(Transcript.from_dict(honest_dict)).reason == "verdict mismatch"


def test_verify_altered_ciphertext(honest_dict):
    for e in honest_dict["events"]:
        if e["type"] == "ClassicalSend" and e["label"] == "S_1":
            e["ciphertext"] = ("1" if e["ciphertext"][0] == "0" else "0") + e["ciphertext"][1:]
    assert verify_transcript(Transcript.from_dict(honest_dict)).reason == "verdict mismatch"


def test_verify_altered_readout(honest_dict):
    for e in reversed(honest_dict["events"]):
        if e["type"] == "Measurement" and e["party"] == "Trent":
            e["outcome"] = "".join("1" if c == "0" else "0" for c in e["outcome"])
            break
    assert not verify_transcript(Transcript.from_dict(honest_dict)).ok


def test_verify_detects_key_reuse(honest_dict):
    sends = [e for e in honest_dict["events"] if e["type"] == "ClassicalSend" and e["key"] == "K_BC"]
    sends[1]["offset"] = sends[0]["offset"]
    assert verify_transcript(Transcript.from_dict(honest_dict)).reason == "key reuse"


def test_verify_dropped_check(honest_dict):
    honest_dict["events"] = [e for e in honest_dict["events"]
                             if not (e["type"] == "Verification" and e["check"] == "M' = M")]
    assert verify_transcript(Transcript.from_dict(honest_dict)).reason == "incomplete verification"


def test_truncated_transcript_is_malformed(honest_dict):
    honest_dict["verdict"] = None
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict(honest_dict)
    t = run(s1(seed=5))
    t.verdict = None
    with pytest.raises(MalformedTranscript):
        verify_transcript(t)


def test_schema_rejects_unknown_event(honest_dict):
    honest_dict["events"].append({"type": "Teleport"})
    with pytest.raises(MalformedTranscript):
        Transcript.from_dict(honest_dict)
    with pytest.raises(MalformedTranscript):
        Transcript.from_json("{not json")


def test_corrections_logged_per_block():
    t = run(s2(seed=1))
    corr = t.of_type(Correction)
    assert {e.particle for e in corr} == {2, 5}
    assert len(corr) == 2 * 8
