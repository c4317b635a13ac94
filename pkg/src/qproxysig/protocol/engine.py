"""
Synchronous in-memory driver shared by both schemes.

Parties are passive: the scheme subclasses script who does what, and every
classical message goes through :meth:`ProtocolRun.send` into the recipient's
mailbox, where :meth:`ProtocolRun.receive` decrypts it exactly once.
"""
from __future__ import annotations

import numpy as np

from ..sigcrypto import (
    Ciphertext,
    KeyId,
    bits_to_hex,
    eavesdrop_check,
    intercept_resend,
    otp_decrypt,
    otp_encrypt,
    registry_init,
    xor_bits,
)
from ..statevec import H, Pauli, apply_1q, measure_bell, measure_x, measure_z
from ..teleport import load_tables
from . import checks
from .config import ConfigError, ForgeProxyOutcome, InterceptResend, KeyGuessForgery, SchemeConfig, TamperTeleportedState
from .transcript import (
    ChannelDistributed,
    ClassicalSend,
    Correction,
    EavesdropCheck,
    KeyIssued,
    Measurement,
    QuantumSend,
    Transcript,
    Verdict,
    Verification,
)


class Aborted(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def split_fields(bits: str, layout) -> dict:
    out, pos = {}, 0
    for name, length in layout:
        out[name] = bits[pos:pos + length]
        pos += length
    if pos != len(bits):
        raise ValueError(f"layout covers {pos} of {len(bits)} bits")
    return out


def field_span(layout, name: str) -> tuple[int, int]:
    pos = 0
    for fname, length in layout:
        if fname == name:
            return pos, length
        pos += length
    raise KeyError(name)


def flip(bits: str, index: int) -> str:
    return bits[:index] + ("1" if bits[index] == "0" else "0") + bits[index + 1:]


class ProtocolRun:
    scheme: int
    parties: tuple[str, ...]
    # signature bundle that carries each field to its verifier
    bundle_for_field: dict[str, str]
    message_labels: frozenset
    tamper_default: int
    tamper_targets: tuple[int, ...]

    def __init__(self, config: SchemeConfig):
        if config.scheme != self.scheme:
            raise ConfigError(f"config is for scheme {config.scheme}, not {self.scheme}")
        self.config = config
        self.attack = config.attack
        keys, quantum, decoys, eve = np.random.SeedSequence(config.seed).spawn(4)
        self.rng_keys = np.random.default_rng(keys)
        self.rng = np.random.default_rng(quantum)
        self.rng_decoys = np.random.default_rng(decoys)
        self.rng_eve = np.random.default_rng(eve)
        self.table = load_tables()[self.scheme]
        self.transcript = Transcript(self.scheme, config.to_dict())
        self.registry = None
        self.mailboxes: dict[str, dict] = {p: {} for p in self.parties}
        self.evidence = {"n": config.n, "payloads": {}, "blind": {}, "decoded": {}}
        self.states: list = []
        self._validate_attack()

    # -- lifecycle ---------------------------------------------------------------

    def run(self) -> Transcript:
        try:
            self.execute()
        except Aborted as stop:
            verdict = Verdict(False, stop.reason)
        else:
            verdict = Verdict(True, None, checks.accepted_records(self.scheme, self.evidence))
        self.transcript.close(verdict)
        return self.transcript

    def execute(self):
        raise NotImplementedError

    def key_budget(self) -> dict[tuple[str, str], int]:
        raise NotImplementedError

    def _validate_attack(self):
        a = self.attack
        if isinstance(a, ForgeProxyOutcome):
            label = a.message or self.bundle_for_field.get(a.field)
            if label not in self.message_labels:
                raise ConfigError(f"no message {label!r} in scheme {self.scheme}")
            if a.bit < 0:
                raise ConfigError("bit index must be non-negative")
        elif isinstance(a, TamperTeleportedState):
            if not 0 <= a.block < self.config.blocks:
                raise ConfigError(f"block {a.block} out of range (0..{self.config.blocks - 1})")
            if a.particle is not None and a.particle not in self.tamper_targets:
                raise ConfigError(f"particle {a.particle} is not a reconstructed qubit")

    # -- initial phase -----------------------------------------------------------

    def issue_keys(self):
        budget = self.key_budget()
        self.registry = registry_init(self.parties, list(budget), list(budget.values()), self.rng_keys)
        for kid, stream in self.registry.streams.items():
            self.transcript.log(KeyIssued((kid.first, kid.second), kid.name, len(stream.bits),
                                          bits_to_hex(stream.bits)))

    def distribute(self, block: int, holders: dict, sender: str = "Bob"):
        self.transcript.log(ChannelDistributed(block, {p: list(q) for p, q in holders.items()}))
        if isinstance(self.attack, InterceptResend):
            state = self.states[block]
            for party, particles in holders.items():
                if party == sender:
                    continue
                for q in particles:
                    state = intercept_resend(state, q, self.rng_eve)
            self.states[block] = state

    def eavesdrop_check(self):
        res = eavesdrop_check(self.config.decoy_count, isinstance(self.attack, InterceptResend), self.rng_decoys)
        self.transcript.log(EavesdropCheck(res.passed, res.decoys, res.mismatches))
        if not res.passed:
            raise Aborted("eavesdropping detected")

    def take_blinding_pad(self, holder: str) -> str:
        kid = KeyId.of(holder, "Trent")
        offset, pad = self.registry.take(kid, self.config.n, "blind")
        if offset != 0:
            raise RuntimeError(f"blinding pad must open {kid}")
        return pad

    def trent_pad(self, peer: str) -> str:
        """Trent's copy of the blinding pad he shares with ``peer``."""
        return self.registry.view("Trent", KeyId.of("Trent", peer))[:self.config.n]

    # -- classical channel -------------------------------------------------------

    def send(self, sender: str, recipient: str, label: str, fields, encrypt: bool = True):
        plain = "".join(bits for _, bits in fields)
        layout = tuple((name, len(bits)) for name, bits in fields)
        if encrypt:
            ct = otp_encrypt(plain, KeyId.of(sender, recipient), self.registry, purpose=label)
            wire = self.in_transit(label, layout, plain, ct)
            ct = Ciphertext(wire, ct.key_id, ct.offset)
            event = ClassicalSend(sender, recipient, label, ct.key_id.name, ct.offset, layout, wire)
        else:
            ct = None
            event = ClassicalSend(sender, recipient, label, None, None, layout, plain)
        self.transcript.log(event)
        if label in self.mailboxes[recipient]:
            raise RuntimeError(f"{recipient} already holds an unread {label}")
        self.mailboxes[recipient][label] = (event, ct)

    def receive(self, party: str, label: str) -> dict:
        event, ct = self.mailboxes[party].pop(label)
        plain = otp_decrypt(ct, self.registry) if ct is not None else event.ciphertext
        payload = split_fields(plain, event.fields)
        self.evidence["payloads"][label] = payload
        return payload

    def in_transit(self, label: str, layout, plain: str, ct: Ciphertext) -> str:
        wire = ct.bits
        a = self.attack
        if isinstance(a, ForgeProxyOutcome) and label == (a.message or self.bundle_for_field[a.field]):
            try:
                start, length = field_span(layout, a.field)
            except KeyError:
                raise ConfigError(f"{label} carries no {a.field}") from None
            if a.bit >= length:
                raise ConfigError(f"{a.field} in {label} has {length} bits; bit {a.bit} out of range")
            wire = flip(wire, start + a.bit)
        elif isinstance(a, KeyGuessForgery) and label == "S_1":
            start, length = field_span(layout, "S_C")
            if a.control:
                guess = self.registry.stream(ct.key_id).bits[ct.offset + start:ct.offset + start + length]
            else:
                guess = "".join(map(str, self.rng_eve.integers(0, 2, size=length)))
            forged = xor_bits(plain[start:start + length], guess)
            wire = wire[:start] + forged + wire[start + length:]
        return wire

    # -- quantum helpers -----------------------------------------------------------

    def bell(self, party: str, block: int, q1, q2):
        outcome, self.states[block] = measure_bell(self.states[block], q1, q2, self.rng)
        self.transcript.log(Measurement(party, block, "bell", (q1, q2), outcome.bits))
        return outcome

    def hadamard_z(self, party: str, block: int, q) -> int:
        state = apply_1q(self.states[block], q, H)
        bit, self.states[block] = measure_z(state, q, self.rng)
        self.transcript.log(Measurement(party, block, "hz", (q,), str(bit)))
        return bit

    def x_measure(self, party: str, block: int, q) -> int:
        bit, self.states[block] = measure_x(self.states[block], q, self.rng)
        self.transcript.log(Measurement(party, block, "x", (q,), str(bit)))
        return bit

    def z_readout(self, party: str, block: int, qubits) -> str:
        bits = ""
        for q in qubits:
            b, self.states[block] = measure_z(self.states[block], q, self.rng)
            bits += str(b)
        self.transcript.log(Measurement(party, block, "z", tuple(qubits), bits))
        return bits

    def correct(self, party: str, block: int, corrections: dict):
        for q, pauli in corrections.items():
            self.states[block] = apply_1q(self.states[block], q, pauli)
            self.transcript.log(Correction(party, block, q, pauli.name))

    def hand_to_trent(self, sender: str, block: int, particles: tuple):
        a = self.attack
        if isinstance(a, TamperTeleportedState) and a.block == block:
            target = a.particle if a.particle is not None else self.tamper_default
            if target in particles:
                self.states[block] = apply_1q(self.states[block], target, Pauli.X)
        self.transcript.log(QuantumSend(sender, "Trent", block, tuple(particles)))

    def verify(self, name: str):
        check = checks.check_by_name(self.scheme, name)
        passed = bool(check.predicate(self.evidence))
        self.transcript.log(Verification(check.party, check.name, passed))
        if not passed:
            raise Aborted(check.reason)
