"""
Classical plumbing: digests, XOR blinding, one-time pads over a simulated
QKD key registry, and the decoy-qubit eavesdropping check.

Bit sequences are plain ``str`` of ``"0"``/``"1"``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable

from .statevec import X_BASIS, Z_BASIS, measure_x, measure_z, single_qubit, tensor

PARTY_ORDER = ("Trent", "Alice", "Bob", "Charlie", "David", "Eve")
DIGEST_BITS = 256


class KeyExhausted(RuntimeError):
    """A key stream ran out of fresh bits (the QKD phase was under-provisioned)."""


class UnknownKeyId(KeyError):
    pass


class KeyReuse(RuntimeError):
    """A key segment was decrypted twice."""


def _check_bits(bits: str) -> str:
    if set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    return bits


def xor_bits(a: str, b: str) -> str:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def bytes_to_bits(data: bytes) -> str:
    return "".join(f"{byte:08b}" for byte in data)


def bits_to_hex(bits: str) -> str:
    if len(bits) % 4:
        raise ValueError("hex encoding needs a multiple of 4 bits")
    return "".join(f"{int(bits[i:i + 4], 2):x}" for i in range(0, len(bits), 4))


def hex_to_bits(text: str) -> str:
    return "".join(f"{int(ch, 16):04b}" for ch in text)


def digest(message: bytes, n: int) -> str:
    """First ``n`` bits (big-endian) of SHA-256(message)."""
    if n % 2 or not 2 <= n <= DIGEST_BITS:
        raise ValueError(f"digest length must be even and in [2, {DIGEST_BITS}], got {n}")
    return bytes_to_bits(hashlib.sha256(message).digest())[:n]


def blind(digest_bits: str, key: str) -> str:
    """M = H(m) xor K."""
    return xor_bits(_check_bits(digest_bits), _check_bits(key))


@dataclass(frozen=True, order=True)
class KeyId:
    """Unordered party pair; ``KeyId.of("Bob", "Alice") == KeyId.of("Alice", "Bob")``."""

    first: str
    second: str

    @classmethod
    def of(cls, a: str, b: str) -> "KeyId":
        if a == b:
            raise ValueError("a key is shared between two distinct parties")
        rank = {p: i for i, p in enumerate(PARTY_ORDER)}
        x, y = sorted((a, b), key=lambda p: (rank.get(p, len(rank)), p))
        return cls(x, y)

    @property
    def name(self) -> str:
        return f"K_{self.first[0]}{self.second[0]}"

    def __contains__(self, party):
        return party in (self.first, self.second)

    def __str__(self):
        return self.name


@dataclass
class KeyStream:
    """
    Shared random bits for one pair.  ``cursor`` is the allocated prefix; it
    only moves forward and is shared by both holders, so every segment is
    enciphered exactly once.
    """

    bits: str
    cursor: int = 0
    decrypted: set = field(default_factory=set)

    def allocate(self, length: int) -> tuple[int, str]:
        if self.cursor + length > len(self.bits):
            raise KeyExhausted(f"need {length} bits, {len(self.bits) - self.cursor} left")
        start = self.cursor
        self.cursor += length
        return start, self.bits[start:start + length]

    def segment(self, offset: int, length: int) -> str:
        if offset < 0 or offset + length > self.cursor:
            raise KeyExhausted(f"segment [{offset}, {offset + length}) was never allocated")
        return self.bits[offset:offset + length]


@dataclass(frozen=True)
class Ciphertext:
    bits: str
    key_id: KeyId
    offset: int


@dataclass
class KeyRegistry:
    """Trusted stand-in for the QKD phase: one stream per declared pair."""

    streams: dict[KeyId, KeyStream] = field(default_factory=dict)
    audit: list = field(default_factory=list)

    def stream(self, key_id: KeyId) -> KeyStream:
        try:
            return self.streams[key_id]
        except KeyError:
            raise UnknownKeyId(str(key_id)) from None

    def view(self, party: str, key_id: KeyId) -> str:
        """All bits of ``key_id`` as seen by ``party``; only the two holders may look."""
        if party not in key_id:
            raise UnknownKeyId(f"{party} does not hold {key_id}")
        return self.stream(key_id).bits

    def take(self, key_id: KeyId, length: int, purpose: str) -> tuple[int, str]:
        offset, seg = self.stream(key_id).allocate(length)
        self.audit.append((key_id.name, offset, offset + length, purpose))
        return offset, seg

    def mark_decrypted(self, key_id: KeyId, offset: int, length: int) -> str:
        stream = self.stream(key_id)
        seg = stream.segment(offset, length)
        if (offset, length) in stream.decrypted:
            raise KeyReuse(f"{key_id} segment at {offset} decrypted twice")
        stream.decrypted.add((offset, length))
        return seg

    def audit_ok(self) -> bool:
        """True iff no key bit index was allocated twice."""
        seen: dict[str, set] = {}
        for name, start, stop, _ in self.audit:
            used = seen.setdefault(name, set())
            span = set(range(start, stop))
            if used & span:
                return False
            used |= span
        return True

    def dump(self) -> str:
        lines = []
        for kid, s in self.streams.items():
            lines.append(f"pair={kid.first},{kid.second} bits={bits_to_hex(s.bits)} cursor={s.cursor}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "KeyRegistry":
        reg = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            f = dict(tok.split("=", 1) for tok in line.split())
            a, b = f["pair"].split(",")
            reg.streams[KeyId.of(a, b)] = KeyStream(hex_to_bits(f["bits"]), int(f["cursor"]))
        return reg


def registry_init(parties: Iterable[str], pairs: Iterable[tuple[str, str]], lengths, rng) -> KeyRegistry:
    """
    Issue an independent uniformly random stream to every pair.

    ``lengths`` is a dict keyed by pair (either order) or a sequence parallel to
    ``pairs``.  Lengths are rounded up to a multiple of 4 so dumps are exact hex.
    """
    parties = set(parties)
    pairs = [KeyId.of(a, b) for a, b in pairs]
    if isinstance(lengths, dict):
        lengths = [lengths.get((k.first, k.second), lengths.get((k.second, k.first))) for k in pairs]
    reg = KeyRegistry()
    for kid, length in zip(pairs, lengths, strict=True):
        if kid.first not in parties or kid.second not in parties:
            raise ValueError(f"{kid} names a party outside {sorted(parties)}")
        length = -(-int(length) // 4) * 4
        bits = "".join("1" if b else "0" for b in rng.integers(0, 2, size=length))
        reg.streams[kid] = KeyStream(bits)
    return reg


def otp_encrypt(plain: str, key_id: KeyId, registry: KeyRegistry, purpose: str = "otp") -> Ciphertext:
    offset, key = registry.take(key_id, len(plain), purpose)
    return Ciphertext(xor_bits(_check_bits(plain), key), key_id, offset)


def otp_decrypt(ct: Ciphertext, registry: KeyRegistry) -> str:
    key = registry.mark_decrypted(ct.key_id, ct.offset, len(ct.bits))
    return xor_bits(ct.bits, key)


# -- eavesdropping check --------------------------------------------------------

@dataclass(frozen=True)
class EavesdropResult:
    passed: bool
    decoys: int
    mismatches: int


def intercept_resend(state, q, rng):
    """Eve measures ``q`` in a random basis and resends the eigenstate she saw."""
    x_basis = bool(rng.integers(2))
    bit, rest = (measure_x if x_basis else measure_z)(state, q, rng)
    resent = single_qubit(q, (X_BASIS if x_basis else Z_BASIS)[bit])
    return tensor(rest, resent) if rest.num_qubits else resent


def eavesdrop_check(decoy_count: int, intercepted: bool, rng) -> EavesdropResult:
    """
    Decoys in {|0>,|1>,|+>,|->}; the receiver measures each in the announced
    preparation basis and any mismatch fails the check.  Intercept-resend in a
    random basis disturbs each decoy with probability 1/4.
    """
    if decoy_count < 0:
        raise ValueError("decoy count must be non-negative")
    mismatches = 0
    for i in range(decoy_count):
        x_basis = bool(rng.integers(2))
        bit = int(rng.integers(2))
        q = f"decoy{i}"
        state = single_qubit(q, (X_BASIS if x_basis else Z_BASIS)[bit])
        if intercepted:
            state = intercept_resend(state, q, rng)
        seen, _ = (measure_x if x_basis else measure_z)(state, q, rng)
        mismatches += seen != bit
    return EavesdropResult(mismatches == 0, decoy_count, mismatches)
