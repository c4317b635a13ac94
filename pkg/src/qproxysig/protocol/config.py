"""Run configuration and attack specifications."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Optional, Union

DEFAULT_SEED = 20230401
DEFAULT_N = 16
DEFAULT_DECOYS = 16

PROOF_FIELDS = ("S_A", "S_B", "S_C", "S_D")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ForgeProxyOutcome:
    """Flip one bit of a signature field while its ciphertext is in transit."""

    field: str
    bit: int
    # label of the ciphertext to hit; None picks the signature bundle carrying `field`
    message: Optional[str] = None


@dataclass(frozen=True)
class TamperTeleportedState:
    """Apply X to a reconstructed qubit of one block just before it reaches Trent."""

    block: int
    particle: Optional[int] = None


@dataclass(frozen=True)
class InterceptResend:
    """Eve measures and resends every qubit Bob distributes, decoys included."""


@dataclass(frozen=True)
class KeyGuessForgery:
    """
    Eve, holding no keys, re-enciphers the S_C part of S_1 under a uniformly
    guessed pad.  She is granted the plaintext, so only the key protects it.
    ``control`` hands her the true pad instead.
    """

    control: bool = False


AttackSpec = Union[ForgeProxyOutcome, TamperTeleportedState, InterceptResend, KeyGuessForgery]
_ATTACKS = {cls.__name__: cls for cls in (ForgeProxyOutcome, TamperTeleportedState, InterceptResend, KeyGuessForgery)}


def attack_to_dict(attack: AttackSpec | None) -> dict | None:
    if attack is None:
        return None
    return {"type": type(attack).__name__, **asdict(attack)}


def attack_from_dict(data: dict | None) -> AttackSpec | None:
    if data is None:
        return None
    data = dict(data)
    cls = _ATTACKS.get(data.pop("type", None))
    if cls is None:
        raise ConfigError(f"unknown attack {data!r}")
    return cls(**data)


@dataclass(frozen=True)
class SchemeConfig:
    scheme: int
    message: bytes = b""
    message_a: bytes = b""
    message_b: bytes = b""
    n: int = DEFAULT_N
    decoy_count: int = DEFAULT_DECOYS
    seed: int = DEFAULT_SEED
    attack: Optional[AttackSpec] = None

    def __post_init__(self):
        if self.scheme not in (1, 2):
            raise ConfigError(f"scheme must be 1 or 2, got {self.scheme!r}")
        if self.n % 2 or not 2 <= self.n <= 256:
            raise ConfigError(f"digest length n must be even and in [2, 256], got {self.n}")
        if self.decoy_count < 0:
            raise ConfigError("decoy count must be non-negative")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 bits")
        if self.scheme == 1 and (self.message_a or self.message_b):
            raise ConfigError("scheme 1 takes a single message")
        if self.scheme == 2 and self.message:
            raise ConfigError("scheme 2 takes message_a and message_b")
        if self.attack is not None and type(self.attack).__name__ not in _ATTACKS:
            raise ConfigError(f"unsupported attack {self.attack!r}")
        if isinstance(self.attack, ForgeProxyOutcome):
            allowed = ("S_A", "S_C", "S_D") if self.scheme == 1 else ("S_A", "S_B", "S_C")
            if self.attack.field not in allowed:
                raise ConfigError(f"scheme {self.scheme} has no field {self.attack.field}")

    @property
    def blocks(self) -> int:
        """Number of teleported blocks: 2-bit blocks in scheme 1, single bits in scheme 2."""
        return self.n // 2 if self.scheme == 1 else self.n

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bytes):
                v = v.hex()
            elif f.name == "attack":
                v = attack_to_dict(v)
            d[f.name] = v
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SchemeConfig":
        data = dict(data)
        for k in ("message", "message_a", "message_b"):
            data[k] = bytes.fromhex(data.get(k, ""))
        data["attack"] = attack_from_dict(data.get("attack"))
        return cls(**data)
