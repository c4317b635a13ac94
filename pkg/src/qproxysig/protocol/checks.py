"""
Verification predicates shared by the live run and offline replay.

Each predicate reads an evidence dict::

    {"n": int,
     "payloads": {label: {field: bits}},   # decrypted classical messages
     "blind": {key_name: bits},            # blinding pads (first n bits)
     "decoded": {name: bits}}              # Trent's readout of teleported qubits
"""
from __future__ import annotations

from typing import Callable, NamedTuple

from ..sigcrypto import blind, digest


class Check(NamedTuple):
    party: str
    name: str
    reason: str
    predicate: Callable[[dict], bool]


def bits_to_bytes(bits: str) -> bytes:
    return int(bits, 2).to_bytes(len(bits) // 8, "big") if bits else b""


def expected_blinded(ev: dict, message_label: str, key_name: str) -> str:
    message = bits_to_bytes(ev["payloads"][message_label]["m"])
    return blind(digest(message, ev["n"]), ev["blind"][key_name])


def _p(ev, label, name):
    return ev["payloads"][label][name]


SCHEME1_CHECKS = (
    Check("Bob", "S_A match (S_1)", "S_A mismatch",
          lambda ev: _p(ev, "S_1", "S_A") == _p(ev, "E_K_AB{S_A}", "S_A")),
    Check("Bob", "S_A match (S_2)", "S_A mismatch",
          lambda ev: _p(ev, "S_2", "S_A") == _p(ev, "E_K_AB{S_A}", "S_A")),
    Check("Trent", "S_A cross-check", "S_A cross-check failed",
          lambda ev: _p(ev, "E_K_TA{S_A}", "S_A")
          == _p(ev, "E_K_TC{S_A,S_C}", "S_A")
          == _p(ev, "E_K_TD{S_A,S_D}", "S_A")),
    Check("Trent", "proxy record consistency", "proxy record mismatch",
          lambda ev: _p(ev, "E_K_TB{S_A,S_C,S_D}", "S_A") == _p(ev, "E_K_TC{S_A,S_C}", "S_A")
          and _p(ev, "E_K_TB{S_A,S_C,S_D}", "S_C") == _p(ev, "E_K_TC{S_A,S_C}", "S_C")
          and _p(ev, "E_K_TB{S_A,S_C,S_D}", "S_D") == _p(ev, "E_K_TD{S_A,S_D}", "S_D")),
    Check("Trent", "M' = M", "M' != M",
          lambda ev: ev["decoded"]["M'"] == expected_blinded(ev, "m", "K_TA")),
)

SCHEME2_CHECKS = (
    Check("Bob", "S_A match (S_1)", "S_A mismatch",
          lambda ev: _p(ev, "S_1", "S_A") == _p(ev, "E_K_AB{S_A}", "S_A")),
    Check("Alice", "S_B match (S_2)", "S_B mismatch",
          lambda ev: _p(ev, "S_2", "S_B") == _p(ev, "E_K_AB{S_B}", "S_B")),
    Check("Trent", "proxy record consistency", "proxy record mismatch",
          lambda ev: _p(ev, "E_K_TB{S_A,S_C}", "S_A") == _p(ev, "E_K_TC{S_A,S_C}", "S_A")
          and _p(ev, "E_K_TB{S_A,S_C}", "S_C") == _p(ev, "E_K_TC{S_A,S_C}", "S_C")
          and _p(ev, "E_K_TA{S_B,S_C}", "S_B") == _p(ev, "E_K_TC{S_B,S_C}", "S_B")
          and _p(ev, "E_K_TA{S_B,S_C}", "S_C") == _p(ev, "E_K_TC{S_B,S_C}", "S_C")
          and _p(ev, "E_K_TC{S_A,S_C}", "S_C") == _p(ev, "E_K_TC{S_B,S_C}", "S_C")),
    Check("Trent", "M''' = M'", "M''' != M'",
          lambda ev: ev["decoded"]["M'''"] == expected_blinded(ev, "m'", "K_TA")),
    Check("Trent", "M'''' = M''", "M'''' != M''",
          lambda ev: ev["decoded"]["M''''"] == expected_blinded(ev, "m''", "K_TB")),
)

CHECKS = {1: SCHEME1_CHECKS, 2: SCHEME2_CHECKS}


def check_by_name(scheme: int, name: str) -> Check:
    for c in CHECKS[scheme]:
        if c.name == name:
            return c
    raise KeyError(name)


def accepted_records(scheme: int, ev: dict) -> tuple:
    """The (m, proxy outcome) tuples Trent confirms on acceptance."""
    p = ev["payloads"]
    if scheme == 1:
        m = bits_to_bytes(p["m"]["m"]).hex()
        return ({"m": m, "S_C": p["E_K_TC{S_A,S_C}"]["S_C"], "S_D": p["E_K_TD{S_A,S_D}"]["S_D"]},)
    return (
        {"m": bits_to_bytes(p["m'"]["m"]).hex(), "S_A": p["E_K_TC{S_A,S_C}"]["S_A"],
         "S_C": p["E_K_TC{S_A,S_C}"]["S_C"]},
        {"m": bits_to_bytes(p["m''"]["m"]).hex(), "S_B": p["E_K_TC{S_B,S_C}"]["S_B"],
         "S_C": p["E_K_TC{S_B,S_C}"]["S_C"]},
    )


# particles Trent reads out for each decoded sequence
READOUTS = {1: {"M'": (6, 8)}, 2: {"M'''": (2,), "M''''": (5,)}}
BLIND_KEYS = {1: ("K_TA",), 2: ("K_TA", "K_TB")}
