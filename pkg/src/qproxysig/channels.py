"""Entangled channel states and message-encoding states for both schemes."""
from __future__ import annotations

import functools

import numpy as np

from .statevec import StateVector, from_kets, make_basis_state, measure_z, tensor

# scheme-2 message qubits; the other particles keep their numbers
QUBIT_A = 10
QUBIT_B = 11

SCHEME1_CHANNEL_LABELS = (3, 4, 5, 6, 7, 8)
SCHEME2_CHANNEL_LABELS = (1, 2, 3, 4, 5)

_FOUR_QUBIT_TERMS = {
    "0000": +1, "0111": -1, "1001": +1, "1110": -1,
    "0110": +1, "0001": +1, "1111": +1, "1000": +1,
}
_CLUSTER_TERMS = ("00000", "00111", "11101", "11010")


def four_qubit_state() -> StateVector:
    """The maximally entangled four-qubit state on particles 3, 4, 5, 6."""
    c = 1 / (2 * np.sqrt(2))
    return from_kets((3, 4, 5, 6), {k: sign * c for k, sign in _FOUR_QUBIT_TERMS.items()})


def epr_pair(labels=(7, 8)) -> StateVector:
    c = 1 / np.sqrt(2)
    return from_kets(labels, {"00": c, "11": c})


@functools.lru_cache(maxsize=None)
def make_channel_scheme1() -> StateVector:
    """Six-particle channel: four-qubit state on (3,4,5,6) times an EPR pair on (7,8)."""
    return tensor(four_qubit_state(), epr_pair((7, 8)))


@functools.lru_cache(maxsize=None)
def make_channel_scheme2() -> StateVector:
    """Five-qubit cluster state on particles 1..5."""
    return from_kets(SCHEME2_CHANNEL_LABELS, {k: 0.5 for k in _CLUSTER_TERMS})


def encode_block_scheme1(two_bits: str, labels=(1, 2)) -> StateVector:
    if len(two_bits) != 2:
        raise ValueError(f"scheme-1 blocks carry exactly 2 bits, got {two_bits!r}")
    return make_basis_state(labels, two_bits)


def encode_bit_scheme2(bit: int, label) -> StateVector:
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    return make_basis_state((label,), str(bit))


def decode_z(state: StateVector, labels, rng) -> str:
    """Read ``labels`` in the computational basis, in the given order."""
    bits = []
    for q in labels:
        b, state = measure_z(state, q, rng)
        bits.append(str(b))
    return "".join(bits)
