"""
Dense state-vector simulation of small labelled qubit registers.

Amplitude ordering is MSB-first: the first label of a register is the most
significant bit of the amplitude index, so ``|b1 b2 ... bk>`` lives at index
``int("b1b2...bk", 2)``.  Measured qubits are removed from the register and
the residual state is renormalised.  Global phase is never meaningful; compare
states with :func:`fidelity`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Hashable, NamedTuple, Sequence

import numpy as np

NORM_TOL = 1e-9
UNITARY_TOL = 1e-9
# branches below this probability are treated as impossible
PROB_FLOOR = 1e-12
MAX_QUBITS = 12

_SQRT2_INV = 1 / np.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV

KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) * _SQRT2_INV
KET_MINUS = np.array([1, -1], dtype=complex) * _SQRT2_INV

Z_BASIS = (KET_0, KET_1)
X_BASIS = (KET_PLUS, KET_MINUS)


class StateError(ValueError):
    """Invalid register operation (bad labels, shapes, or an unnormalisable branch)."""


class Pauli(enum.Enum):
    """Pauli corrections modulo global phase.  ``XZ`` means Z first, then X."""

    I = (0, 0)
    X = (1, 0)
    Z = (0, 1)
    XZ = (1, 1)

    @property
    def matrix(self) -> np.ndarray:
        x, z = self.value
        return (X if x else I2) @ (Z if z else I2)

    def then(self, other: "Pauli") -> "Pauli":
        """Apply ``self`` and then ``other``; result is exact up to phase."""
        return Pauli((self.value[0] ^ other.value[0], self.value[1] ^ other.value[1]))

    @classmethod
    def from_name(cls, name: str) -> "Pauli":
        return cls[name]


class BellOutcome(NamedTuple):
    """Bell-measurement result.  parity 0 is the Phi family, phase 1 is the minus sign."""

    parity: int
    phase: int

    @property
    def bits(self) -> str:
        return f"{self.parity}{self.phase}"

    @classmethod
    def from_bits(cls, bits: str) -> "BellOutcome":
        if len(bits) != 2 or set(bits) - {"0", "1"}:
            raise ValueError(f"not a Bell outcome encoding: {bits!r}")
        return cls(int(bits[0]), int(bits[1]))

    @property
    def vector(self) -> np.ndarray:
        v = np.zeros(4, dtype=complex)
        if self.parity == 0:
            v[0b00], v[0b11] = 1, (-1) ** self.phase
        else:
            v[0b01], v[0b10] = 1, (-1) ** self.phase
        return v * _SQRT2_INV


_PAULI_MATRICES = {p: p.matrix for p in Pauli}

BELL_OUTCOMES = tuple(BellOutcome(p, s) for p in (0, 1) for s in (0, 1))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalised pure state over an ordered register of unique qubit labels."""

    labels: tuple[Hashable, ...]
    amps: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        object.__setattr__(self, "amps", amps)
        if len(set(labels)) != len(labels):
            raise StateError(f"duplicate qubit labels in {labels}")
        if len(labels) > MAX_QUBITS:
            raise StateError(f"register of {len(labels)} qubits exceeds {MAX_QUBITS}")
        if amps.size != 2 ** len(labels):
            raise StateError(f"{amps.size} amplitudes for {len(labels)} qubits")
        amps.flags.writeable = False
        if not np.all(np.isfinite(amps)):
            raise StateError("non-finite amplitude")
        norm = np.sqrt(np.vdot(amps, amps).real)
        if abs(norm - 1) > NORM_TOL:
            raise StateError(f"state not normalised (norm={norm!r})")

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def axis(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise StateError(f"qubit {label!r} not in register {self.labels}") from None

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.num_qubits)

    def amplitude(self, bits: str) -> complex:
        """Amplitude of the computational basis ket ``bits`` (register order)."""
        if len(bits) != self.num_qubits:
            raise StateError(f"expected {self.num_qubits} bits, got {bits!r}")
        return complex(self.amps[int(bits, 2)]) if bits else complex(self.amps[0])

    def __repr__(self):
        return f"StateVector(labels={self.labels}, amps={np.round(self.amps, 6)})"


def from_amplitudes(labels: Sequence, amps, normalize: bool = False) -> StateVector:
    amps = np.asarray(amps, dtype=complex)
    if normalize:
        amps = amps / np.linalg.norm(amps)
    return StateVector(tuple(labels), amps)


def from_kets(labels: Sequence, kets: dict[str, complex]) -> StateVector:
    """Build a state from ``{"0101": coefficient, ...}`` in register order."""
    amps = np.zeros(2 ** len(labels), dtype=complex)
    for bits, coeff in kets.items():
        if len(bits) != len(labels):
            raise StateError(f"ket {bits!r} does not match {len(labels)} labels")
        amps[int(bits, 2)] += coeff
    return StateVector(tuple(labels), amps)


def make_basis_state(labels: Sequence, bits: str) -> StateVector:
    if len(bits) != len(labels):
        raise StateError(f"{len(bits)} bits given for {len(labels)} labels")
    if set(bits) - {"0", "1"}:
        raise StateError(f"not a bitstring: {bits!r}")
    amps = np.zeros(2 ** len(labels), dtype=complex)
    amps[int(bits, 2) if bits else 0] = 1
    return StateVector(tuple(labels), amps)


def single_qubit(label, vector) -> StateVector:
    return StateVector((label,), np.asarray(vector, dtype=complex))


def tensor(*states: StateVector) -> StateVector:
    """Kronecker product; labels are concatenated in argument order."""
    labels: tuple = ()
    amps = np.ones(1, dtype=complex)
    for s in states:
        clash = set(labels) & set(s.labels)
        if clash:
            raise StateError(f"overlapping labels {sorted(clash, key=str)}")
        labels += s.labels
        amps = np.kron(amps, s.amps)
    return StateVector(labels, amps)


def reorder(state: StateVector, labels: Sequence) -> StateVector:
    """Same state with the register permuted into ``labels`` order."""
    labels = tuple(labels)
    if set(labels) != set(state.labels) or len(labels) != len(state.labels):
        raise StateError(f"cannot reorder {state.labels} into {labels}")
    if labels == state.labels:
        return state
    perm = [state.axis(q) for q in labels]
    amps = np.transpose(state.tensor_view(), perm).reshape(-1)
    return StateVector(labels, amps)


def relabel(state: StateVector, mapping: dict) -> StateVector:
    """Rename qubits without touching amplitudes."""
    return StateVector(tuple(mapping.get(q, q) for q in state.labels), state.amps)


def is_unitary(gate: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    gate = np.asarray(gate)
    return gate.ndim == 2 and gate.shape[0] == gate.shape[1] and np.allclose(
        gate.conj().T @ gate, np.eye(gate.shape[0]), atol=tol
    )


def apply_1q(state: StateVector, q, gate) -> StateVector:
    if isinstance(gate, Pauli):
        gate = _PAULI_MATRICES[gate]
    elif gate is not H:
        gate = np.asarray(gate, dtype=complex)
        if gate.shape != (2, 2) or not is_unitary(gate):
            raise StateError("gate is not a 2x2 unitary")
    k = state.axis(q)
    psi = np.tensordot(gate, state.tensor_view(), axes=([1], [k]))
    psi = np.moveaxis(psi, 0, k)
    return StateVector(state.labels, psi.reshape(-1))


def apply_paulis(state: StateVector, corrections: dict) -> StateVector:
    for q, p in corrections.items():
        if p is not Pauli.I:
            state = apply_1q(state, q, p)
    return state


def project(state: StateVector, qubits: Sequence, vector) -> tuple[float, StateVector | None]:
    """
    Project ``qubits`` onto ``vector`` and remove them from the register.

    Returns the branch probability and the renormalised residual, or ``None``
    for the residual when the branch is impossible.
    """
    qubits = tuple(qubits)
    if len(set(qubits)) != len(qubits):
        raise StateError(f"repeated qubit in {qubits}")
    axes = [state.axis(q) for q in qubits]
    bra = np.asarray(vector, dtype=complex).conj().reshape((2,) * len(qubits))
    rest = np.tensordot(state.tensor_view(), bra, axes=(axes, list(range(len(qubits)))))
    rest = rest.reshape(-1)
    prob = float(np.vdot(rest, rest).real)
    labels = tuple(q for q in state.labels if q not in qubits)
    if prob < PROB_FLOOR:
        return prob, None
    return prob, StateVector(labels, rest / np.sqrt(prob))


def branch_probabilities(state: StateVector, qubits: Sequence, basis: Sequence) -> np.ndarray:
    return np.array([project(state, qubits, v)[0] for v in basis])


def _basis_matrix(basis: Sequence) -> np.ndarray:
    return np.conj(np.stack([np.asarray(v, dtype=complex) for v in basis], axis=-1))


def _sample(state: StateVector, qubits: Sequence, bras: np.ndarray, rng) -> tuple[int, StateVector]:
    """Born-rule sample over all basis branches at once; ``bras`` is conj(basis) as columns."""
    if len(set(qubits)) != len(qubits):
        raise StateError(f"repeated qubit in {tuple(qubits)}")
    axes = [state.axis(q) for q in qubits]
    k = len(qubits)
    bra = bras.reshape((2,) * k + (bras.shape[-1],))
    rest = np.tensordot(state.tensor_view(), bra, axes=(axes, list(range(k))))
    rest = rest.reshape(-1, bras.shape[-1])
    probs = np.einsum("ij,ij->j", rest.conj(), rest).real
    probs[probs < PROB_FLOOR] = 0.0
    total = probs.sum()
    if total < 1 - NORM_TOL:
        raise StateError(f"measurement branches sum to {total!r}")
    cumulative = np.cumsum(probs)
    idx = int(np.searchsorted(cumulative, rng.random() * total, side="right"))
    idx = min(idx, len(probs) - 1)
    while probs[idx] == 0.0:
        # the draw landed on the far edge of the cumulative sum; step back to a live branch
        idx -= 1
    labels = tuple(q for q in state.labels if q not in qubits)
    return idx, StateVector(labels, rest[:, idx] / np.sqrt(probs[idx]))


_BELL_BRAS = _basis_matrix([b.vector for b in BELL_OUTCOMES])
_Z_BRAS = _basis_matrix(Z_BASIS)
_X_BRAS = _basis_matrix(X_BASIS)


def measure_bell(state: StateVector, q1, q2, rng) -> tuple[BellOutcome, StateVector]:
    if q1 == q2:
        raise StateError("Bell measurement needs two distinct qubits")
    idx, residual = _sample(state, (q1, q2), _BELL_BRAS, rng)
    return BELL_OUTCOMES[idx], residual


def measure_z(state: StateVector, q, rng) -> tuple[int, StateVector]:
    return _sample(state, (q,), _Z_BRAS, rng)


def measure_x(state: StateVector, q, rng) -> tuple[int, StateVector]:
    """Measure in {|+>, |->}; bit 0 means |+>."""
    return _sample(state, (q,), _X_BRAS, rng)


def project_bell(state: StateVector, q1, q2, outcome: BellOutcome):
    return project(state, (q1, q2), outcome.vector)


def project_z(state: StateVector, q, bit: int):
    return project(state, (q,), Z_BASIS[bit])


def project_x(state: StateVector, q, bit: int):
    return project(state, (q,), X_BASIS[bit])


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 after aligning b's register order with a's."""
    if set(a.labels) != set(b.labels):
        raise StateError(f"label mismatch: {a.labels} vs {b.labels}")
    b = reorder(b, a.labels)
    return float(min(1.0, abs(np.vdot(a.amps, b.amps)) ** 2))


def factor_out(state: StateVector, q, tol: float = 1e-9) -> tuple[StateVector, StateVector]:
    """Split a product state into (qubit ``q``, rest).  Raises if ``q`` is entangled."""
    state = reorder(state, (q,) + tuple(l for l in state.labels if l != q))
    m = state.amps.reshape(2, -1)
    u, s, vh = np.linalg.svd(m)
    if s.size > 1 and s[1] > tol:
        raise StateError(f"qubit {q!r} is entangled with the rest of the register")
    return StateVector((q,), u[:, 0]), StateVector(state.labels[1:], vh[0])
