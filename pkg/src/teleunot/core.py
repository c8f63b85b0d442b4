"""Exact state-vector quantum mechanics over small labelled qubit registers.

Amplitude ordering: the first label of a register is the most significant
bit of the basis index, so ``PureState(("S", "A"), amps)`` stores the
coefficient of |1>_S |0>_A at index 2. Every operation addresses qubits by
label, never by raw index, which keeps the convention private to this
module. All values are immutable after construction; operations return new
values.

Computational basis doubles as the polarization basis: |0> is horizontal,
|1> is vertical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Algebraic identities (norms, traces, unitarity) hold to double precision
# at <= 16 dimensions; ray comparison is looser because it may follow an
# eigenvector extraction.
ATOL = 1e-12
RAY_ATOL = 1e-9
# Partial traces of normalized states can produce eigenvalues that dip this
# far below zero in floating point.
EIGENVALUE_FLOOR = -1e-10
# Born probabilities below this are treated as an impossible outcome.
PROB_FLOOR = 1e-14

__all__ = [
    "ATOL",
    "RAY_ATOL",
    "Qubit",
    "PureState",
    "DensityMatrix",
    "Gate",
    "I",
    "H",
    "X",
    "Z",
    "CNOT",
    "TOFFOLI",
    "tensor",
    "apply_gate",
    "project_qubit",
    "discard_qubit",
    "reorder",
    "partial_trace",
    "fidelity",
    "ray_overlap",
    "states_equal_up_to_phase",
]


@dataclass(frozen=True)
class Qubit:
    """Single-qubit pure state alpha|0> + beta|1>."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm_sq = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm_sq - 1.0) > ATOL:
            raise ValueError(f"qubit amplitudes not normalized: |a|^2+|b|^2 = {norm_sq}")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def orthogonal(self) -> "Qubit":
        """The unique state orthogonal to this one (phase convention -b*, a*)."""
        return Qubit(-np.conjugate(self.beta), np.conjugate(self.alpha))

    def as_state(self, label: str) -> "PureState":
        return PureState((label,), self.vector)

    @classmethod
    def from_label(cls, name: str) -> "Qubit":
        """Named polarization states: H, V, D = (H+V)/sqrt2, R = (H+iV)/sqrt2."""
        try:
            return cls(*_NAMED_QUBITS[name.upper()])
        except KeyError:
            known = ", ".join(sorted(_NAMED_QUBITS))
            raise ValueError(f"unknown polarization label {name!r} (expected one of {known})")


_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_NAMED_QUBITS = {
    "H": (1.0, 0.0),
    "V": (0.0, 1.0),
    "D": (_INV_SQRT2, _INV_SQRT2),
    "R": (_INV_SQRT2, _INV_SQRT2 * 1j),
}


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over an ordered register of labelled qubits."""

    labels: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels in {labels}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if amps.size != 2 ** len(labels):
            raise ValueError(
                f"amplitude vector of length {amps.size} does not match "
                f"{len(labels)} qubit(s)"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state vector not normalized: |psi| = {norm}")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"qubit {label!r} not in register {self.labels}") from None

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>; registers must hold the same qubits."""
        if set(self.labels) != set(other.labels):
            raise ValueError(f"registers differ: {self.labels} vs {other.labels}")
        aligned = other if other.labels == self.labels else reorder(other, self.labels)
        return complex(np.vdot(self.amplitudes, aligned.amplitudes))

    def _tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.num_qubits)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace operator over a labelled qubit subset."""

    labels: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels in {labels}")
        dim = 2 ** len(labels)
        mat = np.asarray(self.matrix, dtype=complex).copy()
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} does not match {len(labels)} qubit(s)")
        if not np.allclose(mat, mat.conj().T, atol=ATOL):
            raise ValueError("density matrix is not Hermitian")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > ATOL:
            raise ValueError(f"density matrix trace is {trace}, expected 1")
        smallest = float(np.linalg.eigvalsh(mat)[0])
        if smallest < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {smallest}")
        mat.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", mat)

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    @staticmethod
    def from_pure(state: PureState) -> "DensityMatrix":
        return DensityMatrix(state.labels, np.outer(state.amplitudes, state.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class Gate:
    """Named unitary on 1-3 qubits; unitarity is checked at construction."""

    name: str
    matrix: np.ndarray
    arity: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"gate {self.name!r} matrix is not square: {mat.shape}")
        dim = mat.shape[0]
        arity = int(round(math.log2(dim)))
        if 2**arity != dim or not 1 <= arity <= 3:
            raise ValueError(f"gate {self.name!r} dimension {dim} is not 2, 4 or 8")
        if not np.allclose(mat @ mat.conj().T, np.eye(dim), atol=ATOL):
            raise ValueError(f"gate {self.name!r} matrix is not unitary")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "arity", arity)


I = Gate("I", np.eye(2))
H = Gate("H", np.array([[1, 1], [1, -1]]) * _INV_SQRT2)
X = Gate("X", np.array([[0, 1], [1, 0]]))
Z = Gate("Z", np.array([[1, 0], [0, -1]]))
# Control is the first target label, target the last.
CNOT = Gate("CNOT", np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
]))
TOFFOLI = Gate("Toffoli", np.block([
    [np.eye(6), np.zeros((6, 2))],
    [np.zeros((2, 6)), np.array([[0, 1], [1, 0]])],
]))


def tensor(a: PureState, b: PureState) -> PureState:
    """Kronecker product of two registers, in declared qubit order."""
    common = set(a.labels) & set(b.labels)
    if common:
        raise ValueError(f"label collision when tensoring registers: {sorted(common)}")
    return PureState(a.labels + b.labels, np.kron(a.amplitudes, b.amplitudes))


def apply_gate(state: PureState, gate: Gate, targets: Sequence[str]) -> PureState:
    """Apply ``gate`` to the named target qubits, leaving the rest untouched."""
    targets = tuple(targets)
    if len(targets) != gate.arity:
        raise ValueError(
            f"gate {gate.name!r} acts on {gate.arity} qubit(s), got targets {targets}"
        )
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated target qubit in {targets}")
    axes = [state.axis(t) for t in targets]
    k = gate.arity
    psi = state._tensor_view()
    op = gate.matrix.reshape([2] * (2 * k))
    # Contract the gate's input indices with the target axes, then put the
    # output indices back where the targets were.
    psi = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    psi = np.moveaxis(psi, range(k), axes)
    return PureState(state.labels, psi.reshape(-1))


def project_qubit(state: PureState, label: str, outcome: int) -> tuple[float, PureState | None]:
    """Projective measurement of one qubit in the computational basis.

    Returns the Born probability of ``outcome`` and the renormalized
    post-measurement state (None when the probability is negligible).
    """
    if outcome not in (0, 1):
        raise ValueError(f"measurement outcome must be 0 or 1, got {outcome}")
    ax = state.axis(label)
    psi = state._tensor_view()
    selected = np.take(psi, outcome, axis=ax)
    prob = float(np.sum(np.abs(selected) ** 2))
    if prob < PROB_FLOOR:
        return prob, None
    post = np.zeros_like(psi)
    index: list[int | slice] = [slice(None)] * state.num_qubits
    index[ax] = outcome
    post[tuple(index)] = selected / math.sqrt(prob)
    return prob, PureState(state.labels, post.reshape(-1))


def discard_qubit(state: PureState, label: str) -> PureState:
    """Drop a qubit that sits in a definite computational basis state."""
    ax = state.axis(label)
    psi = state._tensor_view()
    slices = [np.take(psi, k, axis=ax) for k in (0, 1)]
    weights = [float(np.sum(np.abs(s) ** 2)) for s in slices]
    for k in (0, 1):
        if weights[1 - k] <= PROB_FLOOR:
            rest = tuple(l for l in state.labels if l != label)
            return PureState(rest, slices[k].reshape(-1) / math.sqrt(weights[k]))
    raise ValueError(f"qubit {label!r} is not in a definite basis state (weights {weights})")


def reorder(state: PureState, labels: Sequence[str]) -> PureState:
    """Permute the register into the given label order."""
    labels = tuple(labels)
    if set(labels) != set(state.labels) or len(labels) != state.num_qubits:
        raise ValueError(f"cannot reorder {state.labels} as {labels}")
    perm = [state.axis(l) for l in labels]
    return PureState(labels, state._tensor_view().transpose(perm).reshape(-1))


def partial_trace(obj: PureState | DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    """Reduced density matrix over ``keep``, ordered as given."""
    keep = tuple(keep)
    if not keep:
        raise ValueError("keep set must not be empty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate labels in keep set {keep}")
    missing = [l for l in keep if l not in obj.labels]
    if missing:
        raise ValueError(f"labels {missing} not in register {obj.labels}")
    drop = [l for l in obj.labels if l not in keep]
    n, k = len(obj.labels), len(keep)

    if isinstance(obj, PureState):
        perm = [obj.axis(l) for l in keep] + [obj.axis(l) for l in drop]
        block = obj._tensor_view().transpose(perm).reshape(2**k, -1)
        return DensityMatrix(keep, block @ block.conj().T)

    axis_of = {l: i for i, l in enumerate(obj.labels)}
    rho = obj.matrix.reshape([2] * (2 * n))
    perm = (
        [axis_of[l] for l in keep]
        + [axis_of[l] for l in drop]
        + [axis_of[l] + n for l in keep]
        + [axis_of[l] + n for l in drop]
    )
    rho = rho.transpose(perm).reshape(2**k, 2 ** (n - k), 2**k, 2 ** (n - k))
    return DensityMatrix(keep, np.einsum("ajbj->ab", rho))


def fidelity(rho: DensityMatrix, target: Qubit) -> float:
    """Overlap <target| rho |target> of a one-qubit state with a pure target."""
    if rho.num_qubits != 1:
        raise ValueError(f"fidelity target is one qubit, density matrix has {rho.num_qubits}")
    vec = target.vector
    value = complex(vec.conj() @ rho.matrix @ vec)
    if abs(value.imag) > ATOL or not -ATOL <= value.real <= 1.0 + ATOL:
        raise ValueError(f"fidelity {value} outside [0, 1]")
    return min(max(value.real, 0.0), 1.0)


def ray_overlap(a: PureState, b: PureState) -> float:
    """|<a|b>|, the phase-insensitive overlap of two states."""
    return abs(a.overlap(b))


def states_equal_up_to_phase(a: PureState, b: PureState, atol: float = RAY_ATOL) -> bool:
    """Ray equality: |<a|b>| = 1 within ``atol``."""
    return abs(ray_overlap(a, b) - 1.0) <= atol
