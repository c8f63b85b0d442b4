"""Quantum network for probabilistic optimal cloning with a teleported NOT.

The register holds the input qubit S, a shared singlet pair A-B, and a flag
ancilla. A Bell-basis rotation on (S, A), a Toffoli that marks the singlet
component on the ancilla, and the inverse rotation implement a dichotomic
measurement that distinguishes the antisymmetric state of (S, A) from its
complement:

* ancilla reads 1 (probability 1/4): (S, A) collapse to the singlet and the
  input qubit is teleported to B unchanged;
* ancilla reads 0 (probability 3/4): (S, A) are projected onto the symmetric
  subspace and become two optimal clones of the input (fidelity 5/6 each),
  while B is left in the optimally flipped state (fidelity 2/3 against the
  orthogonal qubit).

``project_antisym_complement`` applies the same projection as one direct
matrix action and serves as an independent cross-check of the gate path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    CNOT,
    H,
    RAY_ATOL,
    TOFFOLI,
    X,
    Z,
    DensityMatrix,
    PureState,
    Qubit,
    apply_gate,
    discard_qubit,
    fidelity,
    partial_trace,
    project_qubit,
    reorder,
    tensor,
)

__all__ = [
    "ANCILLA_LABEL",
    "BellLabel",
    "ProtocolOutcome",
    "bell_state",
    "prepare_singlet",
    "bell_to_computational",
    "computational_to_bell",
    "run_teleunot",
    "project_antisym_complement",
    "haar_random_qubit",
]

ANCILLA_LABEL = "anc"

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class BellLabel(Enum):
    """The four maximally entangled two-qubit states."""

    PSI_MINUS = "psi_minus"
    PSI_PLUS = "psi_plus"
    PHI_MINUS = "phi_minus"
    PHI_PLUS = "phi_plus"

    @property
    def computational_bits(self) -> tuple[int, int]:
        """Two-bit outcome this Bell state maps to under the basis rotation."""
        return _BELL_BITS[self]


_BELL_BITS = {
    BellLabel.PSI_MINUS: (1, 1),
    BellLabel.PSI_PLUS: (0, 1),
    BellLabel.PHI_MINUS: (1, 0),
    BellLabel.PHI_PLUS: (0, 0),
}

_BELL_AMPLITUDES = {
    BellLabel.PSI_MINUS: np.array([0, 1, -1, 0]) * _INV_SQRT2,
    BellLabel.PSI_PLUS: np.array([0, 1, 1, 0]) * _INV_SQRT2,
    BellLabel.PHI_MINUS: np.array([1, 0, 0, -1]) * _INV_SQRT2,
    BellLabel.PHI_PLUS: np.array([1, 0, 0, 1]) * _INV_SQRT2,
}


def bell_state(label: BellLabel, qubits: tuple[str, str] = ("S", "A")) -> PureState:
    return PureState(qubits, _BELL_AMPLITUDES[label])


def prepare_singlet(labels: tuple[str, str] = ("A", "B")) -> PureState:
    """Build the singlet (|01> - |10>)/sqrt2 from |00> by H, CNOT, X, Z."""
    a, b = labels
    if a == b:
        raise ValueError("singlet needs two distinct qubit labels")
    state = PureState(labels, [1, 0, 0, 0])
    state = apply_gate(state, H, (a,))
    state = apply_gate(state, CNOT, (a, b))
    state = apply_gate(state, X, (b,))
    state = apply_gate(state, Z, (a,))
    return state


def bell_to_computational(state: PureState, s: str, a: str) -> PureState:
    """Rotate the Bell basis of (s, a) onto the computational basis.

    Maps |Psi-> to |11>, |Psi+> to |01>, |Phi-> to |10> and |Phi+> to |00>,
    with no extra phases: a CNOT from s to a followed by H on s lands
    exactly on that assignment.
    """
    state = apply_gate(state, CNOT, (s, a))
    return apply_gate(state, H, (s,))


def computational_to_bell(state: PureState, s: str, a: str) -> PureState:
    """Exact inverse of :func:`bell_to_computational`."""
    state = apply_gate(state, H, (s,))
    return apply_gate(state, CNOT, (s, a))


@dataclass(frozen=True, eq=False)
class ProtocolOutcome:
    """Both measurement branches of one protocol run.

    The clone-branch quantities (rho_S, rho_A, rho_B and the fidelities)
    are conditioned on ancilla outcome 0; ``teleported_state_B`` is the B
    qubit conditioned on outcome 1.
    """

    p_teleport: float
    p_clone: float
    teleported_state_B: Qubit
    clone_branch_state: PureState
    rho_S: DensityMatrix
    rho_A: DensityMatrix
    rho_B: DensityMatrix
    f_clone_S: float
    f_clone_A: float
    f_unot_B: float


def run_teleunot(phi: Qubit) -> ProtocolOutcome:
    """Run the full network on input ``phi`` and evaluate both branches."""
    state = tensor(phi.as_state("S"), prepare_singlet(("A", "B")))
    state = tensor(state, PureState((ANCILLA_LABEL,), [1, 0]))

    state = bell_to_computational(state, "S", "A")
    state = apply_gate(state, TOFFOLI, ("S", "A", ANCILLA_LABEL))
    state = computational_to_bell(state, "S", "A")

    p_teleport, teleport_branch = project_qubit(state, ANCILLA_LABEL, 1)
    p_clone, clone_branch = project_qubit(state, ANCILLA_LABEL, 0)
    if teleport_branch is None or clone_branch is None:
        raise RuntimeError("degenerate branch probabilities; input state is invalid")

    teleported = _qubit_from_pure_density(partial_trace(teleport_branch, ("B",)))
    clone_state = discard_qubit(clone_branch, ANCILLA_LABEL)

    rho_s = partial_trace(clone_state, ("S",))
    rho_a = partial_trace(clone_state, ("A",))
    rho_b = partial_trace(clone_state, ("B",))
    return ProtocolOutcome(
        p_teleport=p_teleport,
        p_clone=p_clone,
        teleported_state_B=teleported,
        clone_branch_state=clone_state,
        rho_S=rho_s,
        rho_A=rho_a,
        rho_B=rho_b,
        f_clone_S=fidelity(rho_s, phi),
        f_clone_A=fidelity(rho_a, phi),
        f_unot_B=fidelity(rho_b, phi.orthogonal()),
    )


def _qubit_from_pure_density(rho: DensityMatrix) -> Qubit:
    """Extract the qubit from a rank-one density matrix (phase arbitrary)."""
    eigvals, eigvecs = np.linalg.eigh(rho.matrix)
    if abs(eigvals[-1] - 1.0) > RAY_ATOL:
        raise ValueError(f"density matrix is not pure: eigenvalues {eigvals}")
    top = eigvecs[:, -1]
    top = top / np.linalg.norm(top)
    return Qubit(top[0], top[1])


def project_antisym_complement(state: PureState) -> tuple[float, PureState | None]:
    """Project (S, A) onto the complement of their antisymmetric state.

    Applies (I_SA - |Psi-><Psi-|_SA) (x) I_B directly as a matrix, bypassing
    the gate network; returns the squared-norm probability and the
    renormalized state (None when the input is annihilated).
    """
    if set(state.labels) != {"S", "A", "B"}:
        raise ValueError(f"expected register {{S, A, B}}, got {state.labels}")
    ordered = reorder(state, ("S", "A", "B"))
    singlet = _BELL_AMPLITUDES[BellLabel.PSI_MINUS]
    projector = np.kron(np.eye(4) - np.outer(singlet, singlet.conj()), np.eye(2))
    out = projector @ ordered.amplitudes
    prob = float(np.vdot(out, out).real)
    if prob < 1e-14:
        return prob, None
    return prob, PureState(("S", "A", "B"), out / math.sqrt(prob))


def haar_random_qubit(rng: np.random.Generator) -> Qubit:
    """Qubit drawn uniformly from the Bloch sphere.

    cos(theta) is uniform on [-1, 1] and the relative phase uniform on
    [0, 2*pi), which together give the rotation-invariant measure.
    """
    cos_theta = rng.uniform(-1.0, 1.0)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    theta = math.acos(cos_theta)
    return Qubit(math.cos(theta / 2.0), math.sin(theta / 2.0) * complex(math.cos(phase), math.sin(phase)))
