"""Monte Carlo and analytic model of polarization cloning on a beamsplitter.

Two photons meet on a 50:50 beamsplitter: the signal photon S carries the
qubit to clone, the ancilla photon A arrives in a fully mixed polarization
state, and a delay stage sets their temporal-mode overlap amplitude
v in [0, 1]. Bunching of both photons onto output mode 1 projects the
polarization pair onto the symmetric subspace. The analyzer on mode 1 (a
waveplate plus polarizing splitter set to transmit the signal polarization,
followed by a 50:50 splitter acting as a two-photon counter) turns bunched
pairs into detector coincidences:

* [D_A1, D_A2] fires when both photons carry the signal polarization (the
  clone coincidence); its rate grows as 1 + v^2;
* [D_A2, D_B] fires when the pair splits into signal / orthogonal
  polarizations (the anti-clone coincidence); its rate does not depend on v.

The peak-to-baseline ratio R of the clone rate therefore equals 1 + v^2 and
maps to the cloning fidelity via F = (2R + 1)/(2R + 2): full overlap gives
R = 2 and the optimal F = 5/6. Detectors are ideal (unit efficiency, no
dark counts); ``v_max`` caps the achievable overlap to emulate imperfect
mode matching. Only output mode 1 is analyzed; mode-2 events never produce
a monitored coincidence.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .circuit import haar_random_qubit
from .core import DensityMatrix, Qubit

__all__ = [
    "SPEED_OF_LIGHT_UM_PER_FS",
    "DEFAULT_SEED",
    "ANCILLA_MODELS",
    "POL_MATCHED",
    "POL_ORTHOGONAL",
    "DETECTOR_A1",
    "DETECTOR_A2",
    "DETECTOR_B",
    "Routing",
    "PhotonPair",
    "DetectionEvent",
    "CoincidenceTally",
    "DelayScanConfig",
    "overlap_from_delay",
    "delay_from_position",
    "baseline_position_threshold",
    "default_z_values",
    "sample_ancilla",
    "beamsplitter_branch_probabilities",
    "run_trial",
    "run_scan",
    "fidelity_from_r",
    "analytic_mode1_state",
    "mode1_clone_fidelity",
]

SPEED_OF_LIGHT_UM_PER_FS = 0.299792458

# Used whenever the caller does not provide a seed; never replaced by
# entropy, so default runs are reproducible.
DEFAULT_SEED = 12345

ANCILLA_MODELS = ("linear-waveplate", "haar")

# Polarization labels on mode 1, in the analysis basis of the signal qubit.
POL_MATCHED = "phi"
POL_ORTHOGONAL = "phi_perp"

DETECTOR_A1 = "D_A1"
DETECTOR_A2 = "D_A2"
DETECTOR_B = "D_B"


class Routing(Enum):
    """Where the two photons leave the beamsplitter."""

    BOTH_MODE1 = "both_mode1"
    BOTH_MODE2 = "both_mode2"
    SPLIT_MODES = "split_modes"


def delay_from_position(z_um: float) -> float:
    """Mutual photon delay in fs for a stage position Z = 2*dt*c (micrometers)."""
    return z_um / (2.0 * SPEED_OF_LIGHT_UM_PER_FS)


def overlap_from_delay(z_um: float, tau_coh_fs: float) -> float:
    """Temporal-mode overlap amplitude for stage position ``z_um``.

    Gaussian wavepacket model: v = exp(-(dt / tau_coh)^2) with dt = Z/(2c).
    Full overlap (v = 1) at Z = 0; photons are effectively distinguishable
    (v < 0.01) beyond |dt| > 2.2 tau_coh.
    """
    if tau_coh_fs <= 0:
        raise ValueError(f"coherence time must be positive, got {tau_coh_fs}")
    ratio = delay_from_position(z_um) / tau_coh_fs
    return math.exp(-(ratio * ratio))


def baseline_position_threshold(tau_coh_fs: float, coherence_times: float = 3.0) -> float:
    """Stage position (um) beyond which a point counts as interference-free."""
    return coherence_times * tau_coh_fs * 2.0 * SPEED_OF_LIGHT_UM_PER_FS


def default_z_values(
    tau_coh_fs: float = 80.0, points: int = 21, delay_span_coh_times: float = 5.0
) -> tuple[float, ...]:
    """Symmetric stage scan covering +-``delay_span_coh_times`` of delay."""
    z_max = delay_span_coh_times * tau_coh_fs * 2.0 * SPEED_OF_LIGHT_UM_PER_FS
    return tuple(float(z) for z in np.linspace(-z_max, z_max, points))


def sample_ancilla(rng: np.random.Generator, model: str = "linear-waveplate") -> Qubit:
    """Draw one ancilla polarization from an ensemble that averages to I/2.

    ``linear-waveplate`` mimics a half-wave plate spun to a uniform random
    angle acting on horizontal light: cos(chi)|H> + sin(chi)|V> with chi
    uniform on [0, pi). ``haar`` draws from the full Bloch sphere instead;
    both ensembles have the same average and must give the same statistics.
    """
    if model == "linear-waveplate":
        chi = rng.uniform(0.0, math.pi)
        return Qubit(math.cos(chi), math.sin(chi))
    if model == "haar":
        return haar_random_qubit(rng)
    raise ValueError(f"unknown ancilla model {model!r} (expected one of {ANCILLA_MODELS})")


@dataclass(frozen=True, eq=False)
class PhotonPair:
    """Polarizations of the two input photons and their temporal overlap."""

    pol_S: Qubit
    pol_A: Qubit
    overlap_v: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.overlap_v <= 1.0:
            raise ValueError(f"overlap amplitude must lie in [0, 1], got {self.overlap_v}")


def beamsplitter_branch_probabilities(
    pair: PhotonPair,
) -> dict[tuple[Routing, tuple[str, ...]], float]:
    """Exact routing probabilities for one photon pair on the 50:50 splitter.

    The ancilla polarization is decomposed onto the signal polarization
    (weight p_par) and its orthogonal complement (p_perp), and its temporal
    mode onto matched (amplitude v) and orthogonal components. Matched
    components bunch with Bose enhancement, distinguishable ones route
    independently; the orthogonal final states add incoherently:

    * both photons on one mode, matched polarization: p_par (1 + v^2) / 4;
    * both photons on one mode, mixed polarizations:  p_perp / 4;
    * photons split, matched polarization on mode 1:  p_par (1 - v^2) / 2
      + p_perp / 4;
    * photons split, orthogonal polarization on 1:    p_perp / 4.

    Keys are (routing, polarizations seen on mode 1 in the analysis basis).
    """
    amp_par = complex(np.vdot(pair.pol_S.vector, pair.pol_A.vector))
    amp_perp = complex(np.vdot(pair.pol_S.orthogonal().vector, pair.pol_A.vector))
    p_par = abs(amp_par) ** 2
    p_perp = abs(amp_perp) ** 2
    v_sq = pair.overlap_v**2
    return {
        (Routing.BOTH_MODE1, (POL_MATCHED, POL_MATCHED)): p_par * (1.0 + v_sq) / 4.0,
        (Routing.BOTH_MODE1, (POL_MATCHED, POL_ORTHOGONAL)): p_perp / 4.0,
        (Routing.BOTH_MODE2, ()): p_par * (1.0 + v_sq) / 4.0 + p_perp / 4.0,
        (Routing.SPLIT_MODES, (POL_MATCHED,)): p_par * (1.0 - v_sq) / 2.0 + p_perp / 4.0,
        (Routing.SPLIT_MODES, (POL_ORTHOGONAL,)): p_perp / 4.0,
    }


@dataclass(frozen=True)
class DetectionEvent:
    """One trial's routing, mode-1 polarizations, and detector hits."""

    routing: Routing
    mode1_pols: tuple[str, ...]
    detector_hits: frozenset[str]

    def __post_init__(self) -> None:
        expected = {Routing.BOTH_MODE1: 2, Routing.BOTH_MODE2: 0, Routing.SPLIT_MODES: 1}
        if len(self.mode1_pols) != expected[self.routing]:
            raise ValueError(
                f"{self.routing.value} carries {expected[self.routing]} photon(s) on "
                f"mode 1, got polarizations {self.mode1_pols}"
            )
        n_orth = self.mode1_pols.count(POL_ORTHOGONAL)
        n_matched = self.mode1_pols.count(POL_MATCHED)
        if (DETECTOR_B in self.detector_hits) != (n_orth > 0):
            raise ValueError("D_B hit inconsistent with mode-1 polarizations")
        n_a_hits = len(self.detector_hits & {DETECTOR_A1, DETECTOR_A2})
        if n_a_hits > n_matched:
            raise ValueError("more D_A hits than matched-polarization photons")

    @property
    def is_clone_coincidence(self) -> bool:
        return {DETECTOR_A1, DETECTOR_A2} <= self.detector_hits

    @property
    def is_anticlone_coincidence(self) -> bool:
        return {DETECTOR_A2, DETECTOR_B} <= self.detector_hits


def _cascade_hits(rng: np.random.Generator, mode1_pols: tuple[str, ...]) -> frozenset[str]:
    """Route mode-1 photons through the analyzer to detectors.

    Orthogonal-polarization photons are reflected to D_B; matched ones are
    transmitted and then split 50:50 between D_A1 and D_A2, independently.
    """
    hits: set[str] = set()
    for pol in mode1_pols:
        if pol == POL_ORTHOGONAL:
            hits.add(DETECTOR_B)
        else:
            hits.add(DETECTOR_A2 if rng.random() < 0.5 else DETECTOR_A1)
    return frozenset(hits)


@dataclass(frozen=True)
class DelayScanConfig:
    """Parameters of one delay scan.

    ``wavelength`` is carried as metadata only and enters no formula.
    ``v_max`` caps the peak overlap to emulate imperfect mode matching.
    """

    z_values: tuple[float, ...]
    trials_per_z: int
    input_phi: Qubit
    seed: int = DEFAULT_SEED
    tau_coh: float = 80.0
    wavelength: float = 532.0
    ancilla_model: str = "linear-waveplate"
    v_max: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "z_values", tuple(float(z) for z in self.z_values))
        problems = []
        if not self.z_values:
            problems.append("z_values: must contain at least one stage position")
        if self.trials_per_z < 1:
            problems.append(f"trials_per_z: must be >= 1, got {self.trials_per_z}")
        if not isinstance(self.input_phi, Qubit):
            problems.append("input_phi: must be a Qubit")
        if not 0 <= int(self.seed) < 2**64:
            problems.append(f"seed: must be an unsigned 64-bit integer, got {self.seed}")
        if self.tau_coh <= 0:
            problems.append(f"tau_coh: must be positive, got {self.tau_coh}")
        if self.wavelength <= 0:
            problems.append(f"wavelength: must be positive, got {self.wavelength}")
        if self.ancilla_model not in ANCILLA_MODELS:
            problems.append(
                f"ancilla_model: {self.ancilla_model!r} not one of {ANCILLA_MODELS}"
            )
        if not 0.0 < self.v_max <= 1.0:
            problems.append(f"v_max: must lie in (0, 1], got {self.v_max}")
        if problems:
            raise ValueError("invalid scan config: " + "; ".join(problems))

    def overlap_at(self, z_um: float) -> float:
        return self.v_max * overlap_from_delay(z_um, self.tau_coh)


@dataclass(frozen=True)
class CoincidenceTally:
    """Coincidence counts at one stage position, with derived estimates.

    ``r_ratio``/``f_estimate`` and their Poisson-propagated uncertainties
    are filled once the whole scan (and therefore the baseline) is known.
    """

    z: float
    n_trials: int
    c_clone: int
    c_anti: int
    r_ratio: float | None = None
    r_sigma: float | None = None
    f_estimate: float | None = None
    f_sigma: float | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.c_clone <= self.n_trials or not 0 <= self.c_anti <= self.n_trials:
            raise ValueError(
                f"counts ({self.c_clone}, {self.c_anti}) outside [0, {self.n_trials}]"
            )
        for name in ("r_sigma", "f_sigma"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")


def run_trial(
    phi: Qubit, z_um: float, cfg: DelayScanConfig, rng: np.random.Generator
) -> DetectionEvent:
    """Simulate one photon pair at stage position ``z_um``."""
    pol_a = sample_ancilla(rng, cfg.ancilla_model)
    pair = PhotonPair(pol_S=phi, pol_A=pol_a, overlap_v=cfg.overlap_at(z_um))
    table = beamsplitter_branch_probabilities(pair)
    draw = rng.random()
    cumulative = 0.0
    routing, pols = Routing.SPLIT_MODES, (POL_ORTHOGONAL,)  # numerically last branch
    for (branch_routing, branch_pols), prob in table.items():
        cumulative += prob
        if draw < cumulative:
            routing, pols = branch_routing, branch_pols
            break
    return DetectionEvent(routing, pols, _cascade_hits(rng, pols))


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    """Counter-based substream for one scan point, independent of scheduling."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(block_index,)))
    )


def _simulate_block(cfg: DelayScanConfig, z_um: float, rng: np.random.Generator) -> tuple[int, int]:
    """Tally clone and anti-clone coincidences over one vectorized block.

    Draw order per block is fixed (ancilla, branch selector, two analyzer
    coins), so tallies depend only on the block's substream.
    """
    n = cfg.trials_per_z
    phi = cfg.input_phi
    if cfg.ancilla_model == "linear-waveplate":
        chi = rng.random(n) * math.pi
        anc_h, anc_v = np.cos(chi), np.sin(chi)
    else:
        cos_theta = rng.random(n) * 2.0 - 1.0
        phase = rng.random(n) * (2.0 * math.pi)
        half_theta = np.arccos(cos_theta) / 2.0
        anc_h = np.cos(half_theta)
        anc_v = np.exp(1j * phase) * np.sin(half_theta)

    p_par = np.abs(np.conjugate(phi.alpha) * anc_h + np.conjugate(phi.beta) * anc_v) ** 2
    p_perp = np.clip(1.0 - p_par, 0.0, 1.0)
    v_sq = cfg.overlap_at(z_um) ** 2

    # Only the two bunched-on-mode-1 branches can yield monitored coincidences.
    p_pair_matched = p_par * (1.0 + v_sq) / 4.0
    p_pair_mixed = p_perp / 4.0

    selector = rng.random(n)
    to_a2_first = rng.random(n) < 0.5
    to_a2_second = rng.random(n) < 0.5

    matched_pair = selector < p_pair_matched
    mixed_pair = (selector >= p_pair_matched) & (selector < p_pair_matched + p_pair_mixed)

    c_clone = int(np.count_nonzero(matched_pair & (to_a2_first != to_a2_second)))
    c_anti = int(np.count_nonzero(mixed_pair & to_a2_first))
    return c_clone, c_anti


def run_scan(cfg: DelayScanConfig, threads: int = 1) -> list[CoincidenceTally]:
    """Run the full delay scan and attach ratio and fidelity estimates.

    Each stage position consumes its own counter-based substream derived
    from (seed, position index), so results are bit-identical for any
    ``threads`` value. The clone-rate baseline is the mean over positions
    with more than three coherence times of delay; a scan without such
    points raises a ValueError asking for a wider scan.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    indexed_z = list(enumerate(cfg.z_values))

    def simulate(item: tuple[int, float]) -> tuple[int, int]:
        index, z_um = item
        return _simulate_block(cfg, z_um, _block_rng(cfg.seed, index))

    if threads == 1:
        counts = [simulate(item) for item in indexed_z]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(simulate, indexed_z))

    tallies = [
        CoincidenceTally(z=z_um, n_trials=cfg.trials_per_z, c_clone=cc, c_anti=ca)
        for (_, z_um), (cc, ca) in zip(indexed_z, counts)
    ]
    # Late import: analysis consumes the tally types defined above.
    from .analysis import attach_ratio_estimates

    return attach_ratio_estimates(tallies, baseline_position_threshold(cfg.tau_coh))


def fidelity_from_r(r: float) -> float:
    """Cloning fidelity (2R + 1)/(2R + 2) from the amplification ratio R."""
    if r <= 0:
        raise ValueError(f"amplification ratio must be positive, got {r}")
    return (2.0 * r + 1.0) / (2.0 * r + 2.0)


def analytic_mode1_state(phi: Qubit, v: float) -> DensityMatrix:
    """Two-photon polarization state on mode 1, conditioned on bunching there.

    Weight (1 + v^2)/(2 + v^2) sits on |phi phi>; the remaining 1/(2 + v^2)
    is the mixed phi/phi_perp component, which interpolates between the
    symmetrized pure state (temporally matched, weight v^2) and an even
    classical mixture (temporally distinguishable, weight 1 - v^2).
    """
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"overlap amplitude must lie in [0, 1], got {v}")
    f_vec = phi.vector
    o_vec = phi.orthogonal().vector
    ff = np.kron(f_vec, f_vec)
    fo = np.kron(f_vec, o_vec)
    of = np.kron(o_vec, f_vec)
    sym = (fo + of) / math.sqrt(2.0)
    v_sq = v * v
    mixed = v_sq * np.outer(sym, sym.conj()) + (1.0 - v_sq) * 0.5 * (
        np.outer(fo, fo.conj()) + np.outer(of, of.conj())
    )
    rho = ((1.0 + v_sq) * np.outer(ff, ff.conj()) + mixed) / (2.0 + v_sq)
    return DensityMatrix(("S", "A"), rho)


def mode1_clone_fidelity(v: float) -> float:
    """Single-clone fidelity of the mode-1 state: (v^2 + 3/2)/(v^2 + 2)."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"overlap amplitude must lie in [0, 1], got {v}")
    return (v * v + 1.5) / (v * v + 2.0)
