"""Linear-optics model of the Bell-analysis apparatus.

A coincidence-basis controlled-NOT is built as a 6-mode beam-splitter
network acting on dual-rail polarization encodings (control rails c0/c1,
target rails t0/t1, two vacuum ancillas). Post-selecting on one photon in
the control rails and one in the target rails yields a conditional gate
proportional to CNOT with success probability 1/9; measuring the control
output in D/A and the target output in H/V then resolves all four Bell
states.

Two noise models are provided for the analyzer statistics:

* ``statistics_depolarizing``: outcome probabilities are mixed with the
  uniform distribution, weight ``depolarizing`` on the ideal part;
* ``fock_distinguishability``: ideal statistics mixed with the
  interference-free statistics of fully distinguishable photons, computed
  from the network's single-photon transmission probabilities and
  renormalized over coincidence outcomes, weight ``overlap`` on the ideal
  part.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import bisect

from corrlab import core
from corrlab.core import BELL_LABELS
from corrlab.ensembles import Correlation, discrete_ensemble, pol_state
from corrlab.strategies import outcome_to_estimate

NOISE_MODELS = ("statistics_depolarizing", "fock_distinguishability")

#: analyzer outcomes (control basis D/A, target basis H/V) in canonical order
ANALYZER_OUTCOMES = (("D", "H"), ("D", "V"), ("A", "H"), ("A", "V"))


class NoSolutionError(Exception):
    """A requested fit target is outside the model's achievable range."""


@dataclass(frozen=True)
class NoiseParams:
    """Noise weights, both in [0, 1]; 1.0 means ideal.

    ``depolarizing`` feeds the statistics_depolarizing model, ``overlap``
    (two-photon mode overlap) the fock_distinguishability model.
    """

    depolarizing: float = 1.0
    overlap: float = 1.0

    def __post_init__(self) -> None:
        for name in ("depolarizing", "overlap"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class ModeNetwork:
    """Unitary transfer matrix over optical modes with role assignments."""

    transfer: np.ndarray
    control_modes: tuple[int, int]
    target_modes: tuple[int, int]
    ancilla_modes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "transfer", np.asarray(self.transfer, dtype=complex))
        roles = (*self.control_modes, *self.target_modes, *self.ancilla_modes)
        if len(set(roles)) != len(roles):
            raise ValueError("control, target and ancilla mode sets must be disjoint")
        if max(roles) >= self.mode_count:
            raise ValueError("mode role index out of range")

    @property
    def mode_count(self) -> int:
        return self.transfer.shape[0]

    def is_unitary(self, tol: float = core.CONSTRUCTION_TOL) -> bool:
        u = self.transfer
        return bool(np.abs(u @ u.conj().T - np.eye(self.mode_count)).max() <= tol)

    def to_json_dict(self) -> dict:
        return {
            "mode_count": self.mode_count,
            "transfer": [[[float(z.real), float(z.imag)] for z in row] for row in self.transfer],
            "control_modes": list(self.control_modes),
            "target_modes": list(self.target_modes),
            "ancilla_modes": list(self.ancilla_modes),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ModeNetwork":
        transfer = np.array(
            [[complex(re, im) for re, im in row] for row in data["transfer"]], dtype=complex
        )
        return cls(
            transfer=transfer,
            control_modes=tuple(data["control_modes"]),
            target_modes=tuple(data["target_modes"]),
            ancilla_modes=tuple(data["ancilla_modes"]),
        )


def beam_splitter(n_modes: int, m: int, k: int, reflectivity: float) -> np.ndarray:
    """Splitter layer on ordered modes (m, k).

    Maps (m, k) -> (sqrt(r) m + sqrt(1-r) k, sqrt(1-r) m - sqrt(r) k): the
    sign flip sits on the k -> k reflection.
    """
    layer = np.eye(n_modes, dtype=complex)
    r = np.sqrt(reflectivity)
    t = np.sqrt(1.0 - reflectivity)
    layer[m, m] = r
    layer[m, k] = t
    layer[k, m] = t
    layer[k, k] = -r
    return layer


def build_cnot_network() -> ModeNetwork:
    """The standard 6-mode coincidence-basis CNOT.

    Modes 0/1 are the control H/V rails, 2/3 the target H/V rails, 4/5
    vacuum ancillas. The target rails are mixed on 50/50 splitters before
    and after a central reflectivity-1/3 splitter coupling the control V
    rail to one target rail; two more 1/3 splitters against the ancillas
    balance the amplitudes. The central splitter is oriented (t0, c1), i.e.
    the sign flip lands on the c1 reflection; this orientation is what
    makes the post-selected gate come out proportional to CNOT.
    """
    c0, c1, t0, t1, a0, a1 = range(6)
    layers = [
        beam_splitter(6, t0, t1, 0.5),
        beam_splitter(6, t0, c1, 1.0 / 3.0),
        beam_splitter(6, c0, a0, 1.0 / 3.0),
        beam_splitter(6, t1, a1, 1.0 / 3.0),
        beam_splitter(6, t0, t1, 0.5),
    ]
    transfer = np.eye(6, dtype=complex)
    for layer in layers:
        transfer = layer @ transfer
    return ModeNetwork(
        transfer=transfer, control_modes=(c0, c1), target_modes=(t0, t1), ancilla_modes=(a0, a1)
    )


@dataclass(frozen=True)
class ConditionalGate:
    """Post-selected two-photon map on the dual-rail logical space.

    ``matrix[out, in]`` is the coincidence amplitude between logical basis
    states (one photon in a control rail, one in a target rail);
    ``success_amplitude_scale`` is the common column amplitude, so the
    coincidence success probability for computational inputs is its square.
    """

    matrix: np.ndarray
    success_amplitude_scale: float

    def unitary_part(self) -> np.ndarray:
        return self.matrix / self.success_amplitude_scale

    @property
    def success_probability(self) -> float:
        return self.success_amplitude_scale**2


def conditional_gate(net: ModeNetwork) -> ConditionalGate:
    """Two-photon coincidence map of the network.

    The amplitude for the photon pair entering rails (ci, ti) to exit in
    rails (co, to) is the permanent of the corresponding 2x2 transfer
    submatrix, U[co, ci] U[to, ti] + U[co, ti] U[to, ci].
    """
    if not net.is_unitary(tol=core.SPECTRAL_TOL):
        raise ValueError("mode network transfer matrix is not unitary")
    u = net.transfer
    rails_c = net.control_modes
    rails_t = net.target_modes
    m = np.zeros((4, 4), dtype=complex)
    for xi, ci in enumerate(rails_c):
        for yi, ti in enumerate(rails_t):
            col = 2 * xi + yi
            for xo, co in enumerate(rails_c):
                for yo, to in enumerate(rails_t):
                    row = 2 * xo + yo
                    m[row, col] = u[co, ci] * u[to, ti] + u[co, ti] * u[to, ci]
    scale = float(np.sqrt(np.mean(np.abs(m) ** 2) * 4.0))
    return ConditionalGate(matrix=m, success_amplitude_scale=scale)


@lru_cache(maxsize=1)
def _default_network() -> ModeNetwork:
    return build_cnot_network()


@lru_cache(maxsize=1)
def _default_gate_unitary() -> np.ndarray:
    return conditional_gate(_default_network()).unitary_part()


def cnot_deviation(gate: ConditionalGate) -> tuple[float, float]:
    """(global phase, max deviation) of the gate's unitary part from CNOT."""
    cnot = np.zeros((4, 4))
    cnot[0, 0] = cnot[1, 1] = cnot[2, 3] = cnot[3, 2] = 1.0
    g = gate.unitary_part()
    ovl = complex(np.sum(g * cnot))
    phase = float(np.angle(ovl)) if abs(ovl) > 0 else 0.0
    dev = float(np.abs(g - np.exp(1j * phase) * cnot).max())
    return phase, dev


def bell_analyzer_map(net: ModeNetwork | None = None) -> dict[tuple[str, str], str]:
    """Bijection from analyzer outcomes (control D/A, target H/V) to Bell states.

    Derived by applying the network's conditional gate to each Bell state
    and finding the product analyzer state it lands on.
    """
    g = (
        _default_gate_unitary()
        if net is None
        else conditional_gate(net).unitary_part()
    )
    mapping: dict[tuple[str, str], str] = {}
    for ctrl, tgt in ANALYZER_OUTCOMES:
        out_state = core.kron(pol_state(ctrl), pol_state(tgt))
        amps = [abs(np.vdot(out_state, g @ core.bell_state(lbl))) for lbl in BELL_LABELS]
        best = int(np.argmax(amps))
        if amps[best] < 1.0 - 1e-8:
            raise ValueError("analyzer outcomes do not cleanly resolve the Bell basis")
        mapping[(ctrl, tgt)] = BELL_LABELS[best]
    if len(set(mapping.values())) != 4:
        raise ValueError("analyzer map is not a bijection")
    return mapping


def analyzer_index_of_bell() -> dict[str, int]:
    """Index into ANALYZER_OUTCOMES for each Bell label (default network)."""
    mapping = bell_analyzer_map()
    return {bell: ANALYZER_OUTCOMES.index(outcome) for outcome, bell in mapping.items()}


def _ideal_analyzer_distribution(state: np.ndarray, net: ModeNetwork | None) -> np.ndarray:
    g = _default_gate_unitary() if net is None else conditional_gate(net).unitary_part()
    amp = g @ state
    probs = np.empty(4)
    for k, (ctrl, tgt) in enumerate(ANALYZER_OUTCOMES):
        out_state = core.kron(pol_state(ctrl), pol_state(tgt))
        probs[k] = abs(np.vdot(out_state, amp)) ** 2
    return probs / probs.sum()


def classical_analyzer_distribution(state: np.ndarray, net: ModeNetwork | None = None) -> np.ndarray:
    """Analyzer statistics for fully distinguishable photons.

    Each photon is routed through the network with single-photon
    transmission probabilities |U|^2 (no two-photon interference and no
    coherence between input rails); trials without a control-rail/target-rail
    coincidence are discarded and the rest renormalized, mirroring the
    post-selection. The control photon then leaves the rails as an
    incoherent H/V mixture, so the D/A analysis is 50/50 regardless.
    """
    network = _default_network() if net is None else net
    t = np.abs(network.transfer) ** 2
    rails_c = network.control_modes
    rails_t = network.target_modes
    w = (np.abs(np.asarray(state, dtype=complex)) ** 2).reshape(2, 2)
    rail_weight = np.zeros((2, 2))
    for xo in range(2):
        for yo in range(2):
            acc = 0.0
            for xi in range(2):
                for yi in range(2):
                    direct = t[rails_c[xo], rails_c[xi]] * t[rails_t[yo], rails_t[yi]]
                    swapped = t[rails_t[yo], rails_c[xi]] * t[rails_c[xo], rails_t[yi]]
                    acc += w[xi, yi] * (direct + swapped)
            rail_weight[xo, yo] = acc
    total = rail_weight.sum()
    if total <= 0.0:
        raise ValueError("state has no coincidence support in the classical model")
    target_marginal = rail_weight.sum(axis=0) / total
    probs = np.empty(4)
    for k, (_, tgt) in enumerate(ANALYZER_OUTCOMES):
        probs[k] = 0.5 * target_marginal[0 if tgt == "H" else 1]
    return probs


def measure_with_noise(
    state: np.ndarray,
    noise: NoiseParams,
    model: str,
    net: ModeNetwork | None = None,
) -> np.ndarray:
    """Distribution over ANALYZER_OUTCOMES for a normalized two-qubit input."""
    state = np.asarray(state, dtype=complex)
    if abs(np.linalg.norm(state) - 1.0) > core.SPECTRAL_TOL:
        raise ValueError("input state must be normalized")
    ideal = _ideal_analyzer_distribution(state, net)
    if model == "statistics_depolarizing":
        lam = noise.depolarizing
        return lam * ideal + (1.0 - lam) * 0.25
    if model == "fock_distinguishability":
        v = noise.overlap
        return v * ideal + (1.0 - v) * classical_analyzer_distribution(state, net)
    raise ValueError(f"unknown noise model {model!r}; expected one of {NOISE_MODELS}")


def joint_payoff_under_noise(
    model: str | None,
    value: float | None = None,
    net: ModeNetwork | None = None,
) -> float:
    """Exact expected payoff of the Bell-analyzer strategy on the discrete sets.

    ``model=None`` gives the ideal analyzer. The payoff averages the two
    correlation classes with equal weight.
    """
    if model is None:
        noise = NoiseParams()
        model_used = "statistics_depolarizing"
    elif model == "statistics_depolarizing":
        noise = NoiseParams(depolarizing=float(value))
        model_used = model
    elif model == "fock_distinguishability":
        noise = NoiseParams(overlap=float(value))
        model_used = model
    else:
        raise ValueError(f"unknown noise model {model!r}; expected one of {NOISE_MODELS}")
    bell_of = bell_analyzer_map(net)
    class_means = []
    for j in (Correlation.ORTHOGONAL, Correlation.IDENTICAL):
        acc = 0.0
        for pair in discrete_ensemble(j):
            probs = measure_with_noise(pair.product_state(), noise, model_used, net)
            for k, outcome in enumerate(ANALYZER_OUTCOMES):
                if outcome_to_estimate(bell_of[outcome]) == j:
                    acc += probs[k]
        class_means.append(acc / 6.0)
    return 0.5 * (class_means[0] + class_means[1])


def parallel_identification_under_noise(
    model: str, value: float, net: ModeNetwork | None = None
) -> float:
    """Mean probability of calling an identical-class input "identical"."""
    noise = (
        NoiseParams(depolarizing=value)
        if model == "statistics_depolarizing"
        else NoiseParams(overlap=value)
    )
    bell_of = bell_analyzer_map(net)
    acc = 0.0
    for pair in discrete_ensemble(Correlation.IDENTICAL):
        probs = measure_with_noise(pair.product_state(), noise, model, net)
        for k, outcome in enumerate(ANALYZER_OUTCOMES):
            if outcome_to_estimate(bell_of[outcome]) == Correlation.IDENTICAL:
                acc += probs[k]
    return acc / 6.0


def fit_noise(target_payoff: float, model: str, net: ModeNetwork | None = None) -> NoiseParams:
    """Fit the single noise weight so the discrete-set payoff hits the target.

    Scalar bisection to 1e-10. Raises NoSolutionError when the target lies
    outside the payoff range the model can reach.
    """
    target = float(target_payoff)
    if model not in NOISE_MODELS:
        raise ValueError(f"unknown noise model {model!r}; expected one of {NOISE_MODELS}")
    lo, hi = 0.0, 1.0
    f_lo = joint_payoff_under_noise(model, lo, net) - target
    f_hi = joint_payoff_under_noise(model, hi, net) - target
    tol = 1e-10
    if abs(f_lo) <= tol:
        value = lo
    elif abs(f_hi) <= tol:
        value = hi
    elif f_lo > 0 or f_hi < 0:
        raise NoSolutionError(
            f"target payoff {target} is outside the achievable range "
            f"[{f_lo + target:.6f}, {f_hi + target:.6f}] of model {model}"
        )
    else:
        value = float(
            bisect(lambda x: joint_payoff_under_noise(model, x, net) - target, lo, hi, xtol=tol)
        )
    if model == "statistics_depolarizing":
        return NoiseParams(depolarizing=value)
    return NoiseParams(overlap=value)


def implied_average_gate_fidelity(depolarizing: float) -> float:
    """Average gate fidelity if the statistics-level weight were a two-qubit
    depolarizing channel of the same weight (a reporting aid, not a claim)."""
    process_fidelity = depolarizing + (1.0 - depolarizing) / 16.0
    return (4.0 * process_fidelity + 1.0) / 5.0


def hom_projection(state: np.ndarray, overlap: float) -> float:
    """Coincidence (anti-bunching) probability after a 50/50 beam splitter.

    With perfect two-photon overlap this is the antisymmetric weight of the
    input; fully distinguishable photons give the classical 1/2.
    """
    state = np.asarray(state, dtype=complex)
    if abs(np.linalg.norm(state) - 1.0) > core.SPECTRAL_TOL:
        raise ValueError("input state must be normalized")
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {overlap}")
    anti_weight = abs(np.vdot(core.bell_state("psi_minus"), state)) ** 2
    return overlap * anti_weight + (1.0 - overlap) * 0.5
