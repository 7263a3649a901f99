"""Charlie's measurement strategies and the search over local ones.

Covers the optimal joint (Bell-basis) measurement, fixed-axis local
projective strategies, the Helstrom minimum-error measurement used as an
optimality oracle, and an exhaustive grid search over fixed product
projective strategies combined with all 16 deterministic decision rules.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from corrlab import core, kernels
from corrlab.core import BELL_LABELS, TwoOutcomePOVM
from corrlab.ensembles import Correlation, EnsembleSpec, average_state, orthogonal_partner

#: local outcome pairs in kernel order; 0 = along the axis, 1 = orthogonal to it
LOCAL_OUTCOME_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))

#: decision rule of the same-axis strategy: estimate identical iff outcomes agree
AGREE_RULE = (1, 0, 0, 1)


@dataclass(frozen=True)
class Strategy:
    """A realized two-outcome strategy plus the data needed to simulate it.

    ``kind`` is one of "joint_bell", "local_same_axis", "local_product",
    "helstrom". Local kinds carry their axes and decision rule; the joint
    kind carries the four Bell projectors as its outcome refinement.
    """

    kind: str
    povm: TwoOutcomePOVM
    axis_a: np.ndarray | None = None
    axis_b: np.ndarray | None = None
    rule: tuple[int, int, int, int] | None = None
    bell_projectors: tuple[np.ndarray, ...] | None = field(default=None, repr=False)

    def payoff(self, rho0: np.ndarray, rho1: np.ndarray,
               priors: tuple[float, float] = (0.5, 0.5)) -> float:
        return core.expected_payoff(self.povm, rho0, rho1, priors)


def outcome_to_estimate(outcome: str) -> Correlation:
    """Map a Bell outcome to the correlation estimate (singlet means orthogonal)."""
    if outcome not in BELL_LABELS:
        raise ValueError(f"unknown Bell outcome {outcome!r}")
    return Correlation.ORTHOGONAL if outcome == "psi_minus" else Correlation.IDENTICAL


def joint_bell_strategy() -> Strategy:
    """The optimal joint measurement: singlet projector vs triplet projector."""
    p_sym, p_anti = core.sym_antisym_projectors()
    projs = tuple(
        np.outer(core.bell_state(lbl), core.bell_state(lbl).conj()) for lbl in BELL_LABELS
    )
    return Strategy(
        kind="joint_bell",
        povm=TwoOutcomePOVM(e0=p_anti, e1=p_sym),
        bell_projectors=projs,
    )


def _projector(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return np.outer(state, state.conj())


def local_product_strategy(
    axis_a: np.ndarray, axis_b: np.ndarray, rule: tuple[int, int, int, int]
) -> Strategy:
    """Fixed projective measurements along axis_a (Alice) and axis_b (Bob).

    Each of the four outcome pairs is mapped to an estimate by ``rule``;
    the POVM elements are the corresponding sums of product projectors.
    """
    axis_a = np.asarray(axis_a, dtype=complex)
    axis_b = np.asarray(axis_b, dtype=complex)
    if abs(np.linalg.norm(axis_a) - 1) > 1e-10 or abs(np.linalg.norm(axis_b) - 1) > 1e-10:
        raise ValueError("axes must be normalized single-qubit states")
    if len(rule) != 4 or any(r not in (0, 1) for r in rule):
        raise ValueError(f"rule must be four 0/1 estimates, got {rule!r}")
    pa = (_projector(axis_a), _projector(orthogonal_partner(axis_a)))
    pb = (_projector(axis_b), _projector(orthogonal_partner(axis_b)))
    e = [np.zeros((4, 4), dtype=complex), np.zeros((4, 4), dtype=complex)]
    for (sa, sb), est in zip(LOCAL_OUTCOME_PAIRS, rule):
        e[est] += core.kron(pa[sa], pb[sb])
    return Strategy(
        kind="local_product",
        povm=TwoOutcomePOVM(e0=e[0], e1=e[1]),
        axis_a=axis_a,
        axis_b=axis_b,
        rule=tuple(int(r) for r in rule),
    )


def local_same_axis_strategy(axis: np.ndarray) -> Strategy:
    """Both photons measured along the same axis; agreement means identical."""
    s = local_product_strategy(axis, axis, AGREE_RULE)
    return Strategy(
        kind="local_same_axis",
        povm=s.povm,
        axis_a=s.axis_a,
        axis_b=s.axis_b,
        rule=s.rule,
    )


def helstrom_strategy(
    rho0: np.ndarray, rho1: np.ndarray, priors: tuple[float, float] = (0.5, 0.5)
) -> tuple[Strategy, float]:
    """Minimum-error two-state discrimination measurement and its payoff.

    E1 projects onto the nonnegative eigenspace of priors[1]*rho1 -
    priors[0]*rho0 (eigenvalues within 1e-12 of zero count as nonnegative),
    giving payoff priors[0] + Tr[E1 (priors[1]*rho1 - priors[0]*rho0)],
    which equals (1 + ||priors[1]*rho1 - priors[0]*rho0||_1) / 2.
    """
    p0, p1 = float(priors[0]), float(priors[1])
    if p0 < 0 or p1 < 0 or abs(p0 + p1 - 1.0) > core.CONSTRUCTION_TOL:
        raise ValueError(f"priors must be nonnegative and sum to 1, got {priors}")
    rho0 = core.validate_density(rho0, tol=core.SPECTRAL_TOL)
    rho1 = core.validate_density(rho1, tol=core.SPECTRAL_TOL)
    delta = p1 * rho1 - p0 * rho0
    eigvals, eigvecs = np.linalg.eigh(delta)
    keep = eigvals >= -core.CONSTRUCTION_TOL
    v = eigvecs[:, keep]
    e1 = v @ v.conj().T
    e0 = np.eye(delta.shape[0], dtype=complex) - e1
    payoff = p0 + float(np.trace(e1 @ delta).real)
    strategy = Strategy(kind="helstrom", povm=TwoOutcomePOVM(e0=e0, e1=e1))
    return strategy, payoff


def axis_from_angles(theta: float, phi: float) -> np.ndarray:
    """Bloch-chart axis state (cos(theta/2), e^{i phi} sin(theta/2))."""
    return np.array([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)])


def bloch_vector_of_axis(theta: float | np.ndarray, phi: float | np.ndarray) -> np.ndarray:
    """Unit Bloch vector(s) (sin t cos p, sin t sin p, cos t); last axis is xyz."""
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def pauli_split(rho: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local Bloch vectors and correlation matrix of a two-qubit operator.

    Returns (r_a, r_b, t) with r_a[k] = Tr[(sigma_k x I) rho], r_b[k] =
    Tr[(I x sigma_k) rho] and t[k, l] = Tr[(sigma_k x sigma_l) rho].
    """
    rho = np.asarray(rho, dtype=complex)
    eye = np.eye(2)
    r_a = np.array([np.trace(core.kron(p, eye) @ rho).real for p in core.PAULIS])
    r_b = np.array([np.trace(core.kron(eye, p) @ rho).real for p in core.PAULIS])
    t = np.array(
        [[np.trace(core.kron(p, q) @ rho).real for q in core.PAULIS] for p in core.PAULIS]
    )
    return r_a, r_b, t


@dataclass(frozen=True)
class GridSearchResult:
    """Outcome of local_grid_search."""

    strategy: Strategy
    payoff: float
    best_angles: tuple[float, float, float, float]
    best_rule_id: int
    resolution: int
    log: np.ndarray  # (n_cells, 6): theta_a, phi_a, theta_b, phi_b, rule_id, payoff

    LOG_COLUMNS = ("theta_a", "phi_a", "theta_b", "phi_b", "rule_id", "payoff")


def _resolve_state_pair(problem) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(problem, EnsembleSpec):
        return (
            average_state(problem, Correlation.ORTHOGONAL),
            average_state(problem, Correlation.IDENTICAL),
        )
    rho0, rho1 = problem
    return np.asarray(rho0, dtype=complex), np.asarray(rho1, dtype=complex)


def local_grid_search(problem, resolution: int, workers: int = 1) -> GridSearchResult:
    """Exhaustive search over fixed product projective strategies.

    ``problem`` is an EnsembleSpec (the class-average states are computed
    analytically) or an explicit (rho0, rho1) pair. Axes for both photons
    range over a (theta, phi) grid with ``resolution`` points per angle
    (theta in [0, pi] inclusive, phi in [0, 2 pi) exclusive); for each axis
    pair all 16 deterministic decision rules are scored and the best kept.
    Ties are broken toward the lexicographically smallest (cell, rule) index.

    Payoffs are exact (computed from the average states, no sampling).
    """
    if resolution < 2:
        raise ValueError("grid resolution must be at least 2")
    rho0, rho1 = _resolve_state_pair(problem)

    thetas = np.linspace(0.0, np.pi, resolution)
    phis = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    theta_flat = tg.reshape(-1)
    phi_flat = pg.reshape(-1)
    axes = bloch_vector_of_axis(theta_flat, phi_flat)  # (n_axes, 3)
    n_axes = axes.shape[0]

    ra0, rb0, t0 = pauli_split(rho0)
    ra1, rb1, t1 = pauli_split(rho1)
    alpha0 = axes @ ra0
    beta0 = axes @ rb0
    gamma0 = (axes @ t0) @ axes.T
    alpha1 = axes @ ra1
    beta1 = axes @ rb1
    gamma1 = (axes @ t1) @ axes.T

    payoff = np.empty((n_axes, n_axes), dtype=np.float64)
    rule = np.empty((n_axes, n_axes), dtype=np.uint8)

    if workers <= 1 or n_axes < 2 * workers:
        kernels.grid_best(alpha0, beta0, gamma0, alpha1, beta1, gamma1, payoff, rule)
    else:
        # cells are independent, so split Alice-axis rows into contiguous blocks
        bounds = np.linspace(0, n_axes, workers + 1, dtype=int)
        spans = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]

        def run_block(span: tuple[int, int]) -> None:
            lo, hi = span
            kernels.grid_best(
                alpha0[lo:hi], beta0, gamma0[lo:hi],
                alpha1[lo:hi], beta1, gamma1[lo:hi],
                payoff[lo:hi], rule[lo:hi],
            )

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_block, spans))

    flat_best = int(np.argmax(payoff))  # first maximum = smallest grid index
    ia, ib = divmod(flat_best, n_axes)
    best_rule_id = int(rule[ia, ib])
    best_angles = (
        float(theta_flat[ia]),
        float(phi_flat[ia]),
        float(theta_flat[ib]),
        float(phi_flat[ib]),
    )
    rule_bits = tuple((best_rule_id >> o) & 1 for o in range(4))
    strategy = local_product_strategy(
        axis_from_angles(best_angles[0], best_angles[1]),
        axis_from_angles(best_angles[2], best_angles[3]),
        rule_bits,
    )

    log = np.empty((n_axes * n_axes, 6), dtype=np.float64)
    log[:, 0] = np.repeat(theta_flat, n_axes)
    log[:, 1] = np.repeat(phi_flat, n_axes)
    log[:, 2] = np.tile(theta_flat, n_axes)
    log[:, 3] = np.tile(phi_flat, n_axes)
    log[:, 4] = rule.reshape(-1)
    log[:, 5] = payoff.reshape(-1)

    return GridSearchResult(
        strategy=strategy,
        payoff=float(payoff[ia, ib]),
        best_angles=best_angles,
        best_rule_id=best_rule_id,
        resolution=resolution,
        log=log,
    )
