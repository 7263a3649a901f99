"""Monte Carlo trial engine and statistics.

Runs preparation -> measurement -> estimate pipelines, reduces them to
per-state success probabilities with counting errors, and computes
mutual-information diagnostics between measurement outcomes and the
preparation variables.

Determinism: trials are partitioned into fixed-size chunks; chunk c draws
from a generator seeded by SeedSequence(master_seed).spawn()[c]. Results
are therefore bit-identical for a fixed master seed regardless of how many
workers process the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from corrlab import kernels, optics
from corrlab.core import BELL_LABELS
from corrlab.ensembles import (
    Correlation,
    EnsembleSpec,
    ORTHOGONAL_LABEL,
    POLARIZATION_LABELS,
    average_state,
    discrete_ensemble,
    pol_state,
    sample_batch,
)
from corrlab.strategies import (
    LOCAL_OUTCOME_PAIRS,
    Strategy,
    axis_from_angles,
    helstrom_strategy,
    joint_bell_strategy,
    local_product_strategy,
    local_same_axis_strategy,
    outcome_to_estimate,
)

CHUNK_SIZE = 16384

STRATEGY_KINDS = ("joint", "local_same_axis", "local_product", "helstrom")

_PARTNER = np.array([1, 0, 3, 2, 5, 4], dtype=np.int8)

#: noise model ids used by the trial kernels
_MODEL_IDS = {None: 0, "statistics_depolarizing": 1, "fock_distinguishability": 2}


class DegenerateDataError(ValueError):
    """Not enough distinct values to estimate a mutual information."""


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model selection for a run: model name plus its single weight."""

    model: str
    value: float

    def __post_init__(self) -> None:
        if self.model not in optics.NOISE_MODELS:
            raise ValueError(
                f"unknown noise model {self.model!r}; expected one of {optics.NOISE_MODELS}"
            )
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"noise weight must lie in [0, 1], got {self.value}")

    def params(self) -> optics.NoiseParams:
        if self.model == "statistics_depolarizing":
            return optics.NoiseParams(depolarizing=self.value)
        return optics.NoiseParams(overlap=self.value)


@dataclass(frozen=True)
class StrategySpec:
    """Serializable strategy descriptor; axes are labels or (theta, phi)."""

    kind: str
    axis_a: object = None
    axis_b: object = None
    rule_id: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}; expected one of {STRATEGY_KINDS}")


@dataclass(frozen=True)
class RunConfig:
    ensemble: EnsembleSpec
    strategy: StrategySpec
    noise: NoiseSpec | None
    shots: int
    master_seed: int

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError("shots must be at least 1")


def resolve_axis(axis) -> np.ndarray:
    """Turn an axis descriptor (label, (theta, phi), or state) into a state."""
    if axis is None:
        return pol_state("H")
    if isinstance(axis, str):
        return pol_state(axis)
    if isinstance(axis, np.ndarray) and axis.shape == (2,):
        return np.asarray(axis, dtype=complex)
    theta, phi = axis
    return axis_from_angles(float(theta), float(phi))


def build_strategy(spec: StrategySpec, ensemble: EnsembleSpec) -> Strategy:
    """Realize a strategy descriptor (helstrom needs the ensemble's averages)."""
    if spec.kind == "joint":
        return joint_bell_strategy()
    if spec.kind == "local_same_axis":
        return local_same_axis_strategy(resolve_axis(spec.axis_a))
    if spec.kind == "local_product":
        rule_id = 9 if spec.rule_id is None else int(spec.rule_id)
        rule = tuple((rule_id >> o) & 1 for o in range(4))
        return local_product_strategy(
            resolve_axis(spec.axis_a), resolve_axis(spec.axis_b), rule
        )
    rho0 = average_state(ensemble, Correlation.ORTHOGONAL)
    rho1 = average_state(ensemble, Correlation.IDENTICAL)
    strategy, _ = helstrom_strategy(rho0, rho1)
    return strategy


@dataclass(frozen=True)
class TrialRecord:
    """One simulated shot in record form."""

    pair_label: tuple[str, str] | None
    j: Correlation
    raw_outcome: object
    estimate: Correlation
    correct: bool


@dataclass
class TrialRecords:
    """Columnar store of simulated trials (indexable like a record list).

    ``outcome_kind`` tells how to read the outcome column: "bell" indexes
    core.BELL_LABELS, "local_pair" indexes strategies.LOCAL_OUTCOME_PAIRS,
    "binary" is the estimate itself. Label columns hold polarization label
    indices, -1 for unlabeled (continuous) ensembles.
    """

    outcome_kind: str
    j: np.ndarray
    outcome: np.ndarray
    estimate: np.ndarray
    correct: np.ndarray
    label_a: np.ndarray
    label_b: np.ndarray

    def __len__(self) -> int:
        return int(self.j.shape[0])

    def _raw(self, i: int):
        k = int(self.outcome[i])
        if self.outcome_kind == "bell":
            return BELL_LABELS[k]
        if self.outcome_kind == "local_pair":
            return LOCAL_OUTCOME_PAIRS[k]
        return k

    def __getitem__(self, i: int) -> TrialRecord:
        label = None
        if self.label_a[i] >= 0:
            label = (
                POLARIZATION_LABELS[self.label_a[i]],
                POLARIZATION_LABELS[self.label_b[i]],
            )
        return TrialRecord(
            pair_label=label,
            j=Correlation(int(self.j[i])),
            raw_outcome=self._raw(i),
            estimate=Correlation(int(self.estimate[i])),
            correct=bool(self.correct[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def labeled(self) -> bool:
        return bool(len(self)) and int(self.label_a[0]) >= 0

    @classmethod
    def concatenate(cls, parts: list["TrialRecords"]) -> "TrialRecords":
        first = parts[0]
        return cls(
            outcome_kind=first.outcome_kind,
            j=np.concatenate([p.j for p in parts]),
            outcome=np.concatenate([p.outcome for p in parts]),
            estimate=np.concatenate([p.estimate for p in parts]),
            correct=np.concatenate([p.correct for p in parts]),
            label_a=np.concatenate([p.label_a for p in parts]),
            label_b=np.concatenate([p.label_b for p in parts]),
        )


def _outcome_kind(strategy_kind: str) -> str:
    if strategy_kind == "joint":
        return "bell"
    if strategy_kind == "helstrom":
        return "binary"
    return "local_pair"


def _run_chunk(config: RunConfig, strategy: Strategy, count: int, seed) -> TrialRecords:
    rng = np.random.default_rng(seed)
    j = rng.integers(0, 2, size=count, dtype=np.uint8)
    alice, bob, label_a = sample_batch(config.ensemble, j, rng)
    u = rng.random(count)

    outcome = np.empty(count, dtype=np.uint8)
    correct = np.empty(count, dtype=np.uint8)
    a0 = np.ascontiguousarray(alice[:, 0])
    a1 = np.ascontiguousarray(alice[:, 1])
    b0 = np.ascontiguousarray(bob[:, 0])
    b1 = np.ascontiguousarray(bob[:, 1])

    kind = config.strategy.kind
    if kind == "joint":
        model_id = _MODEL_IDS[config.noise.model if config.noise else None]
        value = config.noise.value if config.noise else 1.0
        kernels.joint_trials(a0, a1, b0, b1, j, u, value, model_id, outcome, correct)
        estimate = (outcome != 0).astype(np.uint8)
    elif kind in ("local_same_axis", "local_product"):
        rule = np.asarray(strategy.rule, dtype=np.uint8)
        kernels.local_trials(a0, a1, b0, b1, j, u, strategy.axis_a, strategy.axis_b, rule,
                             outcome, correct)
        estimate = rule[outcome]
    else:  # helstrom: generic two-outcome sampling from the POVM
        prod = np.einsum("ni,nj->nij", alice, bob).reshape(count, 4)
        p0 = np.einsum("ni,ij,nj->n", prod.conj(), strategy.povm.e0, prod).real
        p0 = np.ascontiguousarray(p0)
        kernels.binary_trials(p0, j, u, outcome, correct)
        estimate = outcome.copy()

    if label_a[0] >= 0:
        label_b = np.where(j == Correlation.IDENTICAL, label_a, _PARTNER[label_a])
    else:
        label_b = np.full(count, -1, dtype=np.int8)
    return TrialRecords(
        outcome_kind=_outcome_kind(kind),
        j=j,
        outcome=outcome,
        estimate=estimate,
        correct=correct,
        label_a=label_a,
        label_b=label_b.astype(np.int8),
    )


def run(config: RunConfig, workers: int = 1) -> TrialRecords:
    """Simulate ``config.shots`` trials; deterministic for a fixed master seed.

    Noise models are defined for the Bell-analyzer (joint) strategy only;
    combining one with a local or Helstrom strategy is an error.
    """
    if config.noise is not None and config.strategy.kind != "joint":
        raise ValueError("noise models apply to the joint Bell-analyzer strategy only")
    strategy = build_strategy(config.strategy, config.ensemble)
    n_chunks = (config.shots + CHUNK_SIZE - 1) // CHUNK_SIZE
    seeds = np.random.SeedSequence(config.master_seed).spawn(n_chunks)
    counts = [CHUNK_SIZE] * n_chunks
    counts[-1] = config.shots - CHUNK_SIZE * (n_chunks - 1)

    if workers <= 1 or n_chunks == 1:
        parts = [_run_chunk(config, strategy, c, s) for c, s in zip(counts, seeds)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(lambda cs: _run_chunk(config, strategy, cs[0], cs[1]), zip(counts, seeds))
            )
    return TrialRecords.concatenate(parts)


@dataclass(frozen=True)
class PayoffReport:
    """Per-state success probabilities and the class-balanced overall payoff.

    ``per_state`` maps a pair label (or class name for unlabeled ensembles)
    to (probability, standard error); ``overall`` weighs the two correlation
    classes equally regardless of their sampled shot counts.
    """

    per_state: dict[str, tuple[float, float]]
    class_means: dict[str, tuple[float, float]]
    overall: tuple[float, float]
    shots: int
    method: str
    config: dict | None = None


def _binomial_stats(correct_sum: float, n: int) -> tuple[float, float]:
    if n == 0:
        return (float("nan"), float("nan"))
    p = correct_sum / n
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / n)


_CLASS_NAMES = {Correlation.ORTHOGONAL: "orthogonal", Correlation.IDENTICAL: "identical"}


def discrete_state_order() -> list[tuple[str, str]]:
    """Canonical report order: six identical pairs, then six orthogonal."""
    order = [(lbl, lbl) for lbl in POLARIZATION_LABELS]
    order += [(lbl, ORTHOGONAL_LABEL[lbl]) for lbl in POLARIZATION_LABELS]
    return order


def payoff_report(records: TrialRecords, config: dict | None = None) -> PayoffReport:
    """Reduce trial records to binomial per-state and overall statistics."""
    if len(records) == 0:
        raise ValueError("cannot build a payoff report from zero records")
    j = records.j
    correct = records.correct.astype(np.float64)

    class_means: dict[str, tuple[float, float]] = {}
    cls_stats = {}
    for flag in (Correlation.IDENTICAL, Correlation.ORTHOGONAL):
        mask = j == flag
        n = int(mask.sum())
        cls_stats[flag] = _binomial_stats(correct[mask].sum(), n)
        class_means[_CLASS_NAMES[flag]] = cls_stats[flag]
    if any(np.isnan(stats[0]) for stats in cls_stats.values()):
        raise ValueError("payoff needs at least one trial in each correlation class")

    p1, se1 = cls_stats[Correlation.IDENTICAL]
    p0, se0 = cls_stats[Correlation.ORTHOGONAL]
    overall = (0.5 * (p1 + p0), 0.5 * math.sqrt(se1**2 + se0**2))

    per_state: dict[str, tuple[float, float]] = {}
    if records.labeled:
        key = records.label_a.astype(np.int64) * 6 + records.label_b.astype(np.int64)
        counts = np.bincount(key, minlength=36)
        hits = np.bincount(key, weights=correct, minlength=36)
        for la, lb in discrete_state_order():
            idx = POLARIZATION_LABELS.index(la) * 6 + POLARIZATION_LABELS.index(lb)
            per_state[la + lb] = _binomial_stats(hits[idx], int(counts[idx]))
    else:
        per_state = dict(class_means)

    return PayoffReport(
        per_state=per_state,
        class_means=class_means,
        overall=overall,
        shots=len(records),
        method="monte_carlo",
        config=config,
    )


def _per_state_exact(strategy: Strategy, noise: NoiseSpec | None) -> dict[str, float]:
    """Exact per-state success probability over the twelve discrete pairs."""
    probs: dict[str, float] = {}
    analyzer_map = optics.bell_analyzer_map() if noise is not None else None
    for j in (Correlation.IDENTICAL, Correlation.ORTHOGONAL):
        e_j = strategy.povm.e1 if j == Correlation.IDENTICAL else strategy.povm.e0
        for pair in discrete_ensemble(j):
            psi = pair.product_state()
            if noise is None:
                p = float(np.vdot(psi, e_j @ psi).real)
            else:
                dist = optics.measure_with_noise(psi, noise.params(), noise.model)
                p = 0.0
                for k, outcome in enumerate(optics.ANALYZER_OUTCOMES):
                    if outcome_to_estimate(analyzer_map[outcome]) == j:
                        p += float(dist[k])
            probs[pair.label[0] + pair.label[1]] = p
    return probs


def theory_report(
    ensemble: EnsembleSpec,
    strategy_spec: StrategySpec,
    noise: NoiseSpec | None = None,
    fallback_shots: int = 10**6,
    fallback_seed: int = 0x51AB,
) -> PayoffReport:
    """Exact payoff probabilities via traces against the average states.

    No sampling, zero standard errors. The one exception is the
    fock_distinguishability model on a continuous ensemble, which has no
    closed-form class average here; that case falls back to a high-shot
    Monte Carlo run and is flagged through method="monte_carlo_fallback".
    """
    if noise is not None and strategy_spec.kind != "joint":
        raise ValueError("noise models apply to the joint Bell-analyzer strategy only")
    strategy = build_strategy(strategy_spec, ensemble)

    if ensemble.kind == "discrete6":
        per_state_p = _per_state_exact(strategy, noise)
        order = discrete_state_order()
        id_mean = sum(per_state_p[a + b] for a, b in order[:6]) / 6.0
        or_mean = sum(per_state_p[a + b] for a, b in order[6:]) / 6.0
        per_state = {a + b: (per_state_p[a + b], 0.0) for a, b in order}
        class_means = {"identical": (id_mean, 0.0), "orthogonal": (or_mean, 0.0)}
        overall = (0.5 * (id_mean + or_mean), 0.0)
        return PayoffReport(
            per_state=per_state,
            class_means=class_means,
            overall=overall,
            shots=0,
            method="exact",
        )

    if noise is not None and noise.model == "fock_distinguishability":
        config = RunConfig(
            ensemble=ensemble,
            strategy=strategy_spec,
            noise=noise,
            shots=fallback_shots,
            master_seed=fallback_seed,
        )
        report = payoff_report(run(config))
        return replace(report, method="monte_carlo_fallback")

    rho = {
        Correlation.ORTHOGONAL: average_state(ensemble, Correlation.ORTHOGONAL),
        Correlation.IDENTICAL: average_state(ensemble, Correlation.IDENTICAL),
    }
    class_p = {}
    for j in (Correlation.IDENTICAL, Correlation.ORTHOGONAL):
        e_j = strategy.povm.e1 if j == Correlation.IDENTICAL else strategy.povm.e0
        ideal = float(np.trace(e_j @ rho[j]).real)
        if noise is None:
            class_p[j] = ideal
        else:
            # statistics-level depolarizing: uniform outcomes hit the class's
            # estimate with probability (#outcomes mapping to j)/4 = 3/4 or 1/4
            base = 0.75 if j == Correlation.IDENTICAL else 0.25
            class_p[j] = noise.value * ideal + (1.0 - noise.value) * base
    class_means = {
        "identical": (class_p[Correlation.IDENTICAL], 0.0),
        "orthogonal": (class_p[Correlation.ORTHOGONAL], 0.0),
    }
    overall = (0.5 * (class_p[Correlation.IDENTICAL] + class_p[Correlation.ORTHOGONAL]), 0.0)
    return PayoffReport(
        per_state=dict(class_means),
        class_means=class_means,
        overall=overall,
        shots=0,
        method="exact",
    )


@dataclass(frozen=True)
class MutualInfoReport:
    """Plug-in and bias-corrected mutual information in bits."""

    variable: str
    conditioning: str
    estimate_bits: float
    bias_corrected_bits: float
    bootstrap_stderr_bits: float
    n_records: int
    n_used: int


MI_VARIABLES = ("alice_label", "correlation_j", "full_pair")
MI_CONDITIONINGS = ("none", "symmetric_outcome_only")


def _entropy_bits(counts: np.ndarray) -> float:
    n = counts.sum()
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


def _mi_from_table(table: np.ndarray) -> tuple[float, float]:
    """(plug-in, Miller-Madow corrected) MI in bits from a contingency table."""
    n = table.sum()
    hx = _entropy_bits(table.sum(axis=1))
    hy = _entropy_bits(table.sum(axis=0))
    hxy = _entropy_bits(table.reshape(-1))
    plugin = hx + hy - hxy
    kx = int((table.sum(axis=1) > 0).sum())
    ky = int((table.sum(axis=0) > 0).sum())
    kxy = int((table > 0).sum())
    correction = ((kx - 1) + (ky - 1) - (kxy - 1)) / (2.0 * n * math.log(2.0))
    return plugin, plugin + correction


def mutual_info(
    records: TrialRecords,
    variable: str,
    conditioning: str = "none",
    n_boot: int = 200,
    seed: int = 0,
) -> MutualInfoReport:
    """Mutual information between measurement outcomes and a preparation variable.

    With ``conditioning="symmetric_outcome_only"`` the records are filtered
    to triplet outcomes and the outcome variable ranges over the three
    triplets. The bootstrap standard error resamples the filtered
    contingency table (multinomial over its cells, ``n_boot`` replicates).
    """
    if records.outcome_kind != "bell":
        raise ValueError("mutual information diagnostics need Bell-analyzer records")
    if variable not in MI_VARIABLES:
        raise ValueError(f"unknown variable {variable!r}; expected one of {MI_VARIABLES}")
    if conditioning not in MI_CONDITIONINGS:
        raise ValueError(
            f"unknown conditioning {conditioning!r}; expected one of {MI_CONDITIONINGS}"
        )

    if conditioning == "symmetric_outcome_only":
        mask = records.outcome != 0
        x = records.outcome[mask].astype(np.int64) - 1
        nx = 3
    else:
        mask = np.ones(len(records), dtype=bool)
        x = records.outcome[mask].astype(np.int64)
        nx = 4

    if variable == "correlation_j":
        y = records.j[mask].astype(np.int64)
        ny = 2
    else:
        if not records.labeled:
            raise ValueError(f"variable {variable!r} needs labeled (discrete6) records")
        if variable == "alice_label":
            y = records.label_a[mask].astype(np.int64)
            ny = 6
        else:
            y = records.label_a[mask].astype(np.int64) * 6 + records.label_b[mask].astype(np.int64)
            ny = 36

    n_used = int(mask.sum())
    if len(np.unique(x)) < 2 or len(np.unique(y)) < 2:
        raise DegenerateDataError(
            "need at least two distinct values of both variables after filtering"
        )

    table = np.bincount(x * ny + y, minlength=nx * ny).reshape(nx, ny).astype(np.float64)
    plugin, corrected = _mi_from_table(table)

    rng = np.random.default_rng(seed)
    flat = table.reshape(-1)
    probs = flat / flat.sum()
    boots = np.empty(n_boot)
    for b in range(n_boot):
        resampled = rng.multinomial(n_used, probs).astype(np.float64).reshape(nx, ny)
        boots[b] = _mi_from_table(resampled)[1]
    stderr = float(boots.std(ddof=1))

    return MutualInfoReport(
        variable=variable,
        conditioning=conditioning,
        estimate_bits=plugin,
        bias_corrected_bits=corrected,
        bootstrap_stderr_bits=stderr,
        n_records=len(records),
        n_used=n_used,
    )
