"""corrlab: joint vs local discrimination of correlated photon-pair preparations.

A numerical laboratory for a two-party correlation-estimation game: Alice
and Bob prepare identical or orthogonal single-photon polarization states,
and a third party must name the correlation from a single joint or local
measurement. The package builds the class-average states, evaluates joint,
local and minimum-error strategies, models a post-selected linear-optics
Bell analyzer with noise, and reproduces the payoff benchmarks 3/4 (joint),
2/3 (local) and the noisy experimental value 0.72.
"""

__version__ = "0.1.0"

from corrlab.core import (  # noqa: F401
    BELL_LABELS,
    TwoOutcomePOVM,
    bell_state,
    expected_payoff,
    kron,
    sym_antisym_projectors,
    trace_norm,
    validate_povm,
    werner,
)
from corrlab.ensembles import (  # noqa: F401
    Correlation,
    EnsembleSpec,
    PreparationPair,
    average_state,
    discrete_ensemble,
    pol_state,
    sample_pair,
)
from corrlab.strategies import (  # noqa: F401
    Strategy,
    helstrom_strategy,
    joint_bell_strategy,
    local_grid_search,
    local_same_axis_strategy,
    outcome_to_estimate,
)
from corrlab.optics import (  # noqa: F401
    ModeNetwork,
    NoiseParams,
    NoSolutionError,
    bell_analyzer_map,
    build_cnot_network,
    conditional_gate,
    fit_noise,
    hom_projection,
    measure_with_noise,
)
from corrlab.experiment import (  # noqa: F401
    MutualInfoReport,
    NoiseSpec,
    PayoffReport,
    RunConfig,
    StrategySpec,
    TrialRecord,
    TrialRecords,
    mutual_info,
    payoff_report,
    run,
    theory_report,
)
