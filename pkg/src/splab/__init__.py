"""Self-play training schemes with game-theoretic population evaluation.

The package trains a tabular policy on repeated imperfect-recall
rock-paper-scissors under four opponent-selection schemes (naive,
delta-uniform, delta-limit-uniform, PSRO), then evaluates checkpoint
populations through empirical winrate matrices, maximum-entropy Nash
equilibria, and relative population performance.
"""

from .harness import (ExperimentConfig, TrainAborted, analyze,
                      checkpoint_episodes, estimate_cross_winrate_matrix,
                      estimate_winrate_matrix, load_population, parse_config,
                      psro_sweep, rpp_report, train)
from .learner import (LearnerConfig, ReinforceLearner, TabularSoftmaxPolicy,
                      restore, snapshot)
from .metagame import (CrossWinrateMatrix, EvaluationMatrix, MixedStrategy,
                       WinrateMatrix, cross_winrate_to_evaluation,
                       evaluation_to_winrate, submatrix, winrate_to_evaluation)
from .nash import (NashSolution, NashSolverError, brute_force_maxent_nash,
                   equilibrium_vertices, maxent_nash, nash_support_series)
from .population import (RppResult, relative_population_performance,
                         rpp_evolution, solve_zero_sum)
from .rirrps import (FixedAgent, RirRps, RirRpsConfig, decide_winner,
                     play_episode, state_count)
from .selfplay import (DeltaLimitUniformScheme, DeltaUniformScheme, Menagerie,
                       NaiveScheme, PsroScheme, curate,
                       expected_sample_counts_delta0, harmonic_tail_series,
                       psro_meta_step, sample_opponents, scheme_from_name)

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig", "TrainAborted", "analyze", "checkpoint_episodes",
    "estimate_cross_winrate_matrix", "estimate_winrate_matrix",
    "load_population", "parse_config", "psro_sweep", "rpp_report", "train",
    "LearnerConfig", "ReinforceLearner", "TabularSoftmaxPolicy", "restore",
    "snapshot",
    "CrossWinrateMatrix", "EvaluationMatrix", "MixedStrategy", "WinrateMatrix",
    "cross_winrate_to_evaluation", "evaluation_to_winrate", "submatrix",
    "winrate_to_evaluation",
    "NashSolution", "NashSolverError", "brute_force_maxent_nash",
    "equilibrium_vertices", "maxent_nash", "nash_support_series",
    "RppResult", "relative_population_performance", "rpp_evolution",
    "solve_zero_sum",
    "FixedAgent", "RirRps", "RirRpsConfig", "decide_winner", "play_episode",
    "state_count",
    "DeltaLimitUniformScheme", "DeltaUniformScheme", "Menagerie",
    "NaiveScheme", "PsroScheme", "curate", "expected_sample_counts_delta0",
    "harmonic_tail_series", "psro_meta_step", "sample_opponents",
    "scheme_from_name",
    "__version__",
]
