"""Extremes of a stationary scenery observed along a transient heavy-tailed random walk on Z."""

__version__ = "0.1.0"

from .steplaw import (  # noqa: E402
    StepLaw,
    make_step_law,
    sample_step,
    sample_steps,
    self_similarity_check,
    step_pmf,
    tail_probability,
)
from .walk import (  # noqa: E402
    QEstimate,
    WalkRealization,
    WalkStats,
    estimate_q_range,
    estimate_q_survival,
    simulate_walk,
    walk_stats,
)
from .scenery import (  # noqa: E402
    EXPONENTIAL1,
    FRECHET1,
    IID,
    GaussMA,
    Marginal,
    MovingMax,
    SceneryModel,
    make_scenery,
    marginal_tail,
    pareto,
    scenery_value,
    scenery_values,
    threshold,
)
from .conditions import (  # noqa: E402
    MixingSchedule,
    default_schedule,
    dprime_limit,
    dprime_statistic,
    make_schedule,
    validate_schedule,
)
from .blocks import BlockDecomposition, decompose, lemma1_diagnostic, lemma2_diagnostic  # noqa: E402
from .extremes import (  # noqa: E402
    ExperimentConfig,
    ExperimentResult,
    exceedance_points,
    poisson_gof,
    run_annealed,
    run_experiment,
    run_quenched,
    sweep,
)
