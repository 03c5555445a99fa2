from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .csvio import write_csv, write_curve_csv, write_stats_csv, write_trials_csv
from .experiment import (
    DeltaPCurve,
    ExperimentStats,
    TrialRecord,
    calibrate,
    dp_curve,
    mix_seed,
    run_dp_curve,
    run_experiment,
    run_trials,
    summarize,
)
from .presets import CALIBRATED_NOISE, SOURCE_FOR_Q, reference_config
