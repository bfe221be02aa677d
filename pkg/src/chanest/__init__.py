"""Joint mmWave channel and impulsive interference estimation."""

from .config import Hyperparams, SweepSpec, SystemConfig, desk_preset, parse_config
from .geometry import (AngularChannel, ArrayGeometry, Dictionary,
                       GeometricChannel, angular_expand, build_dictionary,
                       free_space_path_gain, sample_geometric_channel,
                       steering_vector)
from .interference import (ImpulseConfig, NoiseConfig, dbm_to_watt,
                           sample_awgn, sample_impulsive)
from .sensing import (PilotMatrix, SensingProblem, build_sensing_matrix,
                      dump_problem, generate_pilots, load_problem, observe)
from .vi import EstimateResult, VIState, compute_elbo, init_state, run
from .baselines import OmpConfig, ls_estimate, omp_estimate, sie_estimate
from .sweep import SweepRow, derive_trial_seed, nmse, run_sweep, run_trial
from .output import read_csv, write_csv, write_svg_plot

__all__ = [
    "Hyperparams", "SweepSpec", "SystemConfig", "desk_preset", "parse_config",
    "AngularChannel", "ArrayGeometry", "Dictionary", "GeometricChannel",
    "angular_expand", "build_dictionary", "free_space_path_gain",
    "sample_geometric_channel", "steering_vector",
    "ImpulseConfig", "NoiseConfig", "dbm_to_watt", "sample_awgn",
    "sample_impulsive",
    "PilotMatrix", "SensingProblem", "build_sensing_matrix", "dump_problem",
    "generate_pilots", "load_problem", "observe",
    "EstimateResult", "VIState", "compute_elbo", "init_state", "run",
    "OmpConfig", "ls_estimate", "omp_estimate", "sie_estimate",
    "SweepRow", "derive_trial_seed", "nmse", "run_sweep", "run_trial",
    "read_csv", "write_csv", "write_svg_plot",
]
