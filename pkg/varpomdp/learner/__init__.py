from .bparhmm import (
    FitResult,
    fit_bp_arhmm,
    forward_loglik,
    hamming_error,
    initial_state,
    joint_log_prob,
    prune,
    sample_feature_weights,
    sample_features,
    sample_mode_sequences,
    sample_path,
    sample_thetas,
    sample_trans_weights,
)
from .build import build_model, chernoff_halfwidth, estimate_transitions, required_sample_size
