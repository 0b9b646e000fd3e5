from .validate import validate_model, ensure_valid
from .history import empty_history, zero_history, push_history
from .emission import (
    emission_mean,
    emission_logpdf,
    emission_logpdfs,
    lagged_design,
    series_loglik,
)
from .filter import (
    propagate,
    belief_update,
    condition_belief,
    advance,
    filter_trajectory,
)
