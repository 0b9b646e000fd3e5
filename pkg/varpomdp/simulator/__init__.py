from .policies import (
    Policy,
    FixedSequencePolicy,
    UniformRandomPolicy,
    AlphaVectorPolicy,
    POLICIES,
    make_policy,
)
from .simulate import simulate
from .corpus import make_synthetic_corpus, companion_matrix, spectral_radius, stabilize
from .reference import (
    three_state_fail_model,
    THREE_STATE_BELIEF_POINTS,
    THREE_STATE_SPEC,
    two_state_separated_model,
)
