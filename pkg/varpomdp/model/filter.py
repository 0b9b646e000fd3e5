# The MIT License (MIT)
# Copyright © 2024 varpomdp developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

from typing import List, Optional, Tuple

import numpy as np
import bittensor as bt
from scipy.special import logsumexp

from varpomdp.model.emission import emission_logpdfs
from varpomdp.model.history import empty_history, push_history
from varpomdp.schemas import Belief, ObsHistory, Trajectory, VarPomdpModel
from varpomdp.utils.exceptions import (
    DimensionMismatchError,
    ImpossibleObservationError,
    MissingActionsError,
)

MIN_NORMALIZER = 1e-300
LOG_MIN_NORMALIZER = np.log(MIN_NORMALIZER)
ON_IMPOSSIBLE = ("error", "reset")


def _check_belief(model: VarPomdpModel, belief: Belief) -> np.ndarray:
    if belief.size != model.num_states:
        raise DimensionMismatchError(
            f"Belief has {belief.size} entries, model has {model.num_states} states"
        )
    return belief.vector


def propagate(model: VarPomdpModel, belief: Belief, action: int) -> Belief:
    """Prediction step only: Σ_s T^{s,a}_{s'} b_s."""
    b = _check_belief(model, belief)
    predicted = model.transition_tensor[action].T @ b
    return Belief.from_vector(predicted, normalize=True)


def _correct(model: VarPomdpModel, log_prior: np.ndarray, obs, history: ObsHistory) -> Belief:
    with np.errstate(divide="ignore"):
        log_num = log_prior + emission_logpdfs(model, obs, history)
    log_norm = logsumexp(log_num)
    if not np.isfinite(log_norm) or log_norm < LOG_MIN_NORMALIZER:
        raise ImpossibleObservationError(
            f"Observation normalizer exp({log_norm:.4g}) is below {MIN_NORMALIZER}"
        )
    posterior = np.exp(log_num - log_norm)
    return Belief(probs=(posterior / posterior.sum()).tolist())


def belief_update(
    model: VarPomdpModel, belief: Belief, action: int, obs, history: ObsHistory
) -> Belief:
    """b'_{s'} ∝ E^{s'}(obs | history) Σ_s T^{s,a}_{s'} b_s, evaluated in log space."""
    b = _check_belief(model, belief)
    with np.errstate(divide="ignore"):
        log_prior = np.log(model.transition_tensor[action].T @ b)
    return _correct(model, log_prior, obs, history)


def condition_belief(model: VarPomdpModel, belief: Belief, obs, history: ObsHistory) -> Belief:
    """Bayes correction without a transition, for the first observation after warm-up."""
    b = _check_belief(model, belief)
    with np.errstate(divide="ignore"):
        log_prior = np.log(b)
    return _correct(model, log_prior, obs, history)


def advance(
    model: VarPomdpModel,
    belief: Belief,
    history: ObsHistory,
    obs,
    prev_action: Optional[int] = None,
    on_impossible: str = "error",
) -> Tuple[Belief, ObsHistory]:
    """One online filter step: fold `obs` into the belief, then push it into the history.

    `prev_action` is the action taken before `obs` was emitted (None at t = 0). While the
    window is still warming up the observation carries no likelihood and the belief is
    only propagated.
    """
    if on_impossible not in ON_IMPOSSIBLE:
        raise ValueError(f"on_impossible must be one of {ON_IMPOSSIBLE}, got {on_impossible!r}")
    if not history.ready:
        if prev_action is not None:
            belief = propagate(model, belief, prev_action)
    else:
        try:
            if prev_action is None:
                belief = condition_belief(model, belief, obs, history)
            else:
                belief = belief_update(model, belief, prev_action, obs, history)
        except ImpossibleObservationError as e:
            if on_impossible == "error":
                raise
            bt.logging.warning(f"{e.message}; resetting belief to uniform")
            belief = Belief.uniform(model.num_states)
    return belief, push_history(history, obs)


def filter_trajectory(
    model: VarPomdpModel,
    trajectory: Trajectory,
    b0: Belief,
    on_impossible: str = "error",
) -> List[Belief]:
    """Beliefs over s_t after seeing o_0..o_t, for every step of `trajectory`."""
    actions = trajectory.actions
    if trajectory.length > 1 and not trajectory.has_actions():
        if model.num_actions != 1:
            raise MissingActionsError("Filtering a multi-action model needs per-step actions")
        actions = [0] * trajectory.length

    belief, history = b0, empty_history(model.var_order, model.obs_dim)
    beliefs = []
    for t, obs in enumerate(trajectory.array):
        prev_action = None if t == 0 else int(actions[t - 1])
        belief, history = advance(model, belief, history, obs, prev_action, on_impossible)
        beliefs.append(belief)
    bt.logging.debug(f"Filtered {trajectory.length} steps")
    return beliefs
