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

from typing import Optional

import numpy as np
import bittensor as bt

from varpomdp.kernels import RngLike, as_generator, cholesky
from varpomdp.model.history import push_history, zero_history
from varpomdp.schemas import Belief, ObsHistory, Trajectory, VarPomdpModel
from varpomdp.simulator.policies import Policy
from varpomdp.utils.exceptions import DimensionMismatchError


def _draw_index(cumulative: np.ndarray, gen: np.random.Generator) -> int:
    index = int(np.searchsorted(cumulative, gen.random() * cumulative[-1], side="right"))
    return min(index, cumulative.shape[0] - 1)


def simulate(
    model: VarPomdpModel,
    policy: Policy,
    init_state_dist: Belief,
    init_history: Optional[ObsHistory] = None,
    steps: int = 1,
    rng: RngLike = None,
) -> Trajectory:
    """Samples s_0 ~ init_state_dist, then alternates o_t ~ E(s_t, history), a_t from the
    policy and s_{t+1} ~ T[a_t][s_t].

    Without `init_history` the first r observations regress on zero vectors.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if init_state_dist.size != model.num_states:
        raise DimensionMismatchError(
            f"Initial distribution has {init_state_dist.size} entries, model has {model.num_states} states"
        )
    gen = as_generator(rng)
    history = init_history or zero_history(model.var_order, model.obs_dim)
    if history.filled < model.var_order:
        padding = np.zeros((model.var_order - history.filled, model.obs_dim))
        history = ObsHistory(
            order=model.var_order,
            dim=model.obs_dim,
            window=np.vstack([padding, history.window]),
        )

    weights = [e.stacked_lags for e in model.emissions]
    chols = [cholesky(e.covariance) for e in model.emissions]
    transitions = np.cumsum(model.transition_tensor, axis=-1)
    d = model.obs_dim

    policy.reset(model, init_state_dist)
    state = _draw_index(np.cumsum(init_state_dist.vector), gen)
    observations, actions, states = [], [], []
    for t in range(steps):
        mean = weights[state] @ history.lagged() if model.var_order else np.zeros(d)
        obs = mean + chols[state] @ gen.standard_normal(d)
        action = int(policy.act(t, obs, gen))

        observations.append(obs.tolist())
        actions.append(action)
        states.append(state)

        history = push_history(history, obs)
        if t < steps - 1:
            state = _draw_index(transitions[action, state], gen)

    bt.logging.trace(f"Simulated {steps} steps with {policy!r}")
    return Trajectory(observations=observations, actions=actions, true_states=states)
