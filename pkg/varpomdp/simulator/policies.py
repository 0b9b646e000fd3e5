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

from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

import numpy as np

from varpomdp.model.filter import advance
from varpomdp.model.history import empty_history
from varpomdp.planner.values import extract_action
from varpomdp.schemas import AlphaVectorSet, Belief, VarPomdpModel
from varpomdp.utils.exceptions import PolicyError


class Policy(ABC):
    """Chooses a_t after o_t has been emitted."""

    name: str = "policy"

    def reset(self, model: VarPomdpModel, init_belief: Belief):
        self.model = model

    @abstractmethod
    def act(self, t: int, obs: np.ndarray, rng: np.random.Generator) -> int:
        ...

    def __repr__(self):
        return f"{self.__class__.__name__}(name={self.name!r})"


class FixedSequencePolicy(Policy):
    """Replays `actions`, cycling when the trajectory outlasts it."""

    name = "fixed"

    def __init__(self, actions: Sequence[int] = (0,)):
        if len(actions) == 0:
            raise PolicyError("A fixed-sequence policy needs at least one action")
        self.actions = [int(a) for a in actions]

    def reset(self, model, init_belief):
        super().reset(model, init_belief)
        bad = [a for a in self.actions if not 0 <= a < model.num_actions]
        if bad:
            raise PolicyError(f"Actions {bad} are outside 0..{model.num_actions - 1}")

    def act(self, t, obs, rng):
        return self.actions[t % len(self.actions)]


class UniformRandomPolicy(Policy):
    name = "random"

    def act(self, t, obs, rng):
        return int(rng.integers(self.model.num_actions))


class AlphaVectorPolicy(Policy):
    """Follows per-step alpha sets online.

    `alpha_sets[k]` is the value function with k steps to go. At step t of a run with
    `horizon` H the policy reads the set for max(1, H - t) steps to go, falling back to the
    deepest set available. Beliefs are tracked with the warm-up aware filter.
    """

    name = "alpha"

    def __init__(
        self,
        alpha_sets: Optional[List[AlphaVectorSet]] = None,
        horizon: Optional[int] = None,
        on_impossible: str = "reset",
    ):
        if not alpha_sets or len(alpha_sets) < 2 or not all(len(s) for s in alpha_sets[1:]):
            raise PolicyError("An alpha-vector policy needs alpha sets for at least one backup")
        self.alpha_sets = alpha_sets
        self.horizon = horizon if horizon is not None else len(alpha_sets) - 1
        self.on_impossible = on_impossible

    def reset(self, model, init_belief):
        super().reset(model, init_belief)
        self.belief = init_belief
        self.history = empty_history(model.var_order, model.obs_dim)
        self.last_action = None

    def alpha_set_at(self, t: int) -> AlphaVectorSet:
        to_go = min(max(1, self.horizon - t), len(self.alpha_sets) - 1)
        return self.alpha_sets[to_go]

    def observe(self, obs):
        self.belief, self.history = advance(
            self.model,
            self.belief,
            self.history,
            obs,
            self.last_action,
            self.on_impossible,
        )
        return self.belief

    def act(self, t, obs, rng):
        self.observe(obs)
        self.last_action = extract_action(self.alpha_set_at(t), self.belief)
        return self.last_action


POLICIES = {
    FixedSequencePolicy.name: FixedSequencePolicy,
    UniformRandomPolicy.name: UniformRandomPolicy,
    AlphaVectorPolicy.name: AlphaVectorPolicy,
}


def make_policy(name: str, **params) -> Policy:
    if name not in POLICIES:
        raise PolicyError(f"Policy {name} not supported. Please choose from {list(POLICIES.keys())}")
    return POLICIES[name](**params)
