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

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import bittensor as bt

from varpomdp.kernels import RngStream
from varpomdp.model.validate import ensure_valid
from varpomdp.planner import (
    extract_action,
    pbvi,
    quadrature_pbvi,
    select_belief_points,
    value_at,
)
from varpomdp.schemas import (
    AlphaVectorSet,
    Belief,
    BeliefSet,
    BeliefStrategy,
    PathOperator,
    PctlSpec,
    PlannerConfig,
    StatePartition,
    VarPomdpModel,
)
from varpomdp.utils.exceptions import ConfigError, DimensionMismatchError, UnsupportedFormulaError


def _require_bounded_until(spec: PctlSpec):
    if spec.path != PathOperator.BOUNDED_UNTIL:
        raise UnsupportedFormulaError(
            f"Only bounded until can be checked, got {spec.path} in {spec}"
        )


def partition_states(model: VarPomdpModel, spec: PctlSpec) -> StatePartition:
    """S^yes = Sat(φ2), S^no = S \\ (Sat(φ1) ∪ Sat(φ2)), S^? the rest."""
    _require_bounded_until(spec)
    s_yes, s_no, s_q = set(), set(), set()
    for s, labels in enumerate(model.label_sets):
        if spec.phi2.holds(labels):
            s_yes.add(s)
        elif not spec.phi1.holds(labels):
            s_no.add(s)
        else:
            s_q.add(s)
    missing = spec.atoms() - model.alphabet
    if missing:
        bt.logging.warning(f"Atomic propositions {sorted(missing)} label no state")
    p0 = np.array([1.0 if s in s_yes else 0.0 for s in range(model.num_states)])
    return StatePartition(
        s_yes=frozenset(s_yes), s_no=frozenset(s_no), s_q=frozenset(s_q), p0=p0
    )


def transform_model(model: VarPomdpModel, partition: StatePartition) -> VarPomdpModel:
    """Copy of `model` in which every S^yes and S^no state self-loops under every action."""
    T = model.transition_tensor.copy()
    for s in sorted(partition.absorbing):
        T[:, s, :] = 0.0
        T[:, s, s] = 1.0
    return model.with_transitions(T)


@dataclass
class CheckResult:
    p_max: float
    satisfied: bool
    horizon: int
    spec: PctlSpec
    partition: StatePartition
    alphas: List[AlphaVectorSet] = field(default_factory=list)
    belief_set: Optional[BeliefSet] = None

    @property
    def final_alphas(self) -> AlphaVectorSet:
        return self.alphas[-1]

    @property
    def chosen_actions(self) -> List[int]:
        return self.final_alphas.actions

    def asdict(self) -> dict:
        return {
            "p_max": self.p_max,
            "satisfied": self.satisfied,
            "horizon": self.horizon,
            "spec": str(self.spec),
            "alpha_vectors": [v.alpha.tolist() for v in self.final_alphas],
            "chosen_actions": self.chosen_actions,
        }


def _belief_set(model, config: PlannerConfig, points, rng: RngStream) -> BeliefSet:
    strategy = BeliefStrategy(config.belief_strategy)
    if strategy == BeliefStrategy.GIVEN and not points:
        strategy = BeliefStrategy.CORNERS_PLUS_RANDOM
    num_points = config.num_points or max(model.num_states, len(points or []))
    return select_belief_points(model, strategy, num_points, rng.substream(0), given=points)


def check(
    model: VarPomdpModel,
    b0: Belief,
    spec: PctlSpec,
    planner_config: PlannerConfig,
    belief_points=None,
    events_logger=None,
) -> CheckResult:
    """Checks P ⋈ p [φ1 U≤k φ2] at b0 against the maximal satisfaction probability.

    For every comparator the decision compares p_max with the bound, so for ≥ and > the
    answer says whether the best policy reaches the bound.
    """
    _require_bounded_until(spec)
    ensure_valid(model)
    if b0.size != model.num_states:
        raise DimensionMismatchError(
            f"Initial belief has {b0.size} entries, model has {model.num_states} states"
        )
    if planner_config.seed is None:
        raise ConfigError("Checking needs an explicit seed")
    horizon = planner_config.horizon if planner_config.horizon is not None else spec.steps

    partition = partition_states(model, spec)
    bt.logging.debug(
        "Partition: "
        + ", ".join(
            f"{name}={[model.state_name(s) for s in sorted(states)]}"
            for name, states in (("yes", partition.s_yes), ("no", partition.s_no), ("?", partition.s_q))
        )
    )
    absorbing = transform_model(model, partition)
    rng = RngStream(planner_config.seed)
    belief_set = _belief_set(absorbing, planner_config, belief_points, rng)

    if planner_config.quadrature:
        alphas = quadrature_pbvi(absorbing, partition.p0, horizon, belief_set)
    else:
        alphas = pbvi(
            absorbing,
            partition.p0,
            horizon,
            belief_set,
            planner_config.mc_samples,
            rng.substream(1),
            planner_config.threads,
            events_logger,
        )
    p_max = min(1.0, max(0.0, value_at(alphas[-1], b0)))
    satisfied = spec.comparator.compare(p_max, spec.bound)
    first_action = model.action_name(extract_action(alphas[-1], b0)) if horizon > 0 else "none"
    bt.logging.info(
        f"{spec}: p_max={p_max:.4f} at b0={b0.probs}, {'satisfied' if satisfied else 'violated'}, "
        f"first action {first_action}"
    )
    return CheckResult(
        p_max=p_max,
        satisfied=satisfied,
        horizon=horizon,
        spec=spec,
        partition=partition,
        alphas=alphas,
        belief_set=belief_set,
    )
