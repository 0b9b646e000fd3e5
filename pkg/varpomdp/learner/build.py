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

import math
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import bittensor as bt

from varpomdp.model.validate import ensure_valid
from varpomdp.schemas import Emission, LearnerState, TransitionEstimate, Trajectory, VarPomdpModel
from varpomdp.utils.exceptions import LearnerError, MissingActionsError, MissingLabelError


def _check_unit_interval(name: str, value: float):
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


def chernoff_halfwidth(n: int, delta: float) -> float:
    """ε = sqrt(ln(2/δ) / (2n)): |p̂ − p| ≤ ε with probability at least 1 − δ."""
    _check_unit_interval("delta", delta)
    if n < 1:
        raise ValueError(f"Sample size must be >= 1, got {n}")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def required_sample_size(epsilon: float, delta: float) -> int:
    """Smallest n whose Chernoff half-width at confidence 1 − δ is at most ε."""
    _check_unit_interval("epsilon", epsilon)
    _check_unit_interval("delta", delta)
    n = max(1, math.ceil(math.log(2.0 / delta) / (2.0 * epsilon**2) - 1e-9))
    while chernoff_halfwidth(n, delta) > epsilon:
        n += 1
    return n


def estimate_transitions(
    state_seqs: Iterable[Sequence[int]],
    action_seqs: Iterable[Sequence[int]],
    num_states: int,
    num_actions: int,
    delta: float = 0.05,
) -> TransitionEstimate:
    """Maximum-likelihood T from (s_t, a_t, s_{t+1}) counts, with Chernoff half-widths.

    actions[t] is the action taken between states[t] and states[t+1]. Rows without data
    become self-loops and are flagged.
    """
    _check_unit_interval("delta", delta)
    counts = np.zeros((num_actions, num_states, num_states))
    for states, actions in zip(state_seqs, action_seqs):
        states = np.asarray(states, dtype=int)
        actions = np.asarray(actions, dtype=int)[: max(len(states) - 1, 0)]
        if len(actions) < len(states) - 1:
            raise MissingActionsError(
                f"{len(states)} states need {len(states) - 1} actions, got {len(actions)}"
            )
        if actions.size and (actions.min() < 0 or actions.max() >= num_actions):
            raise LearnerError(f"Action index outside [0, {num_actions})")
        np.add.at(counts, (actions, states[:-1], states[1:]), 1.0)

    totals = counts.sum(axis=2)
    probs = np.zeros_like(counts)
    epsilon = np.full(totals.shape, np.nan)
    flagged = []
    for a in range(num_actions):
        for s in range(num_states):
            n = int(totals[a, s])
            if n == 0:
                probs[a, s, s] = 1.0
                flagged.append((a, s))
                continue
            probs[a, s] = counts[a, s] / n
            epsilon[a, s] = chernoff_halfwidth(n, delta)
    if flagged:
        bt.logging.warning(
            f"{len(flagged)} (action, state) rows have no observed transitions; set to self-loops: {flagged}"
        )
    return TransitionEstimate(counts=counts, probs=probs, epsilon=epsilon, delta=delta, flagged=flagged)


def _label_sets(label_map: Dict, num_states: int) -> List[List[str]]:
    labels = []
    for k in range(num_states):
        entry = label_map.get(k, label_map.get(str(k)))
        if entry is None:
            raise MissingLabelError(f"Feature {k} has no entry in the label map")
        labels.append(sorted({entry} if isinstance(entry, str) else set(entry)))
    return labels


def build_model(
    best: LearnerState,
    labeled_corpus: List[Trajectory],
    label_map: Dict,
    delta: float = 0.05,
    num_actions: Optional[int] = None,
) -> tuple:
    """Assembles the VAR-POMDP from a pruned sample and the action-labelled corpus.

    States are the sample's features in order, emissions their θ_k. Transitions are counted
    on the post-warm-up mode sequences, which must align with the labelled corpus.
    """
    r = best.var_order
    if not labeled_corpus:
        raise LearnerError("Labelled corpus is empty")
    if len(labeled_corpus) != best.num_series:
        raise LearnerError(
            f"Labelled corpus has {len(labeled_corpus)} series, the sample was fitted to {best.num_series}"
        )
    for i, traj in enumerate(labeled_corpus):
        if traj.length != r + len(best.mode_seqs[i]):
            raise LearnerError(
                f"Series {i} has {traj.length} steps, the sample covers {r + len(best.mode_seqs[i])}"
            )
        if not traj.has_actions():
            raise MissingActionsError(f"Series {i} has no per-step actions")

    K = best.num_features
    labels = _label_sets(label_map, K)
    if num_actions is None:
        num_actions = 1 + max(max(traj.actions, default=0) for traj in labeled_corpus)

    estimate = estimate_transitions(
        best.mode_seqs,
        [traj.actions[r:] for traj in labeled_corpus],
        K,
        num_actions,
        delta,
    )
    model = VarPomdpModel(
        num_states=K,
        num_actions=num_actions,
        obs_dim=labeled_corpus[0].obs_dim,
        var_order=r,
        transitions=estimate.probs.tolist(),
        emissions=[Emission.from_arrays(theta.lags, theta.sigma) for theta in best.thetas],
        labels=labels,
        state_names=[f"s{k}" for k in range(K)],
    )
    ensure_valid(model)
    bt.logging.info(
        f"Built VAR-POMDP: {K} states, {num_actions} actions, {len(estimate.flagged)} flagged rows"
    )
    return model, estimate
