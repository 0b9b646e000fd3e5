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

from typing import Optional, Sequence

import numpy as np
import bittensor as bt
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from varpomdp.kernels import RngLike, as_generator
from varpomdp.planner.partition import ZeroMeanDensities
from varpomdp.schemas import BeliefSet, BeliefStrategy, VarPomdpModel
from varpomdp.utils.exceptions import PlannerError

MAX_EXPANSION_ROUNDS = 1000


def _dedupe(points: np.ndarray) -> np.ndarray:
    _, first = np.unique(points, axis=0, return_index=True)
    return points[np.sort(first)]


def _sample_next_beliefs(
    model: VarPomdpModel,
    belief: np.ndarray,
    densities: ZeroMeanDensities,
    gen: np.random.Generator,
) -> np.ndarray:
    """One simulated successor belief per action, under history-free observations."""
    T = model.transition_tensor
    successors = []
    for a in range(model.num_actions):
        s = gen.choice(model.num_states, p=belief)
        s_next = gen.choice(model.num_states, p=T[a, s] / T[a, s].sum())
        obs = densities.chols[s_next] @ gen.standard_normal(model.obs_dim)
        with np.errstate(divide="ignore"):
            log_post = np.log(belief @ T[a]) + densities.logpdf(obs[None, :])[0]
        post = np.exp(log_post - logsumexp(log_post))
        successors.append(post / post.sum())
    return np.asarray(successors)


def _expand(model, points, num_points, gen) -> np.ndarray:
    """Grows `points` by the successor farthest in L1 from the current set."""
    densities = ZeroMeanDensities.from_model(model)
    for _ in range(MAX_EXPANSION_ROUNDS):
        if points.shape[0] >= num_points:
            break
        added = []
        for belief in points:
            successors = _sample_next_beliefs(model, belief, densities, gen)
            distances = cdist(successors, np.vstack([points] + added), metric="cityblock").min(axis=1)
            if distances.max() > 0:
                added.append(successors[[int(np.argmax(distances))]])
            if points.shape[0] + len(added) >= num_points:
                break
        if not added:
            added = [gen.dirichlet(np.ones(model.num_states), size=1)]
        points = _dedupe(np.vstack([points] + added))
    return points[:num_points]


def select_belief_points(
    model: VarPomdpModel,
    strategy: BeliefStrategy,
    num_points: Optional[int],
    rng: RngLike,
    given: Optional[Sequence[Sequence[float]]] = None,
) -> BeliefSet:
    """Builds the PBVI belief set.

    `given` passes user points through unchanged. `corners-plus-random` takes every unit
    belief and fills up with uniform simplex draws. `simulation-expansion` starts from the
    first given point (uniform if none) and repeatedly adds the simulated successor belief
    farthest from the set.
    """
    strategy = BeliefStrategy(strategy)
    S = model.num_states
    if strategy == BeliefStrategy.GIVEN:
        if not given:
            raise PlannerError("The given strategy needs belief points")
        return BeliefSet(points=np.asarray(given, dtype=float))

    if num_points is None or num_points < 1:
        raise PlannerError(f"Belief set size must be >= 1, got {num_points}")
    gen = as_generator(rng)

    if strategy == BeliefStrategy.CORNERS_PLUS_RANDOM:
        if num_points < S:
            raise PlannerError(f"corners-plus-random needs at least |S|={S} points, got {num_points}")
        points = np.eye(S)
        while points.shape[0] < num_points:
            extra = gen.dirichlet(np.ones(S), size=num_points - points.shape[0])
            points = _dedupe(np.vstack([points, extra]))
        return BeliefSet(points=points)

    start = np.asarray(given[0], dtype=float) if given else np.full(S, 1.0 / S)
    points = _expand(model, start[None, :], num_points, gen)
    bt.logging.debug(f"Expanded belief set to {points.shape[0]} points")
    return BeliefSet(points=points)
