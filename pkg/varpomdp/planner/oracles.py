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

"""Reference solutions used to bound and cross-check the point-based planner."""

from typing import List

import numpy as np
import bittensor as bt
from scipy import integrate, optimize, stats

from varpomdp.planner.backup import backup
from varpomdp.planner.pbvi import _check_inputs, initial_alphas
from varpomdp.schemas import AlphaVectorSet, BeliefSet, PartitionProbs, VarPomdpModel
from varpomdp.utils.exceptions import PlannerError

GRID_POINTS_PER_SCALE = 4001
GRID_SPAN = 12.0


def mdp_upper_bound(model: VarPomdpModel, p0, horizon: int) -> np.ndarray:
    """Fully observable finite-horizon values V_{t+1}(s) = max_a Σ_{s'} T^{s,a}_{s'} V_t(s')."""
    values = np.asarray(p0, dtype=float).copy()
    T = model.transition_tensor
    for _ in range(horizon):
        values = np.max(T @ values, axis=0)
    return values


def _scales(model: VarPomdpModel) -> np.ndarray:
    if model.obs_dim != 1:
        raise PlannerError(f"Quadrature backup needs obs_dim = 1, model has {model.obs_dim}")
    return np.sqrt(np.array([e.noise_cov[0][0] for e in model.emissions], dtype=float))


def _region_breakpoints(scales, weights, alphas):
    """Boundaries on the real line between the argmax regions, plus the winning region
    of every interval between consecutive boundaries."""
    scale_weights = weights[None, :] * alphas

    def scores(x):
        x = np.atleast_1d(x)
        dens = stats.norm.pdf(x[:, None], scale=scales[None, :])
        return dens @ scale_weights.T

    grid = np.unique(
        np.concatenate(
            [np.linspace(-GRID_SPAN * s, GRID_SPAN * s, GRID_POINTS_PER_SCALE) for s in scales]
        )
    )
    winners = np.argmax(scores(grid), axis=1)
    change = np.flatnonzero(winners[1:] != winners[:-1])

    boundaries = []
    for j in change:
        left, right = winners[j], winners[j + 1]

        def gap(x, left=left, right=right):
            row = scores(x)[0]
            return float(row[left] - row[right])

        lo, hi = grid[j], grid[j + 1]
        if gap(lo) * gap(hi) < 0:
            boundaries.append(optimize.brentq(gap, lo, hi, xtol=1e-14))
        else:
            boundaries.append(0.5 * (lo + hi))
    edges = np.concatenate([[-np.inf], boundaries, [np.inf]])
    regions = np.concatenate([[winners[0]], winners[change + 1]])
    return edges, regions


def quadrature_partition_probs(
    model: VarPomdpModel, belief_point, action: int, alphas_prev: AlphaVectorSet
) -> np.ndarray:
    """Pr(z_k | s') by adaptive integration of N(ô; 0, σ²_{s'}) over each region, d = 1 only."""
    scales = _scales(model)
    alphas = alphas_prev.matrix
    K = alphas.shape[0]
    out = np.zeros((model.num_states, K))
    if K == 1:
        out[:, 0] = 1.0
        return out

    b = np.asarray(getattr(belief_point, "vector", belief_point), dtype=float)
    weights = b @ model.transition_tensor[action]
    edges, regions = _region_breakpoints(scales, weights, alphas)
    for s_next, scale in enumerate(scales):
        for lo, hi, k in zip(edges[:-1], edges[1:], regions):
            mass, _ = integrate.quad(
                stats.norm.pdf, lo, hi, args=(0.0, scale), epsabs=1e-13, limit=200
            )
            out[s_next, k] += mass
    return out


def quadrature_partition_table(
    model: VarPomdpModel, belief_set: BeliefSet, alphas_prev: AlphaVectorSet
) -> PartitionProbs:
    table = np.stack(
        [
            np.stack(
                [
                    quadrature_partition_probs(model, point, a, alphas_prev)
                    for a in range(model.num_actions)
                ]
            )
            for point in belief_set.points
        ]
    )
    return PartitionProbs(table=table, num_samples=None)


def quadrature_pbvi(
    model: VarPomdpModel, p0, horizon: int, belief_set: BeliefSet
) -> List[AlphaVectorSet]:
    """Point-based value iteration with exact 1-d region probabilities."""
    p0 = np.asarray(p0, dtype=float)
    _check_inputs(model, p0, horizon, belief_set)
    alpha_sets = [initial_alphas(p0)]
    for t in range(1, horizon + 1):
        probs = None if t == 1 else quadrature_partition_table(model, belief_set, alpha_sets[-1])
        alpha_sets.append(backup(model, belief_set, alpha_sets[-1], probs, p0))
        bt.logging.debug(f"Quadrature backup {t}/{horizon}: {len(alpha_sets[-1])} alpha vectors")
    return alpha_sets


def quadrature_backup_value(
    model: VarPomdpModel, alphas_prev: AlphaVectorSet, belief, p0
) -> float:
    """Value at `belief` of a single exact backup of `alphas_prev`, with no point pruning."""
    point = BeliefSet(points=np.asarray(getattr(belief, "vector", belief), dtype=float)[None, :])
    probs = None if alphas_prev.step == 0 else quadrature_partition_table(model, point, alphas_prev)
    result = backup(model, point, alphas_prev, probs, p0)
    return float(result[0].alpha @ point.points[0])
