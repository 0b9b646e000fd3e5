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

from dataclasses import dataclass
from typing import Optional

import numpy as np
import bittensor as bt

from varpomdp.kernels import LOG_2PI, RngLike, RngStream, as_generator, cholesky
from varpomdp.schemas import AlphaVectorSet, BeliefSet, PartitionProbs, VarPomdpModel
from varpomdp.utils.exceptions import PlannerError
from varpomdp.utils.misc import ordered_map


@dataclass(frozen=True, eq=False)
class ZeroMeanDensities:
    """Cholesky factors of every Σ_s, for zero-mean log-densities N(ô; 0, Σ_s)."""

    chols: np.ndarray
    inv_chols: np.ndarray
    log_norms: np.ndarray

    @classmethod
    def from_model(cls, model: VarPomdpModel) -> "ZeroMeanDensities":
        chols = np.stack([cholesky(e.covariance) for e in model.emissions])
        inv_chols = np.stack([np.linalg.inv(c) for c in chols])
        d = chols.shape[1]
        log_dets = 2.0 * np.sum(np.log(np.diagonal(chols, axis1=1, axis2=2)), axis=1)
        return cls(chols=chols, inv_chols=inv_chols, log_norms=-0.5 * (d * LOG_2PI + log_dets))

    def logpdf(self, samples: np.ndarray) -> np.ndarray:
        """Log-densities of `samples` (L, d) under every state, shape (L, |S|)."""
        whitened = np.einsum("sij,lj->lsi", self.inv_chols, samples)
        return self.log_norms[None, :] - 0.5 * np.sum(whitened * whitened, axis=-1)


def classify(
    log_densities: np.ndarray, weights: np.ndarray, alphas: np.ndarray
) -> np.ndarray:
    """Region index of each sample: argmax_k Σ_s'' w_s'' E^{s''}(ô) α^k_{s''}.

    Weighted densities are rescaled by their per-sample maximum, a positive factor that
    leaves the argmax unchanged. Ties resolve to the lowest k.
    """
    with np.errstate(divide="ignore"):
        weighted = log_densities + np.log(weights)[None, :]
    shifted = np.exp(weighted - weighted.max(axis=1, keepdims=True))
    scores = shifted @ alphas.T
    return np.argmax(scores, axis=1)


def region_counts(
    model: VarPomdpModel,
    belief_point,
    action: int,
    alphas_prev: AlphaVectorSet,
    num_samples: int,
    rng: RngLike,
    densities: Optional[ZeroMeanDensities] = None,
) -> np.ndarray:
    """Integer counts l^k of the L samples per next state s' falling in region k, shape (|S|, K).

    One standard-normal block is drawn and mapped through every Σ_{s'} factor, so states
    with equal covariances see identical samples.
    """
    if len(alphas_prev) == 0:
        raise PlannerError("Region estimation needs a non-empty alpha set")
    if num_samples < 1:
        raise PlannerError(f"Sample count must be >= 1, got {num_samples}")
    densities = densities or ZeroMeanDensities.from_model(model)
    b = np.asarray(getattr(belief_point, "vector", belief_point), dtype=float)
    weights = b @ model.transition_tensor[action]
    alphas = alphas_prev.matrix

    K = alphas.shape[0]
    counts = np.zeros((model.num_states, K), dtype=np.int64)
    if K == 1:
        counts[:, 0] = num_samples
        return counts

    standard = as_generator(rng).standard_normal((num_samples, model.obs_dim))
    for s_next in range(model.num_states):
        samples = standard @ densities.chols[s_next].T
        regions = classify(densities.logpdf(samples), weights, alphas)
        counts[s_next] = np.bincount(regions, minlength=K)
    return counts


def estimate_partition_probs(
    model: VarPomdpModel,
    belief_point,
    action: int,
    alphas_prev: AlphaVectorSet,
    num_samples: int,
    rng: RngLike,
) -> np.ndarray:
    """Monte Carlo Pr(z_k | s') = l^k / L, shape (|S|, K)."""
    counts = region_counts(model, belief_point, action, alphas_prev, num_samples, rng)
    return counts / float(num_samples)


def estimate_partition_table(
    model: VarPomdpModel,
    belief_set: BeliefSet,
    alphas_prev: AlphaVectorSet,
    num_samples: int,
    rng: RngStream,
    threads: int = 1,
) -> PartitionProbs:
    """Region counts for every (belief point, action), one substream per pair."""
    densities = ZeroMeanDensities.from_model(model)

    def for_point(i: int) -> np.ndarray:
        return np.stack(
            [
                region_counts(
                    model,
                    belief_set.points[i],
                    a,
                    alphas_prev,
                    num_samples,
                    rng.substream(i, a),
                    densities,
                )
                for a in range(model.num_actions)
            ]
        )

    table = np.stack(ordered_map(for_point, range(len(belief_set)), threads))
    bt.logging.trace(f"Estimated region counts with shape {table.shape}")
    return PartitionProbs(table=table, num_samples=num_samples)
