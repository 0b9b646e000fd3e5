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

from varpomdp.schemas import (
    AlphaVector,
    AlphaVectorSet,
    BeliefSet,
    PartitionProbs,
    VarPomdpModel,
)

DEDUP_DECIMALS = 12


def candidate_alphas(
    model: VarPomdpModel,
    belief_set: BeliefSet,
    alphas_prev: AlphaVectorSet,
    partition_probs: Optional[PartitionProbs],
    p0: np.ndarray,
) -> np.ndarray:
    """Candidate alpha per (belief point, action), shape (M, |A|, |S|).

    Without region probabilities this is the first backup, T_a · p0.
    """
    T = model.transition_tensor
    M = len(belief_set)
    if partition_probs is None:
        first = np.einsum("ast,t->as", T, np.asarray(p0, dtype=float))
        return np.broadcast_to(first, (M,) + first.shape).copy()
    g = partition_probs.region_values(alphas_prev.matrix)
    return np.einsum("ast,iat->ias", T, g)


def backup(
    model: VarPomdpModel,
    belief_set: BeliefSet,
    alphas_prev: AlphaVectorSet,
    partition_probs: Optional[PartitionProbs],
    p0,
) -> AlphaVectorSet:
    """One point-based backup: the best candidate per belief point, deduplicated."""
    candidates = candidate_alphas(model, belief_set, alphas_prev, partition_probs, p0)
    values = np.einsum("ias,is->ia", candidates, belief_set.points)
    best_actions = np.argmax(values, axis=1)

    vectors, seen = [], set()
    for i, a in enumerate(best_actions):
        alpha = np.clip(candidates[i, a], 0.0, 1.0)
        key = tuple(np.round(alpha, DEDUP_DECIMALS))
        if key in seen:
            continue
        seen.add(key)
        vectors.append(AlphaVector(alpha=alpha, action=int(a), source_belief=i))
    return AlphaVectorSet(step=alphas_prev.step + 1, vectors=vectors)
