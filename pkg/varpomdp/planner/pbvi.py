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

from typing import List

import numpy as np
import bittensor as bt

from varpomdp.kernels import as_stream
from varpomdp.planner.backup import backup
from varpomdp.planner.partition import estimate_partition_table
from varpomdp.planner.values import values_at_points
from varpomdp.schemas import AlphaVector, AlphaVectorSet, BeliefSet, VarPomdpModel
from varpomdp.utils.exceptions import PlannerError
from varpomdp.utils.logging import log_event

DEFAULT_MC_SAMPLES = 1000


def initial_alphas(p0) -> AlphaVectorSet:
    """α^{0,1} = p0. The vector carries no action."""
    p0 = np.asarray(p0, dtype=float)
    return AlphaVectorSet(step=0, vectors=[AlphaVector(alpha=p0, action=-1, source_belief=-1)])


def _check_inputs(model: VarPomdpModel, p0: np.ndarray, horizon: int, belief_set: BeliefSet):
    if horizon < 0:
        raise PlannerError(f"Horizon must be >= 0, got {horizon}")
    if p0.shape != (model.num_states,):
        raise PlannerError(f"p0 has shape {p0.shape}, model has {model.num_states} states")
    if belief_set.num_states != model.num_states:
        raise PlannerError(
            f"Belief points have {belief_set.num_states} entries, model has {model.num_states} states"
        )


def pbvi(
    model: VarPomdpModel,
    p0,
    horizon: int,
    belief_set: BeliefSet,
    num_samples: int = DEFAULT_MC_SAMPLES,
    rng=None,
    threads: int = 1,
    events_logger=None,
) -> List[AlphaVectorSet]:
    """Finite-horizon point-based value iteration with Monte Carlo observation regions.

    Returns the alpha sets for t = 0..horizon. Step t draws its region samples from
    substream (t, point, action) of `rng`, so the result does not depend on `threads`.
    """
    p0 = np.asarray(p0, dtype=float)
    _check_inputs(model, p0, horizon, belief_set)
    if horizon >= 2 and rng is None:
        raise PlannerError(f"Horizon {horizon} needs Monte Carlo regions and therefore an rng or seed")
    stream = as_stream(rng) if horizon >= 2 else None

    alpha_sets = [initial_alphas(p0)]
    for t in range(1, horizon + 1):
        previous = alpha_sets[-1]
        probs = None
        if t >= 2:
            probs = estimate_partition_table(
                model, belief_set, previous, num_samples, stream.substream(t), threads
            )
        current = backup(model, belief_set, previous, probs, p0)
        alpha_sets.append(current)

        values = values_at_points(current, belief_set.points)
        bt.logging.debug(
            f"Backup {t}/{horizon}: {len(current)} alpha vectors, max point value {values.max():.4f}"
        )
        log_event(
            events_logger,
            {
                "event": "backup",
                "t": t,
                "num_vectors": len(current),
                "point_values": values.tolist(),
                "actions": current.actions,
            },
        )
    return alpha_sets
