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

import numpy as np

from varpomdp.schemas import ObsHistory
from varpomdp.utils.exceptions import DimensionMismatchError


def empty_history(var_order: int, obs_dim: int) -> ObsHistory:
    return ObsHistory(order=var_order, dim=obs_dim)


def zero_history(var_order: int, obs_dim: int) -> ObsHistory:
    """A full window of zero vectors, the simulator's starting history."""
    return ObsHistory(order=var_order, dim=obs_dim, window=np.zeros((var_order, obs_dim)))


def push_history(history: ObsHistory, obs) -> ObsHistory:
    """Appends `obs` as the newest observation and drops the oldest past r."""
    obs = np.asarray(obs, dtype=float).ravel()
    if obs.shape[0] != history.dim:
        raise DimensionMismatchError(
            f"Observation has dimension {obs.shape[0]}, history expects {history.dim}"
        )
    if history.order == 0:
        return history
    window = np.vstack([history.window, obs[None, :]])
    return ObsHistory(order=history.order, dim=history.dim, window=window)
