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

from varpomdp.schemas import AlphaVectorSet, Belief
from varpomdp.utils.exceptions import PlannerError


def _vector(belief) -> np.ndarray:
    if isinstance(belief, Belief):
        return belief.vector
    return np.asarray(belief, dtype=float).ravel()


def _best(alphas: AlphaVectorSet, belief):
    if len(alphas) == 0:
        raise PlannerError("Alpha vector set is empty")
    values = alphas.matrix @ _vector(belief)
    # np.argmax returns the first maximum, so ties go to the lowest index.
    index = int(np.argmax(values))
    return index, float(values[index])


def value_at(alphas: AlphaVectorSet, belief) -> float:
    """max_k b · α^k."""
    return _best(alphas, belief)[1]


def extract_action(alphas: AlphaVectorSet, belief) -> int:
    """Action recorded on the maximizing alpha vector."""
    index, _ = _best(alphas, belief)
    return int(alphas[index].action)


def values_at_points(alphas: AlphaVectorSet, points: np.ndarray) -> np.ndarray:
    return np.max(np.atleast_2d(points) @ alphas.matrix.T, axis=1)
