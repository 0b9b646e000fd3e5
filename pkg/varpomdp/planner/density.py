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

import itertools

import numpy as np
from scipy.spatial.distance import cdist

from varpomdp.kernels import RngLike, as_generator
from varpomdp.schemas import BeliefSet

GRID_RESOLUTION = 100
MAX_GRID_STATES = 3
PROBE_BATCH = 4096


def simplex_grid(num_states: int, resolution: int = GRID_RESOLUTION) -> np.ndarray:
    """Every probability vector whose entries are multiples of 1/resolution."""
    points = [
        counts + (resolution - sum(counts),)
        for counts in itertools.product(range(resolution + 1), repeat=num_states - 1)
        if sum(counts) <= resolution
    ]
    return np.asarray(points, dtype=float) / resolution


def max_min_distance(probes: np.ndarray, points: np.ndarray) -> float:
    worst = 0.0
    for start in range(0, probes.shape[0], PROBE_BATCH):
        distances = cdist(probes[start : start + PROBE_BATCH], points, metric="cityblock")
        worst = max(worst, float(distances.min(axis=1).max()))
    return worst


def belief_set_density(belief_set: BeliefSet, num_probe_samples: int, rng: RngLike) -> float:
    """Estimates ε_B = max_{b'} min_{b ∈ B} ||b − b'||₁ over the simplex.

    Probes are uniform simplex draws; for |S| ≤ 3 the 0.01 grid is added, which makes the
    estimate exact up to grid resolution.
    """
    S = belief_set.num_states
    probes = [np.eye(S)]
    if num_probe_samples > 0:
        probes.append(as_generator(rng).dirichlet(np.ones(S), size=num_probe_samples))
    if S <= MAX_GRID_STATES:
        probes.append(simplex_grid(S))
    return max_min_distance(np.vstack(probes), belief_set.points)
