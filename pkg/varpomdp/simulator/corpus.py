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

from typing import List, Tuple

import numpy as np
import bittensor as bt
from scipy import stats

from varpomdp.kernels import RngStream, as_generator
from varpomdp.schemas import Belief, CorpusSpec, Emission, Trajectory, VarPomdpModel
from varpomdp.simulator.policies import FixedSequencePolicy, UniformRandomPolicy
from varpomdp.simulator.simulate import simulate
from varpomdp.utils.misc import ordered_map

SPECTRAL_MARGIN = 1e-9


def companion_matrix(lags: np.ndarray) -> np.ndarray:
    """Companion form of x_t = Σ_j A_j x_{t-j}; `lags` has shape (r, d, d)."""
    r, d, _ = lags.shape
    top = np.concatenate(list(lags), axis=1)
    if r == 1:
        return top
    shift = np.eye(d * (r - 1), d * r)
    return np.vstack([top, shift])


def spectral_radius(lags: np.ndarray) -> float:
    if lags.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(companion_matrix(lags)))))


def stabilize(lags: np.ndarray, target: float) -> np.ndarray:
    """Rescales A_j by c^j, which scales every companion eigenvalue by c."""
    rho = spectral_radius(lags)
    if rho <= target:
        return lags
    c = target / rho * (1.0 - SPECTRAL_MARGIN)
    return np.stack([lags[j] * c ** (j + 1) for j in range(lags.shape[0])])


def _rotation(d: int, angle: float) -> np.ndarray:
    out = np.eye(d)
    for i in range(0, d - 1, 2):
        c, s = np.cos(angle), np.sin(angle)
        out[i : i + 2, i : i + 2] = [[c, -s], [s, c]]
    if d % 2:
        out[d - 1, d - 1] = np.cos(angle)
    return out


def _mode_lags(spec: CorpusSpec, k: int, basis: np.ndarray) -> np.ndarray:
    d, r = spec.obs_dim, spec.var_order
    angle = np.pi * (k + 1) / (spec.num_modes + 1)
    first = 0.9 * basis @ _rotation(d, angle) @ basis.T
    lags = np.stack([first * (0.5 ** j) for j in range(r)]) if r else np.zeros((0, d, d))
    return stabilize(lags, spec.spectral_radius)


def _transitions(spec: CorpusSpec, gen: np.random.Generator) -> np.ndarray:
    K, A = spec.num_modes, spec.num_actions
    T = np.zeros((A, K, K))
    for a in range(A):
        for s in range(K):
            if K == 1:
                T[a, s, s] = 1.0
                continue
            rest = gen.dirichlet(np.ones(K - 1)) * (1.0 - spec.stickiness)
            T[a, s] = np.insert(rest, s, spec.stickiness)
            T[a, s] /= T[a, s].sum()
    return T


def make_synthetic_corpus(spec: CorpusSpec, rng: RngStream) -> Tuple[VarPomdpModel, List[Trajectory]]:
    """Draws a stable random VAR-POMDP and `num_series` trajectories from it.

    Modes share one random orthogonal basis and an isotropic noise level; they differ
    only in the rotation angle of their first lag matrix. Every mode therefore has the
    same stationary covariance, and telling them apart needs the lagged dynamics.
    """
    gen = as_generator(rng.substream(0))
    d = spec.obs_dim
    basis = stats.ortho_group.rvs(dim=d, random_state=gen) if d > 1 else np.eye(1)
    basis = np.atleast_2d(basis)

    emissions = [
        Emission.from_arrays(_mode_lags(spec, k, basis), np.eye(d) * spec.noise_scale**2)
        for k in range(spec.num_modes)
    ]
    model = VarPomdpModel(
        num_states=spec.num_modes,
        num_actions=spec.num_actions,
        obs_dim=d,
        var_order=spec.var_order,
        transitions=_transitions(spec, gen).tolist(),
        emissions=emissions,
        labels=[[f"mode{k}"] for k in range(spec.num_modes)],
    )

    def draw_series(i: int) -> Trajectory:
        policy = UniformRandomPolicy() if spec.num_actions > 1 else FixedSequencePolicy([0])
        return simulate(
            model,
            policy,
            Belief.uniform(spec.num_modes),
            steps=spec.length,
            rng=rng.substream(1, i),
        )

    series = ordered_map(draw_series, range(spec.num_series))
    bt.logging.debug(
        f"Synthetic corpus: {spec.num_series} series x {spec.length} steps, {spec.num_modes} modes"
    )
    return model, series
