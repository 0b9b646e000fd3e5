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

from typing import Tuple

import numpy as np

from varpomdp.kernels import cholesky, logpdf_from_residuals
from varpomdp.schemas import ObsHistory, VarPomdpModel
from varpomdp.utils.exceptions import DimensionMismatchError, HistoryWarmupError


def _check_obs(model: VarPomdpModel, obs) -> np.ndarray:
    obs = np.asarray(obs, dtype=float).ravel()
    if obs.shape[0] != model.obs_dim:
        raise DimensionMismatchError(
            f"Observation has dimension {obs.shape[0]}, model expects {model.obs_dim}"
        )
    return obs


def _check_history(model: VarPomdpModel, history: ObsHistory):
    if history.dim != model.obs_dim:
        raise DimensionMismatchError(
            f"History has dimension {history.dim}, model expects {model.obs_dim}"
        )
    if history.filled < model.var_order:
        raise HistoryWarmupError(
            f"History holds {history.filled} of {model.var_order} observations"
        )


def emission_mean(model: VarPomdpModel, state: int, history: ObsHistory) -> np.ndarray:
    """Σ_j A_{j,s} o_{t-j}; zero when r = 0."""
    _check_history(model, history)
    emission = model.emissions[state]
    if model.var_order == 0:
        return np.zeros(model.obs_dim)
    return emission.stacked_lags @ history.lagged()


def emission_logpdf(model: VarPomdpModel, state: int, obs, history: ObsHistory) -> float:
    """log N(obs; Σ_j A_{j,s} o_{t-j}, Σ_s)."""
    obs = _check_obs(model, obs)
    mean = emission_mean(model, state, history)
    chol = cholesky(model.emissions[state].covariance)
    return float(logpdf_from_residuals(obs - mean, chol)[0])


def emission_logpdfs(model: VarPomdpModel, obs, history: ObsHistory) -> np.ndarray:
    """Emission log-densities of `obs` under every state."""
    obs = _check_obs(model, obs)
    _check_history(model, history)
    regressor = history.lagged()
    out = np.empty(model.num_states)
    for s, emission in enumerate(model.emissions):
        mean = emission.stacked_lags @ regressor if model.var_order else 0.0
        out[s] = logpdf_from_residuals(obs - mean, cholesky(emission.covariance))[0]
    return out


def lagged_design(observations, var_order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Regressors X (row t = [o_{t-1}; ...; o_{t-r}]) and responses Y = o_t for t = r..T-1."""
    obs = np.atleast_2d(np.asarray(observations, dtype=float))
    T, d = obs.shape
    n = max(T - var_order, 0)
    Y = obs[var_order:]
    if var_order == 0:
        return np.zeros((n, 0)), Y
    X = np.concatenate(
        [obs[var_order - j : T - j] for j in range(1, var_order + 1)], axis=1
    )
    return X, Y


def series_loglik(lag_matrices, noise_cov, observations) -> np.ndarray:
    """Per-step AR log-likelihoods of a whole series, one entry per t = r..T-1."""
    noise_cov = np.atleast_2d(np.asarray(noise_cov, dtype=float))
    d = noise_cov.shape[0]
    lags = np.asarray(lag_matrices, dtype=float).reshape(-1, d, d)
    X, Y = lagged_design(np.asarray(observations, dtype=float).reshape(-1, d), lags.shape[0])
    residuals = Y - X @ np.concatenate(list(lags), axis=1).T if lags.shape[0] else Y
    return logpdf_from_residuals(residuals, cholesky(noise_cov))
