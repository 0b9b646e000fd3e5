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

import numpy as np
from scipy import linalg, stats

from varpomdp.kernels.rng import RngLike, as_generator
from varpomdp.kernels.gaussian import cholesky
from varpomdp.utils.exceptions import CholeskyError, DimensionMismatchError

DEFAULT_K0_SCALE = 0.1
DEFAULT_S0_SCALE = 0.5
DEFAULT_NU0_OFFSET = 2.0


@dataclass(frozen=True)
class MNIWPrior:
    """Matrix-normal inverse-Wishart prior over W = [A_1 ... A_r] (d × r·d) and Σ.

    Σ ~ IW(nu0, S0) and W | Σ ~ MN(M0, Σ, K0⁻¹), so K0 is the column precision.
    """

    M0: np.ndarray
    K0: np.ndarray
    S0: np.ndarray
    nu0: float

    @property
    def obs_dim(self) -> int:
        return self.S0.shape[0]

    @property
    def regressor_dim(self) -> int:
        return self.K0.shape[0]

    @classmethod
    def default(
        cls,
        obs_dim: int,
        var_order: int,
        k0_scale: float = DEFAULT_K0_SCALE,
        s0_scale: float = DEFAULT_S0_SCALE,
        nu0_offset: float = DEFAULT_NU0_OFFSET,
    ) -> "MNIWPrior":
        m = obs_dim * var_order
        return cls(
            M0=np.zeros((obs_dim, m)),
            K0=np.eye(m) * k0_scale,
            S0=np.eye(obs_dim) * s0_scale,
            nu0=float(obs_dim + nu0_offset),
        )

    def validate(self):
        d, m = self.obs_dim, self.regressor_dim
        if self.M0.shape != (d, m):
            raise DimensionMismatchError(f"M0 has shape {self.M0.shape}, expected {(d, m)}")
        if m:
            cholesky(self.K0)
        cholesky(self.S0)
        if not self.nu0 > d - 1:
            raise CholeskyError(f"nu0={self.nu0} must exceed d-1={d - 1}")
        return self


def _as_rows(values, width: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return np.zeros((0, width))
    return arr.reshape(-1, width)


def mniw_posterior(prior: MNIWPrior, regressors, responses) -> MNIWPrior:
    """Exact conjugate update of `prior` with aligned (regressor, response) pairs."""
    d, m = prior.obs_dim, prior.regressor_dim
    X = _as_rows(regressors, m) if m else np.zeros((len(responses), 0))
    Y = _as_rows(responses, d)
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatchError(
            f"{X.shape[0]} regressors but {Y.shape[0]} responses"
        )
    n = Y.shape[0]
    if n == 0:
        return prior

    Kn = prior.K0 + X.T @ X
    Syy = Y.T @ Y
    if m:
        Kn = 0.5 * (Kn + Kn.T)
        Syx = Y.T @ X
        chol = linalg.cho_factor(Kn, lower=True)
        MK0 = prior.M0 @ prior.K0
        Mn = linalg.cho_solve(chol, (MK0 + Syx).T).T
        Sn = prior.S0 + Syy + MK0 @ prior.M0.T - Mn @ Kn @ Mn.T
    else:
        Mn = prior.M0
        Sn = prior.S0 + Syy
    Sn = 0.5 * (Sn + Sn.T)
    return MNIWPrior(M0=Mn, K0=Kn, S0=Sn, nu0=prior.nu0 + n)


def _column_covariance(K: np.ndarray) -> np.ndarray:
    cov = linalg.cho_solve(linalg.cho_factor(K, lower=True), np.eye(K.shape[0]))
    return 0.5 * (cov + cov.T)


def mniw_sample(params: MNIWPrior, rng: RngLike):
    """Draws (W, Σ): Σ from the inverse-Wishart, then W from the matrix normal."""
    gen = as_generator(rng)
    d, m = params.obs_dim, params.regressor_dim
    sigma = stats.invwishart.rvs(df=params.nu0, scale=params.S0, random_state=gen)
    sigma = np.atleast_2d(sigma).reshape(d, d)
    sigma = 0.5 * (sigma + sigma.T)
    if m == 0:
        return np.zeros((d, 0)), sigma
    W = stats.matrix_normal.rvs(
        mean=params.M0,
        rowcov=sigma,
        colcov=_column_covariance(params.K0),
        random_state=gen,
    )
    return np.asarray(W, dtype=float).reshape(d, m), sigma


def mniw_logpdf(W, sigma, prior: MNIWPrior) -> float:
    d, m = prior.obs_dim, prior.regressor_dim
    sigma = np.asarray(sigma, dtype=float)
    x = sigma[0, 0] if d == 1 else sigma
    scale = prior.S0[0, 0] if d == 1 else prior.S0
    out = float(stats.invwishart.logpdf(x, df=prior.nu0, scale=scale))
    if m:
        out += float(
            stats.matrix_normal.logpdf(
                np.asarray(W, dtype=float).reshape(d, m),
                mean=prior.M0,
                rowcov=sigma,
                colcov=_column_covariance(prior.K0),
            )
        )
    return out


def dirichlet_sample(weights, rng: RngLike) -> np.ndarray:
    """Draws a probability vector from Dir(weights)."""
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.size == 0 or np.any(~(weights > 0)):
        raise ValueError(f"Dirichlet weights must all be positive, got {weights}")
    if weights.size == 1:
        return np.ones(1)
    draw = as_generator(rng).dirichlet(weights)
    return draw / draw.sum()
