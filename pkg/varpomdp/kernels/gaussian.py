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
from scipy import linalg

from varpomdp.kernels.rng import RngLike, as_generator
from varpomdp.utils.exceptions import CholeskyError

LOG_2PI = np.log(2.0 * np.pi)


def cholesky(cov) -> np.ndarray:
    """Lower Cholesky factor of `cov`, raising CholeskyError when `cov` is not SPD."""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.shape[0] != cov.shape[1]:
        raise CholeskyError(f"Covariance must be square, got shape {cov.shape}")
    if not np.all(np.isfinite(cov)) or not np.allclose(cov, cov.T, atol=1e-10, rtol=1e-8):
        raise CholeskyError("Covariance must be finite and symmetric")
    try:
        return linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError as e:
        raise CholeskyError(f"Cholesky factorization failed: {e}") from e


def logpdf_from_residuals(residuals, chol) -> np.ndarray:
    """log N(r; 0, L Lᵀ) for each row r of `residuals`, given the lower factor L."""
    residuals = np.atleast_2d(residuals)
    d = chol.shape[0]
    whitened = linalg.solve_triangular(chol, residuals.T, lower=True)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    maha = np.sum(whitened * whitened, axis=0)
    return -0.5 * (d * LOG_2PI + log_det + maha)


def mvn_logpdf(x, mean, cov) -> np.ndarray:
    """Multivariate normal log-density. `x` may hold one vector or one vector per row."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    residuals = np.atleast_2d(x) - np.asarray(mean, dtype=float)
    out = logpdf_from_residuals(residuals, cholesky(cov))
    return out[0] if single else out


def mvn_sample(mean, cov, rng: RngLike, size: int = None) -> np.ndarray:
    """Draws from N(mean, cov) through the Cholesky factor of `cov`."""
    gen = as_generator(rng)
    mean = np.asarray(mean, dtype=float)
    chol = cholesky(cov)
    d = mean.shape[0]
    if size is None:
        return mean + chol @ gen.standard_normal(d)
    return mean + gen.standard_normal((size, d)) @ chol.T
