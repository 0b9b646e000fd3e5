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

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from strenum import StrEnum

from varpomdp.utils.exceptions import LearnerError


class Hypers(BaseModel):
    """Beta-process mass c, Dirichlet concentration γ and sticky bias κ."""

    model_config = ConfigDict(frozen=True)

    bp_mass: float = 1.0
    dir_conc: float = 1.0
    sticky: float = 10.0

    @model_validator(mode="after")
    def check_ranges(self):
        if self.bp_mass <= 0 or self.dir_conc <= 0 or self.sticky < 0:
            raise ValueError("bp_mass and dir_conc must be positive, sticky non-negative")
        return self


class LearnerConfig(BaseModel):
    var_order: int = 1
    max_features: int = 20
    sweeps: int = 500
    burn_in: int = 100
    thin: int = 1
    chains: int = 1
    hypers: Hypers = Hypers()
    k0_scale: float = 0.1
    s0_scale: float = 0.5
    nu0_offset: float = 2.0
    delta: float = 0.05
    seed: Optional[int] = None
    threads: int = 1
    debug: bool = False

    @model_validator(mode="after")
    def check_ranges(self):
        if self.var_order < 0:
            raise ValueError("var_order must be >= 0")
        if self.max_features < 1:
            raise ValueError("max_features must be >= 1")
        if self.sweeps <= self.burn_in:
            raise ValueError(f"sweeps ({self.sweeps}) must exceed burn_in ({self.burn_in})")
        if self.thin < 1 or self.chains < 1 or self.threads < 1:
            raise ValueError("thin, chains and threads must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        return self


class BeliefStrategy(StrEnum):
    GIVEN = "given"
    CORNERS_PLUS_RANDOM = "corners-plus-random"
    SIMULATION_EXPANSION = "simulation-expansion"


class PlannerConfig(BaseModel):
    horizon: Optional[int] = None
    mc_samples: int = 1000
    belief_strategy: BeliefStrategy = BeliefStrategy.GIVEN
    num_points: Optional[int] = None
    seed: Optional[int] = None
    threads: int = 1
    quadrature: bool = False

    @model_validator(mode="after")
    def check_ranges(self):
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")
        if self.horizon is not None and self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        return self


class CorpusSpec(BaseModel):
    """Shape of a synthetic corpus drawn by `make_synthetic_corpus`."""

    num_modes: int = 3
    obs_dim: int = 2
    var_order: int = 1
    length: int = 2000
    num_series: int = 2
    num_actions: int = 1
    noise_scale: float = 0.1
    stickiness: float = 0.98
    spectral_radius: float = 0.95

    @model_validator(mode="after")
    def check_ranges(self):
        if self.num_modes < 1 or self.obs_dim < 1 or self.num_series < 1 or self.num_actions < 1:
            raise ValueError("num_modes, obs_dim, num_series and num_actions must be >= 1")
        if self.length < self.var_order + 2:
            raise ValueError("length must be at least var_order + 2")
        if not 0.0 <= self.stickiness <= 1.0:
            raise ValueError("stickiness must lie in [0, 1]")
        return self


@dataclass(frozen=True, eq=False)
class Theta:
    """VAR parameters of one feature: W = [A_1 ... A_r] (d × r·d) and Σ."""

    weights: np.ndarray
    sigma: np.ndarray

    @property
    def obs_dim(self) -> int:
        return self.sigma.shape[0]

    @property
    def lags(self) -> np.ndarray:
        d = self.obs_dim
        r = self.weights.shape[1] // d if d else 0
        return np.stack([self.weights[:, j * d : (j + 1) * d] for j in range(r)]) if r else np.zeros((0, d, d))


@dataclass(eq=False)
class LearnerState:
    """One MCMC sample of the weak-limit BP-AR-HMM.

    mode_seqs[i][j] is the mode at time r + j of series i; the first r steps only seed
    the regressors. trans_weights[i] is K × K and row j sums to one over the features
    that series i uses whenever j is one of them (other rows are zero).
    """

    features: np.ndarray
    mode_seqs: List[np.ndarray]
    trans_weights: List[np.ndarray]
    thetas: List[Theta]
    hypers: Hypers
    var_order: int
    feature_weights: np.ndarray = None
    trans_gammas: List[np.ndarray] = None
    log_prob: float = float("-inf")
    sweep: int = 0
    chain: int = 0

    @property
    def num_series(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    def used_features(self) -> np.ndarray:
        """Sorted features that at least one series assigns a time step to."""
        if not self.mode_seqs:
            return np.zeros(0, dtype=int)
        return np.unique(np.concatenate(self.mode_seqs)).astype(int)

    @property
    def num_active(self) -> int:
        return len(self.used_features())

    def copy(self, **changes) -> "LearnerState":
        return replace(self, **changes)

    def check_invariants(self):
        """Raises LearnerError when the sample breaks a structural invariant."""
        for i, z in enumerate(self.mode_seqs):
            allowed = self.features[i].astype(bool)
            if z.size and not np.all(allowed[z]):
                raise LearnerError(f"Series {i} uses a feature switched off in F")
            pi = self.trans_weights[i]
            for j in np.flatnonzero(allowed):
                row = pi[j]
                if abs(row.sum() - 1.0) > 1e-9 or np.any(row[~allowed] != 0):
                    raise LearnerError(f"Transition weights of series {i}, mode {j} are not a distribution over its features")
        for k, theta in enumerate(self.thetas):
            try:
                np.linalg.cholesky(theta.sigma)
            except np.linalg.LinAlgError:
                raise LearnerError(f"Noise covariance of feature {k} is not SPD")
        return self

    def full_modes(self, i: int) -> np.ndarray:
        """Mode sequence of series i over every step; warm-up steps take the first mode."""
        z = self.mode_seqs[i]
        if self.var_order == 0 or z.size == 0:
            return z.copy()
        return np.concatenate([np.full(self.var_order, z[0]), z])


@dataclass(eq=False)
class TransitionEstimate:
    """Maximum-likelihood transitions with Chernoff half-widths.

    epsilon[a, s] is NaN where the (a, s) row had no observations; such rows default to
    a self-loop and are listed in `flagged`.
    """

    counts: np.ndarray
    probs: np.ndarray
    epsilon: np.ndarray
    delta: float
    flagged: List[Tuple[int, int]] = field(default_factory=list)

    def half_width(self, a: int, s: int) -> Optional[float]:
        value = self.epsilon[a, s]
        return None if np.isnan(value) else float(value)

    def interval(self, a: int, s: int, s2: int) -> Tuple[float, float]:
        """[p − ε, p + ε] clipped to [0, 1]; the whole unit interval for unobserved rows."""
        eps = self.half_width(a, s)
        if eps is None:
            return 0.0, 1.0
        p = float(self.probs[a, s, s2])
        return max(0.0, p - eps), min(1.0, p + eps)

    def asdict(self) -> dict:
        return {
            "delta": self.delta,
            "counts": self.counts.astype(int).tolist(),
            "probs": self.probs.tolist(),
            "epsilon": [[self.half_width(a, s) for s in range(self.counts.shape[1])] for a in range(self.counts.shape[0])],
            "flagged": [list(map(int, f)) for f in self.flagged],
        }
