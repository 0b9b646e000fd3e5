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

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict


class Emission(BaseModel):
    """Autoregressive Gaussian emission of one hidden state.

    o_t = Σ_j lag_matrices[j-1] · o_{t-j} + e,  e ~ N(0, noise_cov).
    There is no intercept; augment observations with a constant-1 coordinate
    to model an offset.
    """

    model_config = ConfigDict(frozen=True)

    lag_matrices: List[List[List[float]]] = []
    noise_cov: List[List[float]]

    @property
    def lags(self) -> np.ndarray:
        """Lag matrices as an array of shape (r, d, d)."""
        d = len(self.noise_cov)
        return np.asarray(self.lag_matrices, dtype=float).reshape(-1, d, d)

    @property
    def stacked_lags(self) -> np.ndarray:
        """[A_1 ... A_r] as one d × (r·d) matrix, matching stacked regressors."""
        lags = self.lags
        if lags.shape[0] == 0:
            return np.zeros((lags.shape[1], 0))
        return np.concatenate(list(lags), axis=1)

    @property
    def covariance(self) -> np.ndarray:
        return np.asarray(self.noise_cov, dtype=float)

    @classmethod
    def from_arrays(cls, lags, noise_cov) -> "Emission":
        return cls(
            lag_matrices=np.asarray(lags, dtype=float).tolist(),
            noise_cov=np.asarray(noise_cov, dtype=float).tolist(),
        )


class VarPomdpModel(BaseModel):
    """The tuple (S, A, O, T, E, L). Immutable once constructed.

    transitions[a][s][s2] is the probability of moving from s to s2 under a.
    The reward function is not represented; checking works on reach probabilities.
    """

    model_config = ConfigDict(frozen=True)

    num_states: int
    num_actions: int
    obs_dim: int
    var_order: int = 0
    transitions: List[List[List[float]]]
    emissions: List[Emission]
    labels: List[List[str]] = []
    state_names: Optional[List[str]] = None
    action_names: Optional[List[str]] = None

    @property
    def transition_tensor(self) -> np.ndarray:
        return np.asarray(self.transitions, dtype=float)

    @property
    def lag_tensor(self) -> np.ndarray:
        """Lag matrices of every state, shape (|S|, r, d, d)."""
        return np.stack([e.lags for e in self.emissions])

    @property
    def covariances(self) -> np.ndarray:
        return np.stack([e.covariance for e in self.emissions])

    @property
    def label_sets(self) -> List[frozenset]:
        labels = list(self.labels) + [[]] * (self.num_states - len(self.labels))
        return [frozenset(ls) for ls in labels]

    @property
    def alphabet(self) -> frozenset:
        return frozenset().union(*self.label_sets) if self.label_sets else frozenset()

    def state_name(self, s: int) -> str:
        if self.state_names and s < len(self.state_names):
            return self.state_names[s]
        return f"s{s}"

    def action_name(self, a: int) -> str:
        if self.action_names and a < len(self.action_names):
            return self.action_names[a]
        return f"a{a + 1}"

    def with_transitions(self, transitions) -> "VarPomdpModel":
        return self.model_copy(
            update={"transitions": np.asarray(transitions, dtype=float).tolist()}
        )


class ValidationIssue(BaseModel):
    kind: str
    indices: List[int] = []
    message: str


class ValidationReport(BaseModel):
    issues: List[ValidationIssue] = []

    @property
    def passed(self) -> bool:
        return not self.issues

    def add(self, kind: str, indices, message: str):
        self.issues.append(
            ValidationIssue(kind=kind, indices=[int(i) for i in indices], message=message)
        )

    def summary(self) -> str:
        if self.passed:
            return "pass"
        return "; ".join(issue.message for issue in self.issues)
