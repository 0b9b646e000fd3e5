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

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

BELIEF_TOLERANCE = 1e-9


class Belief(BaseModel):
    """Posterior over hidden states."""

    model_config = ConfigDict(frozen=True)

    probs: List[float]

    @model_validator(mode="after")
    def check_normalized(self):
        if not self.probs:
            raise ValueError("Belief must have at least one entry")
        probs = np.asarray(self.probs, dtype=float)
        if np.any(~np.isfinite(probs)) or np.any(probs < 0):
            raise ValueError(f"Belief entries must be finite and nonnegative, got {self.probs}")
        if abs(probs.sum() - 1.0) > BELIEF_TOLERANCE:
            raise ValueError(f"Belief must sum to 1, got {probs.sum()}")
        return self

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    @property
    def size(self) -> int:
        return len(self.probs)

    @classmethod
    def from_vector(cls, values, normalize: bool = False) -> "Belief":
        values = np.asarray(values, dtype=float).ravel()
        if normalize:
            values = np.clip(values, 0.0, None)
            values = values / values.sum()
        return cls(probs=values.tolist())

    @classmethod
    def uniform(cls, num_states: int) -> "Belief":
        return cls(probs=[1.0 / num_states] * num_states)

    @classmethod
    def unit(cls, num_states: int, state: int) -> "Belief":
        probs = [0.0] * num_states
        probs[state] = 1.0
        return cls(probs=probs)

    @classmethod
    def parse(cls, text: str) -> "Belief":
        """Reads a comma separated vector such as "1,0,0"."""
        parts = [p for p in text.replace(" ", "").split(",") if p]
        return cls(probs=[float(p) for p in parts])


@dataclass(frozen=True, eq=False)
class ObsHistory:
    """The r most recent observations, newest last.

    `window` has shape (k, d) with k ≤ order. The filter may only run once the window is
    full; until then the history is warming up.
    """

    order: int
    dim: int
    window: np.ndarray = field(default=None)

    def __post_init__(self):
        window = self.window
        if window is None:
            window = np.zeros((0, self.dim))
        window = np.asarray(window, dtype=float).reshape(-1, self.dim)
        if window.shape[0] > self.order:
            window = window[window.shape[0] - self.order :]
        window.setflags(write=False)
        object.__setattr__(self, "window", window)

    @property
    def filled(self) -> int:
        return self.window.shape[0]

    @property
    def ready(self) -> bool:
        return self.filled >= self.order

    def lagged(self) -> np.ndarray:
        """Stacked regressor [o_{t-1}; ...; o_{t-r}] of length r·d."""
        if self.order == 0:
            return np.zeros(0)
        return self.window[::-1].reshape(-1)

    def __len__(self):
        return self.filled

    def __repr__(self):
        return f"ObsHistory(order={self.order}, dim={self.dim}, filled={self.filled})"


class Trajectory(BaseModel):
    """One recorded series. actions[t] is taken after observations[t]."""

    observations: List[List[float]]
    actions: Optional[List[int]] = None
    true_states: Optional[List[int]] = None

    @model_validator(mode="after")
    def check_lengths(self):
        n = len(self.observations)
        if n and len({len(o) for o in self.observations}) != 1:
            raise ValueError("All observations in a trajectory must share one dimension")
        if self.actions is not None and len(self.actions) not in (n, max(n - 1, 0)):
            raise ValueError(
                f"Trajectory has {n} observations but {len(self.actions)} actions"
            )
        if self.true_states is not None and len(self.true_states) != n:
            raise ValueError(
                f"Trajectory has {n} observations but {len(self.true_states)} states"
            )
        return self

    @property
    def length(self) -> int:
        return len(self.observations)

    @property
    def obs_dim(self) -> int:
        return len(self.observations[0]) if self.observations else 0

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.observations, dtype=float).reshape(self.length, -1)

    def has_actions(self) -> bool:
        return self.actions is not None and len(self.actions) >= max(self.length - 1, 0)
