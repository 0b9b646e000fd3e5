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

from varpomdp.schemas.belief import Belief, BELIEF_TOLERANCE


@dataclass(frozen=True, eq=False)
class AlphaVector:
    alpha: np.ndarray
    action: int
    source_belief: int

    def asdict(self) -> dict:
        return {
            "alpha": [float(x) for x in self.alpha],
            "action": int(self.action),
            "source_belief": int(self.source_belief),
        }


@dataclass(frozen=True, eq=False)
class AlphaVectorSet:
    """Piecewise-linear value function after `step` backups."""

    step: int
    vectors: List[AlphaVector] = field(default_factory=list)

    @property
    def matrix(self) -> np.ndarray:
        """Alpha vectors as rows, shape (K, |S|)."""
        if not self.vectors:
            return np.zeros((0, 0))
        return np.stack([v.alpha for v in self.vectors])

    @property
    def actions(self) -> List[int]:
        return [v.action for v in self.vectors]

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i) -> AlphaVector:
        return self.vectors[i]

    def asdict(self) -> dict:
        return {"t": int(self.step), "vectors": [v.asdict() for v in self.vectors]}

    @classmethod
    def from_dict(cls, data: dict) -> "AlphaVectorSet":
        return cls(
            step=int(data["t"]),
            vectors=[
                AlphaVector(
                    alpha=np.asarray(v["alpha"], dtype=float),
                    action=int(v.get("action", 0)),
                    source_belief=int(v.get("source_belief", 0)),
                )
                for v in data["vectors"]
            ],
        )


@dataclass(frozen=True, eq=False)
class BeliefSet:
    """M belief points, each normalized, no exact duplicates."""

    points: np.ndarray

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.shape[0] == 0:
            raise ValueError("Belief set must hold at least one point")
        if np.any(points < 0) or np.any(np.abs(points.sum(axis=1) - 1.0) > BELIEF_TOLERANCE):
            raise ValueError("Every belief point must be a probability vector")
        if np.unique(points, axis=0).shape[0] != points.shape[0]:
            raise ValueError("Belief set contains duplicate points")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def num_states(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, i) -> Belief:
        return Belief.from_vector(self.points[i])

    def tolist(self) -> List[List[float]]:
        return self.points.tolist()


@dataclass(frozen=True, eq=False)
class PartitionProbs:
    """Pr(z_k | s') per belief point and action, shape (M, |A|, |S|, K).

    Monte Carlo tables keep the raw region counts and the sample count L, so that
    expectations are formed as counts·α / L. Quadrature tables carry probabilities and
    `num_samples` None.
    """

    table: np.ndarray
    num_samples: Optional[int] = None

    @property
    def probs(self) -> np.ndarray:
        if self.num_samples is None:
            return self.table
        return self.table / float(self.num_samples)

    @property
    def num_regions(self) -> int:
        return self.table.shape[-1]

    def row_sums(self) -> np.ndarray:
        return self.probs.sum(axis=-1)

    def region_values(self, alphas: np.ndarray) -> np.ndarray:
        """g[i, a, s'] = Σ_k Pr(z_k | s') α^k_{s'} for alpha rows `alphas` (K, |S|)."""
        weighted = np.einsum("iask,ks->ias", self.table, alphas)
        if self.num_samples is None:
            return weighted
        return weighted / float(self.num_samples)
