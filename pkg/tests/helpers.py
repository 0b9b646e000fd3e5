import json
from typing import Optional, Sequence, Union

import numpy as np

from varpomdp.schemas import Emission, VarPomdpModel


class CLOSE_IN_VALUE:
    value: Union[float, int]
    tolerance: Union[float, int]

    def __init__(
        self,
        value: Union[float, int],
        tolerance: Union[float, int] = 0.0,
    ) -> None:
        self.value = value
        self.tolerance = tolerance

    def __eq__(self, __o: Union[float, int]) -> bool:
        # True if __o \in [value - tolerance, value + tolerance]
        # or if value \in [__o - tolerance, __o + tolerance]
        return (
            (self.value - self.tolerance) <= __o
            and __o <= (self.value + self.tolerance)
        ) or (
            (__o - self.tolerance) <= self.value
            and self.value <= (__o + self.tolerance)
        )

    def __repr__(self):
        return f"CLOSE_IN_VALUE({self.value} ± {self.tolerance})"


def mc_tolerance(num_samples: int, steps: int = 1) -> float:
    """Three worst-case binomial standard errors per Monte Carlo backup."""
    return 3.0 * np.sqrt(0.25 / num_samples) * steps


def scalar_model(
    variances: Sequence[float],
    transitions=None,
    lags: Optional[Sequence[float]] = None,
    labels=None,
) -> VarPomdpModel:
    """d = 1 model with one action unless `transitions` says otherwise.

    `lags` gives one scalar A_1 per state and turns on r = 1.
    """
    S = len(variances)
    if transitions is None:
        transitions = [np.full((S, S), 1.0 / S).tolist()]
    r = 0 if lags is None else 1
    emissions = [
        Emission(
            lag_matrices=[] if lags is None else [[[float(lags[s])]]],
            noise_cov=[[float(v)]],
        )
        for s, v in enumerate(variances)
    ]
    return VarPomdpModel(
        num_states=S,
        num_actions=len(transitions),
        obs_dim=1,
        var_order=r,
        transitions=np.asarray(transitions, dtype=float).tolist(),
        emissions=emissions,
        labels=labels or [[] for _ in range(S)],
    )


def random_spd(gen: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    m = gen.normal(size=(dim, dim))
    return scale * (m @ m.T / dim + 0.5 * np.eye(dim))


def random_model(
    gen: np.random.Generator,
    num_states: int,
    num_actions: int,
    obs_dim: int = 1,
    var_order: int = 0,
    goal: bool = True,
) -> VarPomdpModel:
    """Random valid model; with `goal` the last state is labelled "goal"."""
    T = gen.dirichlet(np.ones(num_states), size=(num_actions, num_states))
    T = T / T.sum(axis=-1, keepdims=True)
    emissions = []
    for s in range(num_states):
        lags = 0.4 * gen.uniform(-1, 1, size=(var_order, obs_dim, obs_dim)) / max(obs_dim, 1)
        cov = random_spd(gen, obs_dim, scale=float(np.exp(gen.uniform(-1.0, 1.5))))
        emissions.append(Emission.from_arrays(lags, cov))
    labels = [[] for _ in range(num_states)]
    if goal:
        labels[-1] = ["goal"]
    return VarPomdpModel(
        num_states=num_states,
        num_actions=num_actions,
        obs_dim=obs_dim,
        var_order=var_order,
        transitions=T.tolist(),
        emissions=emissions,
        labels=labels,
    )


def write_json(path, data) -> str:
    with open(path, "w") as f:
        json.dump(data, f)
    return str(path)


def summary_from(out: str) -> dict:
    """The CLI summary is the last JSON object printed on stdout."""
    lines = [line for line in out.splitlines() if line.startswith("{")]
    assert lines, f"no JSON summary in output: {out!r}"
    return json.loads(lines[-1])
