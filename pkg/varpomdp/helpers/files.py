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

import os
import glob
import json
from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from varpomdp.schemas import AlphaVectorSet, LearnerState, Trajectory, VarPomdpModel
from varpomdp.utils.exceptions import DimensionMismatchError, PlannerError

FLOAT_FORMAT = "%.17g"
SERIES_PATTERN = "series_{:03d}.csv"


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def load_json(path: str):
    with open(path, "r") as f:
        return json.load(f)


def save_json(data, path: str):
    _ensure_parent(path)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def load_model(path: str) -> VarPomdpModel:
    with open(path, "r") as f:
        return VarPomdpModel.model_validate_json(f.read())


def save_model(model: VarPomdpModel, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w") as f:
        f.write(model.model_dump_json(indent=2))
        f.write("\n")
    return path


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    """Header `t,o_1..o_d[,action][,state]`; a missing final action is left blank."""
    obs = traj.array
    frame = pd.DataFrame(obs, columns=[f"o_{j + 1}" for j in range(obs.shape[1])])
    frame.insert(0, "t", np.arange(traj.length))
    if traj.actions is not None:
        actions = list(traj.actions) + [None] * (traj.length - len(traj.actions))
        frame["action"] = pd.array(actions, dtype="Int64")
    if traj.true_states is not None:
        frame["state"] = pd.array(traj.true_states, dtype="Int64")
    return frame


def write_trajectory_csv(traj: Trajectory, path: str) -> str:
    _ensure_parent(path)
    trajectory_frame(traj).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_trajectory_csv(path: str) -> Trajectory:
    frame = pd.read_csv(path, float_precision="round_trip")
    obs_columns = sorted(
        (c for c in frame.columns if c.startswith("o_")), key=lambda c: int(c[2:])
    )
    if not obs_columns:
        raise DimensionMismatchError(f"{path} has no observation columns o_1..o_d")
    if "t" in frame.columns:
        frame = frame.sort_values("t")
    actions = None
    if "action" in frame.columns:
        column = frame["action"]
        # a trailing blank marks the step after the last action
        if column.iloc[:-1].isna().any():
            raise ValueError(f"{path} has missing actions before the last step")
        actions = column.dropna().astype(int).tolist()
    states = frame["state"].astype(int).tolist() if "state" in frame.columns else None
    return Trajectory(
        observations=frame[obs_columns].to_numpy(dtype=float).tolist(),
        actions=actions,
        true_states=states,
    )


def save_trajectories(trajectories: Sequence[Trajectory], directory: str) -> List[str]:
    os.makedirs(directory, exist_ok=True)
    return [
        write_trajectory_csv(traj, os.path.join(directory, SERIES_PATTERN.format(i)))
        for i, traj in enumerate(trajectories)
    ]


def load_trajectories(paths: Union[str, Sequence[str]]) -> List[Trajectory]:
    """Reads trajectory CSVs; a directory stands for every `series_*.csv` inside it."""
    if isinstance(paths, str):
        paths = [paths]
    files = []
    for path in paths:
        if os.path.isdir(path):
            files.extend(sorted(glob.glob(os.path.join(path, "series_*.csv"))))
        else:
            files.append(path)
    if not files:
        raise FileNotFoundError(f"No trajectory files found in {list(paths)}")
    return [read_trajectory_csv(f) for f in files]


def load_belief_points(path: str) -> List[List[float]]:
    """A belief-set file is a JSON list of probability vectors."""
    data = load_json(path)
    if isinstance(data, dict):
        data = data.get("points", [])
    return [[float(x) for x in point] for point in data]


def save_alpha_sets(alpha_sets: Sequence[AlphaVectorSet], path: str) -> str:
    return save_json([s.asdict() for s in alpha_sets], path)


def load_alpha_sets(path: str) -> List[AlphaVectorSet]:
    data = load_json(path)
    if isinstance(data, dict):
        data = [data]
    try:
        alpha_sets = [AlphaVectorSet.from_dict(d) for d in data]
    except (KeyError, TypeError, AttributeError) as e:
        raise PlannerError(f"{path} is not an alpha-set file: {type(e).__name__} {e}") from e
    return sorted(alpha_sets, key=lambda s: s.step)


def read_belief_stream(path: str) -> np.ndarray:
    """Rows of a CSV with columns b_1..b_S, one belief per decision step."""
    frame = pd.read_csv(path, float_precision="round_trip")
    columns = [c for c in frame.columns if c.startswith("b_")] or list(frame.columns)
    return frame[columns].to_numpy(dtype=float)


def save_modes_csv(state: LearnerState, path: str) -> str:
    """Per-step mode labels; warm-up steps carry the first post-warm-up label."""
    frames = []
    for i in range(state.num_series):
        modes = state.full_modes(i)
        frames.append(pd.DataFrame({"series": i, "t": np.arange(len(modes)), "mode": modes}))
    _ensure_parent(path)
    pd.concat(frames, ignore_index=True).to_csv(path, index=False)
    return path


def save_trace_csv(trace: List[Dict], path: str) -> str:
    _ensure_parent(path)
    pd.DataFrame(trace, columns=["chain", "sweep", "log_prob", "num_active"]).to_csv(
        path, index=False, float_format=FLOAT_FORMAT
    )
    return path
