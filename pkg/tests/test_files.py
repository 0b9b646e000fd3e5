import pytest
import numpy as np

from varpomdp.helpers.files import (
    load_alpha_sets,
    load_belief_points,
    load_model,
    load_trajectories,
    read_belief_stream,
    read_trajectory_csv,
    save_alpha_sets,
    save_model,
    save_trajectories,
    write_trajectory_csv,
)
from varpomdp.kernels import RngStream
from varpomdp.planner import pbvi
from varpomdp.schemas import BeliefSet, Trajectory
from varpomdp.simulator import THREE_STATE_BELIEF_POINTS, three_state_fail_model
from varpomdp.utils.exceptions import PlannerError
from tests.helpers import write_json


def test_trajectory_csv_keeps_blank_final_action(tmp_path):
    traj = Trajectory(
        observations=[[0.1, -2.5], [1e-17, 3.0], [0.3, 0.0]],
        actions=[1, 0],
        true_states=[2, 2, 0],
    )
    path = write_trajectory_csv(traj, str(tmp_path / "t.csv"))
    header = open(path).readline().strip()
    assert header == "t,o_1,o_2,action,state"
    assert read_trajectory_csv(path) == traj


def test_trajectory_csv_without_actions(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("o_2,o_1\n1.0,2.0\n3.0,4.0\n")
    traj = read_trajectory_csv(str(path))
    assert traj.observations == [[2.0, 1.0], [4.0, 3.0]]
    assert traj.actions is None and traj.true_states is None


def test_trajectory_csv_rejects_gaps(tmp_path):
    path = tmp_path / "gap.csv"
    path.write_text("t,o_1,action\n0,1.0,\n1,2.0,0\n2,3.0,\n")
    with pytest.raises(ValueError):
        read_trajectory_csv(str(path))


def test_directory_loading_is_sorted(tmp_path):
    series = [Trajectory(observations=[[float(i)], [float(i) + 1]]) for i in range(3)]
    paths = save_trajectories(series, str(tmp_path))
    assert [p.rsplit("/", 1)[-1] for p in paths] == ["series_000.csv", "series_001.csv", "series_002.csv"]
    assert load_trajectories(str(tmp_path)) == series
    with pytest.raises(FileNotFoundError):
        load_trajectories(str(tmp_path / "empty"))


def test_model_file_round_trip(tmp_path):
    model = three_state_fail_model()
    assert load_model(save_model(model, str(tmp_path / "nested" / "m.json"))) == model


def test_alpha_sets_reload_in_step_order(tmp_path):
    alphas = pbvi(
        three_state_fail_model(),
        [0.0, 0.0, 1.0],
        2,
        BeliefSet(points=np.asarray(THREE_STATE_BELIEF_POINTS)),
        num_samples=50,
        rng=RngStream(0),
    )
    path = save_alpha_sets(list(reversed(alphas)), str(tmp_path / "alphas.json"))
    loaded = load_alpha_sets(path)
    assert [s.step for s in loaded] == [0, 1, 2]
    for original, reread in zip(alphas, loaded):
        np.testing.assert_array_equal(original.matrix, reread.matrix)
        assert original.actions == reread.actions


def test_belief_files(tmp_path):
    assert load_belief_points(write_json(tmp_path / "a.json", [[1, 0], [0.5, 0.5]])) == [[1.0, 0.0], [0.5, 0.5]]
    assert load_belief_points(write_json(tmp_path / "b.json", {"points": [[0, 1]]})) == [[0.0, 1.0]]
    stream = tmp_path / "beliefs.csv"
    stream.write_text("t,b_1,b_2\n0,0.2,0.8\n1,1,0\n")
    np.testing.assert_array_equal(read_belief_stream(str(stream)), [[0.2, 0.8], [1.0, 0.0]])


def test_trajectory_csv_is_bit_exact(tmp_path):
    gen = np.random.default_rng(11)
    obs = gen.standard_normal((40, 3)) * 10.0 ** gen.integers(-8, 8, size=(40, 3))
    traj = Trajectory(observations=obs.tolist(), actions=[0] * 39)
    reread = read_trajectory_csv(write_trajectory_csv(traj, str(tmp_path / "exact.csv")))
    np.testing.assert_array_equal(reread.array, obs)


@pytest.mark.parametrize("content", ['[{"vectors": []}]', '[{"t": 1}]', '[{"t": 0, "vectors": [1, 2]}]', "3"])
def test_malformed_alpha_file(tmp_path, content):
    path = tmp_path / "alphas.json"
    path.write_text(content)
    with pytest.raises(PlannerError):
        load_alpha_sets(str(path))
