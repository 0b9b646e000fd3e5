import os

import pytest
import numpy as np

from varpomdp.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATED, build_parser, run
from varpomdp.helpers.files import load_alpha_sets, load_trajectories, save_model
from varpomdp.simulator import THREE_STATE_BELIEF_POINTS, THREE_STATE_SPEC, three_state_fail_model
from varpomdp.utils.config import build_config, check_config, planner_config, resolve_seed
from varpomdp.utils.exceptions import ConfigError
from tests.helpers import summary_from, write_json


@pytest.fixture
def example_files(tmp_path):
    model = save_model(three_state_fail_model(), str(tmp_path / "model.json"))
    points = write_json(tmp_path / "beliefs.json", THREE_STATE_BELIEF_POINTS)
    return model, points


def _check_args(model, points, *extra):
    return [
        "--model", model,
        "--belief", "1,0,0",
        "--spec", THREE_STATE_SPEC,
        "--points", points,
        *extra,
    ]


@pytest.mark.parametrize("seed", ["0", "1", "2"])
def test_check_example_is_violated(example_files, capsys, seed):
    model, points = example_files
    code = run(["check", *_check_args(model, points, "--mc-samples", "1000", "--seed", seed)])
    assert code == EXIT_VIOLATED
    summary = summary_from(capsys.readouterr().out)
    assert summary["satisfied"] is False
    assert summary["horizon"] == 4
    assert 0.5 < summary["p_max"] <= 1.0
    assert len(summary["alpha_vectors"]) == 5
    assert all(alpha[2] == 1.0 for alpha in summary["alpha_vectors"])
    assert set(summary) == {"alpha_vectors", "chosen_actions", "horizon", "p_max", "satisfied", "spec"}


def test_check_satisfied_exit_code(example_files, capsys):
    model, points = example_files
    args = _check_args(model, points, "--mc-samples", "200", "--seed", "1")
    args[args.index(THREE_STATE_SPEC)] = 'P>=0.5 [ true U<=4 "Fail" ]'
    assert run(["check", *args]) == EXIT_OK
    assert summary_from(capsys.readouterr().out)["satisfied"] is True


def test_check_needs_seed(example_files):
    model, points = example_files
    assert run(["check", *_check_args(model, points)]) == EXIT_ERROR


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--unknown-flag"],
        ["explode"],
        [],
    ],
)
def test_bad_invocations(argv):
    assert run(argv) == EXIT_ERROR


def test_bad_formula_and_missing_model(example_files, capsys):
    model, points = example_files
    args = _check_args(model, points, "--seed", "0")
    args[args.index(THREE_STATE_SPEC)] = 'P<=1.5 [ true U<=4 "Fail" ]'
    assert run(["check", *args]) == EXIT_ERROR
    assert "position 3" in capsys.readouterr().err
    assert run(["check", *_check_args("missing.json", points, "--seed", "0")]) == EXIT_ERROR


def test_validate_reports_row_sums(tmp_path, capsys):
    data = three_state_fail_model().model_dump()
    data["transitions"][1][0] = [0.3, 0.4, 0.2]
    path = write_json(tmp_path / "bad.json", data)
    assert run(["validate", "--model", path]) == EXIT_ERROR
    summary = summary_from(capsys.readouterr().out)
    assert summary["passed"] is False
    assert [(i["kind"], i["indices"]) for i in summary["issues"]] == [("transition_row_sum", [1, 0])]


def test_validate_passes(example_files, capsys):
    model, _ = example_files
    assert run(["validate", "--model", model]) == EXIT_OK
    assert summary_from(capsys.readouterr().out) == {"issues": [], "passed": True}


def test_density_of_two_corners(tmp_path, capsys):
    points = write_json(tmp_path / "corners.json", [[1.0, 0.0], [0.0, 1.0]])
    assert run(["density", "--points", points, "--probes", "500", "--seed", "0"]) == EXIT_OK
    summary = summary_from(capsys.readouterr().out)
    assert summary["epsilon_b"] == 1.0
    assert summary["num_points"] == 2


def _simulate(out_dir, seed="5"):
    return run(
        [
            "simulate",
            "--out-dir", str(out_dir),
            "--seed", seed,
            "--num-modes", "2",
            "--length", "60",
            "--num-series", "2",
        ]
    )


def test_simulate_is_reproducible(tmp_path, capsys):
    assert _simulate(tmp_path / "a") == EXIT_OK
    assert _simulate(tmp_path / "b") == EXIT_OK
    summary = summary_from(capsys.readouterr().out)
    assert summary["num_series"] == 2 and summary["steps"] == 60
    for name in ("model.json", "series_000.csv", "series_001.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert _simulate(tmp_path / "c", seed="6") == EXIT_OK
    assert (tmp_path / "c" / "series_000.csv").read_bytes() != (tmp_path / "a" / "series_000.csv").read_bytes()


def test_plan_emits_alphas_and_follows_policy(example_files, tmp_path, capsys):
    model, points = example_files
    alphas_path = str(tmp_path / "alphas.json")
    beliefs = tmp_path / "beliefs.csv"
    beliefs.write_text("b_1,b_2,b_3\n1,0,0\n0.5,0.5,0\n0,0,1\n")
    code = run(
        [
            "plan",
            *_check_args(model, points, "--mc-samples", "200", "--seed", "2"),
            "--emit-alphas", alphas_path,
            "--policy", str(beliefs),
        ]
    )
    assert code == EXIT_OK
    summary = summary_from(capsys.readouterr().out)
    assert summary["steps"] == 4
    assert len(summary["actions"]) == 3
    assert set(summary["actions"]) <= {0, 1}
    alpha_sets = load_alpha_sets(alphas_path)
    assert [s.step for s in alpha_sets] == [0, 1, 2, 3, 4]

    out_dir = tmp_path / "runs"
    code = run(
        [
            "simulate",
            "--model", model,
            "--policy", "alpha",
            "--alphas", alphas_path,
            "--init", "1,0,0",
            "--length", "10",
            "--num-series", "1",
            "--seed", "3",
            "--out-dir", str(out_dir),
        ]
    )
    assert code == EXIT_OK
    (traj,) = load_trajectories(str(out_dir))
    assert traj.length == 10
    assert set(traj.actions) <= {0, 1}


def test_alpha_policy_needs_alphas(example_files, tmp_path):
    model, _ = example_files
    code = run(
        ["simulate", "--model", model, "--policy", "alpha", "--seed", "0", "--out-dir", str(tmp_path)]
    )
    assert code == EXIT_ERROR


def test_learn_small_corpus(tmp_path, capsys):
    data = tmp_path / "data"
    assert _simulate(data) == EXIT_OK
    out = tmp_path / "learned"
    code = run(
        [
            "learn",
            "--data", str(data),
            "--out-dir", str(out),
            "--seed", "4",
            "--sweeps", "8",
            "--burn-in", "2",
            "--max-features", "4",
        ]
    )
    assert code == EXIT_OK
    summary = summary_from(capsys.readouterr().out)
    assert 1 <= summary["num_features"] <= 4
    assert 0.0 <= summary["hamming_error"] <= 1.0
    for name in ("model.json", "modes.csv", "trace.csv", "transitions.json"):
        assert os.path.exists(out / name)
    assert run(["validate", "--model", str(out / "model.json")]) == EXIT_OK


def test_learn_rejects_bad_config(tmp_path):
    data = tmp_path / "data"
    assert _simulate(data) == EXIT_OK
    code = run(
        ["learn", "--data", str(data), "--out-dir", str(tmp_path / "o"), "--seed", "1", "--sweeps", "5", "--burn-in", "5"]
    )
    assert code == EXIT_ERROR


def test_config_file_precedence(tmp_path):
    path = write_json(tmp_path / "config.json", {"seed": 3, "planner": {"L": 50, "horizon": 2}})
    base = ["check", "--model", "m.json", "--spec", THREE_STATE_SPEC, "--config", path]

    config = build_config(build_parser(), base)
    assert planner_config(config).mc_samples == 50
    assert planner_config(config).horizon == 2
    assert resolve_seed(config) == 3

    config = build_config(build_parser(), base + ["--mc-samples", "7", "--seed", "9"])
    assert planner_config(config).mc_samples == 7
    assert planner_config(config).horizon == 2
    assert resolve_seed(config) == 9

    config = build_config(build_parser(), ["check", "--model", "m.json", "--spec", THREE_STATE_SPEC])
    assert planner_config(config).mc_samples == 1000
    with pytest.raises(ConfigError):
        resolve_seed(config)


def test_required_flags_can_come_from_config_file(example_files, tmp_path, capsys):
    model, points = example_files
    path = write_json(
        tmp_path / "config.json",
        {"model": model, "spec": THREE_STATE_SPEC, "points": points, "seed": 0, "planner": {"L": 200}},
    )
    assert run(["check", "--config", path, "--belief", "1,0,0"]) == EXIT_VIOLATED
    assert summary_from(capsys.readouterr().out)["horizon"] == 4

    with pytest.raises(ConfigError):
        check_config(build_config(build_parser(), ["check", "--spec", THREE_STATE_SPEC]))
    assert run(["check", "--config", str(tmp_path / "missing.json")]) == EXIT_ERROR


def test_horizon_flag_overrides_formula(example_files, capsys):
    model, points = example_files
    assert run(["check", *_check_args(model, points, "--seed", "0", "--horizon", "1")]) == EXIT_OK
    summary = summary_from(capsys.readouterr().out)
    assert summary["horizon"] == 1
    assert summary["p_max"] == pytest.approx(0.2, abs=1e-12)
    assert np.isclose(summary["alpha_vectors"][0][2], 1.0)


def test_malformed_alpha_file_is_an_error(example_files, tmp_path, capsys):
    model, _ = example_files
    alphas = write_json(tmp_path / "alphas.json", [{"t": 0, "vectors": [{"action": 1}]}])
    code = run(
        [
            "simulate", "--model", model, "--policy", "alpha", "--alphas", alphas,
            "--seed", "0", "--out-dir", str(tmp_path / "out"),
        ]
    )
    assert code == EXIT_ERROR
    assert "not an alpha-set file" in capsys.readouterr().err
