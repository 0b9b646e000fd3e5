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
import sys
import json
import argparse
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import bittensor as bt
from pydantic import ValidationError

from varpomdp.helpers.files import (
    load_alpha_sets,
    load_belief_points,
    load_json,
    load_model,
    load_trajectories,
    read_belief_stream,
    save_alpha_sets,
    save_json,
    save_model,
    save_modes_csv,
    save_trace_csv,
    save_trajectories,
)
from varpomdp.kernels import RngStream
from varpomdp.learner import build_model, fit_bp_arhmm, hamming_error
from varpomdp.model import ensure_valid, validate_model
from varpomdp.pctl import check, parse_spec
from varpomdp.planner import belief_set_density, extract_action
from varpomdp.schemas import Belief, BeliefSet, VarPomdpModel
from varpomdp.simulator import AlphaVectorPolicy, make_policy, make_synthetic_corpus, simulate
from varpomdp.utils.config import (
    add_common_args,
    add_learner_args,
    add_planner_args,
    add_simulator_args,
    build_config,
    check_config,
    corpus_spec,
    learner_config,
    planner_config,
    resolve_seed,
)
from varpomdp.utils.exceptions import VarPomdpError
from varpomdp.utils.misc import ordered_map

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_ERROR = 2

DEFAULT_PROBES = 10000

Summary = Tuple[dict, int]


def _threads(config) -> int:
    return config.threads or 1


def _initial_belief(text: Optional[str], num_states: int) -> Belief:
    return Belief.parse(text) if text else Belief.uniform(num_states)


def run_simulate(config, events_logger) -> Summary:
    root = RngStream(resolve_seed(config))
    spec = corpus_spec(config)
    if config.model:
        model = ensure_valid(load_model(config.model))
        init = _initial_belief(config.init, model.num_states)
        alpha_sets = load_alpha_sets(config.alphas) if config.policy == "alpha" and config.alphas else None

        def new_policy():
            if config.policy == "alpha":
                return make_policy("alpha", alpha_sets=alpha_sets, on_impossible=config.on_impossible)
            if config.policy == "fixed":
                return make_policy("fixed", actions=config.actions or [0])
            return make_policy(config.policy)

        trajectories = ordered_map(
            lambda i: simulate(model, new_policy(), init, steps=spec.length, rng=root.substream(1, i)),
            range(spec.num_series),
            _threads(config),
        )
    else:
        model, trajectories = make_synthetic_corpus(spec, root)

    model_path = save_model(model, os.path.join(config.out_dir, "model.json"))
    paths = save_trajectories(trajectories, config.out_dir)
    return {
        "model": model_path,
        "trajectories": paths,
        "num_series": len(trajectories),
        "steps": trajectories[0].length,
    }, EXIT_OK


def run_learn(config, events_logger) -> Summary:
    corpus = load_trajectories(config.data)
    learner = learner_config(config).model_copy(update={"seed": resolve_seed(config)})
    fit = fit_bp_arhmm(corpus, learner, events_logger)
    best = fit.best

    out = config.out_dir
    summary = {
        "num_features": best.num_features,
        "best_chain": best.chain,
        "best_sweep": best.sweep,
        "log_prob": best.log_prob,
        "num_samples": len(fit.samples),
        "modes": save_modes_csv(best, os.path.join(out, "modes.csv")),
        "trace": save_trace_csv(fit.trace, os.path.join(out, "trace.csv")),
    }
    if all(traj.true_states is not None for traj in corpus):
        truth = np.concatenate([traj.true_states[learner.var_order :] for traj in corpus])
        summary["hamming_error"] = hamming_error(truth, np.concatenate(best.mode_seqs))

    label_map = load_json(config.labels) if config.labels else {k: [] for k in range(best.num_features)}
    model, estimate = build_model(best, corpus, label_map, learner.delta, config.num_actions)
    summary["model"] = save_model(model, os.path.join(out, "model.json"))
    summary["transitions"] = save_json(estimate.asdict(), os.path.join(out, "transitions.json"))
    summary["flagged"] = [list(map(int, f)) for f in estimate.flagged]
    return summary, EXIT_OK


def _check(config, events_logger):
    model = load_model(config.model)
    spec = parse_spec(config.spec)
    b0 = _initial_belief(config.belief, model.num_states)
    points = load_belief_points(config.points) if config.points else None
    planner = planner_config(config).model_copy(update={"seed": resolve_seed(config)})
    return check(model, b0, spec, planner, points, events_logger)


def run_check(config, events_logger) -> Summary:
    result = _check(config, events_logger)
    return result.asdict(), EXIT_OK if result.satisfied else EXIT_VIOLATED


def run_plan(config, events_logger) -> Summary:
    result = _check(config, events_logger)
    summary = result.asdict()
    summary["steps"] = len(result.alphas) - 1
    if config.emit_alphas:
        summary["alphas_file"] = save_alpha_sets(result.alphas, config.emit_alphas)
    if config.policy:
        policy = AlphaVectorPolicy(result.alphas, horizon=result.horizon)
        beliefs = read_belief_stream(config.policy)
        summary["actions"] = [
            extract_action(policy.alpha_set_at(t), Belief.from_vector(b, normalize=True))
            for t, b in enumerate(beliefs)
        ]
    return summary, EXIT_OK


def run_density(config, events_logger) -> Summary:
    belief_set = BeliefSet(points=np.asarray(load_belief_points(config.points), dtype=float))
    epsilon = belief_set_density(belief_set, config.probes, RngStream(resolve_seed(config)))
    return {
        "epsilon_b": epsilon,
        "num_points": len(belief_set),
        "num_states": belief_set.num_states,
    }, EXIT_OK


def run_validate(config, events_logger) -> Summary:
    model = VarPomdpModel.model_validate(load_json(config.model))
    report = validate_model(model)
    return {
        "passed": report.passed,
        "issues": [issue.model_dump() for issue in report.issues],
    }, EXIT_OK if report.passed else EXIT_ERROR


COMMANDS: Dict[str, Callable] = {
    "simulate": run_simulate,
    "learn": run_learn,
    "check": run_check,
    "plan": run_plan,
    "density": run_density,
    "validate": run_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varpomdp",
        description="Learn VAR-POMDPs from time series and check bounded-until PCTL formulas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate_parser = sub.add_parser("simulate", help="Simulate a model or draw a synthetic corpus.")
    add_common_args(simulate_parser)
    add_simulator_args(simulate_parser)

    learn_parser = sub.add_parser("learn", help="Fit the BP-AR-HMM and build the VAR-POMDP.")
    add_common_args(learn_parser)
    add_learner_args(learn_parser)

    check_parser = sub.add_parser("check", help="Check a PCTL formula at a belief.")
    add_common_args(check_parser)
    add_planner_args(check_parser)

    plan_parser = sub.add_parser("plan", help="Compute alpha vectors and follow them.")
    add_common_args(plan_parser)
    add_planner_args(plan_parser)
    plan_parser.add_argument("--emit-alphas", type=str, help="Write every alpha set to this JSON file.", default=None)
    plan_parser.add_argument("--policy", type=str, help="CSV of beliefs to map to actions.", default=None)

    density_parser = sub.add_parser("density", help="Estimate the density of a belief set.")
    add_common_args(density_parser)
    density_parser.add_argument("--points", type=str, help="Belief-set JSON.")
    density_parser.add_argument("--probes", type=int, default=DEFAULT_PROBES, help="Random simplex probes.")

    validate_parser = sub.add_parser("validate", help="Validate a model JSON file.")
    add_common_args(validate_parser)
    validate_parser.add_argument("--model", type=str, help="Model JSON.")

    # build_config hands the chosen subparser to bt.config.
    parser.subcommands = dict(sub.choices)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Runs one subcommand and returns its exit code: 0 success or satisfied, 1 violated, 2 error."""
    parser = build_parser()
    try:
        config = build_config(parser, argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_ERROR

    try:
        events_logger = check_config(config)
        summary, code = COMMANDS[config.command](config, events_logger)
    except (VarPomdpError, ValidationError, OSError, ValueError) as e:
        message = str(e).splitlines()[0] if str(e) else type(e).__name__
        bt.logging.error(f"{config.command} failed: {message}")
        print(f"error: {message}", file=sys.stderr)
        return EXIT_ERROR

    print(json.dumps(summary, sort_keys=True, default=float))
    if code == EXIT_ERROR:
        bt.logging.error(f"{config.command} finished with errors")
    else:
        bt.logging.success(f"{config.command} finished with exit code {code}")
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
