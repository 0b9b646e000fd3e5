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
import argparse
from typing import List, Mapping, Optional

import bittensor as bt

from varpomdp.schemas import BeliefStrategy, CorpusSpec, Hypers, LearnerConfig, PlannerConfig
from varpomdp.utils.exceptions import ConfigError
from varpomdp.utils.logging import configure_verbosity, setup_events_logger

# Short keys accepted in config files.
CONFIG_ALIASES = {
    "r": "var_order",
    "K_max": "max_features",
    "k_max": "max_features",
    "L": "mc_samples",
}

HYPER_FLAGS = ("bp_mass", "dir_conc", "sticky")


def add_common_args(parser: argparse.ArgumentParser):
    """Flags every subcommand accepts. Defaults are None so a config file can fill them."""
    parser.add_argument("--seed", type=int, help="Root seed of every random stream.", default=None)
    parser.add_argument(
        "--threads", type=int, help="Worker threads for parallel sites.", default=None
    )
    parser.add_argument(
        "--config", type=str, help="JSON file with defaults for this subcommand.", default=None
    )
    parser.add_argument(
        "--events-dir",
        type=str,
        help="If set, per-sweep and per-step events are written to events.log in this directory.",
        default=None,
    )
    parser.add_argument(
        "--logging.debug", dest="logging_debug", action="store_true", help="Debug logging.", default=False
    )
    parser.add_argument(
        "--logging.trace", dest="logging_trace", action="store_true", help="Trace logging.", default=False
    )


def add_simulator_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--model",
        type=str,
        help="Model JSON to simulate. Without it a synthetic corpus is drawn.",
        default=None,
    )
    parser.add_argument("--out-dir", type=str, help="Directory for model.json and series CSVs.")
    parser.add_argument(
        "--policy",
        type=str,
        choices=["fixed", "random", "alpha"],
        help="Action policy used with --model.",
        default="fixed",
    )
    parser.add_argument("--actions", type=int, nargs="+", help="Action cycle of the fixed policy.", default=None)
    parser.add_argument("--alphas", type=str, help="Alpha JSON for the alpha policy.", default=None)
    parser.add_argument("--init", type=str, help="Initial state distribution, e.g. '1,0,0'.", default=None)
    parser.add_argument(
        "--on-impossible",
        type=str,
        choices=["error", "reset"],
        help="Belief tracking of the alpha policy on a zero-likelihood observation.",
        default="reset",
    )
    parser.add_argument("--num-modes", type=int, default=None)
    parser.add_argument("--obs-dim", type=int, default=None)
    parser.add_argument("--var-order", type=int, default=None)
    parser.add_argument("--length", type=int, help="Steps per series.", default=None)
    parser.add_argument("--num-series", type=int, default=None)
    parser.add_argument("--num-actions", type=int, default=None)
    parser.add_argument("--noise-scale", type=float, default=None)
    parser.add_argument("--stickiness", type=float, default=None)
    parser.add_argument("--spectral-radius", type=float, default=None)


def add_learner_args(parser: argparse.ArgumentParser):
    parser.add_argument("--data", type=str, nargs="+", help="Trajectory CSVs or directories.")
    parser.add_argument("--out-dir", type=str, help="Directory for the learned artifacts.")
    parser.add_argument(
        "--labels",
        type=str,
        help="JSON object mapping feature index to its atomic propositions.",
        default=None,
    )
    parser.add_argument("--var-order", type=int, default=None)
    parser.add_argument("--max-features", type=int, default=None)
    parser.add_argument("--sweeps", type=int, default=None)
    parser.add_argument("--burn-in", type=int, default=None)
    parser.add_argument("--thin", type=int, default=None)
    parser.add_argument("--chains", type=int, default=None)
    parser.add_argument("--bp-mass", type=float, default=None)
    parser.add_argument("--dir-conc", type=float, default=None)
    parser.add_argument("--sticky", type=float, default=None)
    parser.add_argument("--k0-scale", type=float, default=None)
    parser.add_argument("--s0-scale", type=float, default=None)
    parser.add_argument("--nu0-offset", type=float, default=None)
    parser.add_argument("--delta", type=float, help="Chernoff confidence parameter.", default=None)
    parser.add_argument("--num-actions", type=int, default=None)
    parser.add_argument(
        "--debug-invariants",
        dest="debug",
        action="store_true",
        help="Check sample invariants after every sweep.",
        default=None,
    )


def add_planner_args(parser: argparse.ArgumentParser):
    parser.add_argument("--model", type=str, help="Model JSON.")
    parser.add_argument("--spec", type=str, help="PCTL formula, e.g. 'P<=0.5 [ true U<=4 \"Fail\" ]'.")
    parser.add_argument("--belief", type=str, help="Initial belief, e.g. '1,0,0'.", default=None)
    parser.add_argument("--points", type=str, help="Belief-set JSON.", default=None)
    parser.add_argument("--mc-samples", type=int, default=None)
    parser.add_argument("--horizon", type=int, help="Overrides the formula's step bound.", default=None)
    parser.add_argument(
        "--belief-strategy",
        type=str,
        choices=[s.value for s in BeliefStrategy],
        default=None,
    )
    parser.add_argument("--num-points", type=int, default=None)
    parser.add_argument(
        "--quadrature", action="store_true", help="Exact 1-d backups instead of Monte Carlo.", default=None
    )


# Flags a subcommand cannot run without. They may also come from the --config file.
REQUIRED_FLAGS = {
    "simulate": ["out_dir"],
    "learn": ["data", "out_dir"],
    "check": ["model", "spec"],
    "plan": ["model", "spec"],
    "density": ["points"],
    "validate": ["model"],
}


def _relative_config_path(argv: List[str]) -> List[str]:
    """bt.config resolves --config against the working directory, so hand it a relative path."""
    argv = list(argv)
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            argv[i + 1] = os.path.relpath(os.path.expanduser(argv[i + 1]))
        elif token.startswith("--config="):
            argv[i] = "--config=" + os.path.relpath(os.path.expanduser(token.split("=", 1)[1]))
    return argv


def build_config(parser: argparse.ArgumentParser, argv: Optional[List[str]] = None) -> "bt.Config":
    """Parses `argv` into the bt.Config of its subcommand.

    The top-level parser checks the flags and picks the subcommand. bt.config then loads
    the `--config` file as defaults of that subcommand's parser, so explicit flags win.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    command = parser.parse_args(argv).command
    config = bt.config(parser.subcommands[command], args=_relative_config_path(argv[1:]))
    config.command = command
    return config


def _mapping(value) -> dict:
    return dict(value) if isinstance(value, Mapping) else {}


def _aliased(values: Mapping) -> dict:
    return {CONFIG_ALIASES.get(k, k): v for k, v in values.items()}


def load_config(config: "bt.Config", model_cls, section: Optional[str] = None):
    """Builds `model_cls` with precedence flags > `--config` section > `--config` top level > defaults."""
    section_values = _aliased(_mapping(config.get(section))) if section else {}
    top_aliases = _aliased({k: config.get(k) for k in CONFIG_ALIASES if config.get(k) is not None})

    values = {}
    for name in model_cls.model_fields:
        if config.is_set(name):
            values[name] = config.get(name)
        elif name in section_values:
            values[name] = section_values[name]
        elif config.get(name) is not None:
            values[name] = config.get(name)
        elif name in top_aliases:
            values[name] = top_aliases[name]

    if "hypers" in model_cls.model_fields:
        hypers = _mapping(values.get("hypers"))
        for name in HYPER_FLAGS:
            if config.get(name) is not None and (config.is_set(name) or name not in hypers):
                hypers[name] = config.get(name)
        values["hypers"] = Hypers(**hypers)
    return model_cls(**values)


def learner_config(config) -> LearnerConfig:
    return load_config(config, LearnerConfig, "learner")


def planner_config(config) -> PlannerConfig:
    return load_config(config, PlannerConfig, "planner")


def corpus_spec(config) -> CorpusSpec:
    return load_config(config, CorpusSpec, "corpus")


def resolve_seed(config) -> int:
    """Seed from the flag or the config file; randomized subcommands have no default."""
    seed = config.get("seed")
    if seed is None:
        raise ConfigError(f"{config.command} needs an explicit --seed")
    return int(seed)


def check_config(config: "bt.Config"):
    r"""Checks/validates the config and prepares logging and output directories."""
    configure_verbosity(debug=config.get("logging_debug"), trace=config.get("logging_trace"))
    if config.get("config") and not os.path.isfile(config.config):
        raise ConfigError(f"Config file {config.config} does not exist")
    missing = [name for name in REQUIRED_FLAGS.get(config.command, []) if not config.get(name)]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        raise ConfigError(f"{config.command} needs {flags}")
    threads = config.get("threads")
    if threads is not None and threads < 1:
        raise ConfigError(f"--threads must be >= 1, got {threads}")
    out_dir = config.get("out_dir")
    if out_dir:
        os.makedirs(os.path.expanduser(out_dir), exist_ok=True)

    events_logger = None
    if config.get("events_dir"):
        events_logger = setup_events_logger(os.path.expanduser(config.events_dir))
        bt.logging.debug(f"Writing events to {config.events_dir}")
    return events_logger
