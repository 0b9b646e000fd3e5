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

import numpy as np

from varpomdp.kernels import cholesky
from varpomdp.schemas import ValidationReport, VarPomdpModel
from varpomdp.utils.exceptions import CholeskyError, ModelValidationError

ROW_SUM_TOLERANCE = 1e-9


def _shape(values):
    try:
        return np.asarray(values, dtype=float).shape
    except ValueError:
        return None


def validate_model(model: VarPomdpModel) -> ValidationReport:
    """Checks every model invariant and reports all violations with their indices."""
    report = ValidationReport()
    S, A, d, r = model.num_states, model.num_actions, model.obs_dim, model.var_order

    for name, value in (("num_states", S), ("num_actions", A), ("obs_dim", d)):
        if value < 1:
            report.add("dimension", [], f"{name} must be positive, got {value}")
    if r < 0:
        report.add("dimension", [], f"var_order must be non-negative, got {r}")
    if not report.passed:
        return report

    if _shape(model.transitions) != (A, S, S):
        report.add(
            "transitions_shape",
            [],
            f"transitions must have shape {(A, S, S)}, got {_shape(model.transitions)}",
        )
    else:
        T = model.transition_tensor
        for a in range(A):
            for s in range(S):
                row = T[a, s]
                if np.any(~np.isfinite(row)) or np.any(row < 0) or np.any(row > 1):
                    report.add("transition_range", [a, s], f"T[a={a}][s={s}] has entries outside [0, 1]")
                elif abs(row.sum() - 1.0) > ROW_SUM_TOLERANCE:
                    report.add(
                        "transition_row_sum",
                        [a, s],
                        f"T[a={a}][s={s}] sums to {row.sum():.12g}, not 1",
                    )

    if len(model.emissions) != S:
        report.add("emissions", [], f"expected {S} emissions, got {len(model.emissions)}")
    for s, emission in enumerate(model.emissions):
        if len(emission.lag_matrices) != r:
            report.add(
                "lag_count", [s], f"state {s} has {len(emission.lag_matrices)} lag matrices, expected {r}"
            )
        for j, lag in enumerate(emission.lag_matrices):
            if _shape(lag) != (d, d):
                report.add("lag_shape", [s, j], f"lag matrix {j + 1} of state {s} is not {d}x{d}")
        if _shape(emission.noise_cov) != (d, d):
            report.add("noise_shape", [s], f"noise_cov of state {s} is not {d}x{d}")
            continue
        try:
            cholesky(emission.covariance)
        except CholeskyError as e:
            report.add("noise_spd", [s], f"noise_cov of state {s} is not SPD: {e.message}")

    if len(model.labels) > S:
        report.add("labels", [], f"labels given for {len(model.labels)} states, model has {S}")
    if model.state_names is not None and len(model.state_names) != S:
        report.add("state_names", [], f"expected {S} state names, got {len(model.state_names)}")
    if model.action_names is not None and len(model.action_names) != A:
        report.add("action_names", [], f"expected {A} action names, got {len(model.action_names)}")
    return report


def ensure_valid(model: VarPomdpModel) -> VarPomdpModel:
    report = validate_model(model)
    if not report.passed:
        raise ModelValidationError(report)
    return model
