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

"""Small reference models used by the CLI demos and the test suite.

`three_state_fail_model` is the three-state, two-action failure model whose third state
is an absorbing "Fail" state. Its transition table is fixed; the emission parameters are
synthesized here since only their dimension (a 3-d motion trajectory) is known:

    state  lag matrix A_1   noise covariance
    s0     0.5 I            diag(2.0, 0.5, 1.0)
    s1     -0.3 I           diag(0.5, 2.0, 1.0)
    s2     0.9 I            I

The covariances of s0 and s1 share a determinant but stretch different axes, so the
ratio N(ô; 0, Σ_1) / N(ô; 0, Σ_0) = exp(-0.75 (ô_1² - ô_2²)) covers all of (0, ∞) under
either state's samples. Every split between two alpha vectors that trade off s0 against
s1 then receives samples on both sides, which keeps the backup regions nondegenerate and
the per-point alpha vectors distinct. Nested covariances (one a multiple of the other)
bound that ratio away from zero and let a single region absorb every sample once the
alpha vectors draw close.
"""

import numpy as np

from varpomdp.schemas import Emission, VarPomdpModel

THREE_STATE_TRANSITIONS = [
    # a1
    [[0.2, 0.7, 0.1], [0.2, 0.5, 0.3], [0.0, 0.0, 1.0]],
    # a2
    [[0.3, 0.5, 0.2], [0.25, 0.65, 0.1], [0.0, 0.0, 1.0]],
]

THREE_STATE_BELIEF_POINTS = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.5, 0.5, 0.0],
    [0.6, 0.3, 0.1],
    [0.3, 0.4, 0.3],
]

THREE_STATE_SPEC = 'P<=0.5 [ true U<=4 "Fail" ]'


def three_state_fail_model() -> VarPomdpModel:
    eye = np.eye(3)
    emissions = [
        Emission.from_arrays([0.5 * eye], np.diag([2.0, 0.5, 1.0])),
        Emission.from_arrays([-0.3 * eye], np.diag([0.5, 2.0, 1.0])),
        Emission.from_arrays([0.9 * eye], eye),
    ]
    return VarPomdpModel(
        num_states=3,
        num_actions=2,
        obs_dim=3,
        var_order=1,
        transitions=THREE_STATE_TRANSITIONS,
        emissions=emissions,
        labels=[[], [], ["Fail"]],
        state_names=["s0", "s1", "s2"],
        action_names=["a1", "a2"],
    )


def two_state_separated_model(scale_ratio: float = 1e4, flip: float = 0.9) -> VarPomdpModel:
    """Two states, d = 1, r = 0, noise scales 1 and `scale_ratio`.

    Action a1 swaps the state with probability `flip`, a2 keeps it. With zero-mean
    emissions the noise scale is the only thing that tells the states apart, so a large
    ratio makes the state close to observable.
    """
    swap = [[1.0 - flip, flip], [flip, 1.0 - flip]]
    keep = [[1.0, 0.0], [0.0, 1.0]]
    return VarPomdpModel(
        num_states=2,
        num_actions=2,
        obs_dim=1,
        var_order=0,
        transitions=[swap, keep],
        emissions=[
            Emission(noise_cov=[[1.0]]),
            Emission(noise_cov=[[float(scale_ratio) ** 2]]),
        ],
        labels=[[], ["goal"]],
    )
