import pytest
import numpy as np

from varpomdp.kernels import RngStream
from varpomdp.planner import pbvi
from varpomdp.schemas import Belief, BeliefSet, CorpusSpec
from varpomdp.simulator import (
    AlphaVectorPolicy,
    FixedSequencePolicy,
    THREE_STATE_BELIEF_POINTS,
    UniformRandomPolicy,
    make_policy,
    make_synthetic_corpus,
    simulate,
    spectral_radius,
    stabilize,
    three_state_fail_model,
)
from varpomdp.utils.exceptions import DimensionMismatchError, PolicyError
from tests.helpers import scalar_model


def test_absorbing_state_is_never_left():
    model = three_state_fail_model()
    traj = simulate(model, UniformRandomPolicy(), Belief.unit(3, 0), steps=300, rng=RngStream(5))
    states = np.asarray(traj.true_states)
    assert 2 in states
    first = int(np.argmax(states == 2))
    assert np.all(states[first:] == 2)


def test_same_seed_same_trajectory():
    model = three_state_fail_model()
    runs = [
        simulate(model, FixedSequencePolicy([0, 1]), Belief.uniform(3), steps=50, rng=RngStream(7))
        for _ in range(2)
    ]
    assert runs[0] == runs[1]
    assert len(runs[0].actions) == 50
    assert runs[0].actions[:4] == [0, 1, 0, 1]


def test_empirical_transition_frequencies():
    transitions = [[[0.8, 0.2], [0.35, 0.65]]]
    model = scalar_model([1.0, 2.0], transitions=transitions)
    traj = simulate(model, FixedSequencePolicy([0]), Belief.uniform(2), steps=100_000, rng=RngStream(0))
    states = np.asarray(traj.true_states)
    counts = np.zeros((2, 2))
    np.add.at(counts, (states[:-1], states[1:]), 1.0)
    freqs = counts / counts.sum(axis=1, keepdims=True)
    np.testing.assert_allclose(freqs, transitions[0], atol=0.01)


def test_first_observations_use_zero_history():
    # With noise of scale 1e-12 a pure lag model stays at its zero start.
    model = scalar_model([1e-24], lags=[0.9])
    traj = simulate(model, FixedSequencePolicy([0]), Belief.uniform(1), steps=5, rng=RngStream(1))
    np.testing.assert_allclose(traj.array, 0.0, atol=1e-9)


def test_simulate_rejects_bad_inputs():
    model = three_state_fail_model()
    with pytest.raises(ValueError):
        simulate(model, FixedSequencePolicy(), Belief.uniform(3), steps=0, rng=RngStream(0))
    with pytest.raises(DimensionMismatchError):
        simulate(model, FixedSequencePolicy(), Belief.uniform(2), steps=3, rng=RngStream(0))
    with pytest.raises(PolicyError):
        simulate(model, FixedSequencePolicy([5]), Belief.uniform(3), steps=3, rng=RngStream(0))


def test_policy_registry():
    assert isinstance(make_policy("fixed", actions=[1]), FixedSequencePolicy)
    assert isinstance(make_policy("random"), UniformRandomPolicy)
    with pytest.raises(PolicyError):
        make_policy("greedy")
    with pytest.raises(PolicyError):
        make_policy("alpha")
    with pytest.raises(PolicyError):
        FixedSequencePolicy([])


def test_alpha_policy_follows_plan():
    model = three_state_fail_model()
    alpha_sets = pbvi(
        model,
        [0.0, 0.0, 1.0],
        4,
        BeliefSet(points=np.asarray(THREE_STATE_BELIEF_POINTS)),
        num_samples=200,
        rng=RngStream(3),
    )
    policy = AlphaVectorPolicy(alpha_sets, horizon=4)
    traj = simulate(model, policy, Belief.unit(3, 0), steps=6, rng=RngStream(4))
    assert set(traj.actions) <= {0, 1}
    # Past the horizon the policy keeps reading the one-step set.
    assert policy.alpha_set_at(10) is alpha_sets[1]
    assert policy.alpha_set_at(0) is alpha_sets[4]


@pytest.mark.parametrize("num_modes, obs_dim, var_order", [(1, 2, 1), (3, 2, 1), (2, 3, 2), (2, 1, 0)])
def test_synthetic_corpus_shape_and_stability(num_modes, obs_dim, var_order):
    spec = CorpusSpec(
        num_modes=num_modes, obs_dim=obs_dim, var_order=var_order, length=100, num_series=2
    )
    model, series = make_synthetic_corpus(spec, RngStream(12))
    assert model.num_states == num_modes
    assert len(series) == 2
    for traj in series:
        assert traj.length == 100 and traj.obs_dim == obs_dim
        assert set(traj.true_states) <= set(range(num_modes))
    for emission in model.emissions:
        assert spectral_radius(emission.lags) <= spec.spectral_radius


def test_single_mode_corpus_has_one_label():
    _, series = make_synthetic_corpus(CorpusSpec(num_modes=1, length=200), RngStream(0))
    for traj in series:
        assert set(traj.true_states) == {0}


def test_synthetic_corpus_is_deterministic():
    spec = CorpusSpec(length=150)
    a = make_synthetic_corpus(spec, RngStream(21))
    b = make_synthetic_corpus(spec, RngStream(21))
    assert a[0] == b[0]
    assert a[1] == b[1]


def test_stabilize_rescales_companion():
    lags = np.stack([np.eye(2) * 0.9, np.eye(2) * 0.5])
    assert spectral_radius(lags) > 0.95
    assert spectral_radius(stabilize(lags, 0.95)) <= 0.95
