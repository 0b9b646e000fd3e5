"""Randomized invariant checks over many seeded instances."""

import pytest
import numpy as np

from varpomdp.kernels import RngStream
from varpomdp.model import filter_trajectory
from varpomdp.pctl import partition_states, transform_model
from varpomdp.planner import (
    estimate_partition_table,
    mdp_upper_bound,
    pbvi,
    select_belief_points,
    value_at,
    values_at_points,
)
from varpomdp.schemas import (
    And,
    Atom,
    Belief,
    Comparator,
    Not,
    PathOperator,
    PctlSpec,
    TrueFormula,
)
from varpomdp.simulator import UniformRandomPolicy, simulate
from tests.helpers import mc_tolerance, random_model

ATOMS = ["a", "b", "c"]


def _random_formula(gen, depth=2):
    choice = int(gen.integers(0, 4 if depth > 0 else 2))
    if choice == 0:
        return TrueFormula()
    if choice == 1:
        return Atom(ATOMS[int(gen.integers(len(ATOMS)))])
    if choice == 2:
        return Not(_random_formula(gen, depth - 1))
    return And(_random_formula(gen, depth - 1), _random_formula(gen, depth - 1))


def _random_instance(seed, obs_dim=1, var_order=0):
    gen = np.random.default_rng(seed)
    num_states = int(gen.integers(2, 5))
    num_actions = int(gen.integers(1, 3))
    model = random_model(gen, num_states, num_actions, obs_dim=obs_dim, var_order=var_order)
    spec = PctlSpec(
        comparator=Comparator.LE,
        bound=0.5,
        path=PathOperator.BOUNDED_UNTIL,
        phi1=TrueFormula(),
        phi2=Atom("goal"),
        steps=int(gen.integers(1, 4)),
    )
    partition = partition_states(model, spec)
    return gen, transform_model(model, partition), partition.p0, spec.steps


@pytest.mark.parametrize("seed", range(300))
def test_filtered_beliefs_stay_normalized(seed):
    gen = np.random.default_rng(seed)
    model = random_model(
        gen,
        num_states=int(gen.integers(1, 5)),
        num_actions=int(gen.integers(1, 3)),
        obs_dim=int(gen.integers(1, 3)),
        var_order=int(gen.integers(0, 3)),
    )
    b0 = Belief.from_vector(gen.dirichlet(np.ones(model.num_states)))
    traj = simulate(model, UniformRandomPolicy(), b0, steps=15, rng=RngStream(seed))
    for belief in filter_trajectory(model, traj, b0, on_impossible="reset"):
        vector = belief.vector
        assert np.all(vector >= 0.0)
        assert abs(vector.sum() - 1.0) <= 1e-9


@pytest.mark.parametrize("seed", range(200))
def test_partition_is_exhaustive_and_disjoint(seed):
    gen = np.random.default_rng(seed)
    model = random_model(gen, int(gen.integers(1, 7)), 1, goal=False)
    labels = [[a for a in ATOMS if gen.random() < 0.5] for _ in range(model.num_states)]
    model = model.model_copy(update={"labels": labels})
    spec = PctlSpec(
        comparator=Comparator.GE,
        bound=0.1,
        path=PathOperator.BOUNDED_UNTIL,
        phi1=_random_formula(gen),
        phi2=_random_formula(gen),
        steps=3,
    )
    partition = partition_states(model, spec)
    assert partition.check(model.num_states)
    for s, state_labels in enumerate(model.label_sets):
        assert (s in partition.s_yes) == spec.phi2.holds(state_labels)
        if s in partition.s_q:
            assert spec.phi1.holds(state_labels)
    absorbing = transform_model(model, partition)
    for s in partition.absorbing:
        np.testing.assert_array_equal(absorbing.transition_tensor[:, s, s], 1.0)


@pytest.mark.parametrize("seed", range(200))
def test_region_rows_sum_to_one(seed):
    gen, model, p0, _ = _random_instance(seed, obs_dim=int(seed % 2) + 1)
    bset = select_belief_points(model, "corners-plus-random", model.num_states + 1, RngStream(seed))
    alphas = pbvi(model, p0, 1, bset, rng=RngStream(seed))[-1]
    num_samples = int(gen.integers(1, 60))
    table = estimate_partition_table(model, bset, alphas, num_samples, RngStream(seed))
    assert table.table.shape == (len(bset), model.num_actions, model.num_states, len(alphas))
    np.testing.assert_array_equal(table.table.sum(axis=-1), num_samples)
    np.testing.assert_allclose(table.row_sums(), 1.0, atol=1e-9)


@pytest.mark.parametrize("seed", range(200))
def test_alpha_entries_are_probabilities(seed):
    _, model, p0, horizon = _random_instance(seed, obs_dim=int(seed % 2) + 1)
    bset = select_belief_points(model, "corners-plus-random", model.num_states + 2, RngStream(seed))
    alphas = pbvi(model, p0, horizon, bset, num_samples=40, rng=RngStream(seed))
    goal = model.num_states - 1
    for alpha_set in alphas:
        assert 1 <= len(alpha_set) <= len(bset)
        matrix = alpha_set.matrix
        assert np.all((matrix >= 0.0) & (matrix <= 1.0))
        # The absorbing goal keeps its terminal reward.
        np.testing.assert_array_equal(matrix[:, goal], 1.0)


@pytest.mark.parametrize("seed", range(100))
def test_values_grow_with_horizon(seed):
    _, model, p0, _ = _random_instance(seed)
    bset = select_belief_points(model, "corners-plus-random", model.num_states + 2, RngStream(seed))
    num_samples = 300
    alphas = pbvi(model, p0, 4, bset, num_samples=num_samples, rng=RngStream(seed))
    values = [values_at_points(a, bset.points) for a in alphas]
    for earlier, later in zip(values, values[1:]):
        assert np.all(later >= earlier - mc_tolerance(num_samples))


@pytest.mark.parametrize("seed", range(100))
def test_thread_count_does_not_change_plans(seed):
    _, model, p0, horizon = _random_instance(seed, obs_dim=2, var_order=1)
    bset = select_belief_points(model, "corners-plus-random", model.num_states + 3, RngStream(seed))
    runs = [
        pbvi(model, p0, horizon + 1, bset, num_samples=30, rng=RngStream(seed), threads=threads)
        for threads in (1, 3)
    ]
    for single, pooled in zip(*runs):
        np.testing.assert_array_equal(single.matrix, pooled.matrix)
        assert single.actions == pooled.actions


@pytest.mark.parametrize("seed", range(100))
def test_unit_beliefs_stay_below_mdp_values(seed):
    _, model, p0, horizon = _random_instance(seed, obs_dim=int(seed % 2) + 1)
    bset = select_belief_points(model, "corners-plus-random", model.num_states + 2, RngStream(seed))
    num_samples = 100
    alphas = pbvi(model, p0, horizon, bset, num_samples=num_samples, rng=RngStream(seed))[-1]
    upper = mdp_upper_bound(model, p0, horizon)
    slack = mc_tolerance(num_samples, horizon)
    for s in range(model.num_states):
        corner = np.eye(model.num_states)[s]
        assert value_at(alphas, corner) <= upper[s] + slack


def _labelled_instance(seed):
    gen = np.random.default_rng(seed)
    num_states = int(gen.integers(3, 6))
    model = random_model(gen, num_states, int(gen.integers(1, 3)), goal=False)
    labels = [[] for _ in range(num_states)]
    labels[-1] = ["goal"]
    labels[-2] = ["bad"]
    for s in range(num_states - 2):
        if gen.random() < 0.25:
            labels[s] = [["goal", "bad"][int(gen.integers(2))]]
    spec = PctlSpec(
        comparator=Comparator.LE,
        bound=0.5,
        path=PathOperator.BOUNDED_UNTIL,
        phi1=Not(Atom("bad")),
        phi2=Atom("goal"),
        steps=int(gen.integers(1, 4)),
    )
    return gen, model.model_copy(update={"labels": labels}), spec


@pytest.mark.parametrize("seed", range(100))
def test_absorbing_transform_matches_hand_built_model(seed):
    gen, model, spec = _labelled_instance(seed)
    partition = partition_states(model, spec)
    transformed = transform_model(model, partition)

    T = np.array(model.transitions, dtype=float)
    for a in range(model.num_actions):
        for s in partition.absorbing:
            T[a, s] = [1.0 if j == s else 0.0 for j in range(model.num_states)]
    by_hand = model.with_transitions(T)
    np.testing.assert_array_equal(transformed.transition_tensor, by_hand.transition_tensor)

    # Rows leaving absorbing states are overwritten, so rewriting them first changes nothing.
    rewired = np.array(model.transitions, dtype=float)
    for s in partition.absorbing:
        rewired[:, s] = gen.dirichlet(np.ones(model.num_states), size=model.num_actions)
    rewired_model = transform_model(model.with_transitions(rewired), partition)

    bset = select_belief_points(model, "corners-plus-random", model.num_states + 2, RngStream(seed))
    b0 = gen.dirichlet(np.ones(model.num_states))
    values = [
        value_at(pbvi(m, partition.p0, spec.steps, bset, num_samples=50, rng=RngStream(seed))[-1], b0)
        for m in (transformed, by_hand, rewired_model)
    ]
    assert values[0] == values[1] == values[2]


@pytest.mark.parametrize("seed", range(100))
def test_values_are_convex_in_the_belief(seed):
    gen, model, p0, horizon = _random_instance(seed, obs_dim=int(seed % 2) + 1)
    bset = select_belief_points(model, "corners-plus-random", model.num_states + 3, RngStream(seed))
    alphas = pbvi(model, p0, horizon, bset, num_samples=60, rng=RngStream(seed))[-1]
    for _ in range(10):
        left, right = gen.dirichlet(np.ones(model.num_states), size=2)
        weight = float(gen.uniform())
        mid = weight * left + (1.0 - weight) * right
        ends = weight * value_at(alphas, left) + (1.0 - weight) * value_at(alphas, right)
        value = value_at(alphas, mid)
        assert value <= ends + 1e-12
        assert value <= max(value_at(alphas, left), value_at(alphas, right)) + 1e-12
        for vector in alphas:
            chord = weight * vector.alpha @ left + (1.0 - weight) * vector.alpha @ right
            assert value >= chord - 1e-12
