import pytest
import numpy as np

from varpomdp.pctl import check, parse_spec, partition_states, transform_model
from varpomdp.planner import mdp_upper_bound
from varpomdp.schemas import (
    And,
    Atom,
    Belief,
    Comparator,
    FALSE,
    Not,
    PathOperator,
    PlannerConfig,
    StatePartition,
    TrueFormula,
)
from varpomdp.simulator import THREE_STATE_BELIEF_POINTS, THREE_STATE_SPEC, three_state_fail_model
from varpomdp.utils.exceptions import PctlSyntaxError, UnsupportedFormulaError
from tests.helpers import CLOSE_IN_VALUE, mc_tolerance, scalar_model


def test_parse_example_spec():
    spec = parse_spec(THREE_STATE_SPEC)
    assert spec.comparator == Comparator.LE
    assert spec.bound == 0.5
    assert spec.path == PathOperator.BOUNDED_UNTIL
    assert spec.steps == 4
    assert spec.phi1 == TrueFormula()
    assert spec.phi2 == Atom("Fail")


def test_parse_negation_and_whitespace():
    spec = parse_spec('P>=0.9[!"danger"U<=10"goal"]')
    assert spec.comparator == Comparator.GE
    assert spec.phi1 == Not(Atom("danger"))
    assert spec.phi2 == Atom("goal")
    assert spec.steps == 10


def test_parse_conjunction_and_parentheses():
    spec = parse_spec('P < 0.25 [ ("a" & !"b") & true U<=0 false ]')
    assert spec.comparator == Comparator.LT
    assert spec.phi1 == And(And(Atom("a"), Not(Atom("b"))), TrueFormula())
    assert spec.phi2 == FALSE
    assert spec.steps == 0


def test_parse_next_and_unbounded_until():
    assert parse_spec('P>0.1 [ X "goal" ]').path == PathOperator.NEXT
    assert parse_spec('P<=1 [ true U "goal" ]').path == PathOperator.UNTIL


@pytest.mark.parametrize(
    "text",
    [
        'P<=1.5 [ true U<=4 "Fail" ]',
        'P<=0.5 [ true U<=-1 "Fail" ]',
        'P<=0.5 [ true U<=4 "Fail"',
        'P<=0.5 [ true U<=4 P<=0.2 [ X "Fail" ] ]',
        'Q<=0.5 [ true U<=4 "Fail" ]',
        "",
    ],
)
def test_parse_errors(text):
    with pytest.raises(PctlSyntaxError) as info:
        parse_spec(text)
    assert 0 <= info.value.position <= len(text)


def test_parse_error_positions():
    with pytest.raises(PctlSyntaxError) as info:
        parse_spec('P<=1.5 [ true U<=4 "Fail" ]')
    assert info.value.position == 3
    with pytest.raises(PctlSyntaxError) as info:
        parse_spec('P<=0.5 [ true U<=4 P<=0.2 [ X "Fail" ] ]')
    assert info.value.position == 19


def test_spec_round_trips_through_str():
    spec = parse_spec('P>=0.9 [ !"danger" U<=10 "goal" ]')
    assert parse_spec(str(spec)) == spec


def test_partition_example_model():
    partition = partition_states(three_state_fail_model(), parse_spec(THREE_STATE_SPEC))
    assert partition.s_yes == {2}
    assert partition.s_no == frozenset()
    assert partition.s_q == {0, 1}
    np.testing.assert_array_equal(partition.p0, [0.0, 0.0, 1.0])
    assert partition.check(3)


def test_partition_trivial_formulas():
    model = three_state_fail_model()
    everything = partition_states(model, parse_spec("P<=0.5 [ true U<=2 true ]"))
    assert everything.s_yes == {0, 1, 2} and not everything.s_no
    nothing = partition_states(model, parse_spec('P<=0.5 [ false U<=2 "absent" ]'))
    assert nothing.s_no == {0, 1, 2} and not nothing.s_yes


def test_partition_rejects_other_paths():
    with pytest.raises(UnsupportedFormulaError):
        partition_states(three_state_fail_model(), parse_spec('P<=0.5 [ X "Fail" ]'))


def test_transform_leaves_example_model_unchanged():
    model = three_state_fail_model()
    partition = partition_states(model, parse_spec(THREE_STATE_SPEC))
    assert transform_model(model, partition) == model


def test_transform_makes_s_no_absorbing():
    transitions = [[[0.5, 0.5], [0.4, 0.6]], [[0.1, 0.9], [0.7, 0.3]]]
    model = scalar_model([1.0, 2.0], transitions=transitions)
    partition = StatePartition(
        s_yes=frozenset(), s_no=frozenset({1}), s_q=frozenset({0}), p0=np.zeros(2)
    )
    out = transform_model(model, partition)
    for a in range(2):
        np.testing.assert_array_equal(out.transition_tensor[a, 1], [0.0, 1.0])
        np.testing.assert_array_equal(out.transition_tensor[a, 0], transitions[a][0])
    assert transform_model(out, partition) == out
    # The input model is untouched.
    assert model.transitions == transitions


@pytest.mark.parametrize("seed", range(6))
def test_example_check_is_violated(seed):
    model = three_state_fail_model()
    config = PlannerConfig(mc_samples=1000, seed=seed)
    result = check(model, Belief.unit(3, 0), parse_spec(THREE_STATE_SPEC), config, THREE_STATE_BELIEF_POINTS)
    bound = mdp_upper_bound(model, result.partition.p0, 4)[0]
    assert bound == CLOSE_IN_VALUE(0.6839, 1e-4)
    assert not result.satisfied
    assert 0.5 < result.p_max <= bound + mc_tolerance(1000, 4)

    final = result.final_alphas
    assert len(final) == 5
    for vector in final:
        assert vector.alpha[2] == 1.0
        assert np.all((vector.alpha >= 0.0) & (vector.alpha <= 1.0))
    summary = result.asdict()
    assert summary["horizon"] == 4
    assert len(summary["chosen_actions"]) == 5


def test_check_from_goal_state():
    result = check(
        three_state_fail_model(),
        Belief.unit(3, 2),
        parse_spec(THREE_STATE_SPEC),
        PlannerConfig(mc_samples=200, seed=1),
        THREE_STATE_BELIEF_POINTS,
    )
    assert result.p_max == 1.0
    assert not result.satisfied


def test_check_horizon_zero():
    result = check(
        three_state_fail_model(),
        Belief.unit(3, 0),
        parse_spec('P<=0.5 [ true U<=0 "Fail" ]'),
        PlannerConfig(seed=1),
        THREE_STATE_BELIEF_POINTS,
    )
    assert result.p_max == 0.0
    assert result.satisfied


def test_p_max_monotone_in_horizon():
    model = three_state_fail_model()
    b0 = Belief.unit(3, 0)
    values = [
        check(
            model,
            b0,
            parse_spec(f'P<=0.5 [ true U<={k} "Fail" ]'),
            PlannerConfig(mc_samples=500, seed=4),
            THREE_STATE_BELIEF_POINTS,
        ).p_max
        for k in range(6)
    ]
    for earlier, later in zip(values, values[1:]):
        assert later >= earlier - mc_tolerance(500)
    assert values[1] == CLOSE_IN_VALUE(0.2, 1e-12)


@pytest.mark.parametrize("comparator, expected", [("<=", False), ("<", False), (">=", True), (">", True)])
def test_comparators_use_maximal_probability(comparator, expected):
    spec = parse_spec(f'P{comparator}0.5 [ true U<=4 "Fail" ]')
    result = check(
        three_state_fail_model(),
        Belief.unit(3, 0),
        spec,
        PlannerConfig(mc_samples=500, seed=2),
        THREE_STATE_BELIEF_POINTS,
    )
    assert result.satisfied == expected


def test_check_without_points_uses_corners():
    result = check(
        three_state_fail_model(),
        Belief.uniform(3),
        parse_spec(THREE_STATE_SPEC),
        PlannerConfig(mc_samples=200, seed=3, num_points=6, belief_strategy="corners-plus-random"),
    )
    assert len(result.belief_set) == 6
    assert 0.0 <= result.p_max <= 1.0


def test_check_rejects_next():
    with pytest.raises(UnsupportedFormulaError):
        check(
            three_state_fail_model(),
            Belief.unit(3, 0),
            parse_spec('P<=0.5 [ X "Fail" ]'),
            PlannerConfig(seed=0),
        )
