from .utils import message
from evmech import corpus
from evmech.environment import UtilityProfile, parse_environment
from evmech.games import MessageTable, induce
from evmech.mechanisms.robust import BadEpsilon, CostExceedsBound, MissingCostBound, solve_params, synthesize_theorem3
from evmech.utils import PreconditionViolated
from fractions import Fraction
import copy
import itertools
import pytest


def test_solve_params():
    params = solve_params(Fraction(2), 3, 2, Fraction(1, 2))
    assert Fraction(25, 2) == params.cardinality
    assert Fraction(1) == params.disagreement
    assert Fraction(2) == params.support
    assert Fraction(33, 2) == params.refutation
    assert {"A": True, "C": True, "H": True, "J": True, "G": True} == params.inequalities()


@pytest.mark.parametrize(
    "cost_bound,states,agents,epsilon",
    itertools.product(
        (Fraction(1, 10), Fraction(1), Fraction(7, 2)),
        (1, 2, 4),
        (2, 3),
        (Fraction(1, 3), Fraction(1, 2), Fraction(9, 10)),
    ),
)
def test_inequalities_hold(cost_bound, states, agents, epsilon):
    params = solve_params(cost_bound, states, agents, epsilon)
    assert [] == params.violations()
    # Rewards for refuting and for self-refuting beat any evidence cost
    assert params.refutation_margin() > cost_bound
    assert params.self_refutation_margin() > cost_bound


@pytest.mark.parametrize("epsilon", (Fraction(0), Fraction(1), Fraction(-1, 2), Fraction(3, 2)))
def test_bad_epsilon(epsilon):
    with pytest.raises(BadEpsilon):
        solve_params(Fraction(1), 2, 2, epsilon)


def test_violated_inequalities_raise(monkeypatch):
    from evmech.mechanisms import robust

    monkeypatch.setattr(robust.RobustParams, "violations", lambda self: ["A", "G"])
    with pytest.raises(PreconditionViolated) as e:
        solve_params(Fraction(1), 2, 2)
    assert ["A", "G"] == e.value.details["violations"]
    assert "A, G" in e.value.message


def test_missing_cost_bound(env_a):
    with pytest.raises(MissingCostBound):
        synthesize_theorem3(env_a)


def test_cost_exceeds_bound():
    data = copy.deepcopy(corpus.ENV_A_COSTLY)
    data["cost_bound"] = "1/5"
    with pytest.raises(CostExceedsBound):
        synthesize_theorem3(parse_environment(data))


def test_robust_mechanism(env_a_costly):
    mech = synthesize_theorem3(env_a_costly)
    assert mech.costly
    assert Fraction(9, 2) == mech.cardinality
    assert Fraction(17, 2) == mech.refutation
    assert {
        "T1": "17/2",
        "T2": "2",
        "T3": "1",
        "T4": "9/2",
        "epsilon": "1/2",
        "cost_bound": "1",
        "states": 2,
        "agents": 2,
    } == mech.parameters()
    profile = (message(env_a_costly, 0, "s2", "{s2}"), message(env_a_costly, 1, "s1", "{s1,s2}"))
    assert (Fraction(17, 2), Fraction(-17, 2)) == mech.evaluate(profile).components["tau1"]
    for state in env_a_costly.states:
        assert not any(mech.evaluate(mech.truthful(state)).transfers)


def test_costs_enter_the_induced_game(env_a_costly):
    mech = synthesize_theorem3(env_a_costly)
    table = MessageTable(mech, env_a_costly, 1)
    game = induce(mech, env_a_costly, UtilityProfile.constant(env_a_costly), 1, table=table)
    truthful = table.truthful_index()
    assert (2, 1) == truthful
    assert Fraction(-1, 4) == game.payoffs[(0,) + truthful]
    assert Fraction(0) == game.payoffs[(1,) + truthful]
