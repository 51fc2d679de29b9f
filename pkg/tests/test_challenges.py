from .fixtures import SAME_CHEAPEST_ENV
from .utils import article, env_from
from evmech import corpus
from evmech.challenges import (
    ChallengeTable,
    can_challenge,
    cheapest_sets,
    is_evidence_monotonic_cp,
    is_evidence_monotonic_star,
    lemma2_check,
    reward_midpoint,
    select_challenge,
)
from evmech.utils import INFINITE, PreconditionViolated
from fractions import Fraction
import copy
import pytest

COSTLY_SEEDS = range(30)


def test_cheapest_sets_env_c(env_c):
    cheapest = cheapest_sets(env_c)
    s4 = env_c.states.index("s4")
    assert ["{s2,s4}", "{s3,s4}", "{s1,s2,s3,s4}"] == [a.label for a in cheapest.sets[0][s4]]
    assert Fraction(0) == cheapest.minimum[0][s4]
    assert "{s2,s4}" == cheapest.designated[0][s4].label
    assert ["{s1,s2,s3,s4}"] == [a.label for a in cheapest.sets[0][0]]


def test_cheapest_sets_env_e(env_e):
    cheapest = cheapest_sets(env_e)
    for agent in range(2):
        assert ["a"] == [a.label for a in cheapest.sets[agent][0]]
        assert ["b"] == [a.label for a in cheapest.sets[agent][1]]


def test_cannot_challenge_without_reversal(env_c):
    full = article(env_c, 0, "{s1,s2,s3,s4}")
    s1, s4 = env_c.states.index("s1"), env_c.states.index("s4")
    assert not can_challenge(env_c, 0, s4, s1, base=full)
    # Agent 2 holds the same article everywhere
    assert not can_challenge(env_c, 1, s4, s1)


@pytest.mark.parametrize("name", ("env_c", "env_e", "env_a_costly"))
def test_no_state_challenges_itself(name):
    env = corpus.fixture(name)
    for agent in range(env.agents):
        for state in env.states:
            assert not can_challenge(env, agent, state, state)


def test_select_challenge(env_e):
    challenge = select_challenge(env_e, 0, 0, 1)
    assert "b" == challenge.evidence.label
    assert Fraction(0) == challenge.reward
    assert challenge.holds(env_e, article(env_e, 0, "a"))
    assert {"claimed": "s1", "challenger": 1, "at": "s2", "evidence": "b", "reward": "0"} == challenge.to_dict(env_e)


def test_select_challenge_precondition(env_e):
    with pytest.raises(PreconditionViolated):
        select_challenge(env_e, 0, 0, 0)


@pytest.mark.parametrize(
    "low,high,expected",
    (
        (0, 4, Fraction(2)),
        (Fraction(-1, 2), Fraction(1, 2), Fraction(0)),
        (1, INFINITE, Fraction(2)),
        (-INFINITE, 3, Fraction(2)),
        (-INFINITE, INFINITE, Fraction(0)),
    ),
)
def test_reward_midpoint(low, high, expected):
    assert expected == reward_midpoint(low, high)


def test_env_c_is_not_evidence_monotonic(env_c):
    check = is_evidence_monotonic_cp(env_c)
    assert check.holds is False
    assert check.complete
    assert (3, 1) == check.witness
    assert check.selection is None


def test_env_e_is_evidence_monotonic(env_e):
    check = is_evidence_monotonic_cp(env_e)
    assert check.holds
    assert ["a", "b"] == [a.label for a in check.selection.designated[0]]
    assert is_evidence_monotonic_star(env_e).ok


def test_constant_scf_is_evidence_monotonic():
    data = copy.deepcopy(corpus.ENV_E)
    data["scf"] = {"s1": "a", "s2": "a"}
    env = env_from(data)
    assert is_evidence_monotonic_cp(env).holds
    assert is_evidence_monotonic_star(env).ok


def test_selection_cap(env_c):
    check = is_evidence_monotonic_cp(env_c, cap=1)
    assert check.holds is None
    assert not check.complete


def test_same_cheapest_sets_fail_em_star():
    check = is_evidence_monotonic_star(env_from(SAME_CHEAPEST_ENV))
    assert not check.ok
    assert (0, 1) == check.witness


def test_lemma2_precondition(env_e):
    # Both agents can challenge s1 at s2
    with pytest.raises(PreconditionViolated):
        lemma2_check(env_e, 1, 0)


@pytest.mark.parametrize("seed", COSTLY_SEEDS)
def test_lemma2_across_corpus(seed):
    env = corpus.random_costly_environment(seed)
    cheapest = cheapest_sets(env)
    for true_state in env.states:
        for lie in env.states:
            challengers = [agent for agent in range(env.agents) if can_challenge(env, agent, lie, true_state, cheapest)]
            if len(challengers) == 1:
                assert lemma2_check(env, true_state, lie, cheapest)


@pytest.mark.parametrize("seed", COSTLY_SEEDS)
def test_challenge_table_challenges_hold(seed):
    env = corpus.random_costly_environment(seed)
    cheapest = cheapest_sets(env)
    table = ChallengeTable(env, cheapest)
    for agent in range(env.agents):
        for claimed in env.states:
            for at in env.states:
                challenge = table.challenge(agent, claimed, at)
                if challenge is None:
                    continue
                assert claimed != at
                assert challenge.holds(env, cheapest.designated[agent][claimed])
                assert table.is_valid(agent, claimed, at, challenge.evidence)


@pytest.mark.parametrize("seed", COSTLY_SEEDS)
def test_em_star_implies_em_cp_with_unique_cheapest(seed):
    env = corpus.random_costly_environment(seed)
    cheapest = cheapest_sets(env)
    if cheapest.largest() > 1 or not is_evidence_monotonic_star(env, cheapest).ok:
        return
    assert is_evidence_monotonic_cp(env, cheapest=cheapest).holds
