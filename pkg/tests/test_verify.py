from evmech import corpus
from evmech.app import Workbench
from evmech.games import CERTIFIED_ALL_V, FAILS, IMPLEMENTS, INCONCLUSIVE, verify_implementation
from evmech.mechanisms.costly import synthesize_em_star, synthesize_theorem4
from evmech.mechanisms.hard import synthesize_budget_balanced, synthesize_small_transfers, synthesize_theorem1
from evmech.mechanisms.renegotiation import synthesize_rp_mechanism
from evmech.mechanisms.robust import synthesize_theorem3
from evmech.utils import StartupError
from fractions import Fraction
import pytest

PASSING = (IMPLEMENTS, CERTIFIED_ALL_V)


def test_theorem1_implements(env_a):
    report = verify_implementation(synthesize_theorem1(env_a), env_a, samples=2)
    assert report.verdict in PASSING
    assert 0 == report.exit_code
    assert ["s1", "s2"] == [env_a.state_label(result.state) for result in report.states]
    for result in report.states:
        # Constant profile plus the samples
        assert 3 == result.profiles_checked
        assert result.pure_equilibria >= 3


def test_report_to_dict(env_a):
    report = verify_implementation(synthesize_theorem1(env_a), env_a, state=1, samples=1, mixed=False)
    data = report.to_dict()
    assert {"variant", "verdict", "samples", "seed", "states", "notes"} == set(data)
    assert "theorem1" == data["variant"]
    assert ["s2"] == [state["state"] for state in data["states"]]
    assert "mixed equilibria not enumerated (disabled)" in data["states"][0]["notes"]


def test_indistinguishable_states_fail(env_b):
    report = verify_implementation(synthesize_theorem1(env_b, force=True), env_b, samples=1)
    assert FAILS == report.verdict
    assert 1 == report.exit_code
    assert {"indistinguishable": ["s1", "s2"], "outcomes": ["a", "b"]} == report.witness


def test_profile_cap_is_inconclusive(env_a):
    report = verify_implementation(synthesize_theorem1(env_a), env_a, state=1, samples=1, profile_cap=1)
    assert INCONCLUSIVE == report.verdict
    assert 2 == report.exit_code


def test_budget_balanced_implements(env_3agents):
    report = verify_implementation(synthesize_budget_balanced(env_3agents), env_3agents, samples=1)
    assert report.verdict in PASSING


def test_small_transfers_implement(env_3agents):
    mech = synthesize_small_transfers(env_3agents, Fraction(4), rounds=2)
    report = verify_implementation(mech, env_3agents, state=0, samples=1, mixed=False)
    assert report.verdict in PASSING


def test_robust_mechanism_implements(env_a_costly):
    report = verify_implementation(synthesize_theorem3(env_a_costly), env_a_costly, samples=2)
    assert report.verdict in PASSING


def test_challenge_mechanism_implements(env_e):
    report = verify_implementation(synthesize_theorem4(env_e), env_e, samples=2, mixed=False)
    assert report.verdict in PASSING


def test_em_star_mechanism_implements_in_mixed_strategies(env_e):
    report = verify_implementation(synthesize_em_star(env_e, Fraction(1, 100)), env_e, samples=2)
    assert report.verdict in PASSING


def test_rp_mechanism_implements(env_d_modified):
    report = verify_implementation(synthesize_rp_mechanism(env_d_modified), env_d_modified, samples=2, mixed=False)
    assert report.verdict in PASSING


@pytest.mark.timeout(600)
@pytest.mark.parametrize("seed", range(20))
def test_theorem1_on_random_environments(seed):
    env = corpus.random_environment(seed)
    report = verify_implementation(synthesize_theorem1(env), env, samples=20, mixed=True)
    assert report.verdict in PASSING, report.to_dict()


@pytest.mark.timeout(600)
def test_theorem1_on_the_hard_projection_of_a_costly_environment(env_c):
    env = corpus.hard_projection(env_c)
    report = verify_implementation(synthesize_theorem1(env), env, samples=20, mixed=True)
    assert report.verdict in PASSING, report.to_dict()


@pytest.mark.timeout(600)
def test_theorem1_with_three_agents(env_3agents):
    report = verify_implementation(synthesize_theorem1(env_3agents), env_3agents, samples=20, mixed=True)
    assert report.verdict in PASSING, report.to_dict()


def test_workbench_settings(env_a):
    app = Workbench({"settings": {"samples": 1}}, {"mixed": False})
    assert 1 == app.setting("samples")
    assert not app.setting("mixed")
    assert Fraction(1, 2) == app.rational_setting("epsilon")
    report = app.verify(env_a, app.synthesize(env_a, "theorem1"))
    assert report.verdict in PASSING
    assert 1 == report.samples


def test_workbench_rejects_unknown_settings():
    with pytest.raises(StartupError):
        Workbench({"settings": {"nope": 1}})
    with pytest.raises(StartupError):
        Workbench({}, {"nope": 1})
