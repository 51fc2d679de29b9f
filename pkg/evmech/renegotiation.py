"""
Pairwise refutation conditions for two-agent implementation that survives
efficient renegotiation, and the utility profiles that break every
balanced mechanism when they fail.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import typing

from .environment import Environment, UtilityProfile
from .lies import refutable_lies
from .mechanisms import NotTwoAgents
from .utils import PreconditionViolated, documented, format_rational

COND_A = "COND_A"
COND_B = "COND_B"
FAIL = "FAIL"

# Failure cases: refutations by different agents in the two directions, a
# lone refuter one way with none the other way, and no refutation at all
CASE_CROSS = "c"
CASE_ONE_SIDED = "d"
CASE_NONMEASURABLE = "nonmeasurable"


@dataclass(frozen=True)
class PairVerdict:
    first: int
    second: int
    verdict: str
    # Agents refuting ``second`` at ``first``, and ``first`` at ``second``
    forward: typing.FrozenSet[int]
    backward: typing.FrozenSet[int]
    case: typing.Optional[str] = None
    # (s, s') such that both agents refute s' at s, for COND_B
    orientation: typing.Optional[typing.Tuple[int, int]] = None

    def to_dict(self, env: Environment):
        data = {
            "pair": [env.state_label(self.first), env.state_label(self.second)],
            "verdict": self.verdict,
            "refuters": {
                "forward": sorted(agent + 1 for agent in self.forward),
                "backward": sorted(agent + 1 for agent in self.backward),
            },
        }
        if self.case is not None:
            data["case"] = self.case
        if self.orientation is not None:
            data["orientation"] = [env.state_label(state) for state in self.orientation]
        return data


@dataclass
class RPReport:
    env: Environment
    pairs: typing.List[PairVerdict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(pair.verdict != FAIL for pair in self.pairs)

    def failures(self) -> typing.List[PairVerdict]:
        return [pair for pair in self.pairs if pair.verdict == FAIL]

    def to_dict(self):
        return {"ok": self.ok, "pairs": [pair.to_dict(self.env) for pair in self.pairs]}


def _refuters(env: Environment, at: int, lie: int) -> typing.FrozenSet[int]:
    return frozenset(agent for agent in range(env.agents) if lie in refutable_lies(env, agent, at))


def pair_verdict(env: Environment, first: int, second: int) -> PairVerdict:
    forward = _refuters(env, first, second)
    backward = _refuters(env, second, first)
    both = frozenset(range(env.agents))
    if forward & backward:
        return PairVerdict(first, second, COND_A, forward, backward)
    if forward == both and not backward:
        return PairVerdict(first, second, COND_B, forward, backward, orientation=(first, second))
    if backward == both and not forward:
        return PairVerdict(first, second, COND_B, forward, backward, orientation=(second, first))
    if not forward and not backward:
        case = CASE_NONMEASURABLE
    elif forward and backward:
        case = CASE_CROSS
    else:
        case = CASE_ONE_SIDED
    return PairVerdict(first, second, FAIL, forward, backward, case=case)


@documented
def check_rp_conditions(env: Environment) -> RPReport:
    "Classifies every pair of states with different social choices by who can refute whom in each direction."
    if env.agents != 2:
        raise NotTwoAgents("Renegotiation conditions are defined for two agents")
    report = RPReport(env)
    for first, second in itertools.combinations(env.states, 2):
        if env.outcome(first) == env.outcome(second):
            continue
        report.pairs.append(pair_verdict(env, first, second))
    return report


@documented
def build_adversarial_profile(env: Environment, pair: typing.Tuple[int, int], case: str = None, eta=Fraction(1, 10)) -> UtilityProfile:
    """
    State-independent utilities for a failing pair ``(s, s')``: the agent
    who cannot refute in the direction where a refutation exists values the
    social choice at that state at ``1 - eta`` and the other one at 0; the
    refuter has the mirrored values. Every other outcome splits ``1 - eta``
    evenly, so total welfare is ``1 - eta`` everywhere.
    """
    eta = Fraction(eta)
    if not 0 < eta <= 1:
        raise PreconditionViolated("eta must lie in (0, 1]")
    verdict = pair_verdict(env, *pair)
    if verdict.verdict != FAIL:
        raise PreconditionViolated(f"Pair {[env.state_label(s) for s in pair]} satisfies {verdict.verdict}")
    if case is not None and case != verdict.case:
        raise PreconditionViolated(f"Pair fails with case {verdict.case}, not {case}")
    if verdict.forward:
        state, other, refuters = verdict.first, verdict.second, verdict.forward
    else:
        state, other, refuters = verdict.second, verdict.first, verdict.backward
    bystander = min(agent for agent in range(env.agents) if agent not in refuters)
    refuter = 1 - bystander
    top = 1 - eta
    tables = [{outcome: top / 2 for outcome in env.outcomes} for _ in range(env.agents)]
    tables[bystander][env.outcome(state)] = top
    tables[bystander][env.outcome(other)] = Fraction(0)
    tables[refuter][env.outcome(other)] = top
    tables[refuter][env.outcome(state)] = Fraction(0)
    label = f"adversarial:{env.state_label(verdict.first)},{env.state_label(verdict.second)}"
    return UtilityProfile.state_independent(env, tables, label=label)


@dataclass(frozen=True)
class Inefficiency:
    state: int
    allocation: dict
    reason: str

    def to_dict(self, env: Environment):
        return {"state": env.state_label(self.state), "allocation": self.allocation, "reason": self.reason}


@documented
def reachable_inefficiencies(mech, env: Environment, v: UtilityProfile, profile_cap: int = 10**6) -> typing.List[Inefficiency]:
    """
    Allocations reached in pure equilibrium that some reallocation would
    improve for everyone: transfers that do not sum to zero, or an outcome
    lottery with less total utility than the best outcome at that state.
    """
    from .games import induce, pure_nash

    found = []
    for state in env.states:
        game = induce(mech, env, v, state, profile_cap=profile_cap)
        best = max(sum(v.value(agent, outcome, state) for agent in range(env.agents)) for outcome in env.outcomes)
        for index in pure_nash(game).pure:
            evaluation = game.table.evaluations[index]
            allocation = game.table.describe(index)
            total = sum(evaluation.transfers, Fraction(0))
            if total:
                found.append(Inefficiency(state, allocation, f"transfers sum to {format_rational(total)}"))
                continue
            welfare = sum(v.expected(agent, evaluation.outcome, state) for agent in range(env.agents))
            if welfare < best:
                found.append(Inefficiency(state, allocation, f"welfare {format_rational(welfare)} below {format_rational(best)}"))
    return found
