"""
Cheapest evidence, challenges and evidence monotonicity for environments
where evidence is costly and costs vary with the state.

An agent challenges a claimed state ``s`` at the state ``t`` it knows to be
true by presenting evidence whose cost relative to the designated cheapest
article for ``s`` is lower at ``t`` than it would be at ``s``.
"""

import collections
from dataclasses import dataclass
from fractions import Fraction
import itertools
import logging
import math
import typing

from .environment import Article, Check, Environment
from .tracer import trace
from .utils import INFINITE, EvmechError, PreconditionViolated, documented, format_rational

log = logging.getLogger(__name__)

EMCheck = collections.namedtuple("EMCheck", ("holds", "witness", "selection", "complete"))


class NoFiniteCost(EvmechError):
    pass


class NotEvidenceMonotonic(EvmechError):
    pass


class NotEMStar(EvmechError):
    pass


@dataclass(frozen=True)
class CheapestSets:
    # sets[i][s]: articles of minimal cost for agent i at state s, in article order
    sets: typing.Tuple[typing.Tuple[typing.Tuple[Article, ...], ...], ...]
    minimum: typing.Tuple[typing.Tuple[Fraction, ...], ...]
    designated: typing.Tuple[typing.Tuple[Article, ...], ...]

    def is_cheapest(self, agent: int, state: int, article: Article) -> bool:
        return article in self.sets[agent][state]

    def with_selection(self, selection) -> "CheapestSets":
        for agent, row in enumerate(selection):
            for state, article in enumerate(row):
                if article not in self.sets[agent][state]:
                    raise PreconditionViolated(f"{article.label} is not cheapest for agent {agent + 1} at state {state}")
        return CheapestSets(self.sets, self.minimum, tuple(tuple(row) for row in selection))

    def largest(self) -> int:
        return max(len(articles) for row in self.sets for articles in row)

    def to_dict(self, env: Environment):
        return {
            str(agent + 1): {
                env.state_label(state): {
                    "cheapest": [article.label for article in self.sets[agent][state]],
                    "cost": format_rational(self.minimum[agent][state]),
                    "designated": self.designated[agent][state].label,
                }
                for state in env.states
            }
            for agent in range(env.agents)
        }


@documented
def cheapest_sets(env: Environment) -> CheapestSets:
    "Exact argmin of evidence cost per agent and state; the designated article is the first one."
    sets, minimum, designated = [], [], []
    for agent in range(env.agents):
        agent_sets, agent_minimum, agent_designated = [], [], []
        for state in env.states:
            costs = [(env.cost(agent, article, state), article) for article in env.universe(agent)]
            finite = [cost for cost, _ in costs if cost != INFINITE]
            if not finite:
                raise NoFiniteCost(f"Agent {agent + 1} can present nothing at {env.state_label(state)}")
            lowest = min(finite)
            cheapest = tuple(article for cost, article in costs if cost == lowest)
            agent_sets.append(cheapest)
            agent_minimum.append(lowest)
            agent_designated.append(cheapest[0])
        sets.append(tuple(agent_sets))
        minimum.append(tuple(agent_minimum))
        designated.append(tuple(agent_designated))
    return CheapestSets(tuple(sets), tuple(minimum), tuple(designated))


def challenge_slack(env: Environment, agent: int, article: Article, base: Article, claimed: int, at: int):
    """
    How much cheaper ``article`` is relative to ``base`` at ``at`` than at
    ``claimed``, or None when the agent cannot present it at ``at``.
    """
    cost_at = env.cost(agent, article, at)
    if cost_at == INFINITE:
        return None
    base_at = env.cost(agent, base, at)
    if base_at == INFINITE:
        return INFINITE
    claimed_gap = env.cost(agent, article, claimed) - env.cost(agent, base, claimed)
    return claimed_gap - (cost_at - base_at)


def _base(env, cheapest, agent, claimed, base):
    if base is not None:
        return base
    if cheapest is None:
        cheapest = cheapest_sets(env)
    return cheapest.designated[agent][claimed]


@documented
def can_challenge(env: Environment, agent: int, claimed: int, at: int, cheapest: CheapestSets = None, base: Article = None) -> bool:
    "True when some article the agent can present at ``at`` reverses its cost ranking against the designated article for ``claimed``."
    base = _base(env, cheapest, agent, claimed, base)
    for article in env.universe(agent):
        slack = challenge_slack(env, agent, article, base, claimed, at)
        if slack is not None and slack > 0:
            return True
    return False


@dataclass(frozen=True)
class Challenge:
    claimed: int
    challenger: int
    at: int
    evidence: Article
    reward: Fraction

    def holds(self, env: Environment, base: Article) -> bool:
        "Presenting the evidence for the reward is weakly unprofitable at the claim and strictly profitable at the challenger's state."
        agent = self.challenger
        at_claimed = env.cost(agent, base, self.claimed) <= env.cost(agent, self.evidence, self.claimed) - self.reward
        at_truth = env.cost(agent, base, self.at) > env.cost(agent, self.evidence, self.at) - self.reward
        return at_claimed and at_truth

    def to_dict(self, env: Environment):
        return {
            "claimed": env.state_label(self.claimed),
            "challenger": self.challenger + 1,
            "at": env.state_label(self.at),
            "evidence": self.evidence.label,
            "reward": format_rational(self.reward),
        }


def reward_midpoint(low, high) -> Fraction:
    "A reward strictly above ``low`` and at most ``high``, midway when both are finite."
    if low == -INFINITE and high == INFINITE:
        return Fraction(0)
    if high == INFINITE:
        return Fraction(low) + 1
    if low == -INFINITE:
        return Fraction(high) - 1
    return (Fraction(low) + Fraction(high)) / 2


@documented
def select_challenge(env: Environment, agent: int, claimed: int, at: int, cheapest: CheapestSets = None, base: Article = None) -> Challenge:
    "Picks the challenge evidence with the widest cost reversal and a reward inside the reversal interval."
    base = _base(env, cheapest, agent, claimed, base)
    best, best_slack = None, None
    for article in env.universe(agent):
        slack = challenge_slack(env, agent, article, base, claimed, at)
        if slack is None or not slack > 0:
            continue
        if best is None or slack > best_slack:
            best, best_slack = article, slack
    if best is None:
        raise PreconditionViolated(f"Agent {agent + 1} cannot challenge {env.state_label(claimed)} at {env.state_label(at)}")
    low = env.cost(agent, best, at) - env.cost(agent, base, at)
    high = env.cost(agent, best, claimed) - env.cost(agent, base, claimed)
    challenge = Challenge(claimed, agent, at, best, reward_midpoint(low, high))
    if not challenge.holds(env, base):
        raise PreconditionViolated("Selected challenge does not reverse the cost ranking")
    return challenge


class ChallengeTable:
    """
    Every possible challenge under a fixed designated selection:
    ``challenge(i, s, t)`` is agent i's challenge of claim s at state t.
    """

    def __init__(self, env: Environment, cheapest: CheapestSets):
        self.env = env
        self.cheapest = cheapest
        self._challenges = {}
        for agent in range(env.agents):
            for claimed in env.states:
                base = cheapest.designated[agent][claimed]
                for at in env.states:
                    if can_challenge(env, agent, claimed, at, base=base):
                        self._challenges[agent, claimed, at] = select_challenge(env, agent, claimed, at, base=base)

    def can(self, agent: int, claimed: int, at: int) -> bool:
        return (agent, claimed, at) in self._challenges

    def challenge(self, agent: int, claimed: int, at: int) -> typing.Optional[Challenge]:
        return self._challenges.get((agent, claimed, at))

    def is_valid(self, agent: int, claimed: int, at: int, article: Article) -> bool:
        "A valid challenge presents exactly the selected challenge evidence."
        challenge = self._challenges.get((agent, claimed, at))
        return challenge is not None and challenge.evidence == article

    def reward(self, agent: int, claimed: int, at: int) -> Fraction:
        return self._challenges[agent, claimed, at].reward

    def to_dict(self):
        return [challenge.to_dict(self.env) for _, challenge in sorted(self._challenges.items())]


def _outcome_pairs(env: Environment, state: int):
    return [other for other in env.states if env.outcome(other) != env.outcome(state)]


@documented
def is_evidence_monotonic_cp(env: Environment, cap: int = 10**6, cheapest: CheapestSets = None) -> EMCheck:
    "Searches cheapest selections for one under which every outcome change can be challenged by someone."
    cheapest = cheapest or cheapest_sets(env)
    combinations = sum(math.prod(len(cheapest.sets[agent][state]) for agent in range(env.agents)) for state in env.states)
    if combinations > cap:
        log.warning("Selection search needs %s combinations, over the cap of %s", combinations, cap)
        return EMCheck(None, None, None, False)
    selection = [[None] * len(env.states) for _ in range(env.agents)]
    with trace("selection-search", combinations=combinations):
        for state in env.states:
            others = _outcome_pairs(env, state)
            found = None
            first_failure = None
            for combination in itertools.product(*(cheapest.sets[agent][state] for agent in range(env.agents))):
                failing = next(
                    (
                        other
                        for other in others
                        if not any(can_challenge(env, agent, state, other, base=combination[agent]) for agent in range(env.agents))
                    ),
                    None,
                )
                if failing is None:
                    found = combination
                    break
                if first_failure is None:
                    first_failure = failing
            if found is None:
                return EMCheck(False, (state, first_failure), None, True)
            for agent, article in enumerate(found):
                selection[agent][state] = article
    return EMCheck(True, None, cheapest.with_selection(selection), True)


@documented
def is_evidence_monotonic_star(env: Environment, cheapest: CheapestSets = None) -> Check:
    "True when every outcome change moves some agent's cheapest set away from the claimed state's."
    cheapest = cheapest or cheapest_sets(env)
    for state in env.states:
        for other in _outcome_pairs(env, state):
            if not any(
                not set(cheapest.sets[agent][state]) <= set(cheapest.sets[agent][other]) for agent in range(env.agents)
            ):
                return Check(False, (state, other))
    return Check(True, None)


def lemma2_check(env: Environment, true_state: int, lie: int, cheapest: CheapestSets = None) -> bool:
    """
    When only one agent can challenge ``lie`` at ``true_state``, no other
    agent can challenge ``true_state`` at ``lie`` with its designated
    article for ``lie``.
    """
    cheapest = cheapest or cheapest_sets(env)
    challengers = [agent for agent in range(env.agents) if can_challenge(env, agent, lie, true_state, cheapest)]
    if len(challengers) != 1:
        raise PreconditionViolated(
            f"{len(challengers)} agents can challenge {env.state_label(lie)} at {env.state_label(true_state)}; exactly one is required",
        )
    for agent in range(env.agents):
        if agent == challengers[0]:
            continue
        article = cheapest.designated[agent][lie]
        slack = challenge_slack(env, agent, article, cheapest.designated[agent][true_state], true_state, lie)
        if slack is not None and slack > 0:
            return False
    return True
