"""
Mechanisms for evidence whose cost varies with the state: challenge
mechanisms for two or more agents and the cheapest-evidence mechanism.
"""

from fractions import Fraction

from ..challenges import (
    ChallengeTable,
    CheapestSets,
    NotEMStar,
    NotEvidenceMonotonic,
    cheapest_sets,
    is_evidence_monotonic_cp,
    is_evidence_monotonic_star,
)
from ..environment import Environment
from ..hookspecs import hookimpl
from ..utils import INFINITE, format_rational, parse_rational
from . import DirectMessage, Mechanism, TooManyAgents, Variant, point, zeros


class ChallengeMechanism(Mechanism):
    """
    Two agents. Agent 2's challenges of agent 1's claim take priority and
    keep agent 1's claim as the outcome; agent 1's challenge of agent 2's
    claim switches the outcome when agent 2 could not have challenged.
    """

    variant = "theorem4"
    costly = True
    cheapest_on_path = True
    component_labels = {"tau1": "fine for being challenged", "tau2": "disagreement without a challenge", "tau3": "challenge reward"}

    def __init__(self, env: Environment, table: ChallengeTable):
        super().__init__(env)
        self.table = table
        self.cheapest = table.cheapest

    def _challenges(self, profile):
        (s1, e1), (s2, e2) = ((message.state, message.article) for message in profile)
        second = self.table.is_valid(1, s1, s2, e2)
        first = not second and not self.table.can(1, s1, s2) and self.table.is_valid(0, s2, s1, e1)
        return first, second

    def outcome(self, profile):
        first, _ = self._challenges(profile)
        return point(self.env.outcome(profile[1].state if first else profile[0].state))

    def components(self, profile):
        first, second = self._challenges(profile)
        challenged = [Fraction(-1) if second else Fraction(0), Fraction(0)]
        disagreement = zeros(2)
        for i, j in ((0, 1), (1, 0)):
            mine, theirs = profile[i], profile[j]
            disagrees = mine.state != theirs.state or mine.article != self.cheapest.designated[i][theirs.state]
            if disagrees and not self.table.is_valid(i, theirs.state, mine.state, mine.article):
                disagreement[i] = Fraction(-1)
        rewards = zeros(2)
        if first:
            rewards[0] = self.table.reward(0, profile[1].state, profile[0].state)
        if second:
            rewards[1] = self.table.reward(1, profile[0].state, profile[1].state)
        return {"tau1": tuple(challenged), "tau2": tuple(disagreement), "tau3": tuple(rewards)}

    def truthful(self, state):
        return tuple(DirectMessage(state, self.cheapest.designated[agent][state]) for agent in range(self.env.agents))

    def parameters(self):
        return {"challenges": self.table.to_dict(), "cheapest": self.cheapest.to_dict(self.env)}


class MultiChallengeMechanism(ChallengeMechanism):
    """
    Any number of agents. Valid challenges of agent 1's claim by the others
    come first; agent 1 may challenge a claim all others agree on.
    """

    variant = "theorem4multi"
    component_labels = {
        "tau1": "fine per valid challenger",
        "tau2": "agent 1 disagreeing with unanimous others",
        "tau3": "disagreement with the first challenger or agent 1",
        "pay": "challenge reward",
    }

    def _analysis(self, profile):
        s1, e1 = profile[0].state, profile[0].article
        challengers = [i for i in range(1, self.env.agents) if self.table.is_valid(i, s1, profile[i].state, profile[i].article)]
        others = {profile[i].state for i in range(1, self.env.agents)}
        agreed = next(iter(others)) if len(others) == 1 else None
        first_challenges = agreed is not None and self.table.is_valid(0, agreed, s1, e1)
        honoured = not challengers and first_challenges
        return challengers, agreed, first_challenges, honoured

    def outcome(self, profile):
        _, agreed, _, honoured = self._analysis(profile)
        return point(self.env.outcome(agreed if honoured else profile[0].state))

    def components(self, profile):
        agents = self.env.agents
        challengers, agreed, first_challenges, honoured = self._analysis(profile)
        s1 = profile[0].state
        challenged = zeros(agents)
        challenged[0] = Fraction(-len(challengers))
        lonely = zeros(agents)
        if agreed is not None and not first_challenges:
            if (profile[0].state, profile[0].article) != (agreed, self.cheapest.designated[0][agreed]):
                lonely[0] = Fraction(-1)
        disagreement = zeros(agents)
        for i in range(1, agents):
            if challengers:
                if profile[i].state != profile[challengers[0]].state:
                    disagreement[i] = Fraction(-1)
            elif (profile[i].state, profile[i].article) != (s1, self.cheapest.designated[i][s1]):
                disagreement[i] = Fraction(-1)
        pay = zeros(agents)
        if honoured:
            pay[0] = self.table.reward(0, agreed, s1)
        for i in challengers:
            pay[i] = self.table.reward(i, s1, profile[i].state)
        return {"tau1": tuple(challenged), "tau2": tuple(lonely), "tau3": tuple(disagreement), "pay": tuple(pay)}


class CheapestEvidenceMechanism(Mechanism):
    """
    Outcome follows agent 1's claim; transfers push every agent towards the
    cheapest evidence at the claims of others and towards claims implying
    the smallest cheapest sets.
    """

    variant = "emstar"
    costly = True
    cheapest_on_path = True
    component_labels = {
        "tau1": "others not presenting cheapest evidence for the claim",
        "tau2": "size of cheapest sets implied for others",
        "tau3": "own cheapest set differs across claims",
        "tau4": "reward for evidence outside the cheapest set at others' claims",
    }

    def __init__(self, env: Environment, cheapest: CheapestSets, reward_bound):
        super().__init__(env)
        self.cheapest = cheapest
        self.reward_bound = Fraction(reward_bound)
        self.gap = cheapest_gap(env, cheapest)
        self.largest = cheapest.largest()
        smallest = self.reward_bound if self.gap == INFINITE else min(self.gap, self.reward_bound)
        self.reward = smallest / (2 * env.agents)

    def outcome(self, profile):
        return point(self.env.outcome(profile[0].state))

    def components(self, profile):
        agents = self.env.agents
        sets = self.cheapest.sets
        claims = [message.state for message in profile]
        fine = zeros(agents)
        implied = zeros(agents)
        own = zeros(agents)
        reward = zeros(agents)
        for i in range(agents):
            others = [j for j in range(agents) if j != i]
            if any(profile[j].article not in sets[j][claims[i]] for j in others):
                fine[i] = Fraction(-2 * self.largest * agents)
            for j in others:
                if claims[i] != claims[j]:
                    implied[i] -= 2 * len(sets[j][claims[i]])
                if profile[i].article not in sets[i][claims[j]]:
                    reward[i] += self.reward
            if any(set(sets[i][claims[i]]) != set(sets[i][claims[j]]) for j in others):
                own[i] = Fraction(-1)
        return {"tau1": tuple(fine), "tau2": tuple(implied), "tau3": tuple(own), "tau4": tuple(reward)}

    def truthful(self, state):
        return tuple(DirectMessage(state, self.cheapest.designated[agent][state]) for agent in range(self.env.agents))

    def parameters(self):
        return {
            "gap": "inf" if self.gap == INFINITE else format_rational(self.gap),
            "largest_cheapest_set": self.largest,
            "reward_bound": format_rational(self.reward_bound),
            "reward": format_rational(self.reward),
        }


def cheapest_gap(env: Environment, cheapest: CheapestSets):
    "Smallest extra cost of a presentable non-cheapest article over the cheapest one, anywhere."
    gap = INFINITE
    for agent in range(env.agents):
        for state in env.states:
            for article in env.universe(agent):
                cost = env.cost(agent, article, state)
                if cost == INFINITE or article in cheapest.sets[agent][state]:
                    continue
                gap = min(gap, cost - cheapest.minimum[agent][state])
    return gap


def _monotonic_table(env: Environment, cap: int, force: bool) -> ChallengeTable:
    check = is_evidence_monotonic_cp(env, cap=cap)
    if check.holds:
        return ChallengeTable(env, check.selection)
    if not force:
        if check.holds is None:
            raise NotEvidenceMonotonic("Selection search exceeded its cap", complete=False)
        state, other = check.witness
        raise NotEvidenceMonotonic(
            f"No agent can challenge {env.state_label(state)} at {env.state_label(other)}",
            pair=[env.state_label(state), env.state_label(other)],
        )
    return ChallengeTable(env, cheapest_sets(env))


def synthesize_theorem4(env: Environment, cap: int = 10**6, force=False) -> ChallengeMechanism:
    if env.agents != 2:
        raise TooManyAgents("The two-agent challenge mechanism needs exactly two agents; use theorem4multi")
    return ChallengeMechanism(env, _monotonic_table(env, cap, force))


def synthesize_theorem4_multiagent(env: Environment, cap: int = 10**6, force=False) -> MultiChallengeMechanism:
    return MultiChallengeMechanism(env, _monotonic_table(env, cap, force))


def synthesize_em_star(env: Environment, reward_bound, force=False) -> CheapestEvidenceMechanism:
    reward_bound = Fraction(reward_bound)
    if reward_bound <= 0:
        raise NotEMStar("The reward bound must be positive")
    cheapest = cheapest_sets(env)
    if not force:
        check = is_evidence_monotonic_star(env, cheapest)
        if not check.ok:
            state, other = check.witness
            raise NotEMStar(
                f"Cheapest sets do not separate {env.state_label(state)} from {env.state_label(other)}",
                pair=[env.state_label(state), env.state_label(other)],
            )
    return CheapestEvidenceMechanism(env, cheapest, reward_bound)


@hookimpl
def register_mechanism_variants():
    return [
        Variant(
            "theorem4",
            lambda env, argument, settings: synthesize_theorem4(env, cap=settings.get("selection_cap", 10**6), force=settings.get("force", False)),
            "Two-agent challenge mechanism for state-dependent costs",
        ),
        Variant(
            "theorem4multi",
            lambda env, argument, settings: synthesize_theorem4_multiagent(
                env, cap=settings.get("selection_cap", 10**6), force=settings.get("force", False)
            ),
            "Challenge mechanism for any number of agents",
        ),
        Variant(
            "emstar",
            lambda env, argument, settings: synthesize_em_star(env, parse_rational(argument or "1/100"), force=settings.get("force", False)),
            "Cheapest-evidence mechanism: emstar[:<reward bound>]",
        ),
    ]
