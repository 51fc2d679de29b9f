"""
Mechanisms for hard evidence: the refutation and support mechanism, its
budget-balanced form for three or more agents and the multi-round
augmentation that keeps every transfer below a given bound.
"""

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
import itertools
import math
import typing

from ..environment import Environment, are_equivalent, require_valid, supports, tightest_evidence, tightest_masks
from ..hookspecs import hookimpl
from ..utils import EvmechError, documented, format_rational, parse_rational
from . import DirectMessage, Mechanism, MessageOutOfDomain, TooFewAgents, Variant, mix, point, uniform, zeros


class InfeasibleBound(EvmechError):
    pass


class RefutationMechanism(Mechanism):
    """
    Outcome follows agent 1's claim. Transfers reward refuting another
    agent's claim, fine claims some agent cannot support, fine claims that
    imply a different tightest article than other claims do, and charge
    every agent for the size of the presented article whenever some claim is
    unsupported.
    """

    variant = "theorem1"
    component_labels = {"tau1": "refutation", "tau2": "unsupported claim", "tau3": "disagreement", "tau4": "evidence size"}

    def __init__(self, env: Environment, refutation=None, support=None, disagreement=1, cardinality=1):
        super().__init__(env)
        agents = env.agents
        self.refutation = Fraction(2 * agents + 1) if refutation is None else Fraction(refutation)
        self.support = Fraction(agents) if support is None else Fraction(support)
        self.disagreement = Fraction(disagreement)
        self.cardinality = Fraction(cardinality)
        self.tightest = tightest_masks(env)

    def outcome(self, profile):
        return point(self.env.outcome(profile[0].state))

    def support_table(self, profile) -> typing.List[typing.List[bool]]:
        "``table[j][i]`` is True when agent j's article supports agent i's claim."
        return [
            [supports(profile[j].article, self.tightest[j][profile[i].state]) for i in range(self.env.agents)]
            for j in range(self.env.agents)
        ]

    def base_components(self, profile, table):
        agents = self.env.agents
        claims = [message.state for message in profile]
        refutation = zeros(agents)
        for i in range(agents):
            for j in range(i + 1, agents):
                i_refutes_j = not profile[i].article.contains(claims[j])
                j_refutes_i = not profile[j].article.contains(claims[i])
                if i_refutes_j and not j_refutes_i:
                    refutation[i] += self.refutation
                    refutation[j] -= self.refutation
                elif j_refutes_i and not i_refutes_j:
                    refutation[j] += self.refutation
                    refutation[i] -= self.refutation
        unsupported = zeros(agents)
        for i in range(agents):
            if not all(table[j][i] for j in range(agents)):
                unsupported[i] = -self.support
        disagreement = zeros(agents)
        for i in range(agents):
            own = self.tightest[i][claims[i]]
            for j in range(agents):
                if j != i and own != self.tightest[i][claims[j]]:
                    disagreement[i] -= self.disagreement
        size = zeros(agents)
        if not all(all(row) for row in table):
            states = len(self.env.states)
            for i in range(agents):
                size[i] = -self.cardinality * profile[i].article.size / states
        return refutation, unsupported, disagreement, size

    def components(self, profile):
        refutation, unsupported, disagreement, size = self.base_components(profile, self.support_table(profile))
        return {"tau1": tuple(refutation), "tau2": tuple(unsupported), "tau3": tuple(disagreement), "tau4": tuple(size)}

    def truthful(self, state):
        return tuple(DirectMessage(state, tightest_evidence(self.env, agent, state)) for agent in range(self.env.agents))

    def largest_transfer(self) -> Fraction:
        "Upper bound on the magnitude of any agent's total transfer."
        agents = self.env.agents
        return (agents - 1) * self.refutation + self.support + (agents - 1) * self.disagreement + self.cardinality

    def parameters(self):
        return {
            "refutation": self.refutation,
            "support": self.support,
            "disagreement": self.disagreement,
            "cardinality": self.cardinality,
        }


class BalancedMechanism(RefutationMechanism):
    """
    The refutation mechanism with every fine handed to other agents, so that
    transfers sum to zero in every profile.
    """

    variant = "balanced"

    def components(self, profile):
        agents = self.env.agents
        table = self.support_table(profile)
        refutation, unsupported, disagreement, size = self.base_components(profile, table)

        support = zeros(agents)
        for i in range(agents):
            fine = -unsupported[i]
            if not fine:
                continue
            support[i] -= fine
            recipients = [j for j in range(agents) if j != i and table[j][i]]
            if not recipients:
                recipients = [j for j in range(agents) if j != i]
            for j in recipients:
                support[j] += fine / len(recipients)

        disagreeing = zeros(agents)
        for i in range(agents):
            fine = -disagreement[i]
            if not fine:
                continue
            disagreeing[i] -= fine
            for j in range(agents):
                if j != i:
                    disagreeing[j] += fine / (agents - 1)

        sized = list(size)
        if any(sized):
            unsupported_claimants = [i for i in range(agents) if not all(table[j][i] for j in range(agents))]
            collected = -sum(sized)
            for i in unsupported_claimants:
                sized[i] += collected / len(unsupported_claimants)

        return {"tau1": tuple(refutation), "tau2": tuple(support), "tau3": tuple(disagreeing), "tau4": tuple(sized)}


@dataclass(frozen=True)
class SmallTransferParams:
    rounds: int
    epsilon: Fraction
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    dbar: Fraction
    delta: Fraction

    @property
    def round_fines(self) -> Fraction:
        return self.alpha + self.beta + self.rounds * self.gamma

    def violations(self) -> typing.List[str]:
        failed = []
        if not self.gamma > 0:
            failed.append("gamma > 0")
        if not self.beta > Fraction(1, self.rounds) + self.gamma:
            failed.append("beta > 1/K + gamma")
        if not self.alpha > self.beta:
            failed.append("alpha > beta")
        if not self.round_fines < self.dbar:
            failed.append("alpha + beta + K*gamma < dbar")
        if not 0 < self.epsilon < 1:
            failed.append("0 < epsilon < 1")
        return failed

    def to_dict(self):
        return {
            "rounds": self.rounds,
            "epsilon": format_rational(self.epsilon),
            "alpha": format_rational(self.alpha),
            "beta": format_rational(self.beta),
            "gamma": format_rational(self.gamma),
            "dbar": format_rational(self.dbar),
            "delta": format_rational(self.delta),
        }


@documented
def solve_small_transfer_params(dbar, delta=None, rounds=None, k_max=10**6, epsilon=Fraction(1, 2)) -> SmallTransferParams:
    "Picks round count and fines so that the round fines stay below ``dbar``; the smallest feasible round count wins."
    dbar = Fraction(dbar)
    if dbar <= 0:
        raise InfeasibleBound("The transfer bound must be positive")
    if rounds is None:
        delta = dbar / 2 if delta is None else Fraction(delta)
        if not 0 < delta < dbar:
            raise InfeasibleBound("delta must lie strictly between 0 and the transfer bound")
        # alpha > beta holds exactly when K > (3 + dbar) / delta
        rounds = math.floor((3 + dbar) / delta) + 1
        if rounds > k_max:
            raise InfeasibleBound(f"Needs {rounds} rounds, more than the limit of {k_max}", rounds=rounds)
    else:
        if rounds < 1:
            raise InfeasibleBound("At least one round is needed")
        lower = (3 + dbar) / rounds
        if delta is None:
            if lower >= dbar:
                raise InfeasibleBound(f"No delta works with {rounds} rounds under bound {dbar}", rounds=rounds)
            delta = (lower + dbar) / 2
        delta = Fraction(delta)
    params = SmallTransferParams(
        rounds=rounds,
        epsilon=Fraction(epsilon),
        alpha=delta / 3,
        beta=Fraction(1, rounds) + dbar / (3 * rounds),
        gamma=delta / (3 * rounds),
        dbar=dbar,
        delta=delta,
    )
    failed = params.violations()
    if failed:
        raise InfeasibleBound("Parameters violate: " + "; ".join(failed), violations=failed)
    return params


@dataclass(frozen=True)
class RoundsMessage:
    state: int
    article: object
    # Claims for rounds 1..K+1
    rounds: typing.Tuple[int, ...]

    def to_dict(self, env):
        return {
            "state": env.state_label(self.state),
            "article": self.article.label,
            "rounds": [env.state_label(state) for state in self.rounds],
        }


class SmallTransferMechanism(Mechanism):
    """
    Agents report a state and an article, then a state in each of K+1
    further rounds. The base mechanism decides the outcome with probability
    epsilon and each later round decides it by near-unanimity with the rest.
    """

    variant = "small"
    component_labels = {
        "tau1": "refutation (scaled)",
        "tau2": "unsupported claim (scaled)",
        "tau3": "disagreement (scaled)",
        "tau4": "evidence size (scaled)",
        "tau5": "round one against next agent's report",
        "tau6": "first deviation from unanimity",
        "tau7": "lone deviation",
    }

    def __init__(self, env: Environment, params: SmallTransferParams):
        super().__init__(env)
        self.params = params
        self.base = RefutationMechanism(env)
        self.filler = uniform(env.outcomes)
        self.equivalence = [[are_equivalent(env, s, t) for t in env.states] for s in env.states]

    def message_count(self, agent, articles):
        states = len(self.env.states)
        return states * len(articles) * states ** (self.params.rounds + 1)

    def messages(self, agent, articles):
        states = list(self.env.states)
        reports = list(itertools.product(states, repeat=self.params.rounds + 1))
        return [RoundsMessage(state, article, report) for state in states for article in articles for report in reports]

    def in_domain(self, agent, message):
        return (
            isinstance(message, RoundsMessage)
            and 0 <= message.state < len(self.env.states)
            and message.article in self.env.universe(agent)
            and len(message.rounds) == self.params.rounds + 1
            and all(0 <= state < len(self.env.states) for state in message.rounds)
        )

    def _base_profile(self, profile):
        return [DirectMessage(message.state, message.article) for message in profile]

    def round_outcome(self, profile, k):
        "Outcome of round k (0-based into the round reports)."
        agents = self.env.agents
        counts = {}
        for message in profile:
            counts[message.rounds[k]] = counts.get(message.rounds[k], 0) + 1
        for state, count in counts.items():
            if count >= agents - 1:
                return point(self.env.outcome(state))
        return self.filler

    def outcome(self, profile):
        epsilon = self.params.epsilon
        rounds = self.params.rounds
        weighted = [(epsilon, self.base.outcome(self._base_profile(profile)))]
        share = (1 - epsilon) / rounds
        for k in range(1, rounds + 1):
            weighted.append((share, self.round_outcome(profile, k)))
        return mix(weighted)

    def components(self, profile):
        agents = self.env.agents
        params = self.params
        base = self.base.components(self._base_profile(profile))
        result = {name: tuple(params.epsilon * value for value in values) for name, values in base.items()}

        cycle = zeros(agents)
        for i in range(agents):
            following = profile[(i + 1) % agents]
            if not self.equivalence[profile[i].rounds[0]][following.state]:
                cycle[i] = -params.alpha

        first = zeros(agents)
        opening = {message.rounds[0] for message in profile}
        if len(opening) == 1:
            agreed = opening.pop()
            for k in range(1, params.rounds + 1):
                deviants = [i for i in range(agents) if profile[i].rounds[k] != agreed]
                if deviants:
                    first[deviants[0]] = -params.beta
                    break

        lone = zeros(agents)
        for k in range(1, params.rounds + 1):
            for i in range(agents):
                others = {profile[j].rounds[k] for j in range(agents) if j != i}
                if len(others) == 1 and profile[i].rounds[k] not in others:
                    lone[i] -= params.gamma

        result.update({"tau5": tuple(cycle), "tau6": tuple(first), "tau7": tuple(lone)})
        return result

    def truthful(self, state):
        return tuple(
            RoundsMessage(message.state, message.article, (state,) * (self.params.rounds + 1))
            for message in self.base.truthful(state)
        )

    def parameters(self):
        return self.params.to_dict()


def synthesize_theorem1(env: Environment, force=False) -> RefutationMechanism:
    if not force:
        require_valid(env)
    return RefutationMechanism(env)


def synthesize_budget_balanced(env: Environment, force=False) -> BalancedMechanism:
    if env.agents < 3:
        raise TooFewAgents("Budget balance needs at least three agents")
    if not force:
        require_valid(env)
    return BalancedMechanism(env)


def synthesize_small_transfers(env: Environment, dbar, delta=None, rounds=None, k_max=10**6, epsilon=None, force=False) -> SmallTransferMechanism:
    if env.agents < 3:
        raise TooFewAgents("Small transfers need at least three agents")
    if not force:
        require_valid(env)
    params = solve_small_transfer_params(dbar, delta=delta, rounds=rounds, k_max=k_max)
    if epsilon is None:
        # Leave room for the scaled base transfers inside the bound
        slack = params.dbar - params.round_fines
        epsilon = min(Fraction(1, 2), slack / (2 * RefutationMechanism(env).largest_transfer()))
    params = dataclasses.replace(params, epsilon=Fraction(epsilon))
    failed = params.violations()
    if failed:
        raise InfeasibleBound("Parameters violate: " + "; ".join(failed), violations=failed)
    return SmallTransferMechanism(env, params)


def _small(env, argument, settings):
    if argument is None:
        raise InfeasibleBound("The small variant needs a bound, e.g. small:1/10")
    return synthesize_small_transfers(
        env,
        parse_rational(argument),
        rounds=settings.get("rounds") or None,
        k_max=settings.get("k_max", 10**6),
        force=settings.get("force", False),
    )


@hookimpl
def register_mechanism_variants():
    return [
        Variant("theorem1", lambda env, argument, settings: synthesize_theorem1(env, force=settings.get("force", False)), "Refutation and support mechanism"),
        Variant(
            "balanced",
            lambda env, argument, settings: synthesize_budget_balanced(env, force=settings.get("force", False)),
            "Budget-balanced refutation mechanism, three or more agents",
        ),
        Variant("small", _small, "Multi-round mechanism with transfers below a bound: small:<bound>"),
    ]


__all__ = [
    "BalancedMechanism",
    "InfeasibleBound",
    "MessageOutOfDomain",
    "RefutationMechanism",
    "RoundsMessage",
    "SmallTransferMechanism",
    "SmallTransferParams",
    "solve_small_transfer_params",
    "synthesize_budget_balanced",
    "synthesize_small_transfers",
    "synthesize_theorem1",
]
