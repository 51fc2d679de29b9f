"""
Direct revelation mechanisms: message domains, outcome lotteries and
transfer rules evaluated in exact rationals.
"""

import collections
from dataclasses import dataclass
from fractions import Fraction
import itertools
import math
import typing

from ..environment import Article, Environment
from ..utils import EvmechError, SizeLimit, format_rational

Variant = collections.namedtuple("Variant", ("name", "synthesize", "help"))

Lottery = typing.Tuple[typing.Tuple[str, Fraction], ...]


class MessageOutOfDomain(EvmechError):
    pass


class TooFewAgents(EvmechError):
    pass


class TooManyAgents(EvmechError):
    pass


class NotTwoAgents(EvmechError):
    pass


class UnknownVariant(EvmechError):
    pass


def point(outcome: str) -> Lottery:
    return ((outcome, Fraction(1)),)


def mix(weighted: typing.Iterable[typing.Tuple[Fraction, Lottery]]) -> Lottery:
    "Combines weighted lotteries into one, dropping zero-probability outcomes."
    totals = collections.defaultdict(Fraction)
    for weight, lottery in weighted:
        for outcome, probability in lottery:
            totals[outcome] += weight * probability
    return tuple(sorted((outcome, probability) for outcome, probability in totals.items() if probability))


def uniform(outcomes: typing.Sequence[str]) -> Lottery:
    share = Fraction(1, len(outcomes))
    return tuple(sorted((outcome, share) for outcome in outcomes))


def lottery_to_dict(lottery: Lottery) -> dict:
    return {outcome: format_rational(probability) for outcome, probability in lottery}


@dataclass(frozen=True)
class DirectMessage:
    state: int
    article: Article

    def to_dict(self, env: Environment):
        return {"state": env.state_label(self.state), "article": self.article.label}


@dataclass(frozen=True)
class Evaluation:
    outcome: Lottery
    transfers: typing.Tuple[Fraction, ...]
    components: typing.Dict[str, typing.Tuple[Fraction, ...]]

    def to_dict(self):
        return {
            "outcome": lottery_to_dict(self.outcome),
            "transfers": [format_rational(value) for value in self.transfers],
            "components": {name: [format_rational(value) for value in values] for name, values in self.components.items()},
        }


def zeros(agents: int) -> typing.List[Fraction]:
    return [Fraction(0) for _ in range(agents)]


class Mechanism:
    """
    Base class for synthesized mechanisms.

    Subclasses implement ``outcome()`` and ``components()``; the transfer to
    each agent is the sum of the component vectors.
    """

    variant = None
    # Evidence costs are charged to agents in the induced game
    costly = False
    # Equilibrium evidence must be cheapest at the true state
    cheapest_on_path = False
    # Component names as the underlying construction labels them
    component_labels = {}

    def __init__(self, env: Environment):
        self.env = env

    def message_count(self, agent: int, articles: typing.Sequence[Article]) -> int:
        return len(self.env.states) * len(articles)

    def messages(self, agent: int, articles: typing.Sequence[Article]) -> list:
        return [DirectMessage(state, article) for state in self.env.states for article in articles]

    def domain(self, agent: int) -> list:
        return self.messages(agent, self.env.universe(agent))

    def in_domain(self, agent: int, message) -> bool:
        return (
            isinstance(message, DirectMessage)
            and 0 <= message.state < len(self.env.states)
            and message.article in self.env.universe(agent)
        )

    def check_profile(self, profile):
        if len(profile) != self.env.agents:
            raise MessageOutOfDomain(f"Expected {self.env.agents} messages, got {len(profile)}")
        for agent, message in enumerate(profile):
            if not self.in_domain(agent, message):
                raise MessageOutOfDomain(f"Message {message!r} is outside agent {agent + 1}'s domain", agent=agent + 1)

    def outcome(self, profile) -> Lottery:
        raise NotImplementedError

    def components(self, profile) -> typing.Dict[str, typing.Tuple[Fraction, ...]]:
        raise NotImplementedError

    def evaluate(self, profile, check=True) -> Evaluation:
        if check:
            self.check_profile(profile)
        components = self.components(profile)
        transfers = zeros(self.env.agents)
        for values in components.values():
            for agent, value in enumerate(values):
                transfers[agent] += value
        return Evaluation(self.outcome(profile), tuple(transfers), components)

    def transfers(self, profile) -> typing.Tuple[Fraction, ...]:
        return self.evaluate(profile).transfers

    def truthful(self, state: int) -> tuple:
        "The on-path message profile at a state."
        raise NotImplementedError

    def parameters(self) -> dict:
        return {}

    def to_dict(self, extensional=False, profile_cap=10**6) -> dict:
        env = self.env
        data = {
            "variant": self.variant,
            "agents": env.agents,
            "states": list(env.states.labels),
            "parameters": {
                key: format_rational(value) if isinstance(value, Fraction) else value for key, value in self.parameters().items()
            },
        }
        if self.component_labels:
            data["component_labels"] = dict(self.component_labels)
        if extensional:
            domains = [self.domain(agent) for agent in range(env.agents)]
            size = math.prod(len(domain) for domain in domains)
            if size > profile_cap:
                raise SizeLimit(f"Message product has {size} profiles, over the cap of {profile_cap}")
            data["table"] = [
                {"profile": [message.to_dict(env) for message in profile], **self.evaluate(profile, check=False).to_dict()}
                for profile in itertools.product(*domains)
            ]
        return data


def parse_variant_tag(tag: str) -> typing.Tuple[str, typing.Optional[str]]:
    name, _, argument = tag.partition(":")
    return name, (argument or None)
