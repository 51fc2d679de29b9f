"""
Classification of state claims at a true state: refutable lies per agent,
lies only the liar can refute, lies another agent can refute, and lies no
evidence at the true state rules out.
"""

from dataclasses import dataclass
import logging
import typing

from .environment import Article, Environment, are_equivalent
from .utils import PreconditionViolated, WitnessMissing, documented

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LiePartition:
    true_state: int
    refutable: typing.Tuple[typing.FrozenSet[int], ...]
    other_refutable: typing.Tuple[typing.FrozenSet[int], ...]
    self_refutable: typing.Tuple[typing.FrozenSet[int], ...]
    nonrefutable: typing.FrozenSet[int]
    # Lies that no evidence can separate from the truth at all
    equivalent: typing.FrozenSet[int] = frozenset()

    def agent_view(self, agent: int) -> typing.Tuple[typing.FrozenSet[int], ...]:
        return ({self.true_state}, self.other_refutable[agent], self.self_refutable[agent], self.nonrefutable)

    def to_dict(self, env: Environment):
        def labels(states):
            return [env.state_label(state) for state in sorted(states)]

        data = {
            "truth": env.state_label(self.true_state),
            "NRL": labels(self.nonrefutable),
            "per_agent": {
                str(agent + 1): {
                    "RL": labels(self.refutable[agent]),
                    "ORL": labels(self.other_refutable[agent]),
                    "SRL": labels(self.self_refutable[agent]),
                }
                for agent in range(len(self.refutable))
            },
        }
        if self.equivalent:
            data["equivalent"] = labels(self.equivalent)
        return data


@documented
def refutable_lies(env: Environment, agent: int, true_state: int) -> typing.FrozenSet[int]:
    "States other than the truth that some article the agent holds at the truth excludes."
    lies = set()
    for article in env.endowment(agent, true_state):
        for state in env.states:
            if state != true_state and not article.contains(state):
                lies.add(state)
    return frozenset(lies)


@documented
def classify(env: Environment, true_state: int) -> LiePartition:
    "Partitions the lies at a true state into other-refutable, self-refutable and nonrefutable ones."
    refutable = tuple(refutable_lies(env, agent, true_state) for agent in range(env.agents))
    lies = frozenset(state for state in env.states if state != true_state)
    other_refutable = []
    self_refutable = []
    for agent in range(env.agents):
        others = frozenset().union(*(refutable[j] for j in range(env.agents) if j != agent))
        other_refutable.append(others)
        self_refutable.append(refutable[agent] - others)
    nonrefutable = lies - frozenset().union(*refutable)
    equivalent = frozenset(state for state in nonrefutable if are_equivalent(env, state, true_state))
    if equivalent:
        log.warning(
            "States %s are indistinguishable from %s; treating them as nonrefutable lies",
            ", ".join(env.state_label(state) for state in sorted(equivalent)),
            env.state_label(true_state),
        )
    return LiePartition(
        true_state=true_state,
        refutable=refutable,
        other_refutable=tuple(other_refutable),
        self_refutable=tuple(self_refutable),
        nonrefutable=nonrefutable,
        equivalent=equivalent,
    )


def check_observation_1(env: Environment, true_state: int, lie: int, agent: int) -> bool:
    """
    Evidence the agent holds at the truth stays available at any lie the agent
    cannot refute.
    """
    if lie in refutable_lies(env, agent, true_state):
        raise PreconditionViolated(
            f"Agent {agent + 1} can refute {env.state_label(lie)} at {env.state_label(true_state)}",
        )
    return env.endowment(agent, true_state) <= env.endowment(agent, lie)


def check_observation_2(env: Environment, true_state: int, lie: int) -> typing.Tuple[int, Article]:
    """
    At a nonrefutable lie some agent holds an article that excludes the truth.

    Returns the lowest agent and lowest article with that property.
    """
    partition = classify(env, true_state)
    if lie not in partition.nonrefutable:
        raise PreconditionViolated(f"{env.state_label(lie)} is not a nonrefutable lie at {env.state_label(true_state)}")
    if lie in partition.equivalent:
        raise PreconditionViolated(f"{env.state_label(lie)} is indistinguishable from {env.state_label(true_state)}")
    for agent in range(env.agents):
        for article in sorted(env.endowment(agent, lie)):
            if not article.contains(true_state):
                return agent, article
    raise WitnessMissing(
        f"No article at {env.state_label(lie)} excludes {env.state_label(true_state)}; the evidence violates the axioms",
    )
