import copy
import itertools

from evmech.environment import parse_environment
from evmech.mechanisms import DirectMessage


def env_from(data):
    return parse_environment(copy.deepcopy(data), source="test")


def article(env, agent, label):
    "Agent's article by label; hard articles are labelled like {s1,s2}."
    matches = [article for article in env.universe(agent) if article.label == label]
    assert matches, "Agent {} has no article {}".format(agent + 1, label)
    return matches[0]


def message(env, agent, state, label):
    return DirectMessage(env.states.index(state), article(env, agent, label))


def all_profiles(mech):
    return itertools.product(*(mech.domain(agent) for agent in range(mech.env.agents)))
