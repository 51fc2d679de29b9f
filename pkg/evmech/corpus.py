"""
Fixture environments and seeded random environments.
"""

import copy
import logging
import pathlib
import random
import typing

from .environment import Environment, environment_to_dict, equivalent_states, parse_environment
from .utils import dumps

log = logging.getLogger(__name__)

RANDOM_SEEDS = range(50)

FULL2 = ["s1", "s2"]
FULL4 = ["s1", "s2", "s3", "s4"]

ENV_A = {
    "states": ["s1", "s2"],
    "agents": 2,
    "outcomes": ["a", "b"],
    "evidence": {
        "1": {"s1": [FULL2], "s2": [FULL2, ["s2"]]},
        "2": {"s1": [FULL2], "s2": [FULL2]},
    },
    "scf": {"s1": "a", "s2": "b"},
}

ENV_A_COSTLY = dict(
    copy.deepcopy(ENV_A),
    costs={"1": {"{s2}": {"s2": "1/4"}}},
    cost_bound="1",
)

ENV_B = {
    "states": ["s1", "s2"],
    "agents": 2,
    "outcomes": ["a", "b"],
    "evidence": {
        "1": {"s1": [FULL2], "s2": [FULL2]},
        "2": {"s1": [FULL2], "s2": [FULL2]},
    },
    "scf": {"s1": "a", "s2": "b"},
}

# Measurable, yet no cheapest selection lets someone challenge every outcome change
ENV_C = {
    "states": FULL4,
    "agents": 2,
    "outcomes": ["a", "b", "c", "d"],
    "evidence": {
        "1": {
            "s1": [FULL4],
            "s2": [FULL4, ["s2", "s4"]],
            "s3": [FULL4, ["s3", "s4"]],
            "s4": [FULL4, ["s2", "s4"], ["s3", "s4"], ["s4"]],
        },
        "2": {state: [FULL4] for state in FULL4},
    },
    "scf": {"s1": "a", "s2": "b", "s3": "c", "s4": "d"},
    "costs": {"1": {"{s4}": {"s4": "1/10"}}},
    "cost_bound": "1",
}

# Buyer and seller: only the buyer can prove anything, and only at theta
ENV_D = {
    "states": ["phi", "theta"],
    "agents": 2,
    "outcomes": ["low", "high"],
    "evidence": {
        "1": {"phi": [["phi", "theta"]], "theta": [["theta"], ["phi", "theta"]]},
        "2": {"phi": [["phi", "theta"]], "theta": [["phi", "theta"]]},
    },
    "scf": {"phi": "low", "theta": "high"},
}

ENV_D_MODIFIED = copy.deepcopy(ENV_D)
ENV_D_MODIFIED["evidence"]["1"]["phi"] = [["phi"], ["phi", "theta"]]

# Same two articles everywhere; which one is cheap reveals the state
ENV_E = {
    "states": ["s1", "s2"],
    "agents": 2,
    "outcomes": ["a", "b"],
    "evidence": {
        "1": {"s1": ["a", "b"], "s2": ["a", "b"]},
        "2": {"s1": ["a", "b"], "s2": ["a", "b"]},
    },
    "scf": {"s1": "a", "s2": "b"},
    "costs": {
        "1": {"a": {"s1": "0", "s2": "1/2"}, "b": {"s1": "1/2", "s2": "0"}},
        "2": {"a": {"s1": "0", "s2": "1/2"}, "b": {"s1": "1/2", "s2": "0"}},
    },
    "cost_bound": "1",
}

ENV_3AGENTS = {
    "states": ["s1", "s2"],
    "agents": 3,
    "outcomes": ["a", "b"],
    "evidence": {
        "1": {"s1": [FULL2], "s2": [FULL2, ["s2"]]},
        "2": {"s1": [FULL2, ["s1"]], "s2": [FULL2]},
        "3": {"s1": [FULL2], "s2": [FULL2]},
    },
    "scf": {"s1": "a", "s2": "b"},
}

FIXTURES = {
    "env_a": ENV_A,
    "env_a_costly": ENV_A_COSTLY,
    "env_b": ENV_B,
    "env_c": ENV_C,
    "env_d": ENV_D,
    "env_d_modified": ENV_D_MODIFIED,
    "env_e": ENV_E,
    "env_3agents": ENV_3AGENTS,
}


def fixture(name: str) -> Environment:
    try:
        data = FIXTURES[name]
    except KeyError:
        raise KeyError(f"Unknown fixture: {name}")
    return parse_environment(copy.deepcopy(data), source=name)


def hard_projection(env: Environment) -> Environment:
    "The same environment without cost tables: available articles cost nothing."
    data = environment_to_dict(env)
    data.pop("costs", None)
    data.pop("cost_bound", None)
    return parse_environment(data)


def _endow(held, agent, mask, n):
    for state in range(n):
        if mask >> state & 1:
            held[agent][state].add(mask)


def random_environment(seed: int, normal: bool = True, max_states: int = 4, max_agents: int = 3) -> Environment:
    """
    Draws random articles, endows each at every state it contains and,
    when ``normal``, adds intersections until every agent holds its
    tightest evidence. The social choice is constant on equivalent states.
    """
    rng = random.Random(seed)
    n = rng.randint(2, max_states)
    agents = rng.randint(2, max_agents)
    labels = [f"s{index + 1}" for index in range(n)]
    full = (1 << n) - 1
    held = [[set() for _ in range(n)] for _ in range(agents)]
    for agent in range(agents):
        _endow(held, agent, full, n)
        for _ in range(rng.randint(0, n)):
            _endow(held, agent, rng.randint(1, full), n)
    if normal:
        changed = True
        while changed:
            changed = False
            for agent in range(agents):
                for state in range(n):
                    tightest = full
                    for mask in held[agent][state]:
                        tightest &= mask
                    if tightest not in held[agent][state]:
                        _endow(held, agent, tightest, n)
                        changed = True
    outcomes = ["a", "b", "c"][: rng.randint(2, 3)]
    data = {
        "states": labels,
        "agents": agents,
        "outcomes": outcomes,
        "evidence": {
            str(agent + 1): {
                labels[state]: [[labels[member] for member in range(n) if mask >> member & 1] for mask in sorted(held[agent][state])]
                for state in range(n)
            }
            for agent in range(agents)
        },
        "scf": {label: outcomes[0] for label in labels},
    }
    env = parse_environment(data, source=f"random:{seed}")
    scf = {}
    for states in equivalent_states(env):
        outcome = rng.choice(outcomes)
        for state in states:
            scf[labels[state]] = outcome
    data["scf"] = scf
    return parse_environment(data, source=f"random:{seed}")


COST_STEPS = ("0", "1/4", "1/2", "3/4")


def random_costly_environment(seed: int, max_states: int = 3, articles: int = 3) -> Environment:
    "Two agents holding the same opaque articles everywhere with random costs below 1."
    rng = random.Random(seed)
    n = rng.randint(2, max_states)
    labels = [f"s{index + 1}" for index in range(n)]
    names = [f"e{index + 1}" for index in range(rng.randint(2, articles))]
    outcomes = ["a", "b", "c"][: rng.randint(2, 3)]
    data = {
        "states": labels,
        "agents": 2,
        "outcomes": outcomes,
        "evidence": {str(agent + 1): {label: list(names) for label in labels} for agent in range(2)},
        "scf": {label: rng.choice(outcomes) for label in labels},
        "costs": {
            str(agent + 1): {name: {label: rng.choice(COST_STEPS) for label in labels} for name in names} for agent in range(2)
        },
        "cost_bound": "1",
    }
    return parse_environment(data, source=f"random-costly:{seed}")


def write_corpus(directory: typing.Union[str, pathlib.Path]) -> typing.List[pathlib.Path]:
    "Writes every fixture and the seeded random environments as canonical JSON files."
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    environments = [(name, fixture(name)) for name in FIXTURES]
    environments.extend((f"random_{seed:02d}", random_environment(seed)) for seed in RANDOM_SEEDS)
    for name, env in environments:
        path = directory / f"{name}.json"
        path.write_text(dumps(environment_to_dict(env)), encoding="utf-8")
        written.append(path)
    log.info("Wrote %d environments to %s", len(written), directory)
    return written
