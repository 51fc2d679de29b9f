"""
Small games and environments shared by several test modules.
"""

# Payoffs are indexed [player][row][column]
PRISONERS_DILEMMA = [
    [[-1, -3], [0, -2]],
    [[-1, 0], [-3, -2]],
]

MATCHING_PENNIES = [
    [[1, -1], [-1, 1]],
    [[-1, 1], [1, -1]],
]

ALL_EQUAL = [
    [[0, 0], [0, 0]],
    [[0, 0], [0, 0]],
]

# Both agents can refute the other state wherever they are
COND_A_ENV = {
    "states": ["s1", "s2"],
    "agents": 2,
    "outcomes": ["a", "b"],
    "evidence": {
        "1": {"s1": [["s1"], ["s1", "s2"]], "s2": [["s2"], ["s1", "s2"]]},
        "2": {"s1": [["s1", "s2"]], "s2": [["s1", "s2"]]},
    },
    "scf": {"s1": "a", "s2": "b"},
}

# Both agents refute s2 at s1, nobody refutes s1 at s2
COND_B_ENV = {
    "states": ["s1", "s2"],
    "agents": 2,
    "outcomes": ["a", "b"],
    "evidence": {
        "1": {"s1": [["s1"], ["s1", "s2"]], "s2": [["s1", "s2"]]},
        "2": {"s1": [["s1"], ["s1", "s2"]], "s2": [["s1", "s2"]]},
    },
    "scf": {"s1": "a", "s2": "b"},
}

# Agent 1 refutes s2 at s1, agent 2 refutes s1 at s2
CROSS_ENV = {
    "states": ["s1", "s2"],
    "agents": 2,
    "outcomes": ["a", "b"],
    "evidence": {
        "1": {"s1": [["s1"], ["s1", "s2"]], "s2": [["s1", "s2"]]},
        "2": {"s1": [["s1", "s2"]], "s2": [["s2"], ["s1", "s2"]]},
    },
    "scf": {"s1": "a", "s2": "b"},
}

# Tightest evidence at s1 is {s1}, which agent 1 does not hold
NOT_NORMAL_ENV = {
    "states": ["s1", "s2", "s3"],
    "agents": 2,
    "outcomes": ["a", "b"],
    "evidence": {
        "1": {
            "s1": [["s1", "s2"], ["s1", "s3"]],
            "s2": [["s1", "s2"]],
            "s3": [["s1", "s3"]],
        },
        "2": {state: [["s1", "s2", "s3"]] for state in ("s1", "s2", "s3")},
    },
    "scf": {"s1": "a", "s2": "b", "s3": "b"},
}

_COSTS = {"a": {"s1": "0", "s2": "1/2"}, "b": {"s1": "1/2", "s2": "0"}}

# Three agents with the cost structure of env_e
ENV_E_THREE = {
    "states": ["s1", "s2"],
    "agents": 3,
    "outcomes": ["a", "b"],
    "evidence": {agent: {"s1": ["a", "b"], "s2": ["a", "b"]} for agent in ("1", "2", "3")},
    "scf": {"s1": "a", "s2": "b"},
    "costs": {agent: _COSTS for agent in ("1", "2", "3")},
    "cost_bound": "1",
}

# Both agents find the same article cheapest at both states
SAME_CHEAPEST_ENV = {
    "states": ["s1", "s2"],
    "agents": 2,
    "outcomes": ["a", "b"],
    "evidence": {agent: {"s1": ["a", "b"], "s2": ["a", "b"]} for agent in ("1", "2")},
    "scf": {"s1": "a", "s2": "b"},
    "costs": {agent: {"a": {"s1": "0", "s2": "0"}, "b": {"s1": "1/2", "s2": "1/2"}} for agent in ("1", "2")},
    "cost_bound": "1",
}
