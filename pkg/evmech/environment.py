"""
Social choice environments with evidence: states, agents, outcomes, per-agent
evidence endowments, the social choice function and optional evidence costs.

Articles are bitmasks over the fixed state order. Hard articles are written in
environment files as arrays of state labels; opaque articles (costly settings)
are written as label strings and take as their mask the states at which the
agent holds them.
"""

import collections
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import json
import logging
import pathlib
import random
import typing

from .utils import (
    INFINITE,
    EvmechError,
    ParseError,
    documented,
    format_rational,
    is_subset,
    members,
    parse_rational,
    popcount,
)

log = logging.getLogger(__name__)

Check = collections.namedtuple("Check", ("ok", "witness"))

ENVIRONMENT_KEYS = ("states", "agents", "outcomes", "evidence", "scf", "costs", "cost_bound")


class EmptyEndowment(EvmechError):
    pass


class InvalidEnvironment(EvmechError):
    pass


class NotMeasurable(EvmechError):
    pass


class NotNormal(EvmechError):
    pass


class UnknownState(EvmechError):
    pass


class InvalidUtilityProfile(EvmechError):
    pass


@dataclass(frozen=True)
class StateSpace:
    labels: typing.Tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError("State space must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("State labels must be unique")

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(range(len(self.labels)))

    @cached_property
    def _positions(self):
        return {label: index for index, label in enumerate(self.labels)}

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self._positions[label]
        except KeyError:
            raise UnknownState(f"Unknown state: {label!r}", state=label)

    def label(self, index: int) -> str:
        return self.labels[index]

    def mask(self, labels: typing.Iterable[str]) -> int:
        result = 0
        for label in labels:
            result |= 1 << self.index(label)
        return result

    def labels_of(self, mask: int) -> typing.List[str]:
        return [self.labels[index] for index in members(mask)]

    def subset_label(self, mask: int) -> str:
        return "{" + ",".join(self.labels_of(mask)) + "}"


@dataclass(frozen=True, order=True)
class Article:
    mask: int
    label: str
    opaque: bool = field(default=False, compare=False)

    def contains(self, state: int) -> bool:
        return bool(self.mask >> state & 1)

    @property
    def size(self) -> int:
        return popcount(self.mask)

    def to_dict(self):
        return self.label


def hard_article(states: StateSpace, mask: int) -> Article:
    return Article(mask, states.subset_label(mask))


@dataclass(frozen=True)
class Environment:
    states: StateSpace
    agents: int
    outcomes: typing.Tuple[str, ...]
    # evidence[i][s] is the frozenset of articles agent i holds at state s
    evidence: typing.Tuple[typing.Tuple[typing.FrozenSet[Article], ...], ...]
    scf: typing.Tuple[str, ...]
    # costs[i] is a sorted tuple of (article, per-state costs) pairs
    costs: typing.Optional[typing.Tuple[typing.Tuple[typing.Tuple[Article, typing.Tuple], ...], ...]] = None
    cost_bound: typing.Optional[Fraction] = None

    def __post_init__(self):
        if self.agents < 2:
            raise InvalidEnvironment("An environment needs at least two agents")
        if len(self.evidence) != self.agents:
            raise InvalidEnvironment("Evidence must list every agent")
        for endowments in self.evidence:
            if len(endowments) != len(self.states):
                raise InvalidEnvironment("Evidence must list every state for every agent")
        if len(self.scf) != len(self.states):
            raise InvalidEnvironment("The social choice function must be total over states")
        unknown = set(self.scf) - set(self.outcomes)
        if unknown:
            raise InvalidEnvironment(f"Unknown outcomes in scf: {sorted(unknown)}")

    @property
    def is_costly(self) -> bool:
        return self.costs is not None

    def endowment(self, agent: int, state: int) -> typing.FrozenSet[Article]:
        return self.evidence[agent][state]

    def outcome(self, state: int) -> str:
        return self.scf[state]

    @cached_property
    def universes(self) -> typing.Tuple[typing.Tuple[Article, ...], ...]:
        return tuple(tuple(sorted(set().union(*endowments))) for endowments in self.evidence)

    def universe(self, agent: int) -> typing.Tuple[Article, ...]:
        "Every article the agent holds in at least one state, in article order."
        return self.universes[agent]

    @cached_property
    def _cost_lookup(self):
        if self.costs is None:
            return None
        return [dict(table) for table in self.costs]

    def cost(self, agent: int, article: Article, state: int):
        if self._cost_lookup is None:
            return Fraction(0) if article in self.evidence[agent][state] else INFINITE
        costs = self._cost_lookup[agent].get(article)
        if costs is None:
            return INFINITE
        return costs[state]

    def state_label(self, state: int) -> str:
        return self.states.label(state)


@dataclass
class ValidationReport:
    states: StateSpace
    e1: typing.List[typing.Tuple[int, int, Article]] = field(default_factory=list)
    e2: typing.List[typing.Tuple[int, Article, int]] = field(default_factory=list)
    cost_bound: typing.List[typing.Tuple[int, Article, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.e1 and not self.e2

    def to_dict(self):
        label = self.states.label
        return {
            "ok": self.ok,
            "e1": [{"agent": i + 1, "state": label(s), "article": article.label} for i, s, article in self.e1],
            "e2": [{"agent": i + 1, "article": article.label, "state": label(s)} for i, article, s in self.e2],
            "cost_bound": [{"agent": i + 1, "article": article.label, "state": label(s)} for i, article, s in self.cost_bound],
        }


@documented
def validate_structure(env: Environment) -> ValidationReport:
    "Lists every article that excludes its own state and every article missing from a state it contains."
    report = ValidationReport(env.states)
    for agent in range(env.agents):
        for state in env.states:
            for article in sorted(env.endowment(agent, state)):
                if not article.contains(state):
                    report.e1.append((agent, state, article))
                for other in members(article.mask):
                    if article not in env.endowment(agent, other):
                        report.e2.append((agent, article, other))
    if env.costs is not None and env.cost_bound is not None:
        for agent in range(env.agents):
            for article, costs in env.costs[agent]:
                for state, cost in enumerate(costs):
                    if cost != INFINITE and cost >= env.cost_bound:
                        report.cost_bound.append((agent, article, state))
    report.e2 = sorted(set(report.e2), key=lambda v: (v[0], v[1], v[2]))
    return report


@documented
def tightest_evidence(env: Environment, agent: int, state: int) -> Article:
    "The intersection of everything the agent holds at the state."
    endowment = env.endowment(agent, state)
    if not endowment:
        raise EmptyEndowment(f"Agent {agent + 1} holds no evidence at {env.state_label(state)}")
    mask = env.states.full_mask
    for article in endowment:
        mask &= article.mask
    held = sorted(article for article in endowment if article.mask == mask)
    if held:
        return held[0]
    return hard_article(env.states, mask)


def tightest_masks(env: Environment) -> typing.Tuple[typing.Tuple[int, ...], ...]:
    return tuple(tuple(tightest_evidence(env, i, s).mask for s in env.states) for i in range(env.agents))


def supports(article: Article, tightest_mask: int) -> bool:
    "An article supports a claim when it fits inside the tightest evidence at that claim."
    return is_subset(article.mask, tightest_mask)


@documented
def is_normal(env: Environment) -> Check:
    "True when every agent can present all of their evidence at once in every state."
    for agent in range(env.agents):
        for state in env.states:
            tightest = tightest_evidence(env, agent, state)
            if tightest not in env.endowment(agent, state):
                return Check(False, (agent, state))
    return Check(True, None)


@documented
def equivalent_states(env: Environment) -> typing.List[typing.Tuple[int, ...]]:
    "Groups states whose endowments coincide for every agent, ordered by least state index."
    classes = {}
    for state in env.states:
        key = tuple(env.endowment(agent, state) for agent in range(env.agents))
        classes.setdefault(key, []).append(state)
    return sorted((tuple(states) for states in classes.values()), key=lambda states: states[0])


def are_equivalent(env: Environment, state: int, other: int) -> bool:
    return all(env.endowment(agent, state) == env.endowment(agent, other) for agent in range(env.agents))


@documented
def is_measurable(env: Environment) -> Check:
    "True when the social choice function is constant on every class of equivalent states."
    for states in equivalent_states(env):
        first = states[0]
        for other in states[1:]:
            if env.outcome(first) != env.outcome(other):
                return Check(False, (first, other))
    return Check(True, None)


def require_valid(env: Environment, normal: bool = True, measurable: bool = True):
    report = validate_structure(env)
    if not report.ok:
        raise InvalidEnvironment("Evidence violates the axioms", validation=report.to_dict())
    if normal:
        check = is_normal(env)
        if not check.ok:
            agent, state = check.witness
            raise NotNormal(
                f"Agent {agent + 1} cannot present all evidence at {env.state_label(state)}",
                agent=agent + 1,
                state=env.state_label(state),
            )
    if measurable:
        check = is_measurable(env)
        if not check.ok:
            first, other = check.witness
            raise NotMeasurable(
                f"States {env.state_label(first)} and {env.state_label(other)} are indistinguishable but map to different outcomes",
                pair=[env.state_label(first), env.state_label(other)],
            )


@dataclass(frozen=True)
class UtilityProfile:
    outcomes: typing.Tuple[str, ...]
    # values[i][a][s] = v_i(a, s)
    values: typing.Tuple[typing.Tuple[typing.Tuple[Fraction, ...], ...], ...]
    label: str = "custom"

    def __post_init__(self):
        for agent_values in self.values:
            if len(agent_values) != len(self.outcomes):
                raise InvalidUtilityProfile("Utility profile must cover every outcome")
            for row in agent_values:
                for value in row:
                    if not 0 <= value < 1:
                        raise InvalidUtilityProfile(f"Utility {value} outside [0, 1)")

    @cached_property
    def _outcome_index(self):
        return {outcome: index for index, outcome in enumerate(self.outcomes)}

    def value(self, agent: int, outcome: str, state: int) -> Fraction:
        return self.values[agent][self._outcome_index[outcome]][state]

    def expected(self, agent: int, lottery, state: int) -> Fraction:
        return sum((probability * self.value(agent, outcome, state) for outcome, probability in lottery), Fraction(0))

    @classmethod
    def constant(cls, env: Environment, value=Fraction(0)) -> "UtilityProfile":
        row = tuple(Fraction(value) for _ in env.states)
        return cls(env.outcomes, tuple(tuple(row for _ in env.outcomes) for _ in range(env.agents)), "constant")

    @classmethod
    def state_independent(cls, env: Environment, tables, label="state-independent") -> "UtilityProfile":
        "``tables[i]`` maps each outcome to agent i's value in every state."
        values = tuple(
            tuple(tuple(Fraction(tables[agent][outcome]) for _ in env.states) for outcome in env.outcomes)
            for agent in range(env.agents)
        )
        return cls(env.outcomes, values, label)

    @classmethod
    def sample(cls, env: Environment, rng: random.Random, denominator: int = 128, label="sampled") -> "UtilityProfile":
        def draw():
            q = rng.randint(1, denominator)
            return Fraction(rng.randrange(q), q)

        values = tuple(tuple(tuple(draw() for _ in env.states) for _ in env.outcomes) for _ in range(env.agents))
        return cls(env.outcomes, values, label)

    def to_dict(self, states: typing.Optional[StateSpace] = None):
        def state_key(s):
            return states.label(s) if states is not None else str(s)

        return {
            "label": self.label,
            "values": {
                str(agent + 1): {
                    outcome: {state_key(s): format_rational(value) for s, value in enumerate(row)}
                    for outcome, row in zip(self.outcomes, rows)
                }
                for agent, rows in enumerate(self.values)
            },
        }


def _fail(message, source, path):
    raise ParseError(message, source=source, path=path)


def _agent_entries(value, agents, source, path):
    if isinstance(value, list):
        if len(value) != agents:
            _fail(f"expected {agents} agents, got {len(value)}", source, path)
        return list(enumerate(value))
    if isinstance(value, dict):
        entries = []
        for key, item in value.items():
            if not str(key).isdigit() or not 1 <= int(key) <= agents:
                _fail(f"unknown agent {key!r}", source, f"{path}.{key}")
            entries.append((int(key) - 1, item))
        return entries
    _fail("expected an object keyed by agent number or an array", source, path)


@documented
def parse_environment(data: typing.Any, source: typing.Optional[str] = None) -> Environment:
    "Builds an Environment from its decoded JSON form, rejecting unknown keys and dangling references."
    if not isinstance(data, dict):
        _fail("environment must be a JSON object", source, None)
    unknown = [key for key in data if key not in ENVIRONMENT_KEYS]
    if unknown:
        _fail(f"unknown keys: {', '.join(sorted(unknown))}", source, None)
    for key in ("states", "agents", "outcomes", "evidence", "scf"):
        if key not in data:
            _fail(f"missing required key {key!r}", source, None)

    labels = data["states"]
    if not isinstance(labels, list) or not labels or not all(isinstance(label, str) for label in labels):
        _fail("expected a nonempty array of state labels", source, "states")
    if len(set(labels)) != len(labels):
        _fail("state labels must be unique", source, "states")
    states = StateSpace(tuple(labels))

    agents = data["agents"]
    if isinstance(agents, bool) or not isinstance(agents, int) or agents < 2:
        _fail("expected an integer of at least 2", source, "agents")

    outcomes = data["outcomes"]
    if not isinstance(outcomes, list) or not outcomes or not all(isinstance(outcome, str) for outcome in outcomes):
        _fail("expected a nonempty array of outcome labels", source, "outcomes")
    if len(set(outcomes)) != len(outcomes):
        _fail("outcome labels must be unique", source, "outcomes")

    scf = data["scf"]
    if not isinstance(scf, dict):
        _fail("expected an object mapping states to outcomes", source, "scf")
    for key, outcome in scf.items():
        if key not in states.labels:
            _fail(f"unknown state {key!r}", source, f"scf.{key}")
        if outcome not in outcomes:
            _fail(f"unknown outcome {outcome!r}", source, f"scf.{key}")
    for label in labels:
        if label not in scf:
            _fail(f"no outcome for state {label!r}", source, "scf")

    # First pass: resolve hard articles, collect where opaque labels are held
    listed = [[None] * len(states) for _ in range(agents)]
    opaque_held = [collections.defaultdict(int) for _ in range(agents)]
    for agent, endowments in _agent_entries(data["evidence"], agents, source, "evidence"):
        path = f"evidence.{agent + 1}"
        if not isinstance(endowments, dict):
            _fail("expected an object mapping states to arrays of articles", source, path)
        for key, articles in endowments.items():
            if key not in states.labels:
                _fail(f"unknown state {key!r}", source, f"{path}.{key}")
            state = states.index(key)
            if not isinstance(articles, list) or not articles:
                _fail("empty endowment", source, f"{path}.{key}")
            resolved = []
            for position, article in enumerate(articles):
                where = f"{path}.{key}[{position}]"
                if isinstance(article, list):
                    if not article:
                        _fail("an article cannot prove the empty event", source, where)
                    for member in article:
                        if member not in states.labels:
                            _fail(f"unknown state {member!r}", source, where)
                    resolved.append(("hard", states.mask(article)))
                elif isinstance(article, str):
                    if article.startswith("{"):
                        _fail("opaque article labels cannot start with '{'", source, where)
                    resolved.append(("opaque", article))
                    opaque_held[agent][article] |= 1 << state
                else:
                    _fail("an article is an array of states or a label", source, where)
            listed[agent][state] = resolved
    for agent in range(agents):
        for state in states:
            if listed[agent][state] is None:
                _fail("empty endowment", source, f"evidence.{agent + 1}.{states.label(state)}")

    evidence = []
    for agent in range(agents):
        opaque = {label: Article(mask, label, True) for label, mask in opaque_held[agent].items()}
        endowments = []
        for state in states:
            held = set()
            for kind, value in listed[agent][state]:
                held.add(opaque[value] if kind == "opaque" else hard_article(states, value))
            endowments.append(frozenset(held))
        evidence.append(tuple(endowments))
    evidence = tuple(evidence)

    costs = None
    if "costs" in data:
        costs = _parse_costs(data["costs"], states, agents, evidence, source)

    cost_bound = None
    if "cost_bound" in data:
        try:
            cost_bound = parse_rational(data["cost_bound"])
        except ValueError as e:
            _fail(str(e), source, "cost_bound")
        if cost_bound <= 0:
            _fail("cost bound must be positive", source, "cost_bound")

    return Environment(
        states=states,
        agents=agents,
        outcomes=tuple(outcomes),
        evidence=evidence,
        scf=tuple(scf[label] for label in labels),
        costs=costs,
        cost_bound=cost_bound,
    )


def _parse_costs(value, states, agents, evidence, source):
    given = [{} for _ in range(agents)]
    for agent, table in _agent_entries(value, agents, source, "costs"):
        path = f"costs.{agent + 1}"
        if not isinstance(table, dict):
            _fail("expected an object keyed by article label", source, path)
        by_label = {article.label: article for endowments in evidence[agent] for article in endowments}
        for label, per_state in table.items():
            if label not in by_label:
                _fail(f"agent never holds article {label!r}", source, f"{path}.{label}")
            if not isinstance(per_state, dict):
                _fail("expected an object keyed by state", source, f"{path}.{label}")
            article = by_label[label]
            for key, raw in per_state.items():
                where = f"{path}.{label}.{key}"
                if key not in states.labels:
                    _fail(f"unknown state {key!r}", source, where)
                try:
                    cost = parse_rational(raw, allow_infinite=True)
                except ValueError as e:
                    _fail(str(e), source, where)
                if cost < 0:
                    _fail("costs cannot be negative", source, where)
                state = states.index(key)
                held = article in evidence[agent][state]
                if held and cost == INFINITE:
                    _fail("an article held at a state must have a finite cost there", source, where)
                if not held and cost != INFINITE:
                    _fail("an article not held at a state costs inf there", source, where)
                given[agent][(article, state)] = cost
    costs = []
    for agent in range(agents):
        universe = sorted(set().union(*evidence[agent]))
        table = []
        for article in universe:
            row = tuple(
                given[agent].get((article, state), Fraction(0) if article in evidence[agent][state] else INFINITE)
                for state in states
            )
            table.append((article, row))
        costs.append(tuple(table))
    return tuple(costs)


def load_environment(path: typing.Union[str, pathlib.Path]) -> Environment:
    path = pathlib.Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, source=str(path), line=e.lineno, column=e.colno)
    return parse_environment(data, source=str(path))


@documented
def environment_to_dict(env: Environment) -> dict:
    "Canonical JSON form: states, then agents ascending, then articles in article order."

    def render(article):
        return article.label if article.opaque else env.states.labels_of(article.mask)

    data = {
        "states": list(env.states.labels),
        "agents": env.agents,
        "outcomes": list(env.outcomes),
        "evidence": {
            str(agent + 1): {
                env.state_label(state): [render(article) for article in sorted(env.endowment(agent, state))] for state in env.states
            }
            for agent in range(env.agents)
        },
        "scf": {env.state_label(state): env.outcome(state) for state in env.states},
    }
    if env.costs is not None:
        data["costs"] = {
            str(agent + 1): {
                article.label: {env.state_label(state): format_rational(cost) for state, cost in enumerate(row)}
                for article, row in env.costs[agent]
            }
            for agent in range(env.agents)
        }
    if env.cost_bound is not None:
        data["cost_bound"] = format_rational(env.cost_bound)
    return data
