"""
Finite games induced by a mechanism at a true state, exact equilibrium
enumeration and implementation verdicts.

Payoff tensors are numpy arrays of dtype object holding Fractions, so every
comparison in the best-response scans is exact.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import logging
import math
import random
import time
import typing

import numpy as np
import sympy

from .environment import Environment, UtilityProfile, equivalent_states
from .mechanisms import DirectMessage, Mechanism, point
from .renegotiation import build_adversarial_profile, check_rp_conditions
from .tracer import trace
from .utils import EvmechError, SizeLimit, documented, format_rational

log = logging.getLogger(__name__)

IMPLEMENTS = "IMPLEMENTS"
FAILS = "FAILS"
CERTIFIED_ALL_V = "CERTIFIED_ALL_V"
INCONCLUSIVE = "INCONCLUSIVE"

EXIT_CODES = {IMPLEMENTS: 0, CERTIFIED_ALL_V: 0, FAILS: 1, INCONCLUSIVE: 2}

EXHAUSTIVE = "EXHAUSTIVE"


class DomainMismatch(EvmechError):
    pass


class MessageTable:
    """
    Everything about a mechanism at one true state that does not depend on
    utilities: feasible messages, their evidence costs and the evaluated
    outcome and transfers of every profile.
    """

    def __init__(self, mech: Mechanism, env: Environment, state: int, profile_cap: int = 10**6):
        if mech.env != env:
            raise DomainMismatch("Mechanism was synthesized for a different environment")
        if not 0 <= state < len(env.states):
            raise DomainMismatch(f"No state with index {state}")
        self.mech = mech
        self.env = env
        self.state = state
        articles = [sorted(env.endowment(agent, state)) for agent in range(env.agents)]
        counts = [mech.message_count(agent, articles[agent]) for agent in range(env.agents)]
        size = math.prod(counts)
        if size > profile_cap:
            raise SizeLimit(f"Induced game at {env.state_label(state)} has {size} profiles, over the cap of {profile_cap}", profiles=size)
        self.messages = [mech.messages(agent, articles[agent]) for agent in range(env.agents)]
        self.costs = [
            [env.cost(agent, message.article, state) if mech.costly else Fraction(0) for message in self.messages[agent]]
            for agent in range(env.agents)
        ]
        self.dims = tuple(len(messages) for messages in self.messages)
        with trace("evaluate-profiles", state=env.state_label(state), profiles=size, variant=mech.variant):
            self.evaluations = np.empty(self.dims, dtype=object)
            for index in np.ndindex(*self.dims):
                self.evaluations[index] = mech.evaluate(self.profile(index), check=False)

    @property
    def agents(self) -> int:
        return self.env.agents

    def profile(self, index) -> tuple:
        return tuple(self.messages[agent][position] for agent, position in enumerate(index))

    def truthful_index(self) -> typing.Optional[tuple]:
        "Index of the on-path profile, or None when it is not feasible at this state."
        index = []
        for agent, message in enumerate(self.mech.truthful(self.state)):
            try:
                index.append(self.messages[agent].index(message))
            except ValueError:
                return None
        return tuple(index)

    def net_transfer(self, index, agent: int) -> Fraction:
        return self.evaluations[index].transfers[agent] - self.costs[agent][index[agent]]

    def is_acceptable(self, index) -> bool:
        "Outcome is the social choice at the true state, no transfers and, where required, cheapest evidence."
        evaluation = self.evaluations[index]
        if evaluation.outcome != point(self.env.outcome(self.state)):
            return False
        if any(evaluation.transfers):
            return False
        if self.mech.cheapest_on_path:
            cheapest = self.mech.cheapest
            return all(cheapest.is_cheapest(agent, self.state, message.article) for agent, message in enumerate(self.profile(index)))
        return True

    def describe(self, index) -> dict:
        evaluation = self.evaluations[index]
        return {
            "profile": [message.to_dict(self.env) for message in self.profile(index)],
            **evaluation.to_dict(),
        }


@dataclass
class InducedGame:
    table: typing.Optional[MessageTable]
    utility: typing.Optional[UtilityProfile]
    # payoffs[i][m] is agent i's exact payoff at profile index m
    payoffs: np.ndarray

    @classmethod
    def from_payoffs(cls, payoffs) -> "InducedGame":
        "A bare game from nested per-player payoff arrays, converted to exact rationals."
        array = np.asarray(payoffs, dtype=object)
        return cls(None, None, np.vectorize(Fraction, otypes=[object])(array))

    @property
    def dims(self) -> tuple:
        return tuple(self.payoffs.shape[1:])

    @property
    def players(self) -> int:
        return len(self.dims)


@documented
def induce(mech: Mechanism, env: Environment, v: UtilityProfile, state: int, table: MessageTable = None, profile_cap: int = 10**6) -> InducedGame:
    "Builds the payoff tensor: expected utility of the outcome lottery plus transfers, minus evidence costs for costly mechanisms."
    if tuple(v.outcomes) != tuple(env.outcomes):
        raise DomainMismatch("Utility profile outcomes do not match the environment")
    if len(v.values) != env.agents:
        raise DomainMismatch("Utility profile must cover every agent")
    if table is None:
        table = MessageTable(mech, env, state, profile_cap=profile_cap)
    elif table.mech is not mech or table.state != state:
        raise DomainMismatch("Message table belongs to another mechanism or state")
    payoffs = np.empty((env.agents,) + table.dims, dtype=object)
    expected = {}
    with trace("induce", state=env.state_label(state), utility=v.label):
        for index in np.ndindex(*table.dims):
            evaluation = table.evaluations[index]
            values = expected.get(evaluation.outcome)
            if values is None:
                values = expected[evaluation.outcome] = [v.expected(agent, evaluation.outcome, state) for agent in range(env.agents)]
            for agent in range(env.agents):
                payoffs[(agent,) + index] = values[agent] + table.net_transfer(index, agent)
    return InducedGame(table, v, payoffs)


@dataclass(frozen=True)
class MixedEquilibrium:
    strategies: typing.Tuple[typing.Tuple[Fraction, ...], ...]
    degenerate: bool = False

    def support(self, player: int) -> typing.Tuple[int, ...]:
        return tuple(index for index, probability in enumerate(self.strategies[player]) if probability)

    def cells(self):
        return itertools.product(*(self.support(player) for player in range(len(self.strategies))))

    def to_dict(self, table: MessageTable = None):
        players = []
        for player, strategy in enumerate(self.strategies):
            players.append(
                [
                    {
                        "message": table.messages[player][index].to_dict(table.env) if table is not None else index,
                        "probability": format_rational(probability),
                    }
                    for index, probability in enumerate(strategy)
                    if probability
                ]
            )
        return {"strategies": players, "degenerate": self.degenerate}


@dataclass
class EquilibriumSet:
    pure: typing.List[tuple] = field(default_factory=list)
    mixed: typing.List[MixedEquilibrium] = field(default_factory=list)
    completeness: str = EXHAUSTIVE
    degenerate: bool = False

    def to_dict(self, table: MessageTable = None):
        def pure_profile(index):
            if table is None:
                return list(index)
            return [message.to_dict(table.env) for message in table.profile(index)]

        return {
            "pure": [pure_profile(index) for index in self.pure],
            "mixed": [equilibrium.to_dict(table) for equilibrium in self.mixed],
            "completeness": self.completeness,
            "degenerate": self.degenerate,
        }


@documented
def pure_nash(game: InducedGame) -> EquilibriumSet:
    "Every profile at which no agent has a strictly better unilateral deviation, in index order."
    with trace("pure-scan", dims=list(game.dims)):
        stable = np.ones(game.dims, dtype=bool)
        for player in range(game.players):
            payoffs = game.payoffs[player]
            best = payoffs.max(axis=player, keepdims=True)
            stable &= np.asarray(payoffs == best, dtype=bool)
        found = [tuple(int(i) for i in index) for index in np.argwhere(stable)]
    return EquilibriumSet(pure=found, completeness=EXHAUSTIVE)


def _rational(value: Fraction):
    return sympy.Rational(value.numerator, value.denominator)


def _fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _vertex_average(solution, params, constraints) -> typing.Optional[list]:
    """
    Averages the vertices of the polytope cut out by ``constraints >= 0``
    over the free parameters of a solved system. The average lies in the
    relative interior, so a coordinate that is positive anywhere on the
    polytope is positive there.
    """
    params = list(params)
    zero = {param: 0 for param in params}
    linear = [([sympy.diff(expression, param) for param in params], expression.subs(zero)) for expression in constraints]
    vertices = set()
    for tight in itertools.combinations(linear, len(params)):
        system = sympy.Matrix([coefficients for coefficients, _ in tight])
        if system.det() == 0:
            continue
        point = system.LUsolve(sympy.Matrix([-constant for _, constant in tight]))
        substitution = dict(zip(params, point))
        if all(sympy.Rational(expression.subs(substitution)) >= 0 for expression in constraints):
            vertices.add(tuple(sympy.Rational(entry.subs(substitution)) for entry in solution))
    if not vertices:
        return None
    return [sum(vertex[index] for vertex in vertices) / len(vertices) for index in range(len(solution))]


def _indifferent_mixture(rows, others=()) -> typing.Optional[typing.Tuple[typing.List[Fraction], bool]]:
    """
    Solves for a strictly positive mixture over the columns that makes every
    row earn the same payoff and no row of ``others`` earn more. Returns the
    mixture and whether the system left free parameters, or None.
    """
    width = len(rows[0])
    if width == 1:
        return ([Fraction(1)], False) if len({row[0] for row in rows}) == 1 else None
    matrix = sympy.Matrix([[_rational(value) for value in row] + [-1] for row in rows] + [[1] * width + [0]])
    rhs = sympy.Matrix([0] * len(rows) + [1])
    try:
        solution, params = matrix.gauss_jordan_solve(rhs)
    except ValueError:
        return None
    if not params.shape[0]:
        mixture = [_fraction(value) for value in solution[:width]]
        return (mixture, False) if all(probability > 0 for probability in mixture) else None
    # Indifference continua: any strictly positive point of the solution set will do
    value = solution[width]
    constraints = list(solution[:width])
    constraints.extend(value - sum(_rational(payoff) * solution[index] for index, payoff in enumerate(row)) for row in others)
    point = _vertex_average(list(solution), params, constraints)
    if point is None:
        return None
    mixture = [_fraction(probability) for probability in point[:width]]
    return (mixture, True) if all(probability > 0 for probability in mixture) else None


def _dominated(payoffs: np.ndarray, support, against) -> bool:
    "True when some strategy in ``support`` is strictly beaten by another strategy against every opponent strategy in ``against``."
    for strategy in support:
        for other in range(payoffs.shape[0]):
            if other != strategy and all(payoffs[other, column] > payoffs[strategy, column] for column in against):
                return True
    return False


def _surviving(row_payoffs: np.ndarray, column_payoffs: np.ndarray) -> typing.Tuple[typing.List[int], typing.List[int]]:
    "Iterated elimination of strictly dominated pure strategies; every Nash equilibrium survives it."
    rows, columns = list(range(row_payoffs.shape[0])), list(range(row_payoffs.shape[1]))
    changed = True
    while changed:
        changed = False
        for i in list(rows):
            if any(all(row_payoffs[k, j] > row_payoffs[i, j] for j in columns) for k in rows if k != i):
                rows.remove(i)
                changed = True
        for j in list(columns):
            if any(all(column_payoffs[i, k] > column_payoffs[i, j] for i in rows) for k in columns if k != j):
                columns.remove(j)
                changed = True
    return rows, columns


def _best_responses(values) -> typing.Set[int]:
    top = max(values)
    return {index for index, value in enumerate(values) if value == top}


@documented
def mixed_nash_2p(game: InducedGame, max_support: int = 3, support_cap: int = 10**6) -> EquilibriumSet:
    """
    Support enumeration for two players with exact rational indifference
    systems, up to ``max_support`` strategies each. Degenerate support pairs
    report one equilibrium from the relative interior of their solution set.
    """
    if game.players != 2:
        raise DomainMismatch("Mixed enumeration needs exactly two players")
    if max_support < 1:
        raise ValueError("max_support must be at least 1")
    rows, columns = game.dims
    row_payoffs, column_payoffs = game.payoffs[0], game.payoffs[1]
    with trace("support-enumeration", dims=[rows, columns]) as details:
        surviving_rows, surviving_columns = _surviving(row_payoffs, column_payoffs)
        details["surviving"] = [len(surviving_rows), len(surviving_columns)]
        row_sizes = range(1, min(max_support, len(surviving_rows)) + 1)
        column_sizes = range(1, min(max_support, len(surviving_columns)) + 1)
        exhaustive = max_support >= max(len(surviving_rows), len(surviving_columns))
        result = EquilibriumSet(completeness=EXHAUSTIVE if exhaustive else f"BOUNDED_SUPPORT({max_support})")
        examined = 0
        for column_size in column_sizes:
            for column_support in itertools.combinations(surviving_columns, column_size):
                # Rows strictly beaten against this column support never enter a row support
                candidates = [i for i in surviving_rows if not _dominated(row_payoffs, (i,), column_support)]
                column_outside = [j for j in range(columns) if j not in column_support]
                for row_size in row_sizes:
                    for row_support in itertools.combinations(candidates, row_size):
                        examined += 1
                        if examined > support_cap:
                            raise SizeLimit(f"Support enumeration passed the cap of {support_cap} support pairs", supports=examined)
                        if _dominated(column_payoffs.T, column_support, row_support):
                            continue
                        row_outside = [i for i in range(rows) if i not in row_support]
                        # Row mixture keeps the column player indifferent and vice versa
                        x = _indifferent_mixture(
                            [[column_payoffs[i, j] for i in row_support] for j in column_support],
                            [[column_payoffs[i, j] for i in row_support] for j in column_outside],
                        )
                        if x is None:
                            continue
                        y = _indifferent_mixture(
                            [[row_payoffs[i, j] for j in column_support] for i in row_support],
                            [[row_payoffs[i, j] for j in column_support] for i in row_outside],
                        )
                        if y is None:
                            continue
                        row_strategy = [Fraction(0)] * rows
                        for i, probability in zip(row_support, x[0]):
                            row_strategy[i] = probability
                        column_strategy = [Fraction(0)] * columns
                        for j, probability in zip(column_support, y[0]):
                            column_strategy[j] = probability
                        row_values = [sum((row_payoffs[i, j] * column_strategy[j] for j in column_support), Fraction(0)) for i in range(rows)]
                        column_values = [sum((column_payoffs[i, j] * row_strategy[i] for i in row_support), Fraction(0)) for j in range(columns)]
                        row_best = _best_responses(row_values)
                        column_best = _best_responses(column_values)
                        if not set(row_support) <= row_best or not set(column_support) <= column_best:
                            continue
                        degenerate = x[1] or y[1] or row_best != set(row_support) or column_best != set(column_support)
                        result.mixed.append(MixedEquilibrium((tuple(row_strategy), tuple(column_strategy)), degenerate))
                        result.degenerate = result.degenerate or degenerate
        details["pairs"] = examined
    if result.degenerate:
        log.warning("Degenerate game: equilibria may form continua, one witness per support pair is reported")
    return result


@dataclass(frozen=True)
class Deviation:
    profile: tuple
    agent: int
    to: tuple
    gain: Fraction
    outcome_changes: bool

    def to_dict(self, table: MessageTable):
        return {
            "profile": [message.to_dict(table.env) for message in table.profile(self.profile)],
            "agent": self.agent + 1,
            "deviation": table.messages[self.agent][self.to[self.agent]].to_dict(table.env),
            "gain": format_rational(self.gain),
            "outcome_changes": self.outcome_changes,
        }


@dataclass
class Certificate:
    table: MessageTable
    deviations: typing.List[Deviation]
    # Profiles with the right outcome and no transfers need no deviation
    acceptable: int

    @property
    def smallest_gain(self) -> typing.Optional[Fraction]:
        return min((deviation.gain for deviation in self.deviations), default=None)

    def to_dict(self):
        smallest = self.smallest_gain
        return {
            "certified_profiles": len(self.deviations),
            "acceptable_profiles": self.acceptable,
            "smallest_gain": None if smallest is None else format_rational(smallest),
            "deviations": [deviation.to_dict(self.table) for deviation in self.deviations],
        }


def _deviation_order(table: MessageTable, agent: int, truthful):
    order = list(range(table.dims[agent]))
    if truthful is not None:
        order.remove(truthful[agent])
    return order


@documented
def margin_certificate(mech: Mechanism, env: Environment, state: int, table: MessageTable = None, profile_cap: int = 10**6) -> typing.Optional[Certificate]:
    """
    Exhibits, for every unacceptable pure profile, a unilateral deviation
    whose net transfer gain beats any possible utility swing: at least 1
    when the outcome changes and strictly positive when it does not.
    Returns None when some profile has no such deviation.
    """
    table = table or MessageTable(mech, env, state, profile_cap=profile_cap)
    truthful = table.truthful_index()
    deviations = []
    acceptable = 0
    for index in np.ndindex(*table.dims):
        if table.is_acceptable(index):
            acceptable += 1
            continue
        found = None
        # Deviations to the on-path message come first, then everything else
        candidates = []
        if truthful is not None:
            candidates.extend((agent, truthful[agent]) for agent in range(table.agents) if truthful[agent] != index[agent])
        for agent in range(table.agents):
            candidates.extend((agent, position) for position in _deviation_order(table, agent, truthful) if position != index[agent])
        for agent, position in candidates:
            to = index[:agent] + (position,) + index[agent + 1:]
            gain = table.net_transfer(to, agent) - table.net_transfer(index, agent)
            changes = table.evaluations[to].outcome != table.evaluations[index].outcome
            if gain >= 1 or (gain > 0 and not changes):
                found = Deviation(index, agent, to, gain, changes)
                break
        if found is None:
            log.debug("No certifying deviation from %s", table.profile(index))
            return None
        deviations.append(found)
    return Certificate(table, deviations, acceptable)


@dataclass
class StateVerification:
    state: int
    verdict: str
    profiles_checked: int = 0
    pure_equilibria: int = 0
    mixed_equilibria: int = 0
    completeness: str = EXHAUSTIVE
    witness: typing.Optional[dict] = None
    certificate: typing.Optional[Certificate] = None
    notes: typing.List[str] = field(default_factory=list)

    def to_dict(self, env: Environment):
        data = {
            "state": env.state_label(self.state),
            "verdict": self.verdict,
            "profiles_checked": self.profiles_checked,
            "pure_equilibria": self.pure_equilibria,
            "mixed_equilibria": self.mixed_equilibria,
            "completeness": self.completeness,
            "notes": list(self.notes),
        }
        if self.witness is not None:
            data["witness"] = self.witness
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        return data


@dataclass
class VerificationReport:
    env: Environment
    variant: str
    verdict: str
    samples: int
    seed: int
    states: typing.List[StateVerification] = field(default_factory=list)
    witness: typing.Optional[dict] = None
    notes: typing.List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_dict(self):
        data = {
            "variant": self.variant,
            "verdict": self.verdict,
            "samples": self.samples,
            "seed": self.seed,
            "states": [state.to_dict(self.env) for state in self.states],
            "notes": list(self.notes),
        }
        if self.witness is not None:
            data["witness"] = self.witness
        return data


def utility_profiles(env: Environment, state: int, samples: int, seed: int, denominator: int = 128, eta=Fraction(1, 10)) -> typing.List[UtilityProfile]:
    "The constant profile, seeded samples and, for failing renegotiation pairs, the adversarial profiles."
    rng = random.Random(f"{seed}/{env.state_label(state)}")
    profiles = [UtilityProfile.constant(env)]
    profiles.extend(UtilityProfile.sample(env, rng, denominator, label=f"sample-{n}") for n in range(samples))
    if env.agents == 2 and not env.is_costly:
        try:
            report = check_rp_conditions(env)
        except EvmechError as e:
            log.debug("Skipping adversarial profiles: %s", e)
        else:
            for verdict in report.failures():
                profiles.append(build_adversarial_profile(env, (verdict.first, verdict.second), verdict.case, eta=eta))
    return profiles


def _pure_witness(table: MessageTable, v: UtilityProfile, index) -> dict:
    return {"utility": v.label, "kind": "pure", **table.describe(index)}


def _mixed_witness(table: MessageTable, v: UtilityProfile, equilibrium: MixedEquilibrium, index) -> dict:
    return {"utility": v.label, "kind": "mixed", "equilibrium": equilibrium.to_dict(table), "cell": table.describe(index)}


def verify_state(
    mech: Mechanism,
    env: Environment,
    state: int,
    samples: int = 20,
    seed: int = 0,
    max_support: int = 3,
    mixed: bool = True,
    profile_cap: int = 10**6,
    support_cap: int = 10**6,
    denominator: int = 128,
    eta=Fraction(1, 10),
    certify: bool = True,
) -> StateVerification:
    result = StateVerification(state, IMPLEMENTS)
    try:
        table = MessageTable(mech, env, state, profile_cap=profile_cap)
    except SizeLimit as e:
        result.verdict = INCONCLUSIVE
        result.notes.append(e.message)
        return result
    two_players = env.agents == 2 and mixed
    if not two_players:
        result.notes.append("mixed equilibria not enumerated" + ("" if mixed else " (disabled)"))
    inconclusive = False
    for v in utility_profiles(env, state, samples, seed, denominator, eta):
        game = induce(mech, env, v, state, table=table)
        result.profiles_checked += 1
        pure = pure_nash(game)
        result.pure_equilibria += len(pure.pure)
        for index in pure.pure:
            if not table.is_acceptable(index):
                result.verdict = FAILS
                result.witness = _pure_witness(table, v, index)
                return result
        found = bool(pure.pure)
        if two_players:
            try:
                equilibria = mixed_nash_2p(game, max_support=max_support, support_cap=support_cap)
            except SizeLimit as e:
                if e.message not in result.notes:
                    result.notes.append(e.message)
                inconclusive = True
                continue
            result.completeness = equilibria.completeness
            if equilibria.degenerate and "degenerate game" not in result.notes:
                result.notes.append("degenerate game")
            for equilibrium in equilibria.mixed:
                if len(equilibrium.support(0)) == 1 and len(equilibrium.support(1)) == 1:
                    continue
                result.mixed_equilibria += 1
                for index in equilibrium.cells():
                    if not table.is_acceptable(index):
                        result.verdict = FAILS
                        result.witness = _mixed_witness(table, v, equilibrium, index)
                        return result
            found = found or bool(equilibria.mixed)
        if not found:
            note = f"no equilibrium found under {v.label}"
            log.warning(note)
            result.notes.append(note)
            inconclusive = True
    if result.completeness != EXHAUSTIVE:
        result.notes.append(f"mixed enumeration {result.completeness}")
    if inconclusive:
        result.verdict = INCONCLUSIVE
        return result
    if certify and all(isinstance(message, DirectMessage) for messages in table.messages for message in messages):
        result.certificate = margin_certificate(mech, env, state, table=table)
        if result.certificate is not None:
            result.verdict = CERTIFIED_ALL_V
    return result


def indistinguishable_failure(mech: Mechanism, env: Environment, profile_cap: int = 10**6) -> typing.Optional[dict]:
    "Equivalent states with different social choices whose induced games coincide under constant utilities."
    constant = UtilityProfile.constant(env)
    for states in equivalent_states(env):
        for first, other in itertools.combinations(states, 2):
            if env.outcome(first) == env.outcome(other):
                continue
            left = induce(mech, env, constant, first, profile_cap=profile_cap)
            right = induce(mech, env, constant, other, profile_cap=profile_cap)
            if left.payoffs.shape == right.payoffs.shape and bool(np.all(left.payoffs == right.payoffs)):
                return {
                    "indistinguishable": [env.state_label(first), env.state_label(other)],
                    "outcomes": [env.outcome(first), env.outcome(other)],
                }
    return None


@documented
def verify_implementation(
    mech: Mechanism,
    env: Environment,
    state: typing.Optional[int] = None,
    samples: int = 20,
    seed: int = 0,
    max_support: int = 3,
    mixed: bool = True,
    profile_cap: int = 10**6,
    support_cap: int = 10**6,
    denominator: int = 128,
    eta=Fraction(1, 10),
    certify: bool = True,
) -> VerificationReport:
    "Checks every equilibrium of the induced games at one state, or all states when ``state`` is None."
    started = time.perf_counter()
    states = list(env.states) if state is None else [state]
    report = VerificationReport(env, mech.variant, IMPLEMENTS, samples, seed)
    with trace("verify", variant=mech.variant, states=[env.state_label(s) for s in states]):
        if state is None:
            try:
                witness = indistinguishable_failure(mech, env, profile_cap=profile_cap)
            except SizeLimit as e:
                report.notes.append(e.message)
                witness = None
            if witness is not None:
                report.verdict = FAILS
                report.witness = witness
                return report
        for s in states:
            log.debug("Verifying %s at %s", mech.variant, env.state_label(s))
            report.states.append(
                verify_state(
                    mech,
                    env,
                    s,
                    samples=samples,
                    seed=seed,
                    max_support=max_support,
                    mixed=mixed,
                    profile_cap=profile_cap,
                    support_cap=support_cap,
                    denominator=denominator,
                    eta=eta,
                    certify=certify,
                )
            )
    verdicts = {result.verdict for result in report.states}
    if FAILS in verdicts:
        report.verdict = FAILS
        report.witness = next(result.witness for result in report.states if result.verdict == FAILS)
    elif INCONCLUSIVE in verdicts:
        report.verdict = INCONCLUSIVE
    elif verdicts == {CERTIFIED_ALL_V}:
        report.verdict = CERTIFIED_ALL_V
    log.info("Verified %s in %.1f ms: %s", mech.variant, 1000 * (time.perf_counter() - started), report.verdict)
    return report


__all__ = [
    "CERTIFIED_ALL_V",
    "Certificate",
    "DomainMismatch",
    "EquilibriumSet",
    "FAILS",
    "IMPLEMENTS",
    "INCONCLUSIVE",
    "InducedGame",
    "MessageTable",
    "MixedEquilibrium",
    "VerificationReport",
    "induce",
    "margin_certificate",
    "mixed_nash_2p",
    "pure_nash",
    "verify_implementation",
]
