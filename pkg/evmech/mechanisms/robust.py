"""
The refutation mechanism with penalties scaled to survive any evidence
costs below a known bound. The designer only reads the bound; the game
engine charges the actual costs.
"""

from dataclasses import dataclass
from fractions import Fraction
import typing

from ..environment import Environment, require_valid
from ..hookspecs import hookimpl
from ..utils import INFINITE, EvmechError, PreconditionViolated, documented, format_rational, parse_rational
from . import Variant
from .hard import RefutationMechanism


class BadEpsilon(EvmechError):
    pass


class CostExceedsBound(EvmechError):
    pass


class MissingCostBound(EvmechError):
    pass


@dataclass(frozen=True)
class RobustParams:
    refutation: Fraction
    support: Fraction
    disagreement: Fraction
    cardinality: Fraction
    epsilon: Fraction
    cost_bound: Fraction
    states: int
    agents: int

    def inequalities(self) -> typing.Dict[str, bool]:
        C, n, I, e = self.cost_bound, self.states, self.agents, self.epsilon
        T1, T2, T3, T4 = self.refutation, self.support, self.disagreement, self.cardinality
        return {
            "A": T1 > C * n / e,
            "C": T1 >= 1 + T2 + (I - 1) * T3 + T4,
            "H": T2 >= 1 + (I - 1) * T3,
            "J": T3 >= 1,
            "G": T4 > C * n / (1 - e),
        }

    def violations(self) -> typing.List[str]:
        return [name for name, holds in self.inequalities().items() if not holds]

    def refutation_margin(self) -> Fraction:
        "Expected refutation reward when the other agent's claim decides the outcome with probability epsilon."
        return self.epsilon / self.states * self.refutation

    def self_refutation_margin(self) -> Fraction:
        "Expected saving from presenting the tightest evidence against an unsupported claim."
        return (1 - self.epsilon) * self.cardinality / self.states

    def to_dict(self):
        return {
            "T1": format_rational(self.refutation),
            "T2": format_rational(self.support),
            "T3": format_rational(self.disagreement),
            "T4": format_rational(self.cardinality),
            "epsilon": format_rational(self.epsilon),
            "cost_bound": format_rational(self.cost_bound),
            "states": self.states,
            "agents": self.agents,
        }


@documented
def solve_params(cost_bound, n_states: int, agents: int, epsilon=Fraction(1, 2)) -> RobustParams:
    "Constructs penalty magnitudes meeting all five inequalities for costs below ``cost_bound``."
    C = Fraction(cost_bound)
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise BadEpsilon(f"epsilon must lie strictly between 0 and 1, got {epsilon}")
    if C <= 0:
        raise MissingCostBound("The cost bound must be positive")
    cardinality = C * n_states / (1 - epsilon) + epsilon
    disagreement = Fraction(1)
    support = 1 + (agents - 1) * disagreement
    refutation = max(1 + support + (agents - 1) * disagreement + cardinality, C * n_states / epsilon + 1)
    params = RobustParams(refutation, support, disagreement, cardinality, epsilon, C, n_states, agents)
    violations = params.violations()
    if violations:
        raise PreconditionViolated(f"Penalties violate inequalities {', '.join(violations)}", violations=violations)
    return params


class RobustMechanism(RefutationMechanism):
    variant = "theorem3"
    costly = True

    def __init__(self, env: Environment, params: RobustParams):
        super().__init__(
            env,
            refutation=params.refutation,
            support=params.support,
            disagreement=params.disagreement,
            cardinality=params.cardinality,
        )
        self.params = params

    def parameters(self):
        return self.params.to_dict()


def synthesize_theorem3(env: Environment, epsilon=Fraction(1, 2), force=False) -> RobustMechanism:
    if env.cost_bound is None:
        raise MissingCostBound("The cost-robust mechanism needs a cost_bound")
    if env.costs is not None:
        for agent in range(env.agents):
            for article, row in env.costs[agent]:
                for state, cost in enumerate(row):
                    if cost != INFINITE and cost >= env.cost_bound:
                        raise CostExceedsBound(
                            f"Agent {agent + 1} pays {cost} for {article.label} at {env.state_label(state)}, not below {env.cost_bound}",
                        )
    if not force:
        require_valid(env)
    return RobustMechanism(env, solve_params(env.cost_bound, len(env.states), env.agents, epsilon))


def _theorem3(env, argument, settings):
    epsilon = parse_rational(argument) if argument else parse_rational(settings.get("epsilon", "1/2"))
    return synthesize_theorem3(env, epsilon=epsilon, force=settings.get("force", False))


@hookimpl
def register_mechanism_variants():
    return [Variant("theorem3", _theorem3, "Refutation mechanism robust to costs below cost_bound: theorem3[:<epsilon>]")]
