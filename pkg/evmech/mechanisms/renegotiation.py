"""
Budget-balanced two-agent mechanism whose equilibrium allocations leave
nothing to renegotiate.
"""

from fractions import Fraction

from ..environment import Environment, require_valid, supports, tightest_evidence, tightest_masks
from ..hookspecs import hookimpl
from ..renegotiation import check_rp_conditions
from ..utils import EvmechError
from . import DirectMessage, Mechanism, NotTwoAgents, Variant, point, zeros


class ConditionsFail(EvmechError):
    pass


class RPMechanism(Mechanism):
    "Outcome follows agent 1's claim; every fine is paid to the other agent."

    variant = "rp"
    component_labels = {"support": "claim not supported by own evidence", "refuted": "claim refuted by the other agent"}

    def __init__(self, env: Environment):
        super().__init__(env)
        self.tightest = tightest_masks(env)

    def outcome(self, profile):
        return point(self.env.outcome(profile[0].state))

    def components(self, profile):
        support = zeros(2)
        refuted = zeros(2)
        for i, j in ((0, 1), (1, 0)):
            if not supports(profile[i].article, self.tightest[i][profile[i].state]):
                support[i] -= 1
                support[j] += 1
            if not profile[j].article.contains(profile[i].state):
                refuted[i] -= 2
                refuted[j] += 2
        return {"support": tuple(support), "refuted": tuple(refuted)}

    def truthful(self, state):
        return tuple(DirectMessage(state, tightest_evidence(self.env, agent, state)) for agent in range(2))

    def parameters(self):
        return {"support_fine": Fraction(1), "refutation_fine": Fraction(2)}


def synthesize_rp_mechanism(env: Environment, force=False) -> RPMechanism:
    if env.agents != 2:
        raise NotTwoAgents("The renegotiation-proof mechanism needs exactly two agents")
    if not force:
        require_valid(env, measurable=False)
        report = check_rp_conditions(env)
        if not report.ok:
            raise ConditionsFail("Refutation conditions fail for some pair", report=report.to_dict())
    return RPMechanism(env)


@hookimpl
def register_mechanism_variants():
    return [
        Variant(
            "rp",
            lambda env, argument, settings: synthesize_rp_mechanism(env, force=settings.get("force", False)),
            "Budget-balanced renegotiation-proof mechanism for two agents",
        )
    ]
