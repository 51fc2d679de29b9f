import collections
from fractions import Fraction
import logging
import typing

from .challenges import cheapest_sets, is_evidence_monotonic_cp, is_evidence_monotonic_star
from .environment import Environment, equivalent_states, is_measurable, is_normal, validate_structure
from .games import VerificationReport, verify_implementation
from .lies import classify
from .mechanisms import Mechanism, UnknownVariant, parse_variant_tag
from .plugins import get_variants
from .renegotiation import RPReport, check_rp_conditions
from .utils import StartupError, parse_rational

log = logging.getLogger(__name__)

Setting = collections.namedtuple("Setting", ("name", "default", "help"))
SETTINGS = (
    Setting("samples", 20, "Sampled utility profiles per verified state"),
    Setting("seed", 0, "Seed for utility sampling"),
    Setting("max_support", 3, "Largest support size in two-player mixed enumeration"),
    Setting("mixed", True, "Enumerate mixed equilibria of two-agent games"),
    Setting("profile_cap", 1000000, "Largest message-profile product an induced game may have"),
    Setting("support_cap", 1000000, "Largest number of support pairs a mixed search may try"),
    Setting("selection_cap", 1000000, "Largest number of cheapest-selection combinations tried"),
    Setting("k_max", 1000000, "Largest round count for the small-transfer mechanism"),
    Setting("rounds", 0, "Fixed round count for the small-transfer mechanism (0 picks the smallest feasible)"),
    Setting("epsilon", "1/2", "Slack parameter for the cost-robust penalties"),
    Setting("eta", "1/10", "Slack in adversarial renegotiation utility profiles"),
    Setting("denominator", 128, "Largest denominator for sampled utilities"),
)
DEFAULT_SETTINGS = {option.name: option.default for option in SETTINGS}


class Workbench:
    """
    Holds settings and exposes every pipeline the command line runs:
    validation, lie classification, synthesis, verification and the
    evidence monotonicity and renegotiation checks.
    """

    def __init__(self, config: dict = None, settings: dict = None):
        config = config or {}
        config_settings = config.get("settings") or {}
        for key in config_settings:
            if key not in DEFAULT_SETTINGS:
                raise StartupError("Invalid setting '{}' in config".format(key))
        for key in settings or {}:
            if key not in DEFAULT_SETTINGS:
                raise StartupError("Invalid setting '{}' in settings".format(key))
        self.config = config
        # Explicit settings overwrite config file settings
        self._settings = dict(DEFAULT_SETTINGS, **config_settings, **(settings or {}))

    def setting(self, key):
        return self._settings.get(key, None)

    def rational_setting(self, key) -> Fraction:
        return parse_rational(self.setting(key))

    def variants(self):
        return get_variants()

    def synthesize(self, env: Environment, tag: str, force: bool = False) -> Mechanism:
        name, argument = parse_variant_tag(tag)
        variants = self.variants()
        if name not in variants:
            raise UnknownVariant(f"Unknown variant {name!r}; known: {', '.join(sorted(variants))}", variant=name)
        settings = dict(self._settings, force=force)
        log.debug("Synthesizing %s for %d agents over %d states", tag, env.agents, len(env.states))
        return variants[name].synthesize(env, argument, settings)

    def verify(self, env: Environment, mech: Mechanism, state: typing.Optional[int] = None) -> VerificationReport:
        return verify_implementation(
            mech,
            env,
            state=state,
            samples=self.setting("samples"),
            seed=self.setting("seed"),
            max_support=self.setting("max_support"),
            mixed=self.setting("mixed"),
            profile_cap=self.setting("profile_cap"),
            support_cap=self.setting("support_cap"),
            denominator=self.setting("denominator"),
            eta=self.rational_setting("eta"),
        )

    def validate(self, env: Environment) -> dict:
        report = validate_structure(env)
        data = report.to_dict()
        if report.ok:
            normal = is_normal(env)
            measurable = is_measurable(env)
            data["normal"] = normal.ok
            if not normal.ok:
                agent, state = normal.witness
                data["not_normal_at"] = {"agent": agent + 1, "state": env.state_label(state)}
            data["measurable"] = measurable.ok
            if not measurable.ok:
                data["violating_pair"] = [env.state_label(state) for state in measurable.witness]
            data["classes"] = [[env.state_label(state) for state in states] for states in equivalent_states(env)]
        return data

    def classify(self, env: Environment, state: int) -> dict:
        return classify(env, state).to_dict(env)

    def check_em(self, env: Environment) -> dict:
        cheapest = cheapest_sets(env)
        cp = is_evidence_monotonic_cp(env, cap=self.setting("selection_cap"), cheapest=cheapest)
        star = is_evidence_monotonic_star(env, cheapest)
        data = {
            "em_cp": cp.holds,
            "em_cp_complete": cp.complete,
            "em_star": star.ok,
            "cheapest": cheapest.to_dict(env),
        }
        if cp.witness is not None:
            data["violation"] = [env.state_label(state) for state in cp.witness]
        if cp.selection is not None:
            data["selection"] = {
                str(agent + 1): {env.state_label(state): article.label for state, article in enumerate(row)}
                for agent, row in enumerate(cp.selection.designated)
            }
        if star.witness is not None:
            data["em_star_violation"] = [env.state_label(state) for state in star.witness]
        return data

    def check_rp(self, env: Environment) -> RPReport:
        return check_rp_conditions(env)
