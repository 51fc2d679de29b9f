from evmech.version import __version__  # noqa
from evmech.environment import Environment, UtilityProfile, load_environment, parse_environment  # noqa
from evmech.mechanisms import Mechanism, Variant  # noqa
from evmech.games import verify_implementation  # noqa
from evmech.utils import EvmechError, ParseError  # noqa
from .hookspecs import hookimpl  # noqa
from .hookspecs import hookspec  # noqa
