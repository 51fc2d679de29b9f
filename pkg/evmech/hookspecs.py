from pluggy import HookimplMarker
from pluggy import HookspecMarker

hookspec = HookspecMarker("evmech")
hookimpl = HookimplMarker("evmech")


@hookspec
def register_mechanism_variants():
    """Return a list of Variant(name, synthesize, help) tuples for synthesizable mechanisms"""


@hookspec
def register_commands(cli):
    """Register additional CLI commands, e.g. 'evmech mycommand ...'"""
