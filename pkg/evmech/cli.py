import click
from click import formatting
from click.types import CompositeParamType
from click_default_group import DefaultGroup
import functools
import logging
import pathlib
import sys
import time

import mergedeep

from .app import DEFAULT_SETTINGS, SETTINGS, Workbench
from .corpus import write_corpus
from .environment import UnknownState, load_environment
from .games import EXIT_CODES
from .mechanisms import UnknownVariant
from .plugins import get_plugins, get_variants, pm
from .tracer import capture_traces, trace_summary
from .utils import (
    BadConfigError,
    EvmechError,
    ParseError,
    StartupError,
    ValueAsBooleanError,
    dumps,
    pairs_to_nested_config,
    parse_config,
    parse_rational,
    value_as_boolean,
)
from .version import __version__

# Use Rich for tracebacks if it is installed
try:
    from rich.traceback import install

    install(show_locals=True)
except ImportError:
    pass

EXIT_USAGE = 64
EXIT_PARSE = 65


class ParseFailure(click.ClickException):
    exit_code = EXIT_PARSE


class Setting(CompositeParamType):
    name = "setting"
    arity = 2

    def convert(self, config, param, ctx):
        name, value = config
        if name in DEFAULT_SETTINGS:
            # Bare setting names become settings.name, type checked against the default
            default = DEFAULT_SETTINGS[name]
            name = "settings.{}".format(name)
            if isinstance(default, bool):
                try:
                    return name, "true" if value_as_boolean(value) else "false"
                except ValueAsBooleanError:
                    self.fail(f'"{name}" should be on/off/true/false/1/0', param, ctx)
            elif isinstance(default, int):
                if not value.isdigit():
                    self.fail(f'"{name}" should be an integer', param, ctx)
                return name, value
            elif isinstance(default, str):
                try:
                    parse_rational(value)
                except ValueError:
                    self.fail(f'"{name}" should be a rational such as 1/2', param, ctx)
                # Keep rationals as strings so "1" is not read as an integer
                return name, '"{}"'.format(value)
            else:
                # Should never happen:
                self.fail("Invalid option")
        return name, value


class Rational(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        try:
            parse_rational(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)
        return value


def configure_logging(level):
    try:
        from rich.logging import RichHandler

        handlers = [RichHandler(show_path=False)]
    except ImportError:
        handlers = None
    logging.basicConfig(level=getattr(logging, level), format="%(name)s: %(message)s", handlers=handlers)


def workbench_options(fn):
    "Options every analysis command accepts."
    for decorator in reversed(
        (
            click.option(
                "-c",
                "--config",
                type=click.File(mode="r"),
                help="Path to JSON/YAML configuration file",
            ),
            click.option(
                "-s",
                "--setting",
                "settings",
                type=Setting(),
                help="nested.key, value setting to use in the configuration",
                multiple=True,
            ),
            click.option("--trace", is_flag=True, help="Append timing traces to the JSON output"),
            click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write JSON here instead of stdout"),
        )
    ):
        fn = decorator(fn)

    # Wrap it in the error mapping shared by every command
    @functools.wraps(fn)
    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ParseError as e:
            raise ParseFailure(str(e))
        except UnknownVariant as e:
            raise click.BadParameter(e.message, param_hint="--variant")
        except UnknownState as e:
            raise click.BadParameter(e.message, param_hint="--state")
        except (StartupError, BadConfigError) as e:
            raise click.UsageError(str(e))
        except EvmechError as e:
            raise click.ClickException(f"{type(e).__name__}: {e.message}")

    return wrapped


def make_workbench(config, settings, **overrides) -> Workbench:
    config_data = parse_config(config.read()) if config else {}
    config_data = config_data or {}
    # Merge in settings from -s/--setting
    if settings:
        mergedeep.merge(config_data, pairs_to_nested_config(settings))
    return Workbench(config_data, {key: value for key, value in overrides.items() if value is not None})


def emit(data, output=None, traces=None, started=None):
    if traces is not None:
        data = dict(data, _trace=trace_summary(traces, started))
    text = dumps(data)
    if output:
        pathlib.Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


class Traced:
    "Collects traces for ``--trace`` around a command body."

    def __init__(self, enabled):
        self.traces = [] if enabled else None
        self.started = time.perf_counter()
        self._context = capture_traces(self.traces) if enabled else None

    def __enter__(self):
        if self._context is not None:
            self._context.__enter__()
        return self

    def __exit__(self, *exc):
        if self._context is not None:
            return self._context.__exit__(*exc)
        return False

    def emit(self, data, output):
        emit(data, output, self.traces, self.started)


@click.group(cls=DefaultGroup, default="validate")
@click.version_option(version=__version__)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    help="Logging level for library messages",
)
def cli(log_level):
    """
    Synthesize evidence-based direct mechanisms and verify that they
    implement a social choice function in every equilibrium.
    """
    configure_logging(log_level.upper())


def _state(env, label):
    if label is None or label == "all":
        return None
    return env.states.index(label)


@cli.command()
@click.argument("env_file", type=click.Path(exists=True, dir_okay=False))
@workbench_options
@click.pass_context
def validate(ctx, env_file, config, settings, trace, output):
    """Check the evidence axioms, normality and measurability of an environment"""
    app = make_workbench(config, settings)
    with Traced(trace) as traced:
        env = load_environment(env_file)
        data = app.validate(env)
    traced.emit(data, output)
    ctx.exit(0 if data["ok"] else 1)


@cli.command()
@click.argument("env_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--state", help="True state to classify lies at (default: every state)")
@workbench_options
def classify(env_file, state, config, settings, trace, output):
    """Partition the lies at a true state by who can refute them"""
    app = make_workbench(config, settings)
    with Traced(trace) as traced:
        env = load_environment(env_file)
        index = _state(env, state)
        if index is None:
            data = {"partitions": [app.classify(env, s) for s in env.states]}
        else:
            data = app.classify(env, index)
    traced.emit(data, output)


@cli.command()
@click.argument("env_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--variant", required=True, help="Variant tag, e.g. theorem1, small:1/10, emstar:1/100")
@click.option("--force", is_flag=True, help="Skip measurability, normality and condition gates")
@click.option("--extensional", is_flag=True, help="Include the evaluated table of every message profile")
@click.option("--epsilon", type=Rational(), help="Slack parameter for the cost-robust penalties")
@click.option("--rounds", type=int, help="Fixed round count for the small-transfer mechanism")
@workbench_options
def synthesize(env_file, variant, force, extensional, epsilon, rounds, config, settings, trace, output):
    """Build a mechanism for an environment and print its rules"""
    app = make_workbench(config, settings, epsilon=epsilon, rounds=rounds)
    with Traced(trace) as traced:
        env = load_environment(env_file)
        mech = app.synthesize(env, variant, force=force)
        data = mech.to_dict(extensional=extensional, profile_cap=app.setting("profile_cap"))
    traced.emit(data, output)


@cli.command()
@click.argument("env_file", type=click.Path(exists=True, dir_okay=False), required=False)
@click.option("--variant", help="Variant tag, e.g. theorem1, small:1/10, emstar:1/100")
@click.option("--state", default="all", help="True state to verify, or all")
@click.option("--samples", type=int, help="Sampled utility profiles per state")
@click.option("--seed", type=int, help="Seed for utility sampling")
@click.option("--max-support", type=int, help="Largest support size for mixed enumeration")
@click.option("--mixed/--no-mixed", default=None, help="Enumerate mixed equilibria of two-agent games")
@click.option("--epsilon", type=Rational(), help="Slack parameter for the cost-robust penalties")
@click.option("--eta", type=Rational(), help="Slack in adversarial renegotiation utilities")
@click.option("--rounds", type=int, help="Fixed round count for the small-transfer mechanism")
@click.option("--force", is_flag=True, help="Skip measurability, normality and condition gates")
@click.option("--help-settings", is_flag=True, help="Show available settings")
@workbench_options
@click.pass_context
def verify(
    ctx,
    env_file,
    variant,
    state,
    samples,
    seed,
    max_support,
    mixed,
    epsilon,
    eta,
    rounds,
    force,
    help_settings,
    config,
    settings,
    trace,
    output,
):
    """Enumerate the equilibria of the induced games and report a verdict"""
    if help_settings:
        formatter = formatting.HelpFormatter()
        with formatter.section("Settings"):
            formatter.write_dl([(option.name, f"{option.help} (default={option.default})") for option in SETTINGS])
        click.echo(formatter.getvalue())
        ctx.exit(0)
    if not env_file:
        raise click.UsageError("Missing argument 'ENV_FILE'.")
    if not variant:
        raise click.UsageError("Missing option '--variant'.")
    app = make_workbench(
        config,
        settings,
        samples=samples,
        seed=seed,
        max_support=max_support,
        mixed=mixed,
        epsilon=epsilon,
        eta=eta,
        rounds=rounds,
    )
    with Traced(trace) as traced:
        env = load_environment(env_file)
        index = _state(env, state)
        mech = app.synthesize(env, variant, force=force)
        report = app.verify(env, mech, state=index)
    traced.emit(report.to_dict(), output)
    ctx.exit(EXIT_CODES[report.verdict])


@cli.command(name="check-em")
@click.argument("env_file", type=click.Path(exists=True, dir_okay=False))
@workbench_options
@click.pass_context
def check_em(ctx, env_file, config, settings, trace, output):
    """Check evidence monotonicity of a costly environment"""
    app = make_workbench(config, settings)
    with Traced(trace) as traced:
        env = load_environment(env_file)
        data = app.check_em(env)
    traced.emit(data, output)
    if data["em_cp"] is None:
        ctx.exit(2)
    ctx.exit(0 if data["em_cp"] else 1)


@cli.command(name="check-rp")
@click.argument("env_file", type=click.Path(exists=True, dir_okay=False))
@workbench_options
@click.pass_context
def check_rp(ctx, env_file, config, settings, trace, output):
    """Check the refutation conditions for renegotiation-proof contracting"""
    app = make_workbench(config, settings)
    with Traced(trace) as traced:
        env = load_environment(env_file)
        report = app.check_rp(env)
    traced.emit(report.to_dict(), output)
    ctx.exit(0 if report.ok else 1)


@cli.command()
@click.argument("directory", type=click.Path(file_okay=False), default="fixtures")
def corpus(directory):
    """Write the fixture environments and seeded random environments"""
    paths = write_corpus(directory)
    click.echo(dumps({"written": [str(path) for path in paths]}), nl=False)


@cli.command()
def plugins():
    """List registered plugins and mechanism variants"""
    variants = get_variants()
    data = {
        "plugins": get_plugins(),
        "variants": [{"name": name, "help": variant.help} for name, variant in sorted(variants.items())],
    }
    click.echo(dumps(data), nl=False)


pm.hook.register_commands(cli=cli)


def run(argv=None) -> int:
    "Runs the command line and returns its exit code instead of exiting."
    try:
        result = cli.main(args=argv, prog_name="evmech", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return result if isinstance(result, int) else 0


def main():
    sys.exit(run(sys.argv[1:]))
