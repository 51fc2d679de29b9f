from fractions import Fraction
import json
import math
import mergedeep
import typing
import yaml

# An article that cannot be presented at a state costs this much there
INFINITE = math.inf

functions_marked_as_documented = []


def documented(fn):
    functions_marked_as_documented.append(fn)
    return fn


class EvmechError(Exception):
    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self):
        return {"error": type(self).__name__, "message": self.message, **self.details}


class ParseError(EvmechError):
    def __init__(self, message, source=None, path=None, line=None, column=None):
        super().__init__(message)
        self.source = source
        self.path = path
        self.line = line
        self.column = column

    def __str__(self):
        anchor = []
        if self.source:
            anchor.append(str(self.source))
        if self.line is not None:
            anchor.append(str(self.line))
            if self.column is not None:
                anchor.append(str(self.column))
        prefix = ":".join(anchor)
        if self.path:
            prefix = f"{prefix}: {self.path}" if prefix else self.path
        return f"{prefix}: {self.message}" if prefix else self.message


class PreconditionViolated(EvmechError):
    pass


class WitnessMissing(EvmechError):
    pass


class SizeLimit(EvmechError):
    pass


class StartupError(Exception):
    pass


class BadConfigError(Exception):
    pass


@documented
def parse_rational(value: typing.Any, allow_infinite: bool = False) -> typing.Union[Fraction, float]:
    "Parses ``p/q``, ``p`` or an integer into an exact Fraction; ``inf`` only when allowed."
    if isinstance(value, bool):
        raise ValueError(f"Not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in ("inf", "infinity"):
            if not allow_infinite:
                raise ValueError("Infinite value not allowed here")
            return INFINITE
        if "." in text or "e" in text.lower():
            raise ValueError(f"Rationals must be written as p/q, not {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            pass
    raise ValueError(f"Not a rational: {value!r}")


@documented
def format_rational(value: typing.Union[Fraction, float]) -> str:
    "Renders an exact rational (or infinity) the way environment files store it."
    if value == INFINITE:
        return "inf"
    return str(Fraction(value))


def members(mask: int) -> typing.List[int]:
    "State indices set in a bitmask, ascending."
    indices = []
    index = 0
    while mask:
        if mask & 1:
            indices.append(index)
        mask >>= 1
        index += 1
    return indices


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def is_subset(inner: int, outer: int) -> bool:
    return inner & ~outer == 0


class CustomJSONEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, Fraction):
            return format_rational(obj)
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        to_dict = getattr(obj, "to_dict", None)
        if callable(to_dict):
            return to_dict()
        return json.JSONEncoder.default(self, obj)


def dumps(data: typing.Any) -> str:
    "Canonical report JSON: indented, UTF-8, newline terminated."
    return json.dumps(data, indent=2, cls=CustomJSONEncoder, ensure_ascii=False) + "\n"


@documented
def parse_config(content: str) -> dict:
    "Detects if content is JSON or YAML and parses it appropriately."
    try:
        return json.loads(content)
    except json.JSONDecodeError:
        try:
            return yaml.safe_load(content)
        except yaml.YAMLError:
            raise BadConfigError("Config is not valid JSON or YAML")


def value_as_boolean(value):
    if value.lower() not in ("on", "off", "true", "false", "1", "0"):
        raise ValueAsBooleanError
    return value.lower() in ("on", "true", "1")


class ValueAsBooleanError(ValueError):
    pass


def _handle_pair(key: str, value: str) -> dict:
    """
    Turn a key-value pair into a nested dictionary.
    foo, bar => {'foo': 'bar'}
    settings.samples, 5 => {'settings': {'samples': 5}}
    """
    try:
        value = json.loads(value)
    except json.JSONDecodeError:
        # If it doesn't parse as JSON, treat it as a string
        pass

    keys = key.split(".")
    result = current_dict = {}

    for k in keys[:-1]:
        current_dict[k] = {}
        current_dict = current_dict[k]

    current_dict[keys[-1]] = value
    return result


def pairs_to_nested_config(pairs: typing.List[typing.Tuple[str, typing.Any]]) -> dict:
    """
    Parse a list of key-value pairs into a nested dictionary.
    """
    result = {}
    for key, value in pairs:
        mergedeep.merge(result, _handle_pair(key, value))
    return result
