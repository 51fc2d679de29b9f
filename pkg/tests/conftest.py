import pytest

from evmech import corpus
from evmech.environment import environment_to_dict
from evmech.utils import dumps


def pytest_configure(config):
    import sys

    sys._called_from_test = True


def pytest_unconfigure(config):
    import sys

    del sys._called_from_test


@pytest.fixture
def env_a():
    return corpus.fixture("env_a")


@pytest.fixture
def env_a_costly():
    return corpus.fixture("env_a_costly")


@pytest.fixture
def env_b():
    return corpus.fixture("env_b")


@pytest.fixture
def env_c():
    return corpus.fixture("env_c")


@pytest.fixture
def env_d():
    return corpus.fixture("env_d")


@pytest.fixture
def env_d_modified():
    return corpus.fixture("env_d_modified")


@pytest.fixture
def env_e():
    return corpus.fixture("env_e")


@pytest.fixture
def env_3agents():
    return corpus.fixture("env_3agents")


@pytest.fixture
def env_file(tmp_path):
    "Writes a fixture environment to disk and returns its path."

    def write(name):
        path = tmp_path / f"{name}.json"
        path.write_text(dumps(environment_to_dict(corpus.fixture(name))), encoding="utf-8")
        return str(path)

    return write
