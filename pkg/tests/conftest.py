import pytest

from promptmixer.config import load_config
from promptmixer.console import Engine, StepClock
from promptmixer.gateway import StubBackend


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture
def engine(config):
    eng = Engine(config, backend=StubBackend(), clock=StepClock())
    yield eng
    eng.close()


def make_engine(config, **kwargs):
    kwargs.setdefault("backend", StubBackend())
    kwargs.setdefault("clock", StepClock())
    return Engine(config, **kwargs)
