import numpy as np
import pytest
from hypothesis import settings

from hschwarz.corpus import CONSTANT_NAMES, NONCONSTANT_NAMES, corpus_maps

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def corpus():
    return {name: spec.build() for name, spec in corpus_maps().items()}


@pytest.fixture(scope="session")
def nonconstant(corpus):
    return {k: corpus[k] for k in NONCONSTANT_NAMES}


@pytest.fixture(scope="session")
def constant(corpus):
    return {k: corpus[k] for k in CONSTANT_NAMES}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(pytestconfig):
    return pytestconfig.stash.setdefault(_ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_ACCEPTANCE_KEY, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log):
        terminalreporter.write_line(log[n])
