import pytest

from ccgamr.fixtures import LEXICON_PATH, gold, script
from ccgamr.lexicon import load as load_lexicon


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(LEXICON_PATH)


@pytest.fixture(scope="session")
def gold_path():
    return gold


@pytest.fixture(scope="session")
def script_path():
    return script
