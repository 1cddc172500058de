import json
from pathlib import Path

import pytest

from salesminer import ScorerConfig, make_scorer, parse_chatlog
from salesminer.scoring import Lexicons

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def scorer():
    return make_scorer(ScorerConfig())


@pytest.fixture(scope="session")
def fixture_bytes() -> bytes:
    return (DATA / "faq_fixture.csv").read_bytes()


@pytest.fixture(scope="session")
def fixture_chatlog(fixture_bytes):
    return parse_chatlog(fixture_bytes, source_file="faq_fixture.csv")


@pytest.fixture(scope="session")
def expected_pairs() -> list[dict]:
    return json.loads((DATA / "faq_expected.json").read_text("utf-8"))


@pytest.fixture(scope="session")
def lexicons() -> tuple[set, list]:
    """(greetings, interrogatives) as plain data for the oracles."""
    lx = Lexicons()
    return set(lx.greetings), list(lx.interrogatives)


@pytest.fixture(scope="session")
def rules_path() -> Path:
    return DATA / "rules.toml"
