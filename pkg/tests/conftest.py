from __future__ import annotations

import numpy as np
import pytest

from btembed import balanced_parens_grammar, balanced_parens_schema, compile_rules
from btembed import make_embedding, make_sweep_schema

acceptance_lines: list[str] = []


@pytest.fixture
def record_acceptance():
    def _record(line: str) -> None:
        acceptance_lines.append(line)
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter) -> None:
    if not acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def emb_small():
    # 10 data tokens, 2 attributes, roomy enough for size <= 8 round trips
    return make_embedding(make_sweep_schema(10, 2), 512, 7)


@pytest.fixture(scope="session")
def emb_paths():
    # 30 data tokens, 3 attributes, used by transformer path tests
    return make_embedding(make_sweep_schema(30, 3), 1000, 5)


@pytest.fixture(scope="session")
def parens_embedding():
    return make_embedding(balanced_parens_schema(), 1000, 9)


@pytest.fixture(scope="session")
def parens_ruleset(parens_embedding):
    return compile_rules(parens_embedding, balanced_parens_grammar())


@pytest.fixture(scope="session")
def rng_factory():
    def make(seed) -> np.random.Generator:
        return np.random.default_rng(seed)

    return make
