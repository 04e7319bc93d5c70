import functools

import pytest

from helion.ingest import ingest_records
from helion.scheduler import extract_sequence, schedule
from helion.seeding import derive_seed
from helion.synthetic import make_routine_file

SYNTH_SEED = 1


@functools.lru_cache(maxsize=None)
def synthetic_corpus(seed: int = SYNTH_SEED, users: int = 10, per_user: int = 25):
    """Month-long sequences for synthetic users, scheduled as the CLI does."""
    result = ingest_records(make_routine_file(users, per_user, seed))
    assert not result.errors
    corpus = []
    for user, routines in result.by_user().items():
        timeline = schedule(routines, 30, derive_seed(seed, f"schedule:{user}"))
        corpus.append(extract_sequence(timeline, routines, user))
    return tuple(corpus)


@pytest.fixture(scope="session")
def corpus():
    return list(synthetic_corpus())


_RESULTS: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    _RESULTS.append(f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in _RESULTS:
            terminalreporter.write_line(line)
