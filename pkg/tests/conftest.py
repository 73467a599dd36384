from __future__ import annotations

import random

import pytest

from freebycyclic.words import Word

# criterion number -> (description, passed); filled by test_acceptance
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool]] = {}


def random_word(rng: random.Random, length: int, rank: int = 2) -> Word:
    letters = [rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(length)]
    return Word.from_letters(rank, letters)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20261016)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        desc, ok = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}: {desc}")
