import random

import pytest

from qmasa.coxeter import FreeCoxeterGroup
from qmasa.hecke import HeckeElement
from qmasa.poly import PolyP


def random_element(G, rng, radius=3, terms=4):
    words = G.ball(radius)
    return HeckeElement({
        rng.choice(words): PolyP((rng.randint(-3, 3), rng.randint(-2, 2)))
        for _ in range(terms)
    })


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def G3():
    return FreeCoxeterGroup(3)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
