import random

import pytest

from varheight.dynamics import build_family
from varheight.exact import IntPolynomial
from varheight.heights_qt import qt_from_ints

T = IntPolynomial((0, 1))
ONE = IntPolynomial((1,))


def quad_family(c=T):
    """x^2 + c y^2 : y^2 over Q(t)."""
    return build_family(1, 2, [{(2, 0): 1, (0, 2): c}, {(0, 2): 1}])


@pytest.fixture(scope="session")
def x2t():
    return quad_family()


@pytest.fixture(scope="session")
def origin():
    return qt_from_ints([IntPolynomial(()), ONE])


@pytest.fixture
def rng():
    return random.Random(20261016)


FAMILY_TEXT = """\
N: 1
d: 2
forms:
  - - [[2, 0], ["1"]]
    - [[0, 2], ["0", "1"]]
  - - [[0, 2], ["1"]]
"""


@pytest.fixture
def family_file(tmp_path):
    p = tmp_path / "fam.yaml"
    p.write_text(FAMILY_TEXT)
    return str(p)


# acceptance criteria report one line each; collected here and echoed in the summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
