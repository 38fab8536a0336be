import pathlib

import pytest

from gel import parse_graph

REPO = pathlib.Path(__file__).resolve().parent.parent
GRAPH_DIR = REPO / "graphs"

FIBONACCI = (GRAPH_DIR / "fibonacci.graph").read_text()
BARBELL = (GRAPH_DIR / "barbell.graph").read_text()
ROSE2 = (GRAPH_DIR / "rose2.graph").read_text()

SINGLE_LOOP = "vertex o\nedge a o o\n"

# two vertices, double edges both ways: nontrivial level-1 unitaries
PAIR = """vertex P
vertex Q
edge a P Q
edge b P Q
edge c Q P
edge d Q P
"""


def rose_text(n: int) -> str:
    lines = ["vertex o"] + [f"edge l{i} o o" for i in range(n)]
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def fib():
    return parse_graph(FIBONACCI)


@pytest.fixture(scope="session")
def barbell():
    return parse_graph(BARBELL)


@pytest.fixture(scope="session")
def rose2():
    return parse_graph(ROSE2)


@pytest.fixture(scope="session")
def pair_graph():
    return parse_graph(PAIR)


@pytest.fixture(scope="session")
def single_loop():
    return parse_graph(SINGLE_LOOP)
