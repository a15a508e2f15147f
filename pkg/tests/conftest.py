
import numpy as np
import pytest

from geodiam.geometry import GroundSpace, SpaceKind
from geodiam.graphcore import GeometricGraph, is_connected
from geodiam.graphgen import RggParams, graph_from_points, sample_rgg
from geodiam.partition import partition_from_blocks



def path_graph(n):
    coords = np.column_stack([np.arange(n, dtype=float), np.zeros(n)])
    return GeometricGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)], coords,
                                     GroundSpace(SpaceKind.SQUARE, float(n)), 1.0)


def cycle_graph(n):
    return GeometricGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves):
    return GeometricGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def grid_graph(k, kind="square"):
    pts = np.array([(i, j) for j in range(k) for i in range(k)], dtype=float)
    return graph_from_points(pts, GroundSpace(SpaceKind(kind), float(k)), 1.0)


def connected_rgg(n, rho, kind="square", seed=0):
    """First connected sample at or after ``seed``."""
    for s in range(seed, seed + 1000):
        g = sample_rgg(RggParams(n, rho, SpaceKind(kind), s))
        if is_connected(g):
            return g
    raise RuntimeError("no connected sample found")


def random_nested(vertices, rng, depth):
    """Random recursive split of ``vertices`` into nested lists, 2 to 4 parts per level."""
    vertices = list(vertices)
    if depth == 0 or len(vertices) < 2:
        return vertices
    k = int(rng.integers(2, min(4, len(vertices)) + 1))
    perm = list(rng.permutation(vertices))
    cuts = sorted(rng.choice(np.arange(1, len(perm)), size=k - 1, replace=False))
    parts = np.split(np.array(perm), cuts)
    return [random_nested(sorted(int(x) for x in p), rng, depth - 1) for p in parts]


def random_partition(g, seed, depth=3):
    rng = np.random.default_rng(seed)
    tree = random_nested(range(g.n), rng, depth)
    if not isinstance(tree[0], list):
        tree = [tree]
    return partition_from_blocks(g, tree)


@pytest.fixture
def p5():
    return path_graph(5)


@pytest.fixture
def p5_split(p5):
    return partition_from_blocks(p5, [[0, 1, 2], [3, 4]])


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
