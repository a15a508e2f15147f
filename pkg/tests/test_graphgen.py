import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geodiam.geometry import GroundSpace, SpaceKind
from geodiam.graphcore import GeometricGraph
from geodiam.graphgen import (CoordinateOutOfRange, DanglingEndpoint, DuplicateEdge, MalformedHeader,
                              MalformedLine, RadiusTooLarge, RggParams, brute_force_edges,
                              format_graph, graph_from_points, grid_edges, parse_graph, read_graph,
                              sample_points, sample_rgg, write_graph)


def edge_set(g):
    return {tuple(e) for e in g.edge_array().tolist()}


def test_single_vertex():
    g = sample_rgg(RggParams(1, 0.3))
    assert g.n == 1 and g.m == 0


def test_threshold_rule_on_injected_points():
    pts = [(0, 0), (0, 1), (0, 2.5)]
    g = graph_from_points(pts, GroundSpace(SpaceKind.SQUARE, 3.0), 1.0)
    assert edge_set(g) == {(0, 1)}


def test_params_validation():
    with pytest.raises(ValueError):
        RggParams(10, 0.6)
    with pytest.raises(ValueError):
        RggParams(10, 0.0)
    with pytest.raises(ValueError):
        RggParams(0, 0.3)
    with pytest.raises(ValueError):
        RggParams(10, r=-1.0)
    with pytest.raises(ValueError):
        RggParams(10, 0.3, seed=2**64)
    assert RggParams(100, 0.25).radius == pytest.approx(100 ** 0.25)
    assert RggParams(100, 0.25, r=2.0).radius == 2.0


def test_torus_radius_too_large():
    with pytest.raises(RadiusTooLarge):
        sample_rgg(RggParams(100, 0.49, SpaceKind.TORUS))
    with pytest.raises(RadiusTooLarge):
        graph_from_points([(0, 0)], GroundSpace(SpaceKind.TORUS, 4.0), 2.0)


def test_points_are_prefix_stable():
    # point i only depends on (seed, i)
    a = sample_points(50, 7.0, 11)
    b = sample_points(80, 7.0, 11)
    assert np.array_equal(a, b[:50])
    assert not np.array_equal(a, sample_points(50, 7.0, 12))


def test_points_in_range():
    pts = sample_points(5000, 3.0, 5)
    assert pts.min() >= 0 and pts.max() < 3.0


@pytest.mark.parametrize("kind", ["square", "torus"])
@pytest.mark.parametrize("seed", range(6))
def test_grid_equals_brute_force(kind, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 500))
    rho = float(rng.uniform(0.1, 0.4))
    p = RggParams(n, rho, SpaceKind(kind), seed)
    if kind == "torus" and p.radius >= p.side / 2:
        pytest.skip("radius too large for the torus")
    g = sample_rgg(p)
    pts = sample_points(n, p.side, seed)
    brute = {tuple(e) for e in brute_force_edges(pts, g.space, p.radius).tolist()}
    assert edge_set(g) == brute


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 120), side=st.floats(2.0, 30.0), frac=st.floats(0.01, 0.49),
       torus=st.booleans(), seed=st.integers(0, 2**32))
def test_grid_equals_brute_force_property(n, side, frac, torus, seed):
    space = GroundSpace(SpaceKind.TORUS if torus else SpaceKind.SQUARE, side)
    r = frac * side
    pts = sample_points(n, side, seed)
    got = {tuple(e) for e in grid_edges(pts, space, r).tolist()}
    want = {tuple(e) for e in brute_force_edges(pts, space, r).tolist()}
    assert got == want


def test_degree_matches_brute_force_count():
    g = sample_rgg(RggParams(400, 0.3, SpaceKind.TORUS, 9))
    from geodiam.geometry import pairwise_distance
    D = pairwise_distance(g.space, g.coords[:, None, :], g.coords[None, :, :])
    want = (D <= g.radius).sum(axis=1) - 1
    assert np.array_equal(g.degrees(), want)


def test_seed_determinism():
    a = sample_rgg(RggParams(700, 0.3, SpaceKind.SQUARE, 42))
    b = sample_rgg(RggParams(700, 0.3, SpaceKind.SQUARE, 42))
    assert a == b
    assert format_graph(a) == format_graph(b)


def test_mean_degree_torus():
    # density 1 and a disk of radius r: expected degree close to pi r^2
    n, rho = 4000, 0.3
    degs = [2 * sample_rgg(RggParams(n, rho, SpaceKind.TORUS, s)).m / n for s in range(20)]
    expected = math.pi * n ** (2 * rho)
    assert abs(np.mean(degs) - expected) / expected < 0.15


def test_round_trip(tmp_path):
    for kind in ("square", "torus"):
        g = sample_rgg(RggParams(300, 0.3, SpaceKind(kind), 3))
        path = tmp_path / f"{kind}.txt"
        write_graph(g, path)
        h = read_graph(path)
        assert h == g
        assert np.array_equal(h.coords, g.coords)
        assert h.radius == g.radius
        assert format_graph(h) == path.read_text()


def test_header_shape():
    g = sample_rgg(RggParams(100, 0.2, SpaceKind.TORUS, 1))
    head = format_graph(g).splitlines()[0].split()
    assert head[:3] == ["geograph", "v1", "torus"]
    assert int(head[4]) == 100 and int(head[5]) == g.m


def test_empty_edge_section():
    g = parse_graph("geograph v1 square 4 3 0\n0 0 0\n1 1 1\n2 2 2\n")
    assert g.n == 3 and g.m == 0


def test_header_without_radius_is_accepted():
    g = parse_graph("geograph v1 square 4 2 1\n0 0 0\n1 1 1\n0 1\n")
    assert g.radius is None and g.m == 1


@pytest.mark.parametrize("text, exc, line", [
    ("", MalformedHeader, 1),
    ("graph v1 square 4 1 0\n0 0 0\n", MalformedHeader, 1),
    ("geograph v1 disc 4 1 0\n0 0 0\n", MalformedHeader, 1),
    ("geograph v1 square 4 2 1\n0 0 0\n1 1 1\n0 2\n", DanglingEndpoint, 4),
    ("geograph v1 square 4 2 2\n0 0 0\n1 1 1\n0 1\n1 0\n", DuplicateEdge, 5),
    ("geograph v1 square 4 2 0\n0 0 0\n1 4 1\n", CoordinateOutOfRange, 3),
    ("geograph v1 square 4 2 0\n0 0 0\n1 1\n", MalformedLine, 3),
    ("geograph v1 square 4 2 1\n0 0 0\n1 1 1\n", MalformedLine, 4),
    ("geograph v1 square 4 2 1\n0 0 0\n1 1 1\n1 1\n", MalformedLine, 4),
])
def test_parse_errors(text, exc, line):
    with pytest.raises(exc) as info:
        parse_graph(text)
    assert info.value.lineno == line


def test_distinct_error_classes():
    classes = {CoordinateOutOfRange, DanglingEndpoint, DuplicateEdge, MalformedHeader, MalformedLine}
    assert len(classes) == 5
    assert all(issubclass(c, ValueError) for c in classes)


def test_from_edges_rejects_bad_input():
    with pytest.raises(ValueError):
        GeometricGraph.from_edges(2, [(0, 2)])
    with pytest.raises(ValueError):
        GeometricGraph.from_edges(2, [(1, 1)])
