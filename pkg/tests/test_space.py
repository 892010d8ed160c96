import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from quasiarc import (MetricSpace, FormatError, check_metric_axioms,
                      diameter, hausdorff_distance, set_distance)

import brute_oracle as oracle


def test_distance_identity():
    sp = MetricSpace.euclidean([(0.0, 0.0), (3.0, 4.0)])
    assert sp.dist(0, 0) == 0.0
    assert sp.dist(1, 1) == 0.0


def test_distance_345():
    sp = MetricSpace.euclidean([(0.0, 0.0), (3.0, 4.0)])
    assert sp.dist(0, 1) == pytest.approx(5.0)
    assert sp.dist(1, 0) == pytest.approx(5.0)


def test_snowflake_distance():
    sp = MetricSpace.snowflake([(0.0, 0.0), (3.0, 4.0)], alpha=0.5)
    assert sp.dist(0, 1) == pytest.approx(math.sqrt(5.0))


def test_snowflake_alpha_range():
    for alpha in (0.0, -0.3, 1.2):
        with pytest.raises(FormatError):
            MetricSpace.snowflake([(0.0,), (1.0,)], alpha=alpha)


def test_index_out_of_range():
    sp = MetricSpace.euclidean([(0.0,), (1.0,)])
    with pytest.raises(IndexError):
        sp.dist(0, 5)


def test_duplicate_points_rejected():
    with pytest.raises(FormatError):
        MetricSpace.euclidean([(0.0, 0.0), (0.0, 0.0), (1.0, 1.0)])


def test_resolution_line(line100):
    assert line100.h == pytest.approx(1.0)
    assert line100.step_radius == pytest.approx(1.5)


def test_set_distance_line(line100):
    assert set_distance(line100, {0}, {5, 6}) == pytest.approx(5.0)
    assert set_distance(line100, {3}, {3}) == 0.0
    assert set_distance(line100, {1, 2, 3}, {3, 9}) == 0.0


def test_set_distance_empty(line100):
    with pytest.raises(ValueError):
        set_distance(line100, set(), {1})


def test_hausdorff_line(line100):
    assert hausdorff_distance(line100, {0}, {0, 10}) == pytest.approx(10.0)
    assert hausdorff_distance(line100, {4, 7}, {4, 7}) == 0.0


@given(st.data())
@settings(max_examples=25, deadline=None)
def test_hausdorff_symmetry_random_sets(data):
    sp = MetricSpace.euclidean([(float(i % 5), float(i // 5))
                                for i in range(20)])
    u = data.draw(st.sets(st.integers(0, 19), min_size=1, max_size=8))
    v = data.draw(st.sets(st.integers(0, 19), min_size=1, max_size=8))
    assert hausdorff_distance(sp, u, v) == pytest.approx(
        hausdorff_distance(sp, v, u))
    assert hausdorff_distance(sp, u, v) == pytest.approx(
        oracle.hausdorff(sp, u, v))


@given(st.data())
@settings(max_examples=20, deadline=None)
def test_hausdorff_triangle_inequality(data):
    rng = np.random.default_rng(7)
    coords = rng.uniform(0, 10, size=(30, 2))
    sp = MetricSpace.euclidean(np.round(coords, 4))
    subsets = [data.draw(st.sets(st.integers(0, 29), min_size=1, max_size=10))
               for _ in range(3)]
    a, b, c = subsets
    d_ab = hausdorff_distance(sp, a, b)
    d_bc = hausdorff_distance(sp, b, c)
    d_ac = hausdorff_distance(sp, a, c)
    assert d_ac <= d_ab + d_bc + 1e-9


def test_diameter_examples():
    sp = MetricSpace.euclidean([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    assert diameter(sp, {0}) == 0.0
    assert diameter(sp, {0, 1, 2}) == pytest.approx(math.sqrt(2.0))
    assert diameter(sp, [2, 0, 1]) == pytest.approx(math.sqrt(2.0))
    assert diameter(sp, {0, 1, 2}) == pytest.approx(
        oracle.diameter(sp, {0, 1, 2}))


def test_metric_axioms_euclidean_cloud():
    rng = np.random.default_rng(3)
    sp = MetricSpace.euclidean(np.round(rng.uniform(0, 5, size=(40, 3)), 4))
    check_metric_axioms(sp)


def test_metric_axioms_snowflake_cloud():
    rng = np.random.default_rng(4)
    sp = MetricSpace.snowflake(np.round(rng.uniform(0, 5, size=(30, 2)), 4),
                               alpha=0.6)
    check_metric_axioms(sp)


def test_matrix_space_validation():
    good = [[0.0, 1.0, 2.0], [1.0, 0.0, 1.5], [2.0, 1.5, 0.0]]
    sp = MetricSpace.from_matrix(good)
    assert sp.dist(0, 2) == 2.0
    check_metric_axioms(sp)

    asym = [[0.0, 1.0], [2.0, 0.0]]
    with pytest.raises(FormatError, match="asymmetric"):
        MetricSpace.from_matrix(asym)

    bad_triangle = [[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]]
    with pytest.raises(FormatError, match="triangle"):
        MetricSpace.from_matrix(bad_triangle)


def test_graph_space_shortest_path_closure():
    # path a-b-c plus a long shortcut edge a-c; closure must prefer a-b-c
    edges = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]
    sp = MetricSpace.from_graph(edges)
    assert sp.dist(0, 2) == pytest.approx(2.0)
    assert sp.h == pytest.approx(1.0)
    # brute Floyd-Warshall agreement
    n = sp.n
    big = [[math.inf] * n for _ in range(n)]
    for i in range(n):
        big[i][i] = 0.0
    for i, j, w in edges:
        big[i][j] = min(big[i][j], w)
        big[j][i] = min(big[j][i], w)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                big[i][j] = min(big[i][j], big[i][k] + big[k][j])
    for i in range(n):
        for j in range(n):
            assert sp.dist(i, j) == pytest.approx(big[i][j])


def test_step_components():
    sp = MetricSpace.euclidean([(0.0,), (1.0,), (10.0,), (11.0,)],
                               step_radius=1.5)
    comps = sp.step_components()
    assert comps == [[0, 1], [2, 3]]
    assert not sp.is_step_connected()
