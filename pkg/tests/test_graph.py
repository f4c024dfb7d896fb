"""이분 그래프 생성과 링크 분할"""

import numpy as np
import pytest

from src.core.graph import build_graph, split, split_test_size
from src.errors import ConfigError, DataError


def test_build_graph_degrees(t1_graph):
    assert t1_graph.object_degree.tolist() == [1, 2]
    assert t1_graph.user_degree.tolist() == [2, 1]
    assert t1_graph.num_links == 3


def test_toy_degrees(toy_graph):
    assert toy_graph.object_degree.tolist() == [2, 5, 2]
    assert int(toy_graph.object_degree.sum()) == int(toy_graph.user_degree.sum()) == 9


def test_duplicate_links_collapse():
    graph = build_graph(2, 2, [(0, 0), (0, 0)])
    assert graph.num_links == 1
    assert graph.object_degree.tolist() == [1, 0]


def test_out_of_range_link_rejected():
    with pytest.raises(DataError, match=r"\(2, 0\)"):
        build_graph(2, 2, [(0, 0), (2, 0)])


def test_adjacency_matches_links(toy_graph):
    a = toy_graph.adjacency.toarray()
    assert a.shape == (3, 6)
    assert a.sum() == 9
    assert a[1, 2] == 1.0 and a[0, 2] == 0.0
    assert toy_graph.user_objects[1].tolist() == [0, 1, 2]


def test_split_sizes_and_disjointness():
    graph = build_graph(5, 2, [(o, u) for o in range(5) for u in range(2)])
    data = split(graph, 0.1, 42)
    assert len(data.test_links) == 1
    assert data.training.num_links == 9
    assert not (data.training.links & data.test_links)
    assert data.all_links == graph.links


def test_split_is_deterministic(toy_graph):
    first = split(toy_graph, 0.2, 7)
    second = split(toy_graph, 0.2, 7)
    assert first.test_links == second.test_links
    assert first.training == second.training


def test_split_seeds_differ():
    rng = np.random.default_rng(0)
    links = [(int(o), int(u)) for o, u in zip(*np.nonzero(rng.random((20, 20)) < 0.3))]
    graph = build_graph(20, 20, links)
    splits = {split(graph, 0.1, seed).test_links for seed in range(1, 11)}
    assert len(splits) == 10


def test_training_degrees_recomputed(toy_graph):
    data = split(toy_graph, 0.3, 3)
    counts = np.zeros(3, dtype=int)
    for o, _ in data.training.links:
        counts[o] += 1
    assert data.training.object_degree.tolist() == counts.tolist()


def test_split_test_size_rounds_half_up():
    assert split_test_size(10, 0.1) == 1
    assert split_test_size(15, 0.1) == 2
    assert split_test_size(14, 0.1) == 1


def test_split_rejects_degenerate_fraction(t1_graph):
    with pytest.raises(ConfigError):
        split(t1_graph, 0.1, 0)      # round(0.3) = 0 test links
    with pytest.raises(ConfigError):
        split(t1_graph, 1.0, 0)


def test_split_rejects_empty_graph():
    with pytest.raises(DataError):
        split(build_graph(2, 2, []), 0.1, 0)
