"""NBI / FSP / BSP / CSI / IC-NBI / 사용자 코사인"""

import math

import numpy as np
import pytest

from src.core.graph import build_graph
from src.core.similarity import (
    SimilarityKind,
    backward_proportions,
    csi_closed_form,
    csi_from_graph,
    csi_similarity,
    dump_matrix,
    forward_proportions,
    icnbi_weights,
    load_matrix_dump,
    nbi_weights,
    sorensen_matrix,
    user_cosine,
)
from src.errors import ConfigError
from src.experiment.oracles import random_graphs


def test_nbi_weights_t1(t1_graph):
    w = nbi_weights(t1_graph)
    assert w.kind is SimilarityKind.NBI
    assert w.entry(0, 0) == pytest.approx(0.5, abs=1e-12)
    assert w.entry(1, 0) == pytest.approx(0.5, abs=1e-12)
    assert w.entry(0, 1) == pytest.approx(0.25, abs=1e-12)
    assert w.entry(1, 1) == pytest.approx(0.75, abs=1e-12)


def test_nbi_weights_toy(toy_graph):
    w = nbi_weights(toy_graph)
    assert w.entry(1, 0) == pytest.approx(1 / 6, abs=1e-12)
    assert w.entry(2, 0) == pytest.approx(1 / 6, abs=1e-12)
    assert w.entry(0, 1) == pytest.approx(1 / 15, abs=1e-12)
    assert w.entry(0, 2) == pytest.approx(1 / 6, abs=1e-12)


def test_nbi_columns_sum_to_one():
    for graph in random_graphs(20, seed=5):
        sums = nbi_weights(graph).column_sums()
        live = graph.live_objects
        assert np.allclose(sums[live], 1.0, rtol=0, atol=1e-12)
        assert np.all(sums[~live] == 0.0)


def test_forward_proportions_equal_w(t1_graph):
    w = nbi_weights(t1_graph)
    fsp = forward_proportions(w)
    assert np.allclose(fsp.matrix.toarray(), w.matrix.toarray(), rtol=0, atol=1e-12)


def test_backward_proportions_toy(toy_graph):
    bsp = backward_proportions(nbi_weights(toy_graph))
    # w_21 을 보정할 때 참조하는 값은 r_12, w_31 은 r_13
    assert bsp.entry(0, 1) == pytest.approx(1 / 15, abs=1e-12)
    assert bsp.entry(0, 2) == pytest.approx(1 / 6, abs=1e-12)


def test_zero_degree_object_column_is_zero():
    graph = build_graph(3, 2, [(0, 0), (1, 0), (1, 1)])
    w = nbi_weights(graph)
    assert w.matrix[:, 2].nnz == 0
    assert forward_proportions(w).matrix[:, 2].nnz == 0
    assert backward_proportions(w).matrix[:, 2].nnz == 0


def test_csi_toy_resolves_tie(toy_graph):
    s = csi_from_graph(toy_graph)
    assert s.entry(1, 0) == pytest.approx(math.sqrt(1 / 90), abs=1e-12)
    assert s.entry(2, 0) == pytest.approx(1 / 6, abs=1e-12)
    assert s.entry(2, 0) > s.entry(1, 0)


def test_csi_t1(t1_graph):
    s = csi_from_graph(t1_graph)
    assert s.entry(0, 1) == pytest.approx(math.sqrt(1 / 8), abs=1e-12)
    assert s.entry(1, 0) == s.entry(0, 1)


def test_csi_exactly_symmetric_and_matches_closed_form():
    for graph in random_graphs(30, seed=11):
        s = csi_from_graph(graph).matrix
        assert (s != s.T).nnz == 0
        closed = csi_closed_form(graph).matrix
        assert np.allclose(s.toarray(), closed.toarray(), rtol=0, atol=1e-12)


def test_csi_sparsity_follows_common_users():
    for graph in random_graphs(10, seed=3):
        a = graph.adjacency.toarray()
        shares = (a @ a.T) > 0
        assert np.array_equal(csi_from_graph(graph).matrix.toarray() > 0, shares)


def test_csi_similarity_requires_kinds(t1_graph):
    w = nbi_weights(t1_graph)
    with pytest.raises(ConfigError):
        csi_similarity(w, backward_proportions(w))


def test_icnbi_t1_beta_one(t1_graph):
    w_ic = icnbi_weights(t1_graph, 1.0)
    assert w_ic.kind is SimilarityKind.IC_NBI
    assert w_ic.entry(0, 1) == pytest.approx(0.5, abs=1e-12)
    assert w_ic.entry(1, 0) == pytest.approx(0.5, abs=1e-12)


def test_icnbi_beta_zero_is_nbi(toy_graph):
    w = nbi_weights(toy_graph)
    w0 = icnbi_weights(toy_graph, 0.0, nbi=w)
    assert np.array_equal(w0.matrix.toarray(), w.matrix.toarray())


def test_icnbi_negative_beta_penalizes_popular_objects(t1_graph):
    w_ic = icnbi_weights(t1_graph, -1.0)
    # k(o1)=1, k(o2)=2
    assert w_ic.entry(0, 1) == pytest.approx(1 / 8, abs=1e-12)
    assert w_ic.entry(1, 0) == pytest.approx(1 / 2, abs=1e-12)
    assert np.all(np.isfinite(w_ic.matrix.data))


def test_user_cosine_t1(t1_graph):
    s = user_cosine(t1_graph)
    assert s.entry(0, 1) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert s.entry(0, 0) == pytest.approx(1.0, abs=1e-12)


def test_user_cosine_identical_and_disjoint():
    graph = build_graph(3, 3, [(0, 0), (1, 0), (0, 1), (1, 1), (2, 2)])
    s = user_cosine(graph)
    assert s.entry(0, 1) == pytest.approx(1.0, abs=1e-12)
    assert s.entry(0, 2) == 0.0


def test_similarity_ranges():
    for graph in random_graphs(20, seed=8):
        for sim in (csi_from_graph(graph).matrix, user_cosine(graph).matrix, sorensen_matrix(graph)):
            assert sim.data.min(initial=0.0) >= 0.0
            assert sim.data.max(initial=0.0) <= 1.0


def test_scaled_rejects_non_positive(toy_graph):
    with pytest.raises(ConfigError):
        csi_from_graph(toy_graph).scaled(0.0)


def test_matrix_dump_round_trip(tmp_path, toy_graph):
    s = csi_from_graph(toy_graph)
    path = dump_matrix(s, tmp_path / "csi.tsv")
    first = path.read_text(encoding="utf-8").splitlines()[0]
    assert first.split("\t")[:2] == ["0", "0"]
    reloaded = load_matrix_dump(path, s.dim)
    assert np.array_equal(reloaded.toarray(), s.matrix.toarray())
