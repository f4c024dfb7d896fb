"""평가 지표"""

from itertools import permutations

import numpy as np
import pytest

from src.core.graph import build_graph, split
from src.core.metrics import (
    MetricReport,
    PRCurve,
    aggregate_reports,
    auc,
    evaluate,
    hamming,
    intra_similarity,
    mean_curve,
    mid_rank_positions,
    popularity,
    pr_curve,
    precision_at,
    ranking_score,
)
from src.core.recommend import (
    RecommendationList,
    ScoreVector,
    dump_lists,
    load_lists,
    recommend_all,
    score_users,
)
from src.errors import ProtocolError
from src.experiment.oracles import brute_force_hamming, exact_pair_auc, random_graphs


def _vector(user, scores, candidates=None):
    scores = np.asarray(scores, dtype=np.float64)
    if candidates is None:
        candidates = np.arange(len(scores))
    return ScoreVector(user, np.asarray(candidates), scores, np.zeros(len(scores), dtype=bool))


def _dense_graph(seed, n=20, m=20, density=0.3):
    rng = np.random.default_rng(seed)
    mask = rng.random((n, m)) < density
    return build_graph(n, m, [(int(o), int(u)) for o, u in zip(*np.nonzero(mask))])


def _list(user, objects):
    objects = np.asarray(objects, dtype=np.int64)
    return RecommendationList(user, objects, np.zeros(len(objects)))


def test_ranking_score_third_of_ten():
    scores = {0: _vector(0, np.arange(10, 0, -1))}
    assert ranking_score(scores, [(2, 0)]) == pytest.approx(0.3)


def test_ranking_score_full_tie_uses_mid_rank():
    scores = {0: _vector(0, [0.0, 0.0, 0.0, 0.0])}
    assert ranking_score(scores, [(1, 0)]) == pytest.approx(0.625)


def test_mid_rank_equals_average_over_tie_permutations():
    scores = np.array([1.0, 0.0, 0.0, 0.0])
    mid = mid_rank_positions(scores, np.array([0.0]))[0]
    positions = []
    for order in permutations([1, 2, 3]):
        positions.append(2 + order.index(1))
    assert mid == pytest.approx(np.mean(positions))


def test_ranking_score_rejects_non_candidate():
    scores = {0: _vector(0, [1.0, 0.5], candidates=[1, 2])}
    with pytest.raises(ProtocolError):
        ranking_score(scores, [(0, 0)])


def test_precision_examples():
    hits = list(range(3))
    lists = {0: _list(0, list(range(50)))}
    assert precision_at(lists, [(o, 0) for o in hits], 50, num_users=1) == pytest.approx(0.06)
    assert precision_at(lists, [(99, 0)], 50, num_users=1) == 0.0


def test_precision_counts_users_without_test_links():
    lists = {0: _list(0, [0]), 1: _list(1, [0])}
    assert precision_at(lists, [(0, 0)], 1, num_users=2) == pytest.approx(0.5)


def test_auc_perfect_and_all_ties():
    perfect = {0: _vector(0, [1.0, 0.0, 0.0])}
    assert auc(perfect, [(0, 0)], n_samples=1000) == 1.0
    assert auc(perfect, [(0, 0)], exact=True) == 1.0
    tied = {0: _vector(0, [0.3, 0.3, 0.3])}
    assert auc(tied, [(0, 0)], n_samples=1000) == 0.5


def test_auc_excludes_test_items_from_irrelevant_pool():
    scores = {0: _vector(0, [0.9, 0.1, 0.5])}
    # 관련 객체 0, 2 / 비관련 풀 {1}
    assert auc(scores, [(0, 0), (2, 0)], exact=True) == 1.0

    data = split(_dense_graph(5), 0.2, 2)
    scores = score_users("NBI", data.training)
    per_link = []
    for user, objects in data.test_objects_by_user.items():
        sv = scores[user]
        pool = sv.scores[~np.isin(sv.candidates, objects)]
        if len(pool) == 0:
            continue
        per_link.extend(exact_pair_auc(sv.score_of(int(o)), pool) for o in objects)
    assert auc(scores, data.test_links, exact=True) == pytest.approx(np.mean(per_link), abs=1e-12)


def test_auc_without_irrelevant_objects_is_protocol_error():
    scores = {0: _vector(0, [0.2, 0.1])}
    with pytest.raises(ProtocolError):
        auc(scores, [(0, 0), (1, 0)])


def test_sampled_auc_close_to_exact():
    graph = _dense_graph(9)
    data = split(graph, 0.2, 1)
    scores = score_users("CSI", data.training)
    exact = auc(scores, data.test_links, exact=True)
    sampled = auc(scores, data.test_links, n_samples=200_000, seed=3)
    assert abs(sampled - exact) <= 4 * np.sqrt(exact * (1 - exact) / 200_000) + 1e-12


def test_auc_sampling_is_seeded():
    scores = {0: _vector(0, [0.5, 0.1, 0.7, 0.2])}
    assert auc(scores, [(0, 0)], seed=5, n_samples=500) == auc(scores, [(0, 0)], seed=5, n_samples=500)


def test_intra_similarity_extremes():
    graph = build_graph(4, 2, [(0, 0), (1, 0), (2, 1), (3, 0)])
    together = {0: _list(0, [0, 1])}
    apart = {0: _list(0, [0, 2])}
    assert intra_similarity(together, graph) == pytest.approx(1.0)
    assert intra_similarity(apart, graph) == 0.0


def test_hamming_hand_example():
    lists = {0: _list(0, [0, 1]),
             1: _list(1, [0, 2]),
             2: _list(2, [1, 2])}
    assert hamming(lists, 2) == pytest.approx(0.5)
    assert brute_force_hamming(lists, 2) == pytest.approx(0.5)


def test_hamming_identical_lists_and_too_few_users():
    same = {u: _list(u, [3, 4, 5]) for u in range(4)}
    assert hamming(same, 3) == 0.0
    assert hamming({0: _list(0, [1, 2])}, 2) is None


def test_hamming_skips_short_lists():
    lists = {0: _list(0, [0, 1]), 1: _list(1, [2, 3]), 2: _list(2, [0])}
    assert hamming(lists, 2) == 1.0


def test_hamming_identity_matches_brute_force():
    for graph in random_graphs(20, seed=13, max_users=50):
        lists = recommend_all(score_users("NBI", graph), 3)
        fast = hamming(lists, 3)
        if fast is None:
            continue
        assert fast == brute_force_hamming(lists, 3)


def test_popularity_constant_case():
    graph = build_graph(2, 7, [(0, u) for u in range(7)])
    lists = {u: _list(u, [0]) for u in range(3)}
    assert popularity(lists, graph) == 7.0


def test_grm_maximizes_popularity():
    for graph in random_graphs(10, seed=17):
        values = {
            method: popularity(recommend_all(score_users(method, graph), 3), graph)
            for method in ("GRM", "NBI", "CSI", "CF")
        }
        assert values["GRM"] >= max(values.values()) - 1e-12


def test_pr_curve_recall_monotone_and_complete():
    graph = _dense_graph(23)
    data = split(graph, 0.2, 0)
    scores = score_users("CSI", data.training)
    curve = pr_curve(scores, data.test_links, None, data.num_users)
    assert curve.recall_is_monotone()
    assert len(curve.points) == len(data.test_links)
    longest = max(len(v) for v in scores.values())
    full = pr_curve(scores, data.test_links, [longest], data.num_users)
    assert full.points[0][2] == 1.0


def test_mean_curve_averages_pointwise():
    a = PRCurve([(1, 0.2, 0.1), (2, 0.4, 0.3)])
    b = PRCurve([(1, 0.4, 0.3), (2, 0.6, 0.5)])
    mean = mean_curve([a, b])
    assert mean.points[0] == (1, pytest.approx(0.3), pytest.approx(0.2))


def test_evaluate_ranges_and_list_recomputation(tmp_path):
    graph = _dense_graph(31, n=30, m=30)
    data = split(graph, 0.1, 2)
    scores = score_users("CSI", data.training)
    report, lists = evaluate(scores, data, L=5, auc_samples=10_000, seed=2)
    assert report.range_violations() == []

    reloaded = load_lists(dump_lists(lists, tmp_path / "lists.tsv"))
    assert precision_at(reloaded, data.test_links, 5, data.num_users) == report.precision
    assert intra_similarity(reloaded, data.training) == report.intra_similarity
    assert hamming(reloaded, 5) == report.hamming
    assert popularity(reloaded, data.training) == report.popularity


def test_aggregate_reports_sample_std():
    reports = [
        MetricReport(0.1, 0.05, 0.9, 0.3, 0.7, 100.0),
        MetricReport(0.2, 0.07, 0.8, 0.2, None, 120.0),
    ]
    agg = aggregate_reports(reports)
    assert agg.ranking_score == pytest.approx(0.15)
    assert agg.std["ranking_score"] == pytest.approx(np.std([0.1, 0.2], ddof=1))
    assert agg.hamming == 0.7
    assert agg.std["hamming"] == 0.0
    single = aggregate_reports(reports[:1])
    assert single.std["precision"] == 0.0
