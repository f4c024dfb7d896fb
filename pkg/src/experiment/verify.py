"""
불변식 검증 스위트
==============================

장난감 그래프와 무작위 소형 그래프에서 다음을 확인합니다:
    - 장난감 그래프의 NBI 동점 / CSI 구분
    - 희소 CSI == 밀집 정의식 == 닫힌 형식 (1e-12)
    - NBI 열 합 1, k(o_j)w_ij = k(o_i)w_ji, CSI 대칭
    - 표본 AUC 가 정확 AUC 의 3σ 구간 안 (100 시드 중 99 이상)
    - Hamming 집계 항등식 == O(m²) 열거
    - mid-rank 동점 순열 불변성, 양수 배율 불변성
    - GRM 단조성, CF 점수 범위
설정에 데이터셋이 있으면 run 1 학습 분할에도 정규화/대칭 검사를 적용합니다.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from ..core.graph import BipartiteGraph, split
from ..core.metrics import auc, hamming, mid_rank_positions, ranking_score
from ..core.recommend import (
    history_of,
    recommend_all,
    score_cf,
    score_grm,
    score_propagation,
    score_users,
    top_l,
)
from ..core.similarity import SimilarityMatrix, csi_from_graph, nbi_weights, user_cosine
from ..errors import ConfigError, ProtocolError, VerificationError
from ..parsers.ratings import LinkDataset
from .config import ExperimentConfig
from .oracles import (
    brute_force_hamming,
    dense_adjacency,
    dense_closed_form,
    dense_csi,
    dense_nbi,
    toy_graph,
    random_graph,
    random_graphs,
)

TOLERANCE = 1e-12

CsiFunction = Callable[[BipartiteGraph], SimilarityMatrix]


@dataclass
class CheckResult:
    """검사 하나의 결과"""
    check_name: str
    passed: bool
    expected: float = 0.0
    actual: float = 0.0
    difference: float = 0.0
    tolerance: float = TOLERANCE
    message: str = ""


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def get(self, name: str) -> Optional[CheckResult]:
        for check in self.checks:
            if check.check_name == name:
                return check
        return None

    def print_report(self) -> None:
        print(f"\n{'=' * 70}")
        print("불변식 검증 결과")
        print(f"{'=' * 70}")
        print(f"{'검사':<28} {'차이':>12} {'허용':>10} {'결과':>6}  비고")
        print("-" * 70)
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"{c.check_name:<28} {c.difference:>12.3e} {c.tolerance:>10.1e} {status:>6}  {c.message}")
        print("-" * 70)
        if self.passed:
            print(f"✅ ALL PASS ({len(self.checks)} checks)")
        else:
            print(f"❌ {len(self.failures)}/{len(self.checks)} checks FAILED")


def _max_abs(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


# ──────────────────────────────────────────────
# 개별 검사
# ──────────────────────────────────────────────

def check_toy_tie(csi_fn: CsiFunction = csi_from_graph) -> CheckResult:
    """u1 에게 NBI 는 o2/o3 동점, CSI 는 o3 > o2"""
    graph = toy_graph()
    w = nbi_weights(graph)
    s = csi_fn(graph)
    expected = np.array([1 / 6, 1 / 6, 1 / 15, math.sqrt(1 / 90), 1 / 6])
    actual = np.array([w.entry(1, 0), w.entry(2, 0), w.entry(0, 1), s.entry(1, 0), s.entry(2, 0)])
    diff = _max_abs(expected, actual)

    history = history_of(graph, 0)
    nbi_scores = score_propagation(w, history)
    csi_top = top_l(score_propagation(s, history), 1).objects.tolist()
    tie = nbi_scores.score_of(1) == nbi_scores.score_of(2)
    passed = diff <= TOLERANCE and tie and csi_top == [2]
    return CheckResult(
        "toy_tie_disambiguation", passed, difference=diff,
        message=f"NBI tie={tie}, CSI top-1={csi_top}",
    )


def check_oracle_equivalence(graphs: List[BipartiteGraph],
                             csi_fn: CsiFunction = csi_from_graph) -> List[CheckResult]:
    """희소 경로 vs 밀집 정의식 vs 닫힌 형식"""
    worst_nbi = worst_def = worst_closed = 0.0
    for graph in graphs:
        a = dense_adjacency(graph)
        sparse_csi = csi_fn(graph).matrix.toarray()
        worst_nbi = max(worst_nbi, _max_abs(nbi_weights(graph).matrix.toarray(), dense_nbi(a)))
        worst_def = max(worst_def, _max_abs(sparse_csi, dense_csi(a)))
        worst_closed = max(worst_closed, _max_abs(sparse_csi, dense_closed_form(a)))
    label = f"{len(graphs)} graphs"
    return [
        CheckResult("nbi_dense_oracle", worst_nbi <= TOLERANCE, difference=worst_nbi, message=label),
        CheckResult("csi_dense_oracle", worst_def <= TOLERANCE, difference=worst_def, message=label),
        CheckResult("csi_closed_form", worst_closed <= TOLERANCE, difference=worst_closed, message=label),
    ]


def normalization_errors(graph: BipartiteGraph, csi_fn: CsiFunction = csi_from_graph):
    """(열 합 오차, 차수 균형 오차, CSI 비대칭) 최댓값"""
    w = nbi_weights(graph)
    live = graph.live_objects
    column_error = _max_abs(w.column_sums()[live], np.ones(int(live.sum())))

    wd = w.matrix.toarray()
    k = graph.object_degree.astype(np.float64)
    balance_error = _max_abs(wd * k[None, :], (wd * k[None, :]).T)

    s = csi_fn(graph).matrix
    asymmetry = _max_abs(s.toarray(), s.T.toarray())
    return column_error, balance_error, asymmetry


def check_normalization(graphs: List[BipartiteGraph], csi_fn: CsiFunction = csi_from_graph,
                        label: str = "") -> List[CheckResult]:
    worst = [0.0, 0.0, 0.0]
    for graph in graphs:
        for idx, value in enumerate(normalization_errors(graph, csi_fn)):
            worst[idx] = max(worst[idx], value)
    suffix = f"_{label}" if label else ""
    note = f"{len(graphs)} graphs" if not label else label
    return [
        CheckResult(f"nbi_column_sum{suffix}", worst[0] <= TOLERANCE, difference=worst[0], message=note),
        CheckResult(f"degree_balance{suffix}", worst[1] <= TOLERANCE, difference=worst[1], message=note),
        CheckResult(f"csi_symmetry{suffix}", worst[2] <= TOLERANCE, difference=worst[2], message=note),
    ]


def _small_auc_instance(rng: np.random.Generator, max_pairs: int = 200):
    """(관련, 비관련) 쌍 ≤ max_pairs 인 분할 + NBI 점수"""
    while True:
        graph = random_graph(rng, max_objects=10, max_users=6, density_range=(0.3, 0.6))
        if graph.num_links < 5:
            continue
        try:
            data = split(graph, 0.2, int(rng.integers(0, 2**31)))
        except ConfigError:
            continue
        scores = score_users("NBI", data.training)
        pairs = sum(
            len(scores[u].candidates) - len(objs)
            for u, objs in data.test_objects_by_user.items()
            for _ in objs
        )
        if 0 < pairs <= max_pairs:
            return data, scores


def check_auc_band(instances: int = 100, n_samples: int = 20_000, seed: int = 0,
                   min_pass: int = 99) -> CheckResult:
    """|표본 − 정확| ≤ 3·sqrt(p(1−p)/N) 인 시드 수"""
    rng = np.random.Generator(np.random.PCG64(seed))
    inside = 0
    worst = 0.0
    done = 0
    while done < instances:
        data, scores = _small_auc_instance(rng)
        try:
            exact = auc(scores, data.test_links, data.training, exact=True)
        except ProtocolError:
            continue
        sampled = auc(scores, data.test_links, data.training, n_samples=n_samples, seed=done)
        band = 3.0 * math.sqrt(exact * (1.0 - exact) / n_samples)
        gap = abs(sampled - exact)
        worst = max(worst, gap)
        if gap <= band + TOLERANCE:
            inside += 1
        done += 1
    return CheckResult(
        "auc_sampling_band", inside >= min_pass,
        expected=min_pass, actual=inside, difference=worst, tolerance=0.0,
        message=f"{inside}/{instances} within 3σ",
    )


def check_hamming_identity(graphs: List[BipartiteGraph], L: int = 3) -> CheckResult:
    """집계 항등식 결과가 쌍 열거와 정확히 같은지 (m ≤ 50)"""
    compared = 0
    worst = 0.0
    exact = True
    for graph in graphs:
        if graph.num_users > 50:
            continue
        lists = recommend_all(score_users("CSI", graph), L)
        fast = hamming(lists, L)
        if fast is None:
            continue
        slow = brute_force_hamming(lists, L)
        compared += 1
        worst = max(worst, abs(fast - slow))
        exact = exact and fast == slow
    return CheckResult("hamming_identity", exact and compared > 0, difference=worst,
                       tolerance=0.0, message=f"{compared} instances")


def check_mid_rank_ties(seed: int = 0, trials: int = 50) -> CheckResult:
    """동점 블록을 어떤 순서로 풀어도 블록 평균 위치 == mid-rank"""
    rng = np.random.Generator(np.random.PCG64(seed))
    worst = 0.0
    for _ in range(trials):
        scores = rng.integers(0, 4, size=int(rng.integers(2, 40))).astype(np.float64)
        mid = mid_rank_positions(scores, scores)
        for _ in range(5):
            order = np.lexsort((rng.permutation(len(scores)), -scores))
            position = np.empty(len(scores))
            position[order] = np.arange(1, len(scores) + 1)
            for value in np.unique(scores):
                block = scores == value
                worst = max(worst, abs(position[block].mean() - mid[block][0]))
    return CheckResult("mid_rank_tie_invariance", worst <= TOLERANCE, difference=worst,
                       message=f"{trials} vectors")


def check_scale_invariance(graphs: List[BipartiteGraph], factor: float = 4.0, L: int = 5) -> CheckResult:
    """S^CSI 에 양수를 곱해도 목록과 ⟨r⟩ 동일"""
    mismatches = 0
    checked = 0
    for graph in graphs:
        if graph.num_links < 2:
            continue
        try:
            data = split(graph, 0.1, 0)
        except ConfigError:
            continue
        s = csi_from_graph(data.training)
        base = score_users("CSI", data.training, matrix=s)
        scaled = score_users("CSI", data.training, matrix=s.scaled(factor))
        checked += 1
        same_lists = all(
            np.array_equal(top_l(base[u], L).objects, top_l(scaled[u], L).objects) for u in base
        )
        same_rank = ranking_score(base, data.test_links) == ranking_score(scaled, data.test_links)
        if not (same_lists and same_rank):
            mismatches += 1
    return CheckResult("scale_invariance", mismatches == 0 and checked > 0,
                       actual=mismatches, tolerance=0.0,
                       message=f"{checked} splits, ×{factor:g}")


def check_grm_and_cf(graphs: List[BipartiteGraph]) -> List[CheckResult]:
    grm_ok = True
    cf_worst = 0.0
    for graph in graphs:
        sim = user_cosine(graph)
        for u in range(graph.num_users):
            grm = score_grm(graph, u)
            if not np.array_equal(grm.scores, graph.object_degree[grm.candidates].astype(np.float64)):
                grm_ok = False
            listed = top_l(grm, len(grm)).scores if len(grm) else np.empty(0)
            if np.any(np.diff(listed) > 0):
                grm_ok = False
            cf = score_cf(sim, graph, u).scores
            if cf.size:
                cf_worst = max(cf_worst, float(np.max(cf)) - 1.0, -float(np.min(cf)))
    return [
        CheckResult("grm_monotone", grm_ok, tolerance=0.0, message=f"{len(graphs)} graphs"),
        CheckResult("cf_range", cf_worst <= 0.0, difference=max(cf_worst, 0.0),
                    tolerance=0.0, message="0 ≤ v ≤ 1"),
    ]


# ──────────────────────────────────────────────
# 스위트
# ──────────────────────────────────────────────

def run_verification(
    config: Optional[ExperimentConfig] = None,
    csi_fn: CsiFunction = csi_from_graph,
    dataset: Optional[LinkDataset] = None,
    auc_instances: int = 100,
) -> VerificationReport:
    """전체 검사 실행 (예외 없이 보고서 반환)"""
    config = config or ExperimentConfig()
    graphs = random_graphs(config.verify_graphs, seed=config.seed)
    print(f"[Verify] 무작위 그래프 {len(graphs)}개 (n, m ≤ 30, 밀도 0.1–0.5)")

    report = VerificationReport()
    report.add(check_toy_tie(csi_fn))
    for check in check_oracle_equivalence(graphs, csi_fn):
        report.add(check)
    for check in check_normalization([toy_graph(), *graphs], csi_fn):
        report.add(check)
    report.add(check_auc_band(instances=auc_instances, seed=config.seed,
                              min_pass=auc_instances - auc_instances // 100))
    report.add(check_hamming_identity(graphs))
    report.add(check_mid_rank_ties(seed=config.seed))
    report.add(check_scale_invariance(graphs))
    for check in check_grm_and_cf(graphs):
        report.add(check)

    if dataset is not None:
        training = split(dataset.graph, config.test_fraction, config.run_seeds()[0]).training
        name = Path(config.dataset.path).name if config.dataset.path else "dataset"
        print(f"[Verify] {name} 학습 분할 (seed={config.run_seeds()[0]}) 정규화/대칭 검사")
        for check in check_normalization([training], csi_fn, label="dataset"):
            report.add(check)

    report.print_report()
    return report


def verify(
    config: Optional[ExperimentConfig] = None,
    csi_fn: CsiFunction = csi_from_graph,
    dataset: Optional[LinkDataset] = None,
    auc_instances: int = 100,
) -> VerificationReport:
    """검사 실행 후 실패가 있으면 VerificationError"""
    report = run_verification(config, csi_fn, dataset, auc_instances)
    if not report.passed:
        names = ", ".join(c.check_name for c in report.failures)
        raise VerificationError(f"검증 실패: {names}")
    return report
