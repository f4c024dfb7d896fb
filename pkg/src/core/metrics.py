"""
평가 지표
==============================

정확도   ⟨r⟩ (ranking score, mid-rank), P (precision@L), AUC
다양성   I (intra-similarity), H (Hamming distance)
인기도   ⟨k⟩ (추천 객체 평균 학습 차수)
곡선     precision–recall (L 을 1 부터 증가)

동점 처리:
    - ranking score 는 동점 블록의 평균 위치(mid-rank)를 사용
    - AUC 는 동점 비교에 0.5 점
따라서 목록 전순서의 동점 규칙은 이 두 지표에 영향을 주지 않습니다.
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigError, ProtocolError
from .graph import BipartiteGraph, Link, SplitDataset
from .recommend import RecommendationList, ScoreVector, recommend_all
from .similarity import sorensen_matrix

METRIC_NAMES = ("ranking_score", "precision", "auc", "intra_similarity", "hamming", "popularity")

# 값이 작을수록 좋은 지표
LOWER_IS_BETTER = {"ranking_score", "intra_similarity", "popularity"}


# ──────────────────────────────────────────────
# 데이터 클래스
# ──────────────────────────────────────────────

@dataclass
class MetricReport:
    """한 방법의 지표 묶음 (집계 시 std 에 표준편차)"""
    ranking_score: float
    precision: float
    auc: float
    intra_similarity: float
    hamming: Optional[float]
    popularity: float
    std: Dict[str, float] = field(default_factory=dict)

    def values(self) -> Dict[str, Optional[float]]:
        data = asdict(self)
        data.pop("std")
        return data

    def range_violations(self) -> List[str]:
        """범위 밖 값 목록 (비어 있으면 정상)"""
        problems = []
        if not 0.0 < self.ranking_score <= 1.0:
            problems.append(f"ranking_score={self.ranking_score}")
        for name in ("precision", "auc", "intra_similarity"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0 + 1e-12:
                problems.append(f"{name}={value}")
        if self.hamming is not None and not -1e-12 <= self.hamming <= 1.0:
            problems.append(f"hamming={self.hamming}")
        if self.popularity < 0:
            problems.append(f"popularity={self.popularity}")
        return problems


@dataclass
class PRCurve:
    """(L, precision, recall) 순서열"""
    points: List[Tuple[int, float, float]] = field(default_factory=list)

    def recall_is_monotone(self) -> bool:
        recalls = [r for _, _, r in self.points]
        return all(b >= a for a, b in zip(recalls, recalls[1:]))


# ──────────────────────────────────────────────
# 내부 유틸리티
# ──────────────────────────────────────────────

def _group_by_user(test_links: Iterable[Link]) -> Dict[int, np.ndarray]:
    """사용자 오름차순, 객체 오름차순 그룹"""
    grouped: Dict[int, List[int]] = {}
    for o, u in sorted(test_links, key=lambda link: (link[1], link[0])):
        grouped.setdefault(int(u), []).append(int(o))
    return {u: np.array(objs, dtype=np.int64) for u, objs in grouped.items()}


def _locate(sv: Optional[ScoreVector], user: int, objects: np.ndarray) -> np.ndarray:
    """테스트 객체의 후보 내 위치. 후보가 아니면 분할 버그로 간주"""
    if sv is None:
        raise ProtocolError(f"테스트 링크 사용자 {user} 의 점수 벡터가 없습니다")
    pos = np.searchsorted(sv.candidates, objects)
    pos_clipped = np.minimum(pos, max(len(sv.candidates) - 1, 0))
    if len(sv.candidates) == 0 or np.any(sv.candidates[pos_clipped] != objects):
        missing = [int(o) for o, p in zip(objects, pos_clipped)
                   if len(sv.candidates) == 0 or sv.candidates[p] != o]
        raise ProtocolError(
            f"테스트 링크 ({missing[0]}, {user}) 의 객체가 후보 집합에 없습니다 (분할 오류)"
        )
    return pos


def mid_rank_positions(scores: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """1-based mid-rank: (#점수 큰 후보) + (#동점 + 1) / 2"""
    ordered = np.sort(scores)
    n = len(ordered)
    below_or_equal = np.searchsorted(ordered, targets, side="right")
    below = np.searchsorted(ordered, targets, side="left")
    greater = n - below_or_equal
    equal = below_or_equal - below
    return greater + (equal + 1) / 2.0


# ──────────────────────────────────────────────
# 정확도
# ──────────────────────────────────────────────

def ranking_score(
    scores: Mapping[int, ScoreVector],
    test_links: Iterable[Link],
    training: Optional[BipartiteGraph] = None,
) -> float:
    """
    ⟨r⟩ = mean_{l_ij ∈ E^P} p_ij / |O_j|

    training 을 넘기면 테스트 객체가 학습 이력에 없는지도 확인합니다.

    Examples:
        후보 10 개 중 3 위 → 0.3
        점수 전부 0, 후보 4 개 → (1+2+3+4)/4/4 = 0.625
    """
    grouped = _group_by_user(test_links)
    if not grouped:
        raise ProtocolError("테스트 링크가 없습니다")

    ranks = []
    for user, objects in grouped.items():
        sv = scores.get(user)
        if training is not None:
            overlap = np.intersect1d(training.user_objects[user], objects)
            if len(overlap):
                raise ProtocolError(
                    f"테스트 링크 ({int(overlap[0])}, {user}) 가 학습 집합에도 있습니다 (분할 오류)"
                )
        pos = _locate(sv, user, objects)
        p = mid_rank_positions(sv.scores, sv.scores[pos])
        ranks.append(p / len(sv.candidates))
    return float(np.mean(np.concatenate(ranks)))


def precision_at(
    lists: Mapping[int, RecommendationList],
    test_links: Iterable[Link],
    L: int,
    num_users: int,
) -> float:
    """
    P = (1/m) Σ_j N_j / L

    테스트 링크가 없는 사용자도 P_j = 0 으로 분모 m 에 포함됩니다.
    """
    if L < 1 or num_users < 1:
        raise ConfigError(f"L, m 은 1 이상이어야 합니다: L={L}, m={num_users}")
    grouped = _group_by_user(test_links)
    hits = 0
    for user, objects in grouped.items():
        rec = lists.get(user)
        if rec is None:
            continue
        hits += int(np.isin(rec.objects[:L], objects).sum())
    return hits / (L * num_users)


def _auc_pools(scores: Mapping[int, ScoreVector], grouped: Dict[int, np.ndarray]):
    """테스트 링크별 (관련 점수, 사용자 비관련 점수 풀) 구성"""
    relevant, link_user, pools = [], [], {}
    for user, objects in grouped.items():
        sv = scores.get(user)
        pos = _locate(sv, user, objects)
        irrelevant_mask = np.ones(len(sv.candidates), dtype=bool)
        irrelevant_mask[pos] = False
        pool = sv.scores[irrelevant_mask]
        if len(pool) == 0:
            continue
        pools[user] = pool
        relevant.extend(sv.scores[pos].tolist())
        link_user.extend([user] * len(objects))
    return np.array(relevant, dtype=np.float64), np.array(link_user, dtype=np.int64), pools


def auc(
    scores: Mapping[int, ScoreVector],
    test_links: Iterable[Link],
    training: Optional[BipartiteGraph] = None,
    n_samples: int = 1_000_000,
    seed: int = 0,
    exact: bool = False,
) -> float:
    """
    AUC = (n' + 0.5 n'') / n

    표본 모드: E^P 에서 균등하게 테스트 링크 (u, o_rel) 를 뽑고, u 가 한 번도
    좋아하지 않은 객체(E^A \\ E) 중 하나를 균등하게 뽑아 점수를 비교합니다.
    비관련 풀이 빈 사용자의 링크는 제외(재추첨과 동일 분포)합니다.

    exact=True 이면 모든 (관련, 비관련) 쌍을 열거하고 링크별 AUC 를 평균합니다.
    표본 추정은 이 값으로 수렴합니다.
    """
    if n_samples < 1:
        raise ConfigError(f"n_samples 는 1 이상이어야 합니다: {n_samples}")
    grouped = _group_by_user(test_links)
    relevant, link_user, pools = _auc_pools(scores, grouped)
    if len(relevant) == 0:
        raise ProtocolError("AUC: 비관련 객체를 가진 테스트 링크가 없습니다")

    if exact:
        per_link = np.empty(len(relevant), dtype=np.float64)
        sorted_pools = {u: np.sort(p) for u, p in pools.items()}
        for k, (rel, user) in enumerate(zip(relevant, link_user)):
            pool = sorted_pools[int(user)]
            less = np.searchsorted(pool, rel, side="left")
            equal = np.searchsorted(pool, rel, side="right") - less
            per_link[k] = (less + 0.5 * equal) / len(pool)
        return float(np.mean(per_link))

    users = sorted(pools)
    offsets = np.zeros(max(users) + 2, dtype=np.int64)
    sizes = np.zeros(max(users) + 1, dtype=np.int64)
    for u in users:
        sizes[u] = len(pools[u])
    flat = np.concatenate([pools[u] for u in users])
    starts = np.cumsum([0] + [len(pools[u]) for u in users])[:-1]
    for u, start in zip(users, starts):
        offsets[u] = start

    rng = np.random.Generator(np.random.PCG64(seed))
    picks = rng.integers(0, len(relevant), size=n_samples)
    sampled_users = link_user[picks]
    within = rng.integers(0, sizes[sampled_users])
    irrelevant = flat[offsets[sampled_users] + within]
    rel = relevant[picks]

    higher = int(np.count_nonzero(rel > irrelevant))
    ties = int(np.count_nonzero(rel == irrelevant))
    return (higher + 0.5 * ties) / n_samples


# ──────────────────────────────────────────────
# 다양성 / 인기도
# ──────────────────────────────────────────────

def intra_similarity(
    lists: Mapping[int, RecommendationList],
    training: BipartiteGraph,
    sorensen: Optional[sp.csr_matrix] = None,
) -> float:
    """
    I = mean_l I_l,  I_l = Σ_{i≠j} s^o_ij / (L(L−1))

    s^o 는 학습 그래프 Sørensen 유사도. 길이 2 미만 목록은 제외합니다.
    """
    if sorensen is None:
        sorensen = sorensen_matrix(training)
    values = []
    for user in sorted(lists):
        objects = lists[user].objects
        size = len(objects)
        if size < 2:
            continue
        block = sorensen[objects][:, objects]
        off_diagonal = block.sum() - block.diagonal().sum()
        values.append(off_diagonal / (size * (size - 1)))
    if not values:
        return 0.0
    return float(np.mean(values))


def _qualifying(lists: Mapping[int, RecommendationList], L: int) -> List[RecommendationList]:
    return [lists[u] for u in sorted(lists) if len(lists[u]) == L]


def hamming(lists: Mapping[int, RecommendationList], L: int) -> Optional[float]:
    """
    H = 1 − ΣQ / (L · 쌍 수)

    ΣQ_ij = Σ_o C(c_o, 2), c_o 는 객체 o 를 포함한 목록 수.
    길이가 정확히 L 인 목록만 포함하며 2 명 미만이면 None.
    """
    qualifying = _qualifying(lists, L)
    count = len(qualifying)
    if count < 2:
        return None
    all_objects = np.concatenate([rec.objects for rec in qualifying])
    c = np.bincount(all_objects)
    total_overlap = int((c * (c - 1) // 2).sum())
    pairs = count * (count - 1) // 2
    return 1.0 - total_overlap / (L * pairs)


def popularity(lists: Mapping[int, RecommendationList], training: BipartiteGraph) -> float:
    """⟨k⟩ = 추천된 모든 객체의 평균 학습 차수"""
    recommended = [lists[u].objects for u in sorted(lists) if len(lists[u])]
    if not recommended:
        raise ProtocolError("popularity: 추천 목록이 모두 비어 있습니다")
    degrees = training.object_degree[np.concatenate(recommended)]
    return float(np.mean(degrees))


# ──────────────────────────────────────────────
# precision–recall 곡선
# ──────────────────────────────────────────────

def hit_positions(scores: Mapping[int, ScoreVector], test_links: Iterable[Link]) -> np.ndarray:
    """모든 테스트 링크의 0-based 목록 위치 (오름차순)"""
    positions = []
    for user, objects in _group_by_user(test_links).items():
        sv = scores.get(user)
        pos = _locate(sv, user, objects)
        order = sv.ranking()
        inverse = np.empty(len(order), dtype=np.int64)
        inverse[order] = np.arange(len(order))
        positions.append(inverse[pos])
    if not positions:
        return np.empty(0, dtype=np.int64)
    return np.sort(np.concatenate(positions))


def pr_curve(
    scores: Mapping[int, ScoreVector],
    test_links: Iterable[Link],
    L_grid: Optional[Sequence[int]],
    num_users: int,
) -> PRCurve:
    """
    L 별 precision P(L) 과 recall = l / |E^P|

    L_grid 가 비어 있으면 1..|E^P| 전체.
    """
    test_links = list(test_links)
    positions = hit_positions(scores, test_links)
    total = len(test_links)
    if total == 0:
        raise ProtocolError("테스트 링크가 없습니다")
    grid = list(L_grid) if L_grid else list(range(1, total + 1))
    if any(L < 1 for L in grid) or grid != sorted(grid):
        raise ConfigError(f"L 그리드는 1 이상 오름차순이어야 합니다: {grid}")

    points = []
    for L in grid:
        hits = int(np.searchsorted(positions, L, side="left"))
        points.append((int(L), hits / (L * num_users), hits / total))
    return PRCurve(points)


def mean_curve(curves: Sequence[PRCurve]) -> PRCurve:
    """같은 L 그리드의 곡선들을 점별 평균"""
    if not curves:
        raise ConfigError("평균할 곡선이 없습니다")
    grid = [L for L, _, _ in curves[0].points]
    for curve in curves[1:]:
        if [L for L, _, _ in curve.points] != grid:
            raise ProtocolError("run 별 PR 곡선의 L 그리드가 다릅니다")
    precision = np.mean([[p for _, p, _ in c.points] for c in curves], axis=0)
    recall = np.mean([[r for _, _, r in c.points] for c in curves], axis=0)
    return PRCurve([(L, float(p), float(r)) for L, p, r in zip(grid, precision, recall)])


# ──────────────────────────────────────────────
# 종합 평가
# ──────────────────────────────────────────────

def evaluate(
    scores: Mapping[int, ScoreVector],
    split_data: SplitDataset,
    L: int,
    auc_samples: int,
    seed: int,
    sorensen: Optional[sp.csr_matrix] = None,
    lists: Optional[Mapping[int, RecommendationList]] = None,
) -> Tuple[MetricReport, Dict[int, RecommendationList]]:
    """한 분할 · 한 방법의 여섯 지표"""
    training = split_data.training
    if lists is None:
        lists = recommend_all(scores, L)
    report = MetricReport(
        ranking_score=ranking_score(scores, split_data.test_links, training),
        precision=precision_at(lists, split_data.test_links, L, split_data.num_users),
        auc=auc(scores, split_data.test_links, training, n_samples=auc_samples, seed=seed),
        intra_similarity=intra_similarity(lists, training, sorensen),
        hamming=hamming(lists, L),
        popularity=popularity(lists, training),
    )
    return report, dict(lists)


def aggregate_reports(reports: Sequence[MetricReport]) -> MetricReport:
    """run 평균과 표본 표준편차 (run 1 개면 0)"""
    if not reports:
        raise ConfigError("집계할 지표가 없습니다")
    means: Dict[str, Optional[float]] = {}
    stds: Dict[str, float] = {}
    for name in METRIC_NAMES:
        values = np.array(
            [getattr(r, name) for r in reports if getattr(r, name) is not None],
            dtype=np.float64,
        )
        if len(values) == 0:
            means[name], stds[name] = None, 0.0
            continue
        means[name] = float(np.mean(values))
        stds[name] = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return MetricReport(**means, std=stds)
