"""
추천 점수 계산 및 top-L 목록
==============================

다섯 가지 방법:
    GRM     score(o_i) = k(o_i)
    CF      v_ij = Σ_{l≠i} s_li a_jl / Σ_{l≠i} s_li
    NBI     f' = W f
    IC-NBI  f' = W^IC f
    CSI     f' = S^CSI f

이미 수집한 객체는 후보에서 제외됩니다. 목록의 전순서:
    점수 내림차순 → 학습 차수 0 (cold) 객체는 뒤로 → 객체 인덱스 오름차순

사용자별 점수는 지연 계산(열 gather)이 기본이며, 배치 모드(score_users)는
같은 희소 곱 순서를 쓰므로 결과가 비트 단위로 같습니다.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Union

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigError, DataError
from .graph import BipartiteGraph
from .similarity import (
    SimilarityKind,
    SimilarityMatrix,
    csi_from_graph,
    icnbi_weights,
    nbi_weights,
    user_cosine,
)

METHODS = ("GRM", "CF", "NBI", "IC-NBI", "CSI")

_PROPAGATION_KINDS = (SimilarityKind.NBI, SimilarityKind.IC_NBI, SimilarityKind.CSI)


# ──────────────────────────────────────────────
# 데이터 클래스
# ──────────────────────────────────────────────

@dataclass(frozen=True)
class UserHistory:
    """사용자의 학습 선택 이력 (벡터 f, f_i = a_il)"""
    user: int
    collected: FrozenSet[int]


@dataclass(frozen=True)
class ScoreVector:
    """후보 객체(미수집)별 점수"""
    user: int
    candidates: np.ndarray = field(repr=False)   # 오름차순 객체 인덱스
    scores: np.ndarray = field(repr=False)       # candidates 와 정렬 일치
    cold: np.ndarray = field(repr=False)         # 학습 차수 0 후보 마스크

    def __len__(self) -> int:
        return len(self.candidates)

    def score_of(self, obj: int) -> Optional[float]:
        pos = np.searchsorted(self.candidates, obj)
        if pos < len(self.candidates) and self.candidates[pos] == obj:
            return float(self.scores[pos])
        return None

    def ranking(self) -> np.ndarray:
        """전순서에 따른 후보 위치 인덱스"""
        return np.lexsort((self.candidates, self.cold, -self.scores))


@dataclass(frozen=True)
class RecommendationList:
    """길이 min(L, 후보 수) 추천 목록"""
    user: int
    objects: np.ndarray = field(repr=False)
    scores: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.objects)

    @property
    def items(self):
        return list(zip(self.objects.tolist(), self.scores.tolist()))


def history_of(graph: BipartiteGraph, user: int) -> UserHistory:
    _check_user(graph, user)
    return UserHistory(user, frozenset(int(o) for o in graph.user_objects[user]))


def _check_user(graph: BipartiteGraph, user: int) -> None:
    if not 0 <= user < graph.num_users:
        raise DataError(f"사용자 인덱스 범위 초과: {user} (m={graph.num_users})")


def _candidates(num_objects: int, collected: Iterable[int]) -> np.ndarray:
    mask = np.ones(num_objects, dtype=bool)
    idx = np.fromiter(collected, dtype=np.int64)
    mask[idx] = False
    return np.flatnonzero(mask)


def _score_vector(user: int, full_scores: np.ndarray, candidates: np.ndarray,
                  live: np.ndarray) -> ScoreVector:
    return ScoreVector(
        user=user,
        candidates=candidates,
        scores=np.asarray(full_scores[candidates], dtype=np.float64),
        cold=~live[candidates],
    )


# ──────────────────────────────────────────────
# 방법별 점수
# ──────────────────────────────────────────────

def score_propagation(matrix: SimilarityMatrix, history: UserHistory) -> ScoreVector:
    """
    score(o_i) = Σ_{j ∈ collected} matrix(i, j)

    NBI / IC-NBI / CSI 공통. 빈 이력이면 모든 점수 0.
    """
    if matrix.kind not in _PROPAGATION_KINDS:
        raise ConfigError(f"전파 점수에 쓸 수 없는 유사도 종류: {matrix.kind.value}")

    f = np.zeros(matrix.dim, dtype=np.float64)
    collected = np.fromiter(history.collected, dtype=np.int64)
    f[collected] = 1.0
    full = matrix.matrix @ f
    return _score_vector(history.user, full, _candidates(matrix.dim, history.collected), matrix.live)


def score_cf(user_sim: SimilarityMatrix, graph: BipartiteGraph, user: int) -> ScoreVector:
    """
    v_ij = Σ_{l≠i} s_li a_jl / Σ_{l≠i} s_li

    분모가 0 이면 모든 점수 0 (후보 집합은 그대로).
    """
    if user_sim.kind != SimilarityKind.USER_COSINE:
        raise ConfigError(f"CF 에는 USER-COSINE 유사도가 필요합니다: {user_sim.kind.value}")
    _check_user(graph, user)

    neighbours = _without_diagonal(user_sim.matrix)
    s = neighbours[:, [user]].toarray().ravel()
    numerator = graph.adjacency @ s
    denominator = _column_fsum(neighbours, user)
    full = _cf_ratio(numerator, denominator) if denominator > 0 else np.zeros(graph.num_objects)
    return _score_vector(user, full, _candidates(graph.num_objects, graph.user_objects[user]),
                         graph.live_objects)


def score_grm(graph: BipartiteGraph, user: int) -> ScoreVector:
    """score(o_i) = k(o_i), 수집한 객체 제외"""
    _check_user(graph, user)
    full = graph.object_degree.astype(np.float64)
    return _score_vector(user, full, _candidates(graph.num_objects, graph.user_objects[user]),
                         graph.live_objects)


def _without_diagonal(mat: sp.csr_matrix) -> sp.csr_matrix:
    """l ≠ i 조건: 대각 제거"""
    out = sp.csr_matrix(mat - sp.diags(mat.diagonal()))
    out.eliminate_zeros()
    out.sort_indices()
    return out


def _cf_ratio(numerator: np.ndarray, denominator: float) -> np.ndarray:
    # 분자는 분모 항의 부분합이라 1 을 넘지 않음 (합산 순서 차이만 정리)
    return np.minimum(numerator / denominator, 1.0)


def _column_fsum(mat: sp.csr_matrix, col: int) -> float:
    # 정확 반올림 합이라 배치/지연 경로의 합산 순서와 무관
    return math.fsum(mat[:, [col]].data.tolist())


# ──────────────────────────────────────────────
# top-L
# ──────────────────────────────────────────────

def top_l(scores: ScoreVector, L: int) -> RecommendationList:
    """전순서 상위 L 개 (후보가 적으면 더 짧은 목록)"""
    if L < 1:
        raise ConfigError(f"L 은 1 이상이어야 합니다: {L}")
    order = scores.ranking()[:L]
    return RecommendationList(
        user=scores.user,
        objects=scores.candidates[order],
        scores=scores.scores[order],
    )


# ──────────────────────────────────────────────
# 배치 모드
# ──────────────────────────────────────────────

def build_matrix(method: str, training: BipartiteGraph, beta: float = 1.0,
                 nbi: Optional[SimilarityMatrix] = None) -> Optional[SimilarityMatrix]:
    """방법별 유사도 구조 (GRM 은 None)"""
    if method == "GRM":
        return None
    if method == "CF":
        return user_cosine(training)
    if method == "NBI":
        return nbi if nbi is not None else nbi_weights(training)
    if method == "IC-NBI":
        return icnbi_weights(training, beta, nbi=nbi)
    if method == "CSI":
        return csi_from_graph(training)
    raise ConfigError(f"알 수 없는 방법: {method} (지원: {', '.join(METHODS)})")


def score_users(
    method: str,
    training: BipartiteGraph,
    matrix: Optional[SimilarityMatrix] = None,
    beta: float = 1.0,
) -> Dict[int, ScoreVector]:
    """
    모든 사용자 점수를 한 번의 희소 곱으로 계산

    지연 경로(score_propagation / score_cf / score_grm)와 같은 누적 순서를 사용합니다.
    """
    if matrix is None:
        matrix = build_matrix(method, training, beta=beta)

    n, m = training.num_objects, training.num_users
    A = training.adjacency
    live = training.live_objects

    if method == "GRM":
        full = np.repeat(training.object_degree.astype(np.float64)[:, None], m, axis=1)
    elif method == "CF":
        neighbours = _without_diagonal(matrix.matrix)
        numerators = np.asarray((A @ neighbours).toarray())
        by_col = neighbours.tocsc()
        full = np.zeros((n, m), dtype=np.float64)
        for u in range(m):
            denominator = math.fsum(by_col.data[by_col.indptr[u]:by_col.indptr[u + 1]].tolist())
            if denominator > 0:
                full[:, u] = _cf_ratio(numerators[:, u], denominator)
    else:
        if matrix.kind not in _PROPAGATION_KINDS:
            raise ConfigError(f"{method} 에 맞지 않는 유사도 종류: {matrix.kind.value}")
        full = np.asarray((matrix.matrix @ A).toarray())

    return {
        u: _score_vector(u, full[:, u], _candidates(n, training.user_objects[u]), live)
        for u in range(m)
    }


def recommend_all(scores: Mapping[int, ScoreVector], L: int) -> Dict[int, RecommendationList]:
    return {u: top_l(sv, L) for u, sv in scores.items()}


# ──────────────────────────────────────────────
# 목록 덤프
# ──────────────────────────────────────────────

def dump_lists(lists: Mapping[int, RecommendationList], path: Union[str, Path]) -> Path:
    """'userIndex<TAB>rank<TAB>objectIndex<TAB>score' (rank 1-based)"""
    output_file = Path(path)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    with open(output_file, "w", encoding="utf-8", newline="\n") as f:
        for u in sorted(lists):
            rec = lists[u]
            for rank, (obj, score) in enumerate(zip(rec.objects, rec.scores), start=1):
                f.write(f"{u}\t{rank}\t{obj}\t{score:.17g}\n")
    return output_file


def load_lists(path: Union[str, Path]) -> Dict[int, RecommendationList]:
    """dump_lists 출력 재로드"""
    rows: Dict[int, list] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise DataError(f"목록 덤프 형식 오류: {line!r}", line_number)
            u, rank, obj, score = parts
            rows.setdefault(int(u), []).append((int(rank), int(obj), float(score)))
    result = {}
    for u, entries in rows.items():
        entries.sort()
        result[u] = RecommendationList(
            user=u,
            objects=np.array([e[1] for e in entries], dtype=np.int64),
            scores=np.array([e[2] for e in entries], dtype=np.float64),
        )
    return result
