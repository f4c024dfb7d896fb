"""
유사도 행렬 계산
==============================

객체-객체 / 사용자-사용자 유사도 구조:

    NBI         w_ij = (1/k(o_j)) Σ_l a_il a_jl / k(u_l)
    FSP         r^FSP_ij = w_ij / Σ_i w_ij
    BSP         r^BSP_ji = w_ji / Σ_j w_ji
    CSI         s_ij = sqrt(r^FSP_ij · r^BSP_ji)
    IC-NBI      w^IC_ij = k(o_j)^β · w_ij
    USER-COSINE s_ij = Σ_l a_li a_lj / sqrt(k(u_i) k(u_j))

모든 행렬은 희소 곱(공통 사용자 열거)으로 만들며 밀집 n×n 곱은 쓰지 않습니다.
차수 0 객체의 열은 전부 0 (빈 합 = 0 규약).
"""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigError
from .graph import BipartiteGraph


class SimilarityKind(str, Enum):
    NBI = "NBI"
    FSP = "FSP"
    BSP = "BSP"
    CSI = "CSI"
    IC_NBI = "IC-NBI"
    USER_COSINE = "USER-COSINE"


@dataclass(frozen=True)
class SimilarityMatrix:
    """희소 유사도 행렬 (dim × dim, CSR) + 종류 태그"""
    kind: SimilarityKind
    matrix: sp.csr_matrix = field(repr=False)
    # 차수 > 0 인 객체(또는 사용자) 마스크. 추천 단계에서 cold 판정에 사용
    live: np.ndarray = field(repr=False)
    beta: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entry(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])

    def column_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=0)).ravel()

    def scaled(self, factor: float) -> "SimilarityMatrix":
        """모든 원소에 양의 상수를 곱한 사본 (순위 불변성 확인용)"""
        if factor <= 0:
            raise ConfigError(f"배율은 양수여야 합니다: {factor}")
        return SimilarityMatrix(self.kind, _canonical(self.matrix * factor), self.live, self.beta)


def _canonical(mat) -> sp.csr_matrix:
    """CSR + 정렬된 인덱스 + 명시적 0 제거"""
    mat = sp.csr_matrix(mat, dtype=np.float64)
    mat.eliminate_zeros()
    mat.sort_indices()
    return mat


def _unit_clip(mat: sp.csr_matrix) -> sp.csr_matrix:
    """코사인형 유사도 상한 1 (반올림으로 1 ulp 넘는 값 정리)"""
    np.minimum(mat.data, 1.0, out=mat.data)
    return mat


def _safe_inverse(values: np.ndarray) -> np.ndarray:
    """0 은 0 으로, 나머지는 역수"""
    values = np.asarray(values, dtype=np.float64)
    out = np.zeros_like(values)
    nz = values > 0
    out[nz] = 1.0 / values[nz]
    return out


def _require_kind(sim: SimilarityMatrix, *kinds: SimilarityKind) -> None:
    if sim.kind not in kinds:
        expected = ", ".join(k.value for k in kinds)
        raise ConfigError(f"유사도 종류 불일치: {sim.kind.value} (기대: {expected})")


# ──────────────────────────────────────────────
# NBI 계열
# ──────────────────────────────────────────────

def common_user_weights(graph: BipartiteGraph) -> sp.csr_matrix:
    """C_ij = Σ_l a_il a_jl / k(u_l): 공통 사용자 열거 희소 곱"""
    A = graph.adjacency
    inv_ku = sp.diags(_safe_inverse(graph.user_degree))
    return _canonical(A @ inv_ku @ A.T)


def nbi_weights(graph: BipartiteGraph) -> SimilarityMatrix:
    """
    NBI 유사도 가중치 W

    w_ij = C_ij / k(o_j). 살아 있는 객체 j 의 열 합은 1.

    Examples:
        T1 = {u1:{o1,o2}, u2:{o2}} →
            w_11 = 1/2, w_21 = 1/2, w_12 = 1/4, w_22 = 3/4
    """
    C = common_user_weights(graph)
    W = C @ sp.diags(_safe_inverse(graph.object_degree))
    return SimilarityMatrix(SimilarityKind.NBI, _canonical(W), graph.live_objects)


def forward_proportions(w: SimilarityMatrix) -> SimilarityMatrix:
    """r^FSP_ij = w_ij / Σ_i w_ij (열 정규화, 0 열은 0)"""
    _require_kind(w, SimilarityKind.NBI)
    F = w.matrix @ sp.diags(_safe_inverse(w.column_sums()))
    return SimilarityMatrix(SimilarityKind.FSP, _canonical(F), w.live)


def backward_proportions(w: SimilarityMatrix) -> SimilarityMatrix:
    """
    r^BSP_ji = w_ji / Σ_j w_ji

    (j, i) 위치에 저장합니다. w_ij 를 보정할 때 참조하는 값은 B[j, i] 입니다.
    Σ_j w_ji 는 i 열의 합이므로 정규화 축은 FSP 와 같은 열 방향입니다.
    """
    _require_kind(w, SimilarityKind.NBI)
    B = w.matrix @ sp.diags(_safe_inverse(w.column_sums()))
    return SimilarityMatrix(SimilarityKind.BSP, _canonical(B), w.live)


def csi_similarity(fsp: SimilarityMatrix, bsp: SimilarityMatrix) -> SimilarityMatrix:
    """
    보정 유사도 s_ij = sqrt(r^FSP_ij · r^BSP_ji)

    F ∘ Bᵀ 의 원소별 곱은 (i, j) 와 (j, i) 에서 같은 두 실수의 곱이므로
    결과는 정확히 대칭입니다.
    """
    _require_kind(fsp, SimilarityKind.FSP)
    _require_kind(bsp, SimilarityKind.BSP)
    if fsp.dim != bsp.dim:
        raise ConfigError(f"차원 불일치: FSP {fsp.dim} vs BSP {bsp.dim}")

    product = _canonical(fsp.matrix.multiply(bsp.matrix.T.tocsr()))
    product.data = np.sqrt(product.data)
    return SimilarityMatrix(SimilarityKind.CSI, _unit_clip(product), fsp.live)


def csi_from_graph(graph: BipartiteGraph) -> SimilarityMatrix:
    """NBI → FSP/BSP → CSI 정의 파이프라인"""
    w = nbi_weights(graph)
    return csi_similarity(forward_proportions(w), backward_proportions(w))


def csi_closed_form(graph: BipartiteGraph) -> SimilarityMatrix:
    """s_ij = C_ij / sqrt(k(o_i) k(o_j)), k(o_j)·w_ij = k(o_i)·w_ji 에서 유도"""
    C = common_user_weights(graph)
    scale = sp.diags(np.sqrt(_safe_inverse(graph.object_degree)))
    return SimilarityMatrix(SimilarityKind.CSI, _canonical(scale @ C @ scale), graph.live_objects)


def icnbi_weights(
    graph: BipartiteGraph,
    beta: float,
    nbi: Optional[SimilarityMatrix] = None,
) -> SimilarityMatrix:
    """
    IC-NBI 가중치 w^IC_ij = k(o_j)^β · w_ij

    β = 1 이면 초기 자원 배치 k(o_j) 를 그대로 곱한 형태, β = 0 이면 NBI 와 동일.
    β 스윕 시 같은 학습 그래프의 NBI 행렬을 nbi 로 넘겨 재사용합니다.
    """
    if nbi is None:
        nbi = nbi_weights(graph)
    _require_kind(nbi, SimilarityKind.NBI)

    degree = graph.object_degree.astype(np.float64)
    factor = np.zeros_like(degree)
    live = degree > 0
    factor[live] = degree[live] ** beta
    W_ic = nbi.matrix @ sp.diags(factor)
    return SimilarityMatrix(SimilarityKind.IC_NBI, _canonical(W_ic), nbi.live, beta=float(beta))


# ──────────────────────────────────────────────
# CF 사용자 유사도
# ──────────────────────────────────────────────

def user_cosine(graph: BipartiteGraph) -> SimilarityMatrix:
    """s_ij = Σ_l a_li a_lj / sqrt(k(u_i) k(u_j)); 차수 0 사용자는 0 행/열"""
    A = graph.adjacency
    scale = sp.diags(np.sqrt(_safe_inverse(graph.user_degree)))
    S = scale @ (A.T @ A) @ scale
    return SimilarityMatrix(SimilarityKind.USER_COSINE, _unit_clip(_canonical(S)), graph.live_users)


def sorensen_matrix(graph: BipartiteGraph) -> sp.csr_matrix:
    """다양성 지표용 객체 Sørensen 유사도 s^o_ij = Σ_l a_il a_jl / sqrt(k(o_i) k(o_j))"""
    A = graph.adjacency
    scale = sp.diags(np.sqrt(_safe_inverse(graph.object_degree)))
    return _unit_clip(_canonical(scale @ (A @ A.T) @ scale))


# ──────────────────────────────────────────────
# 덤프
# ──────────────────────────────────────────────

def dump_matrix(sim: SimilarityMatrix, path: Union[str, Path]) -> Path:
    """'i<TAB>j<TAB>weight' (17 유효숫자), 행 우선 정렬"""
    output_file = Path(path)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    coo = sim.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(output_file, "w", encoding="utf-8", newline="\n") as f:
        for k in order:
            f.write(f"{coo.row[k]}\t{coo.col[k]}\t{coo.data[k]:.17g}\n")
    return output_file


def load_matrix_dump(path: Union[str, Path], dim: int) -> sp.csr_matrix:
    """dump_matrix 출력 재로드"""
    rows, cols, vals = [], [], []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            i, j, v = line.rstrip("\n").split("\t")
            rows.append(int(i))
            cols.append(int(j))
            vals.append(float(v))
    return _canonical(sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim)))
