"""
밀집 행렬 기준 구현 (검증 전용)

희소 경로와 독립적으로 정의식을 그대로 계산합니다. 작은 그래프에서만 사용합니다.
"""

from itertools import combinations
from typing import Dict, List, Mapping

import numpy as np

from ..core.graph import BipartiteGraph, build_graph
from ..core.recommend import RecommendationList


def dense_adjacency(graph: BipartiteGraph) -> np.ndarray:
    a = np.zeros((graph.num_objects, graph.num_users), dtype=np.float64)
    for o, u in graph.links:
        a[o, u] = 1.0
    return a


def dense_nbi(a: np.ndarray) -> np.ndarray:
    """w_ij = (1/k_j) Σ_l a_il a_jl / k(u_l), 원소별 이중 루프"""
    n, m = a.shape
    k_obj = a.sum(axis=1)
    k_user = a.sum(axis=0)
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if k_obj[j] == 0:
                continue
            total = 0.0
            for l in range(m):
                if a[i, l] and a[j, l]:
                    total += 1.0 / k_user[l]
            w[i, j] = total / k_obj[j]
    return w


def dense_fsp(w: np.ndarray) -> np.ndarray:
    """r_ij = w_ij / Σ_i w_ij"""
    col = w.sum(axis=0)
    out = np.zeros_like(w)
    nz = col > 0
    out[:, nz] = w[:, nz] / col[nz]
    return out


def dense_bsp(w: np.ndarray) -> np.ndarray:
    """(j, i) 위치에 r_ji = w_ji / Σ_j w_ji"""
    n = w.shape[0]
    out = np.zeros_like(w)
    for i in range(n):
        denominator = sum(w[j, i] for j in range(n))
        if denominator == 0:
            continue
        for j in range(n):
            out[j, i] = w[j, i] / denominator
    return out


def dense_csi(a: np.ndarray) -> np.ndarray:
    """s_ij = sqrt(r^FSP_ij · r^BSP_ji)"""
    w = dense_nbi(a)
    fsp, bsp = dense_fsp(w), dense_bsp(w)
    return np.sqrt(fsp * bsp.T)


def dense_closed_form(a: np.ndarray) -> np.ndarray:
    """(Σ_l a_il a_jl / k(u_l)) / sqrt(k_i k_j)"""
    k_obj = a.sum(axis=1)
    k_user = a.sum(axis=0)
    inv_user = np.divide(1.0, k_user, out=np.zeros_like(k_user), where=k_user > 0)
    c = (a * inv_user) @ a.T
    scale = np.divide(1.0, np.sqrt(k_obj), out=np.zeros_like(k_obj), where=k_obj > 0)
    return scale[:, None] * c * scale[None, :]


def brute_force_hamming(lists: Mapping[int, RecommendationList], L: int) -> float:
    """O(m²) 쌍 열거: 1 − ΣQ_ij / (L · 쌍 수). 길이 L 목록만"""
    qualifying: List[set] = [set(lists[u].objects.tolist()) for u in sorted(lists)
                             if len(lists[u]) == L]
    pairs = list(combinations(range(len(qualifying)), 2))
    overlap = sum(len(qualifying[i] & qualifying[j]) for i, j in pairs)
    return 1.0 - overlap / (L * len(pairs))


def exact_pair_auc(relevant: float, pool: np.ndarray) -> float:
    higher = int(np.count_nonzero(relevant > pool))
    ties = int(np.count_nonzero(relevant == pool))
    return (higher + 0.5 * ties) / len(pool)


def random_graph(rng: np.random.Generator, max_objects: int = 30, max_users: int = 30,
                 density_range=(0.1, 0.5)) -> BipartiteGraph:
    """n ≤ max_objects, m ≤ max_users, 밀도 균등 추출 무작위 이분 그래프"""
    n = int(rng.integers(2, max_objects + 1))
    m = int(rng.integers(2, max_users + 1))
    density = float(rng.uniform(*density_range))
    mask = rng.random((n, m)) < density
    links = [(int(o), int(u)) for o, u in zip(*np.nonzero(mask))]
    return build_graph(n, m, links)


def random_graphs(count: int, seed: int = 0, **kwargs) -> List[BipartiteGraph]:
    rng = np.random.Generator(np.random.PCG64(seed))
    return [random_graph(rng, **kwargs) for _ in range(count)]


def toy_graph() -> BipartiteGraph:
    """
    3 객체 × 6 사용자 장난감 그래프

    u1:{o1}, u2:{o1,o2,o3}, u3..u5:{o2}, u6:{o2,o3}
    NBI 는 u1 에게 o2, o3 를 동점으로, CSI 는 o3 를 앞에 둡니다.
    """
    likes: Dict[int, List[int]] = {0: [0], 1: [0, 1, 2], 2: [1], 3: [1], 4: [1], 5: [1, 2]}
    return build_graph(3, 6, [(o, u) for u, objs in likes.items() for o in objs])
