"""
객체-사용자 이분 네트워크
==============================

무가중 무방향 이분 그래프와 차수 인덱스, 그리고 링크 단위 학습/테스트 분할.

    a_ij = 1  ⇔  객체 o_i 를 사용자 u_j 가 선택(like)
    k(o_i) = Σ_j a_ij,   k(u_j) = Σ_i a_ij

분할 난수는 NumPy PCG64 생성기로 고정합니다. 같은 (그래프, 비율, 시드) 조합은
플랫폼과 무관하게 동일한 분할을 만듭니다.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Tuple

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigError, DataError

Link = Tuple[int, int]  # (object-index, user-index)


# ──────────────────────────────────────────────
# 데이터 클래스
# ──────────────────────────────────────────────

@dataclass(frozen=True)
class BipartiteGraph:
    """불변 이분 그래프 (n 객체 × m 사용자)"""
    num_objects: int
    num_users: int
    links: FrozenSet[Link]
    object_degree: np.ndarray = field(compare=False, repr=False)
    user_degree: np.ndarray = field(compare=False, repr=False)

    @property
    def num_links(self) -> int:
        return len(self.links)

    @cached_property
    def link_array(self) -> np.ndarray:
        """(object, user) 사전순으로 정렬된 (E, 2) 정수 배열"""
        if not self.links:
            return np.empty((0, 2), dtype=np.int64)
        arr = np.array(sorted(self.links), dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """n × m 인접 행렬 A (float64, CSR)"""
        arr = self.link_array
        data = np.ones(len(arr), dtype=np.float64)
        mat = sp.csr_matrix(
            (data, (arr[:, 0], arr[:, 1])),
            shape=(self.num_objects, self.num_users),
        )
        mat.sort_indices()
        return mat

    @cached_property
    def user_objects(self) -> Dict[int, np.ndarray]:
        """사용자별 선택 객체 (오름차순). 차수 0 사용자는 빈 배열."""
        by_user = self.adjacency.T.tocsr()
        by_user.sort_indices()
        return {
            u: by_user.indices[by_user.indptr[u]:by_user.indptr[u + 1]].copy()
            for u in range(self.num_users)
        }

    @cached_property
    def live_objects(self) -> np.ndarray:
        """차수 > 0 인 객체 마스크"""
        return self.object_degree > 0

    @cached_property
    def live_users(self) -> np.ndarray:
        return self.user_degree > 0


@dataclass(frozen=True)
class SplitDataset:
    """학습 그래프 E^T + 테스트 링크 E^P"""
    training: BipartiteGraph
    test_links: FrozenSet[Link]
    num_objects: int
    num_users: int
    seed: int
    test_fraction: float = 0.1

    @cached_property
    def test_array(self) -> np.ndarray:
        """(object, user) 사전순 정렬 테스트 링크 배열"""
        if not self.test_links:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.test_links), dtype=np.int64)

    @cached_property
    def test_objects_by_user(self) -> Dict[int, np.ndarray]:
        """사용자별 테스트 객체 (오름차순)"""
        result: Dict[int, list] = {}
        for o, u in self.test_array:
            result.setdefault(int(u), []).append(int(o))
        return {u: np.array(objs, dtype=np.int64) for u, objs in result.items()}

    @property
    def all_links(self) -> FrozenSet[Link]:
        """E = E^T ∪ E^P"""
        return self.training.links | self.test_links


# ──────────────────────────────────────────────
# 생성 / 분할
# ──────────────────────────────────────────────

def build_graph(num_objects: int, num_users: int, links: Iterable[Link]) -> BipartiteGraph:
    """
    링크 목록으로 이분 그래프 생성

    중복 링크는 집합으로 합쳐지고, 범위를 벗어난 인덱스는 해당 쌍과 함께 거부됩니다.

    Examples:
        >>> g = build_graph(2, 2, [(0, 0), (1, 0), (1, 1)])
        >>> g.object_degree.tolist(), g.user_degree.tolist()
        ([1, 2], [2, 1])
    """
    if num_objects < 0 or num_users < 0:
        raise DataError(f"객체/사용자 수는 음수일 수 없습니다: n={num_objects}, m={num_users}")

    link_set = set()
    for o, u in links:
        o, u = int(o), int(u)
        if not (0 <= o < num_objects and 0 <= u < num_users):
            raise DataError(
                f"링크 인덱스 범위 초과: ({o}, {u}) "
                f"(허용 범위 objects [0, {num_objects}), users [0, {num_users}))"
            )
        link_set.add((o, u))

    object_degree = np.zeros(num_objects, dtype=np.int64)
    user_degree = np.zeros(num_users, dtype=np.int64)
    if link_set:
        arr = np.array(list(link_set), dtype=np.int64)
        object_degree = np.bincount(arr[:, 0], minlength=num_objects).astype(np.int64)
        user_degree = np.bincount(arr[:, 1], minlength=num_users).astype(np.int64)
    object_degree.setflags(write=False)
    user_degree.setflags(write=False)

    return BipartiteGraph(
        num_objects=num_objects,
        num_users=num_users,
        links=frozenset(link_set),
        object_degree=object_degree,
        user_degree=user_degree,
    )


def split_test_size(num_links: int, test_fraction: float) -> int:
    """round-half-up(f · |E|)"""
    return int(np.floor(test_fraction * num_links + 0.5))


def split(graph: BipartiteGraph, test_fraction: float, seed: int) -> SplitDataset:
    """
    링크 균등 무작위 분할 (사용자별 층화 없음)

    정렬된 링크 배열에 PCG64(seed) 순열을 적용하고 앞의
    round(f·|E|) 개를 테스트 링크로 사용합니다.
    """
    if graph.num_links == 0:
        raise DataError("빈 그래프는 분할할 수 없습니다")
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction은 (0, 1) 구간이어야 합니다: {test_fraction}")

    n_test = split_test_size(graph.num_links, test_fraction)
    if n_test == 0 or n_test == graph.num_links:
        raise ConfigError(
            f"test_fraction={test_fraction} 로는 |E|={graph.num_links} 링크에서 "
            f"학습/테스트 중 하나가 비게 됩니다"
        )

    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(graph.num_links)
    arr = graph.link_array

    test_idx = np.sort(order[:n_test])
    train_idx = np.sort(order[n_test:])
    test_links = frozenset((int(o), int(u)) for o, u in arr[test_idx])
    training = build_graph(
        graph.num_objects,
        graph.num_users,
        ((int(o), int(u)) for o, u in arr[train_idx]),
    )

    return SplitDataset(
        training=training,
        test_links=test_links,
        num_objects=graph.num_objects,
        num_users=graph.num_users,
        seed=seed,
        test_fraction=test_fraction,
    )
