"""공통 fixture"""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from src.core.graph import build_graph
from src.experiment.oracles import toy_graph as _toy_graph


@pytest.fixture
def toy_graph():
    """u1:{o1}, u2:{o1,o2,o3}, u3..u5:{o2}, u6:{o2,o3}"""
    return _toy_graph()


@pytest.fixture
def t1_graph():
    """u1:{o1,o2}, u2:{o2}"""
    return build_graph(2, 2, [(0, 0), (1, 0), (1, 1)])


@pytest.fixture
def toy_ratings_path():
    return ROOT / "data" / "toy" / "toy_ratings.tsv"


@pytest.fixture
def toy_config_path():
    return ROOT / "config" / "toy.json"


@pytest.fixture(autouse=True)
def _no_config_env(monkeypatch):
    monkeypatch.delenv("CSI_EXPERIMENT_CONFIG", raising=False)


def write_synthetic_ratings(path, num_users=30, num_objects=20, density=0.45, seed=0):
    """1–5 척도 무작위 평점 파일 (user<TAB>object<TAB>rating)"""
    rng = np.random.default_rng(seed)
    lines = []
    for u in range(num_users):
        for o in range(num_objects):
            if rng.random() < density:
                lines.append(f"user{u}\titem{o}\t{int(rng.integers(1, 6))}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def synthetic_ratings_path(tmp_path):
    return write_synthetic_ratings(tmp_path / "ratings.tsv")
