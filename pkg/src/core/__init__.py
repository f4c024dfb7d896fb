"""이분 그래프, 유사도, 추천, 평가 지표"""

from .graph import BipartiteGraph, SplitDataset, build_graph, split
from .metrics import MetricReport, PRCurve, aggregate_reports, evaluate, mean_curve
from .recommend import METHODS, RecommendationList, ScoreVector, score_users, top_l
from .similarity import SimilarityKind, SimilarityMatrix
