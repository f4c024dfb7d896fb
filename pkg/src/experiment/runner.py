"""
실험 실행 엔진
==============================
ingest → 분할 → 방법별 학습/점수 → 평가 → run 평균

계산 플로우 (run r = 1..runs):
    1. seed = base_seed + r 로 링크 분할
    2. 학습 그래프에서만 유사도 구조 생성
    3. 방법별 점수 → top-L 목록 → 여섯 지표
    4. IC-NBI 는 β 그리드 전체를 평가하고 지표별 최적 β 를 선택
       (⟨r⟩ 최소, P/AUC 최대, I/H/⟨k⟩ 는 ⟨r⟩ 최적 β 의 값)
    5. PR 곡선

β 선택은 그 run 의 테스트 집합으로 이루어지는 oracle 방식입니다 (검증 분할 없음).
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..core.graph import SplitDataset, split
from ..core.metrics import (
    MetricReport,
    PRCurve,
    aggregate_reports,
    evaluate,
    mean_curve,
    pr_curve,
    ranking_score,
)
from ..core.recommend import RecommendationList, ScoreVector, build_matrix, score_users
from ..core.similarity import nbi_weights, sorensen_matrix
from ..errors import ConfigError, DataError
from ..parsers.base import DatasetSummary
from ..parsers.ratings import LinkDataset, load_dataset, print_summary
from .config import ExperimentConfig

# ⟨r⟩ 최적 β 에서 가져오는 보조 지표
SECONDARY_METRICS = ("intra_similarity", "hamming", "popularity")


# ──────────────────────────────────────────────
# 결과 데이터 클래스
# ──────────────────────────────────────────────

@dataclass
class RunOutcome:
    """run 하나의 결과"""
    run: int                                   # 1-based
    seed: int
    num_training_links: int
    num_test_links: int
    reports: Dict[str, MetricReport] = field(default_factory=dict)
    icnbi_sweep: Dict[float, MetricReport] = field(default_factory=dict)
    selected_beta: Dict[str, float] = field(default_factory=dict)
    pr_curves: Dict[str, PRCurve] = field(default_factory=dict)
    lists: Dict[str, Dict[int, RecommendationList]] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)


@dataclass
class RunResult:
    """전체 실험 결과 (run 별 + 평균/표준편차)"""
    config: ExperimentConfig
    summary: DatasetSummary
    runs: List[RunOutcome] = field(default_factory=list)
    aggregate: Dict[str, MetricReport] = field(default_factory=dict)
    pr_curves: Dict[str, PRCurve] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    user_ids: List[str] = field(default_factory=list)      # dense index → 원본 ID
    object_ids: List[str] = field(default_factory=list)

    @property
    def seeds(self) -> List[int]:
        return [outcome.seed for outcome in self.runs]

    def per_run(self, method: str) -> List[MetricReport]:
        return [outcome.reports[method] for outcome in self.runs if method in outcome.reports]


# ──────────────────────────────────────────────
# IC-NBI β 선택
# ──────────────────────────────────────────────

def select_icnbi(sweep: Dict[float, MetricReport]) -> Tuple[MetricReport, Dict[str, float]]:
    """
    지표별 최적 β 로 조합한 IC-NBI 보고

    동점이면 그리드에서 작은 β 를 택합니다.

    Returns:
        (조합된 MetricReport, {지표: 선택된 β})
    """
    if not sweep:
        raise ConfigError("IC-NBI β 스윕 결과가 없습니다")
    betas = sorted(sweep)
    best_r = min(betas, key=lambda b: sweep[b].ranking_score)
    best_p = max(betas, key=lambda b: sweep[b].precision)
    best_auc = max(betas, key=lambda b: sweep[b].auc)

    anchor = sweep[best_r]
    report = MetricReport(
        ranking_score=anchor.ranking_score,
        precision=sweep[best_p].precision,
        auc=sweep[best_auc].auc,
        intra_similarity=anchor.intra_similarity,
        hamming=anchor.hamming,
        popularity=anchor.popularity,
    )
    selected = {"ranking_score": best_r, "precision": best_p, "auc": best_auc}
    selected.update({name: best_r for name in SECONDARY_METRICS})
    return report, selected


# ──────────────────────────────────────────────
# 실행 엔진
# ──────────────────────────────────────────────

class ExperimentRunner:
    """
    CSI 실험 실행 엔진

    사용법:
        runner = ExperimentRunner(config)
        runner.load_dataset()          # 또는 runner.set_dataset(link_dataset)

        result = runner.run()          # 전체 지표
        curves = runner.run(curves_only=True)
    """

    def __init__(self, config: ExperimentConfig, verbose: bool = True):
        self.config = config
        self.verbose = verbose
        self.dataset: Optional[LinkDataset] = None

    def _log(self, message: str) -> None:
        if self.verbose:
            print(message)

    # ──────────────────────────────────────────
    # 데이터
    # ──────────────────────────────────────────

    def load_dataset(self) -> LinkDataset:
        """config.dataset 의 평점 파일(또는 정규 링크 디렉터리) 로드"""
        ds = self.config.dataset
        if not ds.path:
            raise ConfigError("dataset.path 가 지정되지 않았습니다 (--dataset)")
        if not Path(ds.path).exists():
            raise DataError(f"데이터셋을 찾을 수 없습니다: {ds.path}")
        dataset = load_dataset(ds.path, ds.rating_format(), ds.resolved_threshold())
        self.set_dataset(dataset)
        if self.verbose:
            print_summary(dataset.summary, Path(ds.path).name)
        return dataset

    def set_dataset(self, dataset: LinkDataset) -> None:
        if dataset.graph.num_links == 0:
            raise DataError("like-링크가 없는 데이터셋입니다 (임계값을 확인하세요)")
        self.dataset = dataset

    # ──────────────────────────────────────────
    # 실행
    # ──────────────────────────────────────────

    def run(self, curves_only: bool = False) -> RunResult:
        """
        모든 run 실행 후 집계

        run 하나라도 실패하면 예외가 그대로 전파됩니다 (부분 평균 없음).
        """
        if self.dataset is None:
            self.load_dataset()

        config = self.config
        seeds = config.run_seeds()
        started = time.perf_counter()

        self._log(f"\n{'=' * 70}")
        self._log(f"실험: methods={','.join(config.methods)} runs={config.runs} "
                  f"L={config.list_length} f={config.test_fraction}")
        self._log(f"{'=' * 70}")

        if config.workers > 1 and config.runs > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                futures = [
                    pool.submit(self.run_single, r, seed, curves_only)
                    for r, seed in enumerate(seeds, start=1)
                ]
                outcomes = [future.result() for future in futures]
        else:
            outcomes = [self.run_single(r, seed, curves_only) for r, seed in enumerate(seeds, start=1)]

        result = RunResult(
            config=config,
            summary=self.dataset.summary,
            runs=outcomes,
            user_ids=list(self.dataset.user_ids),
            object_ids=list(self.dataset.object_ids),
        )
        if not curves_only:
            for method in config.methods:
                result.aggregate[method] = aggregate_reports(result.per_run(method))
        for method in config.methods:
            result.pr_curves[method] = mean_curve([o.pr_curves[method] for o in outcomes])

        for outcome in outcomes:
            for phase, seconds in outcome.timings.items():
                result.timings[phase] = result.timings.get(phase, 0.0) + seconds
        result.timings["total"] = time.perf_counter() - started

        self._log(f"\n[Timing] " + ", ".join(f"{k}={v:.2f}s" for k, v in result.timings.items()))
        return result

    def split_for(self, seed: int) -> SplitDataset:
        return split(self.dataset.graph, self.config.test_fraction, seed)

    def run_single(self, run: int, seed: int, curves_only: bool = False) -> RunOutcome:
        """run 하나: 분할 → 방법별 평가"""
        config = self.config
        tag = f"[Run {run:02d}]"

        t0 = time.perf_counter()
        split_data = self.split_for(seed)
        outcome = RunOutcome(
            run=run,
            seed=seed,
            num_training_links=split_data.training.num_links,
            num_test_links=len(split_data.test_links),
        )
        outcome.timings["split"] = time.perf_counter() - t0
        self._log(f"{tag} seed={seed} |E^T|={outcome.num_training_links:,} "
                  f"|E^P|={outcome.num_test_links:,}")

        training = split_data.training
        sorensen = None if curves_only else sorensen_matrix(training)
        nbi = nbi_weights(training) if {"NBI", "IC-NBI"} & set(config.methods) else None
        keep_lists = config.dump_lists and run == 1

        for method in config.methods:
            t_method = time.perf_counter()
            if method == "IC-NBI":
                scores = self._sweep_icnbi(outcome, split_data, nbi, sorensen, curves_only)
            else:
                matrix = build_matrix(method, training, nbi=nbi)
                scores = score_users(method, training, matrix=matrix)
                if not curves_only:
                    report, lists = evaluate(
                        scores, split_data, config.list_length, config.auc_samples, seed, sorensen
                    )
                    outcome.reports[method] = report
                    if keep_lists:
                        outcome.lists[method] = lists

            outcome.pr_curves[method] = pr_curve(
                scores, split_data.test_links, config.pr_list_lengths, split_data.num_users
            )
            outcome.timings[method] = time.perf_counter() - t_method

            if method in outcome.reports:
                self._log(f"{tag} {method:<7} {_format_report(outcome.reports[method])}")

        return outcome

    def _sweep_icnbi(
        self,
        outcome: RunOutcome,
        split_data: SplitDataset,
        nbi,
        sorensen,
        curves_only: bool,
    ) -> Dict[int, ScoreVector]:
        """β 그리드 평가 후 ⟨r⟩ 최적 β 의 점수를 반환 (PR 곡선용)"""
        config = self.config
        training = split_data.training
        best_scores = None
        best_r = None
        best_lists = None

        for beta in config.beta_grid:
            matrix = build_matrix("IC-NBI", training, beta=beta, nbi=nbi)
            scores = score_users("IC-NBI", training, matrix=matrix)
            if curves_only:
                r = ranking_score(scores, split_data.test_links, training)
                lists = None
            else:
                report, lists = evaluate(
                    scores, split_data, config.list_length, config.auc_samples, outcome.seed, sorensen
                )
                outcome.icnbi_sweep[beta] = report
                r = report.ranking_score
            if best_r is None or r < best_r:
                best_r, best_scores, best_lists = r, scores, lists

        if not curves_only:
            report, selected = select_icnbi(outcome.icnbi_sweep)
            outcome.reports["IC-NBI"] = report
            outcome.selected_beta = selected
            if config.dump_lists and outcome.run == 1:
                outcome.lists["IC-NBI"] = best_lists
            self._log(f"[Run {outcome.run:02d}] IC-NBI  β*(⟨r⟩)={selected['ranking_score']:g} "
                      f"β*(P)={selected['precision']:g} β*(AUC)={selected['auc']:g}")
        return best_scores


def _format_report(report: MetricReport) -> str:
    hamming = "n/a" if report.hamming is None else f"{report.hamming:.4f}"
    return (f"⟨r⟩={report.ranking_score:.4f} P={report.precision:.4f} AUC={report.auc:.4f} "
            f"I={report.intra_similarity:.4f} H={hamming} ⟨k⟩={report.popularity:.1f}")


def run_experiment(
    config: ExperimentConfig,
    dataset: Optional[LinkDataset] = None,
    verbose: bool = True,
) -> RunResult:
    """설정 하나로 전체 실험 실행"""
    runner = ExperimentRunner(config, verbose=verbose)
    if dataset is not None:
        runner.set_dataset(dataset)
    return runner.run()


def run_pr_curves(
    config: ExperimentConfig,
    dataset: Optional[LinkDataset] = None,
    verbose: bool = True,
) -> RunResult:
    """PR 곡선만 계산 (IC-NBI 는 ⟨r⟩ 최적 β)"""
    runner = ExperimentRunner(config, verbose=verbose)
    if dataset is not None:
        runner.set_dataset(dataset)
    return runner.run(curves_only=True)
