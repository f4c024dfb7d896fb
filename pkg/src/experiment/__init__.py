"""실험 하니스: 설정, 실행 엔진, 결과 파일, 검증"""

from .config import DatasetConfig, ExperimentConfig, load_config
from .runner import ExperimentRunner, RunOutcome, RunResult, run_experiment, run_pr_curves
