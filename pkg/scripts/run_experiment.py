#!/usr/bin/env python3
"""
CSI 추천 실험 CLI
==============================

사용법:
    # 평점 파일 → 정규 링크 파일 (links.tsv, id_map.json, summary.txt)
    python3 scripts/run_experiment.py ingest --ratings data/ml-100k/u.data --format movielens --out data/ml100k_links

    # 전체 실험 (GRM, CF, NBI, IC-NBI, CSI / 10 runs / L=50)
    python3 scripts/run_experiment.py run --dataset data/ml-100k/u.data --out results/ml100k

    # 일부 방법만, 설정 파일 + 플래그 오버라이드
    python3 scripts/run_experiment.py run --config config/toy.json --methods NBI,CSI --runs 1

    # precision-recall 곡선만
    python3 scripts/run_experiment.py curve --dataset data/ml-100k/u.data --out results/curves

    # 불변식 검증 스위트
    python3 scripts/run_experiment.py verify

    # 공개 MovieLens 100k 내려받기
    python3 scripts/run_experiment.py fetch --out data/ml-100k

종료 코드: 0 성공, 1 사용법/설정 오류, 2 데이터 오류, 3 검증 실패
"""

import argparse
import sys
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional

# 프로젝트 루트를 모듈 검색 경로에 추가
BASE_PATH = str(Path(__file__).parent.parent)
sys.path.insert(0, BASE_PATH)

from src.errors import ConfigError, DataError, VerificationError
from src.experiment.config import ExperimentConfig, load_config, parse_beta_grid
from src.experiment.report import print_summary_table, write_results
from src.experiment.runner import ExperimentRunner
from src.experiment.verify import verify
from src.parsers.movielens import fetch_movielens_100k
from src.parsers.ratings import load_dataset, print_summary, save_link_dataset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageErrorParser(argparse.ArgumentParser):
    """argparse 사용법 오류를 종료 코드 1 로"""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"❌ {self.prog}: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", "--ratings", dest="dataset",
                        help="평점 파일 또는 정규 링크 디렉터리")
    parser.add_argument("--format", help="프리셋(movielens/netflix/amazon/rym) 또는 '구분자:필드,...'")
    parser.add_argument("--threshold", type=float, help="like 임계값 (평점 ≥ R)")


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON 설정 파일 (기본: config/experiment.json)")
    _add_dataset_flags(parser)
    parser.add_argument("--methods", help="쉼표 구분 방법 목록 (예: NBI,CSI)")
    parser.add_argument("--runs", type=int, help="독립 분할 수")
    parser.add_argument("--seed", type=int, help="기본 시드 (run r 의 시드 = seed + r)")
    parser.add_argument("--list-length", type=int, dest="list_length", help="추천 목록 길이 L")
    parser.add_argument("--auc-samples", type=int, dest="auc_samples", help="AUC 표본 수")
    parser.add_argument("--beta-grid", dest="beta_grid", help="IC-NBI β 그리드 ('0.1:2.0:0.1' 또는 '0.5,1')")
    parser.add_argument("--out", help="결과 디렉터리")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageErrorParser(
        prog="run_experiment.py",
        description="CSI 추천 실험 CLI",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageErrorParser)

    ingest = sub.add_parser("ingest", help="평점 파일 → 정규 링크 파일")
    _add_dataset_flags(ingest)
    ingest.add_argument("--config", help="JSON 설정 파일")
    ingest.add_argument("--out", required=True, help="출력 디렉터리")

    run = sub.add_parser("run", help="전체 실험")
    _add_experiment_flags(run)
    run.add_argument("--workers", type=int, help="동시 실행 run 수")
    run.add_argument("--dump-lists", action="store_true", default=None, dest="dump_lists",
                     help="run 1 추천 목록 저장")

    curve = sub.add_parser("curve", help="precision-recall 곡선만")
    _add_experiment_flags(curve)

    check = sub.add_parser("verify", help="불변식 검증 스위트")
    check.add_argument("--config", help="JSON 설정 파일")
    _add_dataset_flags(check)
    check.add_argument("--graphs", type=int, dest="verify_graphs", help="무작위 그래프 수")
    check.add_argument("--seed", type=int, help="기본 시드")
    check.add_argument("--auc-instances", type=int, default=100, dest="auc_instances",
                       help="AUC 표본 검사 인스턴스 수")

    fetch = sub.add_parser("fetch", help="MovieLens 100k 내려받기")
    fetch.add_argument("--out", default=str(Path(BASE_PATH) / "data" / "ml-100k"), help="저장 디렉터리")
    fetch.add_argument("--force", action="store_true", help="이미 있어도 다시 받기")

    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """지정된 플래그만 설정 오버라이드로"""
    dataset = {
        "path": getattr(args, "dataset", None),
        "format": getattr(args, "format", None),
        "like_threshold": getattr(args, "threshold", None),
    }
    overrides: Dict[str, Any] = {"dataset": dataset}
    for key in ("methods", "runs", "seed", "list_length", "auc_samples",
                "workers", "dump_lists", "verify_graphs"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "beta_grid", None) is not None:
        overrides["beta_grid"] = parse_beta_grid(args.beta_grid)
    if getattr(args, "out", None) is not None and args.command in ("run", "curve"):
        overrides["out_dir"] = args.out
    return overrides


def _print_config(config: ExperimentConfig) -> None:
    ds = config.dataset
    print(f"[Config] dataset={ds.path} format={ds.format} methods={','.join(config.methods)}")
    print(f"[Config] runs={config.runs} seed={config.seed} L={config.list_length} "
          f"f={config.test_fraction} auc_samples={config.auc_samples:,}")


# ──────────────────────────────────────────────
# 서브커맨드
# ──────────────────────────────────────────────

def cmd_ingest(args: argparse.Namespace) -> int:
    config = load_config(args.config, _overrides(args))
    ds = config.dataset
    if not ds.path:
        raise ConfigError("--ratings (또는 --dataset) 가 필요합니다")
    dataset = load_dataset(ds.path, ds.rating_format(), ds.resolved_threshold())
    output = save_link_dataset(dataset, args.out)
    print_summary(dataset.summary, Path(ds.path).name)
    print(f"\n✅ [Ingest] {output}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace, curves_only: bool = False) -> int:
    config = load_config(args.config, _overrides(args))
    _print_config(config)
    runner = ExperimentRunner(config)
    runner.load_dataset()
    result = runner.run(curves_only=curves_only)
    if not curves_only:
        print_summary_table(result)
    output = write_results(result, config.out_dir, curves_only=curves_only)
    print(f"\n✅ [Report] {output}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = load_config(args.config, _overrides(args))
    dataset = None
    ds = config.dataset
    if args.dataset:
        dataset = load_dataset(ds.path, ds.rating_format(), ds.resolved_threshold())
    verify(config, dataset=dataset, auc_instances=args.auc_instances)
    return EXIT_OK


def cmd_fetch(args: argparse.Namespace) -> int:
    fetch_movielens_100k(args.out, force=args.force)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    commands = {
        "ingest": cmd_ingest,
        "run": cmd_run,
        "curve": lambda a: cmd_run(a, curves_only=True),
        "verify": cmd_verify,
        "fetch": cmd_fetch,
    }

    try:
        return commands[args.command](args)
    except (ConfigError, DataError, VerificationError) as e:
        print(f"\n❌ {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        print(f"\n❌ 예상치 못한 오류: {e}", file=sys.stderr)
        traceback.print_exc()
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
