"""
실험 결과 파일 생성

out_dir/
    manifest.json           설정 전체 + 시드 + 코드 버전 (시각 정보 없음)
    runs/run_XX.csv         run 별 방법 × 지표
    icnbi_beta/run_XX.csv   run 별 IC-NBI β 스윕 (oracle 방식 선택 표시)
    summary.csv             평균 / 표준편차
    summary.txt             "평균(표준편차)" 정렬 표
    improvement.csv         CSI 대비 각 기준 방법의 변화율(%)
    pr_curves.csv           method, L, precision, recall (run 평균)
    id_map.json             dense 인덱스 → 원본 사용자/객체 ID
    lists/run_01_<m>.tsv    dump_lists 일 때 run 1 추천 목록
"""

import json
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

from .. import __version__
from ..core.metrics import LOWER_IS_BETTER, METRIC_NAMES, MetricReport
from ..core.recommend import dump_lists
from ..parsers.ratings import write_id_map
from .runner import RunResult

FLOAT_FORMAT = "%.17g"

METRIC_LABELS = {
    "ranking_score": "<r>",
    "precision": "P",
    "auc": "AUC",
    "intra_similarity": "I",
    "hamming": "H",
    "popularity": "<k>",
}

ICNBI_SELECTION_NOTE = "oracle: beta chosen per run and per metric on that run's test set"


def _report_row(method: str, report: MetricReport) -> Dict[str, object]:
    row: Dict[str, object] = {"method": method}
    for name, value in report.values().items():
        row[name] = np.nan if value is None else value
    return row


def _write_csv(df: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


# ──────────────────────────────────────────────
# 표 생성
# ──────────────────────────────────────────────

def run_table(result: RunResult, run_index: int) -> pd.DataFrame:
    outcome = result.runs[run_index]
    rows = [_report_row(m, outcome.reports[m]) for m in result.config.methods if m in outcome.reports]
    return pd.DataFrame(rows, columns=["method", *METRIC_NAMES])


def icnbi_table(result: RunResult, run_index: int) -> Optional[pd.DataFrame]:
    outcome = result.runs[run_index]
    if not outcome.icnbi_sweep:
        return None
    rows = []
    for beta in sorted(outcome.icnbi_sweep):
        row = _report_row("IC-NBI", outcome.icnbi_sweep[beta])
        row.pop("method")
        row = {"beta": beta, **row}
        chosen = [name for name, b in outcome.selected_beta.items() if b == beta]
        row["selected_for"] = ";".join(name for name in METRIC_NAMES if name in chosen)
        row["selection"] = "oracle"
        rows.append(row)
    return pd.DataFrame(rows, columns=["beta", *METRIC_NAMES, "selected_for", "selection"])


def summary_table(result: RunResult) -> pd.DataFrame:
    """방법별 평균과 표준편차 (열: <지표>_mean, <지표>_std)"""
    rows = []
    for method in result.config.methods:
        agg = result.aggregate.get(method)
        if agg is None:
            continue
        row: Dict[str, object] = {"method": method}
        for name in METRIC_NAMES:
            value = getattr(agg, name)
            row[f"{name}_mean"] = np.nan if value is None else value
            row[f"{name}_std"] = agg.std.get(name, 0.0)
        rows.append(row)
    columns = ["method"] + [f"{n}_{s}" for n in METRIC_NAMES for s in ("mean", "std")]
    return pd.DataFrame(rows, columns=columns)


def improvement_table(result: RunResult) -> Optional[pd.DataFrame]:
    """
    CSI 의 기준 방법 대비 변화율 = (CSI − base) / base × 100

    improved 는 지표 방향(⟨r⟩, I, ⟨k⟩ 는 낮을수록 좋음)을 반영합니다.
    """
    csi = result.aggregate.get("CSI")
    if csi is None:
        return None
    rows = []
    for method in result.config.methods:
        if method == "CSI" or method not in result.aggregate:
            continue
        base = result.aggregate[method]
        for name in METRIC_NAMES:
            ours, theirs = getattr(csi, name), getattr(base, name)
            if ours is None or theirs is None or theirs == 0:
                change = np.nan
                improved = None
            else:
                change = (ours - theirs) / theirs * 100.0
                improved = ours < theirs if name in LOWER_IS_BETTER else ours > theirs
            rows.append({
                "baseline": method,
                "metric": name,
                "csi": np.nan if ours is None else ours,
                "baseline_value": np.nan if theirs is None else theirs,
                "change_percent": change,
                "improved": improved,
            })
    return pd.DataFrame(rows, columns=["baseline", "metric", "csi", "baseline_value",
                                       "change_percent", "improved"])


def pr_table(result: RunResult) -> pd.DataFrame:
    rows = [
        {"method": method, "L": L, "precision": p, "recall": r}
        for method in result.config.methods
        if method in result.pr_curves
        for L, p, r in result.pr_curves[method].points
    ]
    return pd.DataFrame(rows, columns=["method", "L", "precision", "recall"])


def format_summary(result: RunResult) -> str:
    """'0.0963(0.0014)' 형식 정렬 표"""
    digits = {name: 4 for name in METRIC_NAMES}
    digits["popularity"] = 1

    header = f"{'Method':<8}" + "".join(f"{METRIC_LABELS[n]:>18}" for n in METRIC_NAMES)
    lines = [header, "-" * len(header)]
    for method in result.config.methods:
        agg = result.aggregate.get(method)
        if agg is None:
            continue
        cells = []
        for name in METRIC_NAMES:
            value = getattr(agg, name)
            if value is None:
                cells.append(f"{'n/a':>18}")
                continue
            d = digits[name]
            cells.append(f"{f'{value:.{d}f}({agg.std.get(name, 0.0):.{d}f})':>18}")
        lines.append(f"{method:<8}" + "".join(cells))

    betas = [o.selected_beta for o in result.runs if o.selected_beta]
    if betas:
        lines.append("")
        lines.append(f"IC-NBI β* ({ICNBI_SELECTION_NOTE})")
        for name in ("ranking_score", "precision", "auc"):
            values = ", ".join(f"{b[name]:g}" for b in betas)
            lines.append(f"  {METRIC_LABELS[name]:<4} {values}")
    return "\n".join(lines) + "\n"


def format_improvement(df: pd.DataFrame) -> str:
    lines = []
    for baseline, group in df.groupby("baseline", sort=False):
        parts = []
        for _, row in group.iterrows():
            if pd.isna(row["change_percent"]):
                continue
            parts.append(f"{METRIC_LABELS[row['metric']]} {row['change_percent']:+.1f}%")
        lines.append(f"  CSI vs {baseline:<7} " + "  ".join(parts))
    return "\n".join(lines)


# ──────────────────────────────────────────────
# 파일 쓰기
# ──────────────────────────────────────────────

def build_manifest(result: RunResult, files: List[str]) -> Dict[str, object]:
    return {
        "version": __version__,
        "config": result.config.to_dict(),
        "seeds": result.seeds,
        "dataset": {
            "users": result.summary.users,
            "objects": result.summary.objects,
            "links": result.summary.links,
            "sparsity": result.summary.sparsity,
        },
        "runs": [
            {
                "run": o.run,
                "seed": o.seed,
                "training_links": o.num_training_links,
                "test_links": o.num_test_links,
                "icnbi_selected_beta": o.selected_beta,
            }
            for o in result.runs
        ],
        "icnbi_selection": ICNBI_SELECTION_NOTE,
        "files": sorted(files),
    }


def write_results(result: RunResult, out_dir: Union[str, Path, None] = None,
                  curves_only: bool = False) -> Path:
    """
    결과 파일 일괄 저장

    같은 설정/시드면 바이트 단위로 같은 파일이 만들어집니다.
    """
    output_path = Path(out_dir or result.config.out_dir)
    output_path.mkdir(parents=True, exist_ok=True)
    written: List[str] = []

    def record(path: Path) -> None:
        written.append(path.relative_to(output_path).as_posix())

    if not curves_only:
        for idx, outcome in enumerate(result.runs):
            record(_write_csv(run_table(result, idx), output_path / "runs" / f"run_{outcome.run:02d}.csv"))
            sweep = icnbi_table(result, idx)
            if sweep is not None:
                record(_write_csv(sweep, output_path / "icnbi_beta" / f"run_{outcome.run:02d}.csv"))
            for method, lists in outcome.lists.items():
                record(dump_lists(lists, output_path / "lists" / f"run_{outcome.run:02d}_{method}.tsv"))

        record(_write_csv(summary_table(result), output_path / "summary.csv"))
        summary_txt = output_path / "summary.txt"
        summary_txt.write_text(format_summary(result), encoding="utf-8")
        record(summary_txt)

        improvement = improvement_table(result)
        if improvement is not None:
            record(_write_csv(improvement, output_path / "improvement.csv"))

        record(write_id_map(result.user_ids, result.object_ids, output_path))

    record(_write_csv(pr_table(result), output_path / "pr_curves.csv"))

    manifest_path = output_path / "manifest.json"
    written.append("manifest.json")
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(build_manifest(result, written), f, ensure_ascii=False, indent=2)
        f.write("\n")

    return output_path


def print_summary_table(result: RunResult) -> None:
    print(f"\n{'=' * 70}")
    print(f"결과 요약 ({result.config.runs} runs, L={result.config.list_length})")
    print(f"{'=' * 70}")
    print(format_summary(result), end="")
    improvement = improvement_table(result)
    if improvement is not None and len(improvement):
        print("\n[CSI 변화율]")
        print(format_improvement(improvement))
