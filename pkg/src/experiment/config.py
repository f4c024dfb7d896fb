"""
실험 설정
==============================

우선순위: 모델 기본값 < JSON 설정 파일 < CLI 플래그

설정 파일 경로:
    --config PATH  >  환경변수 CSI_EXPERIMENT_CONFIG  >  config/experiment.json (있을 때)
"""

import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from ..core.recommend import METHODS
from ..errors import ConfigError
from ..parsers.base import DATASET_PRESETS, RatingFormat, parse_format_spec, preset_threshold

CONFIG_ENV_VAR = "CSI_EXPERIMENT_CONFIG"
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "experiment.json"


def parse_beta_grid(spec: Union[str, List[float]]) -> List[float]:
    """
    β 그리드 해석

    "0.1:2.0:0.1"  → 0.1, 0.2, ..., 2.0 (양 끝 포함)
    "0.5,1,1.5"    → 나열 값
    """
    if isinstance(spec, (list, tuple)):
        return [float(b) for b in spec]
    spec = str(spec).strip()
    try:
        if ":" in spec:
            start, stop, step = (float(x) for x in spec.split(":"))
            if step <= 0 or stop < start:
                raise ConfigError(f"β 그리드 범위 오류: {spec!r}")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + k * step, 10) for k in range(count)]
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as e:
        raise ConfigError(f"β 그리드를 해석할 수 없습니다: {spec!r}") from e


def parse_methods(spec: Union[str, List[str]]) -> List[str]:
    """'CSI,NBI' 또는 리스트 → 대문자 방법 이름"""
    items = spec.split(",") if isinstance(spec, str) else list(spec)
    return [m.strip().upper() for m in items if m.strip()]


class DatasetConfig(BaseModel):
    """평점 파일 위치 + 형식 + 척도 + like 임계값"""
    path: Optional[str] = None
    format: str = "movielens"
    rating_min: Optional[float] = None
    rating_max: Optional[float] = None
    like_threshold: Optional[float] = None
    header_lines: int = 0

    @field_validator("header_lines")
    @classmethod
    def _non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("header_lines 는 0 이상이어야 합니다")
        return v

    def rating_format(self) -> RatingFormat:
        return parse_format_spec(
            self.format,
            rating_min=self.rating_min,
            rating_max=self.rating_max,
            header_lines=self.header_lines,
        )

    def resolved_threshold(self) -> float:
        """명시 값 > 프리셋 값; 둘 다 없으면 ConfigError"""
        if self.like_threshold is not None:
            return self.like_threshold
        threshold = preset_threshold(self.format)
        if threshold is None:
            raise ConfigError(
                f"형식 {self.format!r} 에는 기본 like 임계값이 없습니다. "
                f"like_threshold(--threshold) 를 지정하세요. 프리셋: {', '.join(DATASET_PRESETS)}"
            )
        return threshold


class ExperimentConfig(BaseModel):
    """실험 한 번의 완전한 설정 (기본값 포함 전부 manifest 에 기록)"""
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)
    methods: List[str] = Field(default_factory=lambda: list(METHODS))
    test_fraction: float = 0.1
    runs: int = 10
    seed: int = 0
    list_length: int = 50
    auc_samples: int = 1_000_000
    beta_grid: List[float] = Field(default_factory=lambda: parse_beta_grid("0.1:2.0:0.1"))
    pr_list_lengths: List[int] = Field(default_factory=list)   # 비어 있으면 1..|E^P|
    out_dir: str = "results"
    workers: int = 1
    verify_graphs: int = 100
    dump_lists: bool = False

    @field_validator("methods", mode="before")
    @classmethod
    def _normalize_methods(cls, v):
        return parse_methods(v)

    @field_validator("methods")
    @classmethod
    def _known_methods(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("methods 가 비어 있습니다")
        unknown = [m for m in v if m not in METHODS]
        if unknown:
            raise ValueError(f"알 수 없는 방법 {unknown} (지원: {', '.join(METHODS)})")
        if len(set(v)) != len(v):
            raise ValueError(f"중복된 방법: {v}")
        # 출력 순서는 고정 순서를 따릅니다
        return [m for m in METHODS if m in v]

    @field_validator("beta_grid", mode="before")
    @classmethod
    def _parse_beta_grid(cls, v):
        return parse_beta_grid(v)

    @field_validator("beta_grid")
    @classmethod
    def _ascending_beta(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("beta_grid 가 비어 있습니다")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"beta_grid 는 중복 없는 오름차순이어야 합니다: {v}")
        return v

    @field_validator("test_fraction")
    @classmethod
    def _fraction_range(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"test_fraction 은 (0, 1) 구간이어야 합니다: {v}")
        return v

    @field_validator("runs", "list_length", "auc_samples", "workers", "verify_graphs")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"1 이상이어야 합니다: {v}")
        return v

    @field_validator("pr_list_lengths")
    @classmethod
    def _pr_grid(cls, v: List[int]) -> List[int]:
        if any(L < 1 for L in v) or v != sorted(set(v)):
            raise ValueError(f"pr_list_lengths 는 1 이상 중복 없는 오름차순이어야 합니다: {v}")
        return v

    @field_validator("seed")
    @classmethod
    def _seed_non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError(f"seed 는 0 이상이어야 합니다: {v}")
        return v

    def run_seeds(self) -> List[int]:
        """run r = 1..runs 의 분할 시드 = seed + r"""
        return [self.seed + r for r in range(1, self.runs + 1)]

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        lines.append(f"{location}: {item['msg']}")
    return "설정 오류\n  " + "\n  ".join(lines)


def build_config(data: Dict[str, Any]) -> ExperimentConfig:
    """dict → ExperimentConfig (pydantic 오류는 ConfigError 로 변환)"""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_format_validation_error(e)) from e


def resolve_config_path(path: Optional[Union[str, Path]] = None) -> Optional[Path]:
    """명시 경로 > 환경변수 > 기본 파일(존재할 때)"""
    if path:
        return Path(path)
    env_path = os.environ.get(CONFIG_ENV_VAR)
    if env_path:
        return Path(env_path)
    if DEFAULT_CONFIG_PATH.is_file():
        return DEFAULT_CONFIG_PATH
    return None


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict):
            base_value = merged.get(key)
            merged[key] = _merge(base_value if isinstance(base_value, dict) else {}, value)
        else:
            merged[key] = value
    return merged


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """
    설정 파일 + 오버라이드 병합

    overrides 의 None 값은 "지정 안 함" 으로 취급되어 파일 값을 덮지 않습니다.
    """
    data: Dict[str, Any] = {}
    config_path = resolve_config_path(path)
    if config_path is not None:
        if not config_path.is_file():
            raise ConfigError(f"설정 파일을 찾을 수 없습니다: {config_path}")
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"설정 파일 JSON 오류 ({config_path}): {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"설정 파일 최상위는 객체여야 합니다: {config_path}")
        print(f"[Config] {config_path}")

    config = build_config(_merge(data, overrides or {}))
    return config
