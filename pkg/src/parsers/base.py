"""
공통 데이터 클래스 및 유틸리티
"""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..errors import ConfigError


@dataclass(frozen=True)
class RatingRecord:
    """평점 한 줄"""
    user_id: str
    object_id: str
    rating: float


@dataclass(frozen=True)
class RatingFormat:
    """구분자 + 필드 순서 + 평점 척도"""
    delimiter: str = "\t"
    fields: Tuple[str, ...] = ("user", "object", "rating", "timestamp")
    header_lines: int = 0
    rating_min: float = 1.0
    rating_max: float = 5.0

    @property
    def arity(self) -> int:
        return len(self.fields)

    def index_of(self, name: str) -> int:
        return self.fields.index(name)


@dataclass
class DatasetSummary:
    """데이터셋 요약 (users, objects, links, sparsity)"""
    users: int
    objects: int
    links: int
    sparsity: float = 0.0

    def as_lines(self) -> List[str]:
        return [
            f"users\t{self.users}",
            f"objects\t{self.objects}",
            f"links\t{self.links}",
            f"sparsity\t{self.sparsity:.6e}",
        ]


@dataclass
class DatasetPreset:
    """벤치마크 데이터셋별 기본 형식/척도/임계값"""
    name: str
    delimiter: str
    fields: Tuple[str, ...]
    rating_min: float
    rating_max: float
    like_threshold: float
    notes: str = ""


# ──────────────────────────────────────────────
# 프리셋
# ──────────────────────────────────────────────

DATASET_PRESETS: Dict[str, DatasetPreset] = {
    "movielens": DatasetPreset(
        "movielens", "\t", ("user", "object", "rating", "timestamp"), 1.0, 5.0, 3.0,
        notes="u.data (user item rating timestamp)",
    ),
    "netflix": DatasetPreset(
        "netflix", ",", ("user", "object", "rating"), 1.0, 5.0, 3.0,
    ),
    "amazon": DatasetPreset(
        "amazon", ",", ("user", "object", "rating"), 1.0, 5.0, 3.0,
    ),
    "rym": DatasetPreset(
        "rym", ",", ("user", "object", "rating"), 1.0, 10.0, 5.0,
        notes="1–10 척도, like 는 5 이상",
    ),
}

_DELIMITER_NAMES = {
    "tab": "\t",
    "comma": ",",
    "semicolon": ";",
    "space": " ",
    "pipe": "|",
    "double-colon": "::",
}

REQUIRED_FIELDS = ("user", "object", "rating")


# ──────────────────────────────────────────────
# 유틸리티 함수
# ──────────────────────────────────────────────

def clean_rating(value) -> Optional[float]:
    """
    평점 정제: 공백, non-breaking space 제거 후 float 변환

    Args:
        value: 정제할 값 (str, int, float, None)

    Returns:
        float 또는 None (파싱 불가 시)

    Examples:
        >>> clean_rating(" 3 ")
        3.0
        >>> clean_rating("4.5\\u00a0")
        4.5
        >>> clean_rating("-") is None
        True
    """
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return float(value)

    s = str(value).strip()
    if s in ("-", "—", "–", ""):
        return None

    s = re.sub(r"[\s\u00a0\u202d\u202c]", "", s)

    try:
        return float(s)
    except ValueError:
        return None


def parse_format_spec(
    spec: str,
    rating_min: Optional[float] = None,
    rating_max: Optional[float] = None,
    header_lines: int = 0,
) -> RatingFormat:
    """
    형식 문자열 → RatingFormat

    형식:
        "movielens"                         프리셋 이름
        "tab:user,object,rating,timestamp"  구분자:필드순서
        ",:object,user,rating"              구분자 문자 그대로도 허용

    user / object / rating 이외 필드 이름은 무시되는 열입니다.
    """
    spec = spec.strip()
    preset = DATASET_PRESETS.get(spec.lower())
    if preset is not None:
        return RatingFormat(
            delimiter=preset.delimiter,
            fields=preset.fields,
            header_lines=header_lines,
            rating_min=preset.rating_min if rating_min is None else rating_min,
            rating_max=preset.rating_max if rating_max is None else rating_max,
        )

    if ":" not in spec[1:]:
        raise ConfigError(
            f"형식을 해석할 수 없습니다: {spec!r}\n"
            f"프리셋({', '.join(DATASET_PRESETS)}) 또는 '구분자:필드,필드,...' 형식이 필요합니다."
        )
    # 구분자 자체가 ':' 일 수 있으므로 마지막 ':' 기준으로 나눕니다
    delimiter_part, field_part = spec.rsplit(":", 1)
    delimiter = _DELIMITER_NAMES.get(delimiter_part.lower(), delimiter_part)
    if delimiter == "":
        raise ConfigError(f"빈 구분자: {spec!r}")

    fields = tuple(f.strip().lower() for f in field_part.split(",") if f.strip())
    for name in REQUIRED_FIELDS:
        if fields.count(name) != 1:
            raise ConfigError(f"형식에 '{name}' 필드가 정확히 한 번 있어야 합니다: {spec!r}")

    lo = 1.0 if rating_min is None else rating_min
    hi = 5.0 if rating_max is None else rating_max
    if lo > hi:
        raise ConfigError(f"평점 척도 오류: min={lo} > max={hi}")
    return RatingFormat(delimiter, fields, header_lines, lo, hi)


def preset_threshold(spec: str) -> Optional[float]:
    """프리셋 이름이면 like 임계값, 아니면 None"""
    preset = DATASET_PRESETS.get(spec.strip().lower())
    return preset.like_threshold if preset else None
