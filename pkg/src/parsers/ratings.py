"""
평점 파일 파싱 및 like-링크 그래프 생성
==============================

1. parse_ratings    구분자 텍스트 → RatingRecord 순서열 (줄 번호 포함 오류)
2. threshold_links  평점 ≥ 임계값 인 (사용자, 객체) 쌍만 like-링크로 유지
3. 정규 링크 파일   "objectIndex<TAB>userIndex" + ID 맵 사이드카 + 요약

dense 인덱스는 like-링크를 하나 이상 가진 엔티티에 첫 등장 순서로 부여합니다.
"""

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Dict, Iterable, List, Sequence, Union

from ..core.graph import BipartiteGraph, build_graph
from ..errors import ConfigError, DataError
from .base import DatasetSummary, RatingFormat, RatingRecord, clean_rating

LINKS_FILE = "links.tsv"
ID_MAP_FILE = "id_map.json"
SUMMARY_FILE = "summary.txt"


@dataclass
class LinkDataset:
    """like-링크 그래프 + 요약 + 원본 ID 맵"""
    graph: BipartiteGraph
    summary: DatasetSummary
    user_ids: List[str] = field(default_factory=list)     # dense index → 원본 ID
    object_ids: List[str] = field(default_factory=list)


# ──────────────────────────────────────────────
# 파싱
# ──────────────────────────────────────────────

def parse_ratings(source: Union[BinaryIO, bytes], fmt: RatingFormat) -> List[RatingRecord]:
    """
    구분자 텍스트 평점 파싱

    Args:
        source: 바이트 스트림 또는 bytes
        fmt: 구분자/필드 순서/헤더 줄 수/평점 척도

    Returns:
        잘 형성된 줄마다 RatingRecord 하나. 빈 입력이면 빈 리스트.

    Raises:
        DataError: 디코딩 실패, 필드 수 불일치, 숫자가 아닌 평점, 척도 밖 평점
            (모두 줄 번호 포함)
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)

    user_col = fmt.index_of("user")
    object_col = fmt.index_of("object")
    rating_col = fmt.index_of("rating")

    records: List[RatingRecord] = []
    for line_number, raw in enumerate(source, start=1):
        if line_number <= fmt.header_lines:
            continue
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DataError(f"UTF-8 디코딩 실패: {e.reason}", line_number) from e

        line = line.rstrip("\r\n")
        if not line.strip():
            continue

        parts = line.split(fmt.delimiter)
        if len(parts) != fmt.arity:
            raise DataError(
                f"필드 수 {len(parts)} ≠ 형식 필드 수 {fmt.arity}: {line!r}", line_number
            )

        rating = clean_rating(parts[rating_col])
        if rating is None:
            raise DataError(f"평점을 숫자로 읽을 수 없습니다: {parts[rating_col]!r}", line_number)
        if not fmt.rating_min <= rating <= fmt.rating_max:
            raise DataError(
                f"평점 {rating} 이 척도 [{fmt.rating_min}, {fmt.rating_max}] 밖입니다", line_number
            )

        user_id = parts[user_col].strip()
        object_id = parts[object_col].strip()
        if not user_id or not object_id:
            raise DataError(f"빈 사용자/객체 ID: {line!r}", line_number)

        records.append(RatingRecord(user_id, object_id, rating))

    return records


def parse_ratings_file(path: Union[str, Path], fmt: RatingFormat) -> List[RatingRecord]:
    """파일 경로 버전"""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"평점 파일을 찾을 수 없습니다: {path}")
    with open(path, "rb") as f:
        return parse_ratings(f, fmt)


# ──────────────────────────────────────────────
# 임계값 적용
# ──────────────────────────────────────────────

def threshold_links(
    records: Sequence[RatingRecord],
    like_threshold: float,
    fmt: RatingFormat = None,
) -> LinkDataset:
    """
    평점 ≥ like_threshold 인 기록이 하나라도 있으면 (o, u) like-링크

    like-링크가 없는 사용자/객체는 dense 인덱스 공간에서 제외됩니다.

    Examples:
        {(u,o,2)}, 3       → 빈 그래프
        {(u,o,3)}, 3       → 링크 1 개
        {(u,o,2),(u,o,4)}  → 링크 1 개
    """
    if fmt is not None and not fmt.rating_min <= like_threshold <= fmt.rating_max:
        raise ConfigError(
            f"like 임계값 {like_threshold} 이 척도 [{fmt.rating_min}, {fmt.rating_max}] 밖입니다"
        )

    user_index: Dict[str, int] = {}
    object_index: Dict[str, int] = {}
    links = []
    for record in records:
        if record.rating < like_threshold:
            continue
        u = user_index.setdefault(record.user_id, len(user_index))
        o = object_index.setdefault(record.object_id, len(object_index))
        links.append((o, u))

    graph = build_graph(len(object_index), len(user_index), links)
    return LinkDataset(
        graph=graph,
        summary=summarize(graph),
        user_ids=list(user_index),
        object_ids=list(object_index),
    )


def summarize(graph: BipartiteGraph) -> DatasetSummary:
    """엔티티 수는 like-링크가 있는 것만 셉니다"""
    users = int((graph.user_degree > 0).sum())
    objects = int((graph.object_degree > 0).sum())
    cells = users * objects
    return DatasetSummary(
        users=users,
        objects=objects,
        links=graph.num_links,
        sparsity=graph.num_links / cells if cells else 0.0,
    )


# ──────────────────────────────────────────────
# 정규 링크 파일 저장/로드
# ──────────────────────────────────────────────

def save_link_dataset(dataset: LinkDataset, output_dir: Union[str, Path]) -> Path:
    """
    정규 형식 저장

    output_dir/
        links.tsv     objectIndex<TAB>userIndex (사전순)
        id_map.json   {"users": [...], "objects": [...]}
        summary.txt   key<TAB>value
    """
    output_path = Path(output_dir)
    output_path.mkdir(parents=True, exist_ok=True)

    with open(output_path / LINKS_FILE, "w", encoding="utf-8", newline="\n") as f:
        for o, u in dataset.graph.link_array:
            f.write(f"{o}\t{u}\n")

    write_id_map(dataset.user_ids, dataset.object_ids, output_path)

    with open(output_path / SUMMARY_FILE, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(dataset.summary.as_lines()) + "\n")

    return output_path


def write_id_map(user_ids: Sequence[str], object_ids: Sequence[str],
                 output_dir: Union[str, Path]) -> Path:
    """dense 인덱스 → 원본 ID 맵 (id_map.json)"""
    id_map_path = Path(output_dir) / ID_MAP_FILE
    with open(id_map_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(
            {"users": list(user_ids), "objects": list(object_ids)},
            f,
            ensure_ascii=False,
            indent=2,
        )
    return id_map_path


def load_link_dataset(input_dir: Union[str, Path]) -> LinkDataset:
    """save_link_dataset 출력 재로드 (같은 그래프 재현)"""
    input_path = Path(input_dir)
    links_file = input_path / LINKS_FILE
    id_map_file = input_path / ID_MAP_FILE
    if not links_file.is_file() or not id_map_file.is_file():
        raise DataError(f"정규 링크 디렉터리가 아닙니다: {input_path} ({LINKS_FILE}, {ID_MAP_FILE} 필요)")

    with open(id_map_file, "r", encoding="utf-8") as f:
        id_map = json.load(f)
    user_ids = list(id_map.get("users", []))
    object_ids = list(id_map.get("objects", []))

    graph = build_graph(len(object_ids), len(user_ids), _read_link_lines(links_file))
    return LinkDataset(graph, summarize(graph), user_ids, object_ids)


def _read_link_lines(path: Path) -> Iterable:
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"링크 줄 형식 오류: {line!r}", line_number)
            try:
                yield int(parts[0]), int(parts[1])
            except ValueError as e:
                raise DataError(f"정수 인덱스가 아닙니다: {line!r}", line_number) from e


def is_link_directory(path: Union[str, Path]) -> bool:
    path = Path(path)
    return path.is_dir() and (path / LINKS_FILE).is_file()


def load_dataset(path: Union[str, Path], fmt: RatingFormat, like_threshold: float) -> LinkDataset:
    """
    평점 파일 또는 정규 링크 디렉터리 로드

    디렉터리면 save_link_dataset 출력으로 보고 그대로 읽습니다 (형식/임계값 무시).
    """
    if is_link_directory(path):
        print(f"[Ingest] 정규 링크 디렉터리: {path}")
        return load_link_dataset(path)

    print(f"[Ingest] 평점 파일: {path}")
    records = parse_ratings_file(path, fmt)
    dataset = threshold_links(records, like_threshold, fmt)
    print(f"[Ingest] 평점 {len(records):,}건 → like-링크 {dataset.graph.num_links:,}개 "
          f"(임계값 ≥ {like_threshold:g})")
    return dataset


def print_summary(summary: DatasetSummary, name: str = "") -> None:
    """요약 표 출력"""
    label = name or "dataset"
    print(f"{'Data':<12} {'Users':>8} {'Objects':>8} {'Links':>10} {'Sparsity':>12}")
    print("-" * 54)
    print(f"{label:<12} {summary.users:>8} {summary.objects:>8} "
          f"{summary.links:>10} {summary.sparsity:>12.3e}")
