"""
공개 MovieLens 100k 데이터 내려받기

u.data (user item rating timestamp, 탭 구분) 만 꺼내 씁니다.
Netflix / Amazon / RYM 은 공개 배포본이 없어 로컬 파일로만 지원합니다.
"""

import io
import zipfile
from pathlib import Path
from typing import Union

import requests

from ..errors import DataError

MOVIELENS_100K_URL = "https://files.grouplens.org/datasets/movielens/ml-100k.zip"
RATINGS_MEMBER = "ml-100k/u.data"


def fetch_movielens_100k(
    dest_dir: Union[str, Path],
    url: str = MOVIELENS_100K_URL,
    timeout: float = 60.0,
    force: bool = False,
) -> Path:
    """
    ml-100k.zip 을 받아 dest_dir/u.data 로 저장

    Returns:
        u.data 경로. 이미 있으면 force=False 일 때 다시 받지 않습니다.

    Raises:
        DataError: 네트워크 오류, 손상된 압축 파일, u.data 누락
    """
    dest = Path(dest_dir)
    target = dest / "u.data"
    if target.is_file() and not force:
        print(f"ℹ️  [Fetch] 이미 존재: {target}")
        return target

    print(f"[Fetch] {url}")
    try:
        response = requests.get(url, timeout=timeout)
        response.raise_for_status()
    except requests.RequestException as e:
        raise DataError(f"MovieLens 다운로드 실패: {e}") from e

    try:
        with zipfile.ZipFile(io.BytesIO(response.content)) as archive:
            if RATINGS_MEMBER not in archive.namelist():
                raise DataError(f"압축 파일에 {RATINGS_MEMBER} 가 없습니다")
            payload = archive.read(RATINGS_MEMBER)
    except zipfile.BadZipFile as e:
        raise DataError(f"손상된 압축 파일: {e}") from e

    dest.mkdir(parents=True, exist_ok=True)
    target.write_bytes(payload)
    print(f"✅ [Fetch] {target} ({len(payload):,} bytes)")
    return target
