"""평점 데이터 수집(ingest) 패키지"""

from .base import (
    DATASET_PRESETS,
    DatasetSummary,
    RatingFormat,
    RatingRecord,
    clean_rating,
    parse_format_spec,
    preset_threshold,
)
from .ratings import (
    LinkDataset,
    is_link_directory,
    load_dataset,
    load_link_dataset,
    parse_ratings,
    parse_ratings_file,
    save_link_dataset,
    threshold_links,
)
