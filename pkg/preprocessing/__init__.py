# preprocessing 패키지: 로드 → 정제 → 정규화 → 윈도우
from .cleaning import (
    CleaningConfig,
    CleaningReport,
    CleaningStats,
    clean_matrix,
    detect_outliers,
    revise_point,
)
from .load_data import (
    HOURS_PER_DAY,
    CsvSchema,
    LoadMatrix,
    LoadSeries,
    load_csv,
    split_target_day,
)
from .windows import (
    NormalizationParams,
    WindowSet,
    as_sequences,
    build_windows,
    denormalize,
    input_dim_for,
    normalize,
)
