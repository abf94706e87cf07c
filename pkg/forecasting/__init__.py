"""
forecasting 패키지 - 성분별 학습/예측 파이프라인과 비교 실험
"""
from .experiments import (
    ExperimentTable,
    SettingRun,
    compare_methods,
    run_settings,
    sweep_input_pattern,
    sweep_mix,
)
from .metrics import (
    accuracy,
    evaluate_mape,
    format_report,
    metrics_report,
    persistence_forecast,
    rmse,
)
from .schemas import ALL_VARIANTS, PipelineConfig, Variant
from .seeding import STREAM_INIT, STREAM_SWARM, STREAM_TRAIN, derive_seed
from .service import (
    ComponentModel,
    ForecastResult,
    PreparedSeries,
    fit,
    fit_and_forecast,
    forecast_day,
    prepare_components,
)

__all__ = [
    'ALL_VARIANTS',
    'ComponentModel',
    'ExperimentTable',
    'ForecastResult',
    'PipelineConfig',
    'PreparedSeries',
    'SettingRun',
    'Variant',
    'accuracy',
    'compare_methods',
    'derive_seed',
    'evaluate_mape',
    'fit',
    'fit_and_forecast',
    'forecast_day',
    'format_report',
    'metrics_report',
    'persistence_forecast',
    'prepare_components',
    'rmse',
    'run_settings',
    'sweep_input_pattern',
    'sweep_mix',
    'STREAM_INIT',
    'STREAM_SWARM',
    'STREAM_TRAIN',
]
