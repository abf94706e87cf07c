from __future__ import annotations

import argparse
import json
import sys
import textwrap
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from config import config
from decomposition.emd import decompose
from forecasting import (
    ALL_VARIANTS,
    ComponentModel,
    ExperimentTable,
    PipelineConfig,
    Variant,
    compare_methods,
    fit,
    forecast_day,
    format_report,
    metrics_report,
    sweep_input_pattern,
    sweep_mix,
)
from forecasting.metrics import evaluate_mape
from network.serialization import load_params, params_to_bytes
from preprocessing import (
    HOURS_PER_DAY,
    LoadSeries,
    NormalizationParams,
    clean_matrix,
    load_csv,
    split_target_day,
)
from utils import get_logger, log_stage, log_system_info
from utils.errors import DataError, ShapeMismatchError, exit_code_for
from utils.io_utils import OutputBundle, RunManifest

logger = get_logger("pipeline")

EXIT_OK = 0
EXIT_USAGE = 1

MODELS_META = "models.json"
MANIFEST = "manifest.json"

# CLI 플래그 → 평문 설정 키
FLAG_KEYS = {
    "seed": "SEED",
    "deterministic": "DETERMINISTIC",
    "mix_scheme": "MIX_SCHEME",
    "pso_loop": "PSO_LOOP",
    "variant": "VARIANT",
    "window_days": "WINDOW_DAYS",
    "mix_index": "MIX_INDEX",
    "epochs": "EPOCHS",
    "workers": "WORKERS",
}


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    """argparse 오류를 종료 코드 1로 통일"""

    def error(self, message):
        raise UsageError(message)


# ────────────────────────────────────────────────────────────
# 설정 해석
# ────────────────────────────────────────────────────────────

def _parse_assignments(items: Optional[Sequence[str]]) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--set 값은 KEY=VALUE 형식이어야 합니다: {item}")
        key, value = item.split("=", 1)
        values[key.strip().upper()] = value.strip()
    return values


def resolve_config(args: argparse.Namespace, base_file: Optional[Path] = None) -> PipelineConfig:
    """환경 기본값 < --config 파일 < 매니페스트(또는 모델 디렉토리 매니페스트) < 명령행"""
    file_values: Dict[str, Any] = {}
    if args.config:
        file_values.update(config.read_config_file(Path(args.config)))

    for manifest_path in (base_file, args.from_manifest):
        if manifest_path:
            manifest = RunManifest.load(Path(manifest_path))
            file_values.update(manifest.config)
            file_values["SEED"] = manifest.master_seed

    overrides: Dict[str, Any] = {}
    for attr, key in FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    overrides.update(_parse_assignments(getattr(args, "set", None)))
    return config.build_pipeline_config(file_values, overrides)


def new_manifest(args: argparse.Namespace, cfg: PipelineConfig, arguments: Dict[str, Any]) -> RunManifest:
    return RunManifest(
        command=args.command,
        tool_version=config.TOOL_VERSION,
        master_seed=cfg.seed,
        config=cfg.to_flat(),
        arguments=arguments,
    )


def _load_history(path: Path, target_day: Optional[int]) -> Tuple[LoadSeries, Optional[np.ndarray]]:
    series = load_csv(path)
    if target_day is None:
        return series, None
    return split_target_day(series, target_day)


def _finish(bundle: OutputBundle, manifest: RunManifest) -> List[Path]:
    bundle.add_json(MANIFEST, manifest.to_payload())
    return bundle.commit()


# ────────────────────────────────────────────────────────────
# 명령
# ────────────────────────────────────────────────────────────

def cmd_clean(args: argparse.Namespace, cfg: PipelineConfig) -> List[Path]:
    manifest = new_manifest(args, cfg, {"input": str(args.input)})
    bundle = OutputBundle(args.out_dir)
    with log_stage("load", manifest.timings, logger):
        series = load_csv(args.input)
        manifest.record_input(args.input)
    with log_stage("clean", manifest.timings, logger):
        report = clean_matrix(series.to_matrix(), cfg.cleaning)
    logger.info(f"🧹 이상치 {len(report.rows)}건 보정 (μ={report.stats.mean:.3f}, σ={report.stats.stddev:.3f})")
    bundle.add_frame("cleaned.csv", series.with_values(report.matrix.flatten()).to_frame())
    bundle.add_frame("report.csv", report.to_frame())
    return _finish(bundle, manifest)


def cmd_decompose(args: argparse.Namespace, cfg: PipelineConfig) -> List[Path]:
    manifest = new_manifest(args, cfg, {"input": str(args.input)})
    bundle = OutputBundle(args.out_dir)
    with log_stage("load", manifest.timings, logger):
        series = load_csv(args.input)
        manifest.record_input(args.input)
    with log_stage("clean", manifest.timings, logger):
        cleaned = clean_matrix(series.to_matrix(), cfg.cleaning).matrix.flatten()
    with log_stage("decompose", manifest.timings, logger):
        imf_set = decompose(cleaned, cfg.sift)
    if any(imf_set.flagged):
        logger.warning(f"⚠️ 경고가 난 IMF: {[k + 1 for k, c in enumerate(imf_set.flagged) if c]}")
    stamps = series.timestamps().strftime("%Y-%m-%dT%H:%M:%S")
    bundle.add_frame("components.csv", imf_set.to_frame(stamps))
    return _finish(bundle, manifest)


def _models_payload(models: List[ComponentModel], cfg: PipelineConfig) -> Dict[str, Any]:
    return {
        "variant": cfg.variant.value,
        "components": [m.to_metadata() for m in models],
    }


def cmd_train(args: argparse.Namespace, cfg: PipelineConfig) -> List[Path]:
    manifest = new_manifest(args, cfg, {"input": str(args.input), "target_day": args.target_day})
    bundle = OutputBundle(args.out_dir)
    with log_stage("load", manifest.timings, logger):
        history, _ = _load_history(args.input, args.target_day)
        manifest.record_input(args.input)
    with log_stage("fit", manifest.timings, logger):
        models = fit(history, cfg)

    for m in models:
        bundle.add_bytes(f"component_{m.component_id + 1}.bin", params_to_bytes(m.params))
    bundle.add_json(MODELS_META, _models_payload(models, cfg))

    losses = pd.DataFrame({"epoch": np.arange(1, cfg.train.epochs + 1)})
    for m in models:
        losses[f"component_{m.component_id + 1}"] = m.loss_history
    bundle.add_frame("loss_history.csv", losses)

    traces = [
        {"component": m.component_id + 1, **row} for m in models for row in m.swarm_trace
    ]
    if traces:
        bundle.add_frame(
            "pso_trace.csv",
            pd.DataFrame(traces, columns=["component", "iteration", "particle", "fitness", "gbest_fitness"]),
        )
    return _finish(bundle, manifest)


def load_models(models_dir: Path) -> List[ComponentModel]:
    meta_path = Path(models_dir) / MODELS_META
    if not meta_path.exists():
        raise FileNotFoundError(f"모델 메타데이터가 없습니다: {meta_path}")
    with meta_path.open("r", encoding="utf-8") as f:
        meta = json.load(f)
    models = []
    for entry in meta["components"]:
        k = int(entry["component_id"])
        models.append(
            ComponentModel(
                component_id=k,
                label=entry["label"],
                norm=NormalizationParams(entry["x_min"], entry["x_max"]),
                params=load_params(Path(models_dir) / f"component_{k + 1}.bin"),
                loss_history=list(entry.get("loss_history", [])),
                swarm_fitness=entry.get("swarm_fitness"),
            )
        )
    return models


def cmd_predict(args: argparse.Namespace, cfg: PipelineConfig) -> List[Path]:
    manifest = new_manifest(
        args, cfg, {"models": str(args.models), "input": str(args.input), "target_day": args.target_day}
    )
    bundle = OutputBundle(args.out_dir)
    with log_stage("load", manifest.timings, logger):
        models = load_models(args.models)
        history, actual = _load_history(args.input, args.target_day)
        manifest.record_input(args.input)
        for m in models:
            manifest.record_input(Path(args.models) / f"component_{m.component_id + 1}.bin")
    with log_stage("forecast", manifest.timings, logger):
        result = forecast_day(models, history, cfg)
        if actual is not None:
            result = result.with_actual(actual)
    bundle.add_frame("forecast.csv", result.to_frame())
    if actual is not None:
        report = metrics_report(result.aggregate, actual)
        logger.info(f"📊 평균 MAPE {report['mape_mean']:.2f}%")
        bundle.add_text("metrics.txt", format_report(report))
    return _finish(bundle, manifest)


def _read_actual(path: Path, target_day: Optional[int]) -> np.ndarray:
    series = load_csv(path)
    if len(series) == HOURS_PER_DAY and target_day is None:
        return series.values
    if target_day is None:
        raise ShapeMismatchError(
            f"actual file has {len(series)} hours; pass --target-day to select one day"
        )
    return split_target_day(series, target_day)[1]


def cmd_evaluate(args: argparse.Namespace, cfg: PipelineConfig) -> List[Path]:
    manifest = new_manifest(
        args, cfg, {"forecast": str(args.forecast), "actual": str(args.actual), "target_day": args.target_day}
    )
    bundle = OutputBundle(args.out_dir)
    with log_stage("load", manifest.timings, logger):
        if not Path(args.forecast).exists():
            raise FileNotFoundError(f"예측 파일이 없습니다: {args.forecast}")
        forecast_frame = pd.read_csv(args.forecast)
        if "aggregate" not in forecast_frame.columns:
            raise DataError(f"missing column 'aggregate' in {args.forecast}")
        pred = forecast_frame["aggregate"].to_numpy(dtype=np.float64)
        actual = _read_actual(args.actual, args.target_day)
        manifest.record_input(args.forecast)
        manifest.record_input(args.actual)
    with log_stage("evaluate", manifest.timings, logger):
        per_hour, _ = evaluate_mape(pred, actual)
        report = metrics_report(pred, actual)
    logger.info(f"📊 평균 MAPE {report['mape_mean']:.2f}% / 정확도 {report['accuracy']:.4f}%")
    bundle.add_text("metrics.txt", format_report(report))
    bundle.add_frame(
        "evaluation.csv",
        pd.DataFrame({"hour": np.arange(1, pred.size + 1), "forecast": pred, "actual": actual, "mape": per_hour}),
    )
    return _finish(bundle, manifest)


def _add_table(bundle: OutputBundle, name: str, table: ExperimentTable) -> None:
    bundle.add_frame(f"{name}.csv", table.hourly_frame())
    bundle.add_frame(f"{name}_summary.csv", table.summary_frame())


def _experiment_history(args: argparse.Namespace, manifest: RunManifest) -> Tuple[LoadSeries, np.ndarray]:
    series = load_csv(args.input)
    manifest.record_input(args.input)
    return split_target_day(series, args.target_day)


def cmd_compare(args: argparse.Namespace, cfg: PipelineConfig) -> List[Path]:
    variants = [Variant(v) for v in args.variants] if args.variants else list(ALL_VARIANTS)
    manifest = new_manifest(
        args,
        cfg,
        {
            "input": str(args.input),
            "target_day": args.target_day,
            "variants": [v.value for v in variants],
            "baseline": args.baseline,
        },
    )
    bundle = OutputBundle(args.out_dir)
    with log_stage("load", manifest.timings, logger):
        history, actual = _experiment_history(args, manifest)
    with log_stage("compare", manifest.timings, logger):
        table = compare_methods(history, actual, variants, cfg, include_persistence=args.baseline)
    _add_table(bundle, "comparison", table)
    return _finish(bundle, manifest)


def cmd_sweep(args: argparse.Namespace, cfg: PipelineConfig) -> List[Path]:
    manifest = new_manifest(
        args,
        cfg,
        {"input": str(args.input), "target_day": args.target_day, "kind": args.kind, "values": args.values},
    )
    bundle = OutputBundle(args.out_dir)
    with log_stage("load", manifest.timings, logger):
        history, actual = _experiment_history(args, manifest)
    with log_stage(f"sweep-{args.kind}", manifest.timings, logger):
        if args.kind == "window":
            table = sweep_input_pattern(history, actual, args.values, cfg)
        else:
            table = sweep_mix(history, actual, args.values, cfg)
    _add_table(bundle, f"sweep_{args.kind}", table)
    return _finish(bundle, manifest)


COMMANDS = {
    "clean": cmd_clean,
    "decompose": cmd_decompose,
    "train": cmd_train,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}

# ────────────────────────────────────────────────────────────
# 인자 파서
# ────────────────────────────────────────────────────────────

def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"정수 목록이어야 합니다: {text}") from None


def _variant_list(text: str) -> List[str]:
    names = [x.strip() for x in text.split(",") if x.strip()]
    valid = {v.value for v in Variant}
    bad = [n for n in names if n not in valid]
    if bad:
        raise argparse.ArgumentTypeError(f"알 수 없는 변형: {bad} (가능: {sorted(valid)})")
    return names


def build_parser() -> argparse.ArgumentParser:
    common = CliParser(add_help=False)
    common.add_argument("--config", type=Path, help="평문 KEY=VALUE 설정 파일")
    common.add_argument("--from-manifest", type=Path, help="이전 실행의 manifest.json (설정/시드 복원)")
    common.add_argument("--seed", type=int, help="마스터 시드")
    common.add_argument("--out-dir", type=Path, default=Path(config.OUTPUT_DIR), help="산출물 디렉토리")
    common.add_argument(
        "--deterministic", action=argparse.BooleanOptionalAction, default=None,
        help="성분 학습 순차 실행 (--no-deterministic이면 WORKERS 스레드 병렬)",
    )
    common.add_argument("--workers", type=int, help="병렬 학습 스레드 수")
    common.add_argument("--mix-scheme", choices=["separate", "two-part"], help="MIXn 재조합 방식")
    common.add_argument("--pso-loop", choices=["sync", "paper"], help="PSO 루프 순서 (sync: 반복마다 전체 입자, paper: 입자마다 n회)")
    common.add_argument("--variant", choices=[v.value for v in Variant], help="예측 방법")
    common.add_argument("--window-days", type=int, help="N-to-one 입력 일수")
    common.add_argument("--mix-index", type=int, help="MIXn의 n")
    common.add_argument("--epochs", type=int, help="학습 에폭 수")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="임의 설정 키 덮어쓰기 (반복 가능)")

    parser = CliParser(
        prog="pipeline.py",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="EMD-PSO-LSTM 단기 부하 예측 파이프라인",
        epilog=textwrap.dedent(
            """
            사용 예시:
              python pipeline.py clean data/load.csv --out-dir out/clean
              python pipeline.py decompose data/load.csv --out-dir out/emd
              python pipeline.py train data/load.csv --target-day 336 --out-dir out/models
              python pipeline.py predict out/models data/load.csv --target-day 336 --out-dir out/pred
              python pipeline.py evaluate out/pred/forecast.csv data/actual.csv
              python pipeline.py compare data/load.csv --variants lstm,emd_pso_lstm --baseline
              python pipeline.py sweep data/load.csv --kind window --values 1,3,7,14

            종료 코드: 0 성공 / 1 사용법·설정 오류 / 2 데이터 오류 / 3 수치 오류
            """,
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    p = sub.add_parser("clean", parents=[common], help="3σ 이상치 탐지 및 보정")
    p.add_argument("input", type=Path)

    p = sub.add_parser("decompose", parents=[common], help="EMD 분해 (IMF + Res)")
    p.add_argument("input", type=Path)

    p = sub.add_parser("train", parents=[common], help="성분별 모델 학습")
    p.add_argument("input", type=Path)
    p.add_argument("--target-day", type=int, help="이 날(1부터) 이전까지만 학습에 사용")

    p = sub.add_parser("predict", parents=[common], help="학습된 모델로 다음 날 예측")
    p.add_argument("models", type=Path, help="train 산출물 디렉토리")
    p.add_argument("input", type=Path)
    p.add_argument("--target-day", type=int, help="이 날을 예측하고 실제값과 비교")

    p = sub.add_parser("evaluate", parents=[common], help="forecast.csv와 실제값 비교")
    p.add_argument("forecast", type=Path)
    p.add_argument("actual", type=Path)
    p.add_argument("--target-day", type=int, help="실제값 파일에서 사용할 날")

    p = sub.add_parser("compare", parents=[common], help="예측 방법 비교표")
    p.add_argument("input", type=Path)
    p.add_argument("--variants", type=_variant_list, help="콤마 구분 변형 목록 (기본: 6개 전부)")
    p.add_argument("--target-day", type=int, help="평가 대상일 (기본: 마지막 날)")
    p.add_argument("--baseline", action="store_true", help="지난주 같은 요일 기준 예측 행 추가")

    p = sub.add_parser("sweep", parents=[common], help="N-to-one 또는 MIXn 스윕")
    p.add_argument("input", type=Path)
    p.add_argument("--kind", choices=["window", "mix"], required=True)
    p.add_argument("--values", type=_int_list, required=True, help="콤마 구분 정수 목록")
    p.add_argument("--target-day", type=int, help="평가 대상일 (기본: 마지막 날)")
    return parser


# ────────────────────────────────────────────────────────────
# 메인
# ────────────────────────────────────────────────────────────

def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        base_manifest = Path(args.models) / MANIFEST if args.command == "predict" else None
        if base_manifest is not None and not base_manifest.exists():
            base_manifest = None
        cfg = resolve_config(args, base_manifest)
    except UsageError as e:
        logger.error(f"❌ 사용법 오류: {e}")
        return EXIT_USAGE
    except FileNotFoundError as e:
        logger.error(f"❌ {e}")
        return exit_code_for(e)
    except (ValidationError, ValueError) as e:
        logger.error(f"❌ 설정 오류: {e}")
        return EXIT_USAGE

    if config.LOG_SYSTEM_INFO:
        log_system_info(logger)
    logger.info("═" * 60)
    logger.info(f"🚀 {args.command} 시작 — {datetime.now():%Y-%m-%d %H:%M:%S} (seed={cfg.seed})")
    config.print_config_summary(cfg)

    try:
        written = COMMANDS[args.command](args, cfg)
    except Exception as e:
        code = exit_code_for(e)
        if code is None:
            if isinstance(e, (ValidationError, ValueError, UsageError)):
                logger.error(f"❌ {args.command} 실패 — {e}")
                return EXIT_USAGE
            raise
        logger.error(f"❌ {args.command} 실패 — {e}")
        return code

    logger.info(f"🎉 {args.command} 완료 — 산출물 {len(written)}개 → {args.out_dir}")
    logger.info("═" * 60)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
