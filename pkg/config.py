"""
부하 예측 프로젝트 설정 관리
환경변수 + 평문 KEY=VALUE 설정 파일 기반 중앙화된 설정 시스템
"""
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values, load_dotenv

# .env 파일 로드
load_dotenv()


# 평문 설정 키 → (PipelineConfig 하위 섹션, 필드명). 섹션이 None이면 최상위 필드
PIPELINE_KEYS: Dict[str, Tuple[Optional[str], str]] = {
    # 불량 데이터 정제
    "CLEAN_EPSILON": ("cleaning", "epsilon"),
    "CLEAN_ALPHA": ("cleaning", "alpha"),
    "CLEAN_BETA": ("cleaning", "beta"),
    "CLEAN_GAMMA": ("cleaning", "gamma"),
    # EMD
    "SIFT_SD_THRESHOLD": ("sift", "sd_threshold"),
    "SIFT_MAX_ITERS": ("sift", "max_sift_iters"),
    "SIFT_MAX_IMFS": ("sift", "max_imfs"),
    "SIFT_BOUNDARY": ("sift", "boundary_policy"),
    # 신경망 학습
    "HIDDEN_DIM": ("train", "hidden_dim"),
    "NUM_LAYERS": ("train", "num_layers"),
    "LEARNING_RATE": ("train", "learning_rate"),
    "BATCH_SIZE": ("train", "batch_size"),
    "EPOCHS": ("train", "epochs"),
    "UNROLL": ("train", "unroll"),
    "CLIP_NORM": ("train", "clip_norm"),
    "ADAM_BETA1": ("train", "beta1"),
    "ADAM_BETA2": ("train", "beta2"),
    "ADAM_EPSILON": ("train", "adam_epsilon"),
    # PSO
    "PSO_PARTICLES": ("swarm", "m"),
    "PSO_ITERATIONS": ("swarm", "n"),
    "PSO_INERTIA": ("swarm", "w"),
    "PSO_C1": ("swarm", "c1"),
    "PSO_C2": ("swarm", "c2"),
    "PSO_VMAX": ("swarm", "v_max"),
    "PSO_LOWER": ("swarm", "lower"),
    "PSO_UPPER": ("swarm", "upper"),
    "PSO_FITNESS_EPOCHS": ("swarm", "fitness_epochs"),
    "PSO_LOOP": ("swarm", "loop"),
    "PSO_VALIDATION_FRACTION": ("swarm", "validation_fraction"),
    # 파이프라인
    "VARIANT": (None, "variant"),
    "MIX_INDEX": (None, "mix_index"),
    "MIX_SCHEME": (None, "mix_scheme"),
    "WINDOW_DAYS": (None, "window_days"),
    "SEED": (None, "seed"),
    "DETERMINISTIC": (None, "deterministic"),
    "WORKERS": (None, "workers"),
}


class Config:
    """중앙화된 설정 관리 클래스"""

    # ================================
    # 🏗️ 실행 환경 설정
    # ================================
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")
    TOOL_VERSION: str = "1.0.0"
    OUTPUT_DIR: str = os.getenv("OUTPUT_DIR", "outputs")

    # ================================
    # 📊 로깅 설정
    # ================================
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_TO_FILE: bool = os.getenv("LOG_TO_FILE", "false").lower() == "true"
    LOG_DIR: str = os.getenv("LOG_DIR", "logs")
    LOG_SYSTEM_INFO: bool = os.getenv("LOG_SYSTEM_INFO", "false").lower() == "true"

    # ================================
    # 🧹 불량 데이터 정제 (3σ + 이웃 가중 보정)
    # ================================
    CLEAN_EPSILON: float = float(os.getenv("CLEAN_EPSILON", "1.0"))
    CLEAN_ALPHA: float = float(os.getenv("CLEAN_ALPHA", "0.4"))
    CLEAN_BETA: float = float(os.getenv("CLEAN_BETA", "0.4"))
    CLEAN_GAMMA: float = float(os.getenv("CLEAN_GAMMA", "0.2"))

    # ================================
    # 🌊 EMD 설정
    # ================================
    SIFT_SD_THRESHOLD: float = float(os.getenv("SIFT_SD_THRESHOLD", "0.2"))
    SIFT_MAX_ITERS: int = int(os.getenv("SIFT_MAX_ITERS", "10"))
    SIFT_MAX_IMFS: int = int(os.getenv("SIFT_MAX_IMFS", "16"))
    SIFT_BOUNDARY: str = os.getenv("SIFT_BOUNDARY", "mirror")

    # ================================
    # 🧠 신경망 학습 설정
    # ================================
    HIDDEN_DIM: int = int(os.getenv("HIDDEN_DIM", "10"))
    NUM_LAYERS: int = int(os.getenv("NUM_LAYERS", "1"))
    LEARNING_RATE: float = float(os.getenv("LEARNING_RATE", "0.005"))
    BATCH_SIZE: int = int(os.getenv("BATCH_SIZE", "64"))
    EPOCHS: int = int(os.getenv("EPOCHS", "200"))
    UNROLL: str = os.getenv("UNROLL", "day")
    CLIP_NORM: str = os.getenv("CLIP_NORM", "")  # 비어 있으면 클리핑 없음
    ADAM_BETA1: float = float(os.getenv("ADAM_BETA1", "0.9"))
    ADAM_BETA2: float = float(os.getenv("ADAM_BETA2", "0.999"))
    ADAM_EPSILON: float = float(os.getenv("ADAM_EPSILON", "1e-8"))

    # ================================
    # 🐝 PSO 설정
    # ================================
    PSO_PARTICLES: int = int(os.getenv("PSO_PARTICLES", "20"))
    PSO_ITERATIONS: int = int(os.getenv("PSO_ITERATIONS", "30"))
    PSO_INERTIA: float = float(os.getenv("PSO_INERTIA", "0.729"))
    PSO_C1: float = float(os.getenv("PSO_C1", "1.49445"))
    PSO_C2: float = float(os.getenv("PSO_C2", "1.49445"))
    PSO_VMAX: float = float(os.getenv("PSO_VMAX", "0.5"))
    PSO_LOWER: float = float(os.getenv("PSO_LOWER", "-1.0"))
    PSO_UPPER: float = float(os.getenv("PSO_UPPER", "1.0"))
    PSO_FITNESS_EPOCHS: int = int(os.getenv("PSO_FITNESS_EPOCHS", "5"))
    PSO_LOOP: str = os.getenv("PSO_LOOP", "sync")  # sync | paper
    PSO_VALIDATION_FRACTION: float = float(os.getenv("PSO_VALIDATION_FRACTION", "0.1"))

    # ================================
    # 🚀 파이프라인 설정
    # ================================
    VARIANT: str = os.getenv("VARIANT", "emd_pso_lstm")
    MIX_INDEX: int = int(os.getenv("MIX_INDEX", "3"))
    MIX_SCHEME: str = os.getenv("MIX_SCHEME", "separate")
    WINDOW_DAYS: int = int(os.getenv("WINDOW_DAYS", "7"))
    SEED: int = int(os.getenv("SEED", "42"))
    DETERMINISTIC: bool = os.getenv("DETERMINISTIC", "true").lower() == "true"
    WORKERS: int = int(os.getenv("WORKERS", "1"))

    @classmethod
    def pipeline_defaults(cls) -> Dict[str, Any]:
        """환경변수 기반 파이프라인 기본값 (평문 키 → 값)"""
        return {key: getattr(cls, key) for key in PIPELINE_KEYS}

    @classmethod
    def read_config_file(cls, path: Path) -> Dict[str, Optional[str]]:
        """평문 KEY=VALUE 설정 파일 파싱"""
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"설정 파일이 없습니다: {path}")
        return dict(dotenv_values(path))

    @classmethod
    def build_pipeline_config(
        cls,
        file_values: Optional[Mapping[str, Any]] = None,
        overrides: Optional[Mapping[str, Any]] = None,
    ):
        """기본값 < 설정 파일 < 명령행 순으로 병합해 검증된 PipelineConfig 생성"""
        from forecasting.schemas import PipelineConfig

        values = cls.pipeline_defaults()
        for source in (file_values or {}, overrides or {}):
            for raw_key, raw_value in source.items():
                key = raw_key.strip().upper()
                if key not in PIPELINE_KEYS:
                    if hasattr(cls, key):
                        continue  # 로깅 등 환경 키는 파이프라인 설정과 무관
                    raise ValueError(f"알 수 없는 설정 키: {raw_key}")
                values[key] = raw_value

        nested: Dict[str, Any] = {"cleaning": {}, "sift": {}, "train": {}, "swarm": {}}
        for key, value in values.items():
            section, field = PIPELINE_KEYS[key]
            if isinstance(value, str) and value.strip().lower() in {"", "none", "null"}:
                value = None
            if value is None and key != "CLIP_NORM":
                continue  # 빈 값은 모델 기본값 사용
            target = nested[section] if section else nested
            target[field] = value
        return PipelineConfig.model_validate(nested)

    @classmethod
    def create_directories(cls, *extra: Path):
        directories = [cls.OUTPUT_DIR, *extra]
        if cls.LOG_TO_FILE:
            directories.append(cls.LOG_DIR)
        for d in directories:
            Path(d).mkdir(parents=True, exist_ok=True)

    @classmethod
    def print_config_summary(cls, pipeline_config=None):
        """설정 요약 정보 출력"""
        from utils import get_logger

        logger = get_logger("config")
        logger.info("=" * 50)
        logger.info("📋 부하 예측 설정 정보")
        logger.info("=" * 50)
        logger.info(f"🏗️  환경: {cls.ENVIRONMENT}")
        logger.info(f"📊 로그 레벨: {cls.LOG_LEVEL}")
        if pipeline_config is not None:
            for key, value in pipeline_config.to_flat().items():
                logger.info(f"   {key}={value}")
        logger.info("=" * 50)


# 설정 인스턴스 (싱글톤 패턴)
config = Config()
