# utils 패키지
from .logger import get_logger, log_execution_time, log_stage, log_system_info
