"""로깅 설정: GREEDIRIS_LOG 환경변수(.env 포함)로 레벨 지정."""

import logging
import os

from dotenv import load_dotenv

from config import LOG_ENV_VAR, DEFAULT_LOG_LEVEL, LOG_FORMAT

load_dotenv()

ROOT_LOGGER = "greediris"

_configured = False


def get_logger(name: str) -> logging.Logger:
    """`greediris.<name>` 로거 반환."""
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def resolve_level(value: str | None) -> int:
    """레벨 이름(대소문자 무관) 또는 숫자를 logging 레벨로 변환. 알 수 없으면 기본값."""
    if not value:
        value = DEFAULT_LOG_LEVEL
    value = value.strip()
    if value.isdigit():
        return int(value)
    level = logging.getLevelName(value.upper())
    if isinstance(level, int):
        return level
    return logging.getLevelName(DEFAULT_LOG_LEVEL)


def configure_logging(level: str | None = None) -> logging.Logger:
    """패키지 루트 로거에 stderr 핸들러를 한 번만 붙인다."""
    global _configured
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(resolve_level(level or os.getenv(LOG_ENV_VAR)))
    if not _configured:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.propagate = False
        _configured = True
    return logger
