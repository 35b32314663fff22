"""
Structured logging setup with split logs.

Console output stays human readable; files under LOG_DIR get one JSON object per
line: fqgeom.log (everything), error.log (errors only), verify.log and scan.log
for the verification suites and the batch scans.
"""
import logging
import logging.handlers
import json
from pathlib import Path
from typing import Dict
from datetime import datetime, timezone

from config import Config

_RESERVED_ATTRS = frozenset({
    'name', 'msg', 'args', 'levelname', 'levelno', 'pathname', 'filename',
    'module', 'lineno', 'funcName', 'created', 'msecs', 'relativeCreated',
    'thread', 'threadName', 'processName', 'process', 'getMessage',
    'exc_info', 'exc_text', 'stack_info', 'taskName', 'message', 'asctime',
})


class StructuredJSONFormatter(logging.Formatter):
    """One JSON object per record, extra= fields included"""

    def format(self, record: logging.LogRecord) -> str:
        log_entry = {
            'timestamp': datetime.now(timezone.utc).isoformat().replace('+00:00', 'Z'),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }

        if record.exc_info:
            log_entry['exception'] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in _RESERVED_ATTRS:
                log_entry[key] = value

        return json.dumps(log_entry, default=str)


def _rotating_handler(path: Path, config: Config, level: int,
                      formatter: logging.Formatter) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        path,
        maxBytes=config.LOG_FILE_MAX_MB * 1024 * 1024,
        backupCount=config.LOG_BACKUP_COUNT,
        encoding='utf-8'
    )
    handler.setLevel(level)
    handler.setFormatter(formatter)
    handler._fqgeom = True
    return handler


def setup_logging(config: Config) -> Dict[str, logging.Logger]:
    """Configure console and split file logging, return the named loggers"""
    log_level = getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)
    if config.ENABLE_DEBUG_LOGGING:
        log_level = logging.DEBUG

    # Remove all existing handlers from root logger, closing the ones set up here before
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
        if getattr(handler, "_fqgeom", False):
            handler.close()
    root_logger.setLevel(log_level)

    console_handler = logging.StreamHandler()
    console_handler._fqgeom = True
    console_handler.setLevel(log_level)
    console_handler.setFormatter(logging.Formatter(
        fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
    root_logger.addHandler(console_handler)

    loggers: Dict[str, logging.Logger] = {'root': root_logger}
    if not config.ENABLE_FILE_LOGGING:
        return loggers

    logs_dir = Path(config.LOG_DIR)
    logs_dir.mkdir(parents=True, exist_ok=True)
    file_formatter = StructuredJSONFormatter()

    root_logger.addHandler(_rotating_handler(logs_dir / 'fqgeom.log', config, log_level, file_formatter))
    root_logger.addHandler(_rotating_handler(logs_dir / 'error.log', config, logging.ERROR, file_formatter))

    # Module loggers keep propagating so their records also reach fqgeom.log
    log_configs = [
        ('verify.log', ['verify_suites']),
        ('scan.log', ['batch_runs']),
    ]
    for log_file, modules in log_configs:
        handler = _rotating_handler(logs_dir / log_file, config, log_level, file_formatter)
        for module in modules:
            module_logger = logging.getLogger(module)
            module_logger.setLevel(log_level)
            for old in [h for h in module_logger.handlers if getattr(h, "_fqgeom", False)]:
                module_logger.removeHandler(old)
                old.close()
            module_logger.addHandler(handler)
            loggers[module] = module_logger

    return loggers


def get_logger(name: str) -> logging.Logger:
    """Get a logger with proper configuration"""
    return logging.getLogger(name)
