"""
Utility functions for the engine.
Logging setup and console summaries.
"""

import logging
import sys
from typing import Any, Dict, Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'


def setup_logging(log_level: str = 'INFO', log_file: Optional[str] = None) -> logging.Logger:
    """
    Set up logging for the `src` package.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_file: Optional log file path

    Returns:
        Configured package logger
    """
    level = getattr(logging, log_level.upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"unknown log level {log_level!r}")

    logger = logging.getLogger('src')
    logger.setLevel(level)
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        try:
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError as e:
            logger.warning(f"Could not create log file {log_file}: {e}")

    logger.debug(f"Logging configured at {log_level}")
    return logger


def print_summary(summary: Dict[str, Any]) -> None:
    """
    Print a formatted summary of an experiment run.

    Args:
        summary: Summary dictionary from ExperimentRunner.summarize
    """
    print("\n" + "=" * 60)
    print("EXPERIMENT SUMMARY")
    print("=" * 60)

    print(f"Total execution time: {summary['total_time']:.2f} seconds")
    print(f"Cells run: {summary['total_cells']}")
    print(f"Successful: {summary['successful_cells']}")
    print(f"Failed: {summary['failed_cells']}")
    print(f"Estimator evaluations: {summary['total_evaluations']}")

    best = summary.get('best')
    if best is not None:
        print(f"\nBest cell: {best.method} k={best.k} eta={best.eta} -> "
              f"{best.spread_pct:.3f}% (+/- {best.spread_stderr:.3f})")

    for failure in summary.get('failures', []):
        print(f"  failed: {failure['method']} k={failure['k']} eta={failure['eta']}: {failure['error']}")

    print("=" * 60)
