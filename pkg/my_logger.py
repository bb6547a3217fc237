"""Logger configuration for the jetcheck verification engine.

This module sets up a daily check logger and a monthly suite logger to
capture verification events
"""

import logging
import os

from src.func_libs.clock import RunClock

today = RunClock().today_str

# current month
month = RunClock().month_str

# create loggers
check_logger = logging.getLogger("check_logger")
suite_logger = logging.getLogger("suite_logger")


# set levels
check_logger.setLevel(logging.DEBUG)
suite_logger.setLevel(logging.DEBUG)

# Ensure logs directory exists
LOG_DIR = os.environ.get("JETCHECK_LOG_DIR", "logs")
os.makedirs(LOG_DIR, exist_ok=True)

# Create handlers
stream_check_handler = logging.StreamHandler()
file_check_handler = logging.FileHandler(f"{LOG_DIR}/daily_log_{today}.log")
file_suite_handler = logging.FileHandler(f"{LOG_DIR}/monthly_log_{month}.log")

# set levels for handlers
stream_check_handler.setLevel(logging.WARNING)
file_check_handler.setLevel(logging.DEBUG)
file_suite_handler.setLevel(logging.DEBUG)

# Create formatters
my_format = logging.Formatter(
    "%(asctime)s - %(name)s - %(levelname)-8s -[%(pathname)s :: %(module)s \
  :: %(funcName)s : %(lineno)d ] - %(message)s",
    "%Y-%m-%d:%H:%M:%S",
)


# Add formatters to handlers
stream_check_handler.setFormatter(my_format)
file_check_handler.setFormatter(my_format)
file_suite_handler.setFormatter(my_format)

# Add handlers to loggers
check_logger.addHandler(stream_check_handler)
check_logger.addHandler(file_check_handler)
suite_logger.addHandler(file_suite_handler)
suite_logger.addHandler(file_check_handler)


if __name__ == "__main__":
    pass
