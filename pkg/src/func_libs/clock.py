"""Module to stamp log files and time checks in the UTC timezone."""

import time
from datetime import datetime

import pytz


class RunClock:
    """Class to get the current UTC date and measure elapsed milliseconds."""

    def __init__(self) -> None:
        """Initialize with the current UTC time and start the stopwatch."""
        UTC = self.timezone = pytz.timezone("UTC")
        self.now = datetime.now(UTC)
        self.today_str = self.now.strftime("%Y-%m-%d")
        self.month_str = self.now.strftime("%B")
        self._start = time.perf_counter()

    def elapsed_millis(self) -> int:
        """Return whole milliseconds since the clock was created."""
        return int((time.perf_counter() - self._start) * 1000)
