import os
import time
import logging
from unittest.mock import patch

from normgeom.utils import LogThrottler, get_captured_logs, ordered_map, resolve_threads, setup_logging


def test_resolve_threads():
    assert resolve_threads(3) == 3
    assert resolve_threads(0) == 1
    assert resolve_threads(None) == (os.cpu_count() or 1)


def test_ordered_map_keeps_input_order():
    def slow_square(k):
        # Later items finish first
        time.sleep(0.001 * (5 - k))
        return k * k

    assert ordered_map(slow_square, range(5), threads=4) == [0, 1, 4, 9, 16]
    assert ordered_map(slow_square, range(5), threads=1) == [0, 1, 4, 9, 16]
    assert ordered_map(slow_square, [], threads=4) == []


def test_captured_logs():
    setup_logging(logging.DEBUG)
    logging.getLogger("normgeom.test").warning("sweep stalled at theta=1.25")
    assert "sweep stalled at theta=1.25" in get_captured_logs()
    assert "[WARNING]" in get_captured_logs()


def test_setup_logging_attaches_one_capture_handler():
    setup_logging()
    setup_logging()
    root = logging.getLogger()
    captures = [h for h in root.handlers if type(h).__name__ == "LogCaptureHandler"]
    assert len(captures) == 1


def test_log_throttler():
    with patch("time.monotonic") as mock_time:
        # Start at time 100.0
        mock_time.return_value = 100.0

        # Interval of 1.0 second
        throttler = LogThrottler(1.0)

        # First call should succeed (100.0 - 0.0 > 1.0)
        assert throttler.should_log() is True

        # Immediate subsequent call should fail
        assert throttler.should_log() is False

        # Advance time by 0.5s (100.5) - still shouldn't log
        mock_time.return_value = 100.5
        assert throttler.should_log() is False

        # Advance time to 101.1s (1.1s elapsed since last log) - should log
        mock_time.return_value = 101.1
        assert throttler.should_log() is True


def test_captured_logs_skip_progress_and_timestamps():
    setup_logging(logging.DEBUG)
    logging.getLogger("normgeom.test").info("Orthogonal cones: 12/64")
    logging.getLogger("normgeom.test").error("oracle mismatch on hexagon")
    assert get_captured_logs() == "[ERROR] normgeom.test: oracle mismatch on hexagon"

    # Each setup starts a fresh tail
    setup_logging(logging.DEBUG)
    assert get_captured_logs() == ""
