"""
Tests for timing utilities
"""

import logging

import pytest

from utils.performance import (
    clear_performance_metrics,
    get_performance_summary,
    monitor_performance,
)


class TestPerformance:
    """Test cases for the monitor_performance decorator"""

    def setup_method(self):
        """Start every test with empty metrics"""
        clear_performance_metrics()

    def test_records_successful_calls(self, caplog):
        """Test timing of successful calls"""

        @monitor_performance("unit.square")
        def square(x):
            return x * x

        with caplog.at_level(logging.DEBUG, logger="utils.performance"):
            assert square(3) == 9
            assert square(4) == 16

        summary = get_performance_summary()["unit.square"]
        assert summary["total_calls"] == 2
        assert summary["successful_calls"] == 2
        assert summary["failed_calls"] == 0
        assert summary["min_execution_time"] <= summary["max_execution_time"]
        assert any("PERF: unit.square" in message for message in caplog.messages)

    def test_records_failures_and_reraises(self):
        """Test failing calls are counted and the error propagates"""

        @monitor_performance()
        def broken():
            raise ArithmeticError("diverged")

        with pytest.raises(ArithmeticError):
            broken()

        (name, summary), = get_performance_summary().items()
        assert name.endswith("broken")
        assert summary["failed_calls"] == 1
        assert summary["avg_execution_time"] == 0.0

    def test_clear(self):
        """Test clearing the metrics"""

        @monitor_performance("unit.noop")
        def noop():
            return None

        noop()
        clear_performance_metrics()
        assert get_performance_summary() == {}
