"""
Timing utilities for the heavier numerical operations
"""

import time
import logging
import functools
from typing import Dict, Any, Optional
from collections import defaultdict

logger = logging.getLogger(__name__)

# Timing metrics storage
_performance_metrics = defaultdict(list)


def monitor_performance(operation_name: Optional[str] = None):
    """
    Decorator to time a function and collect metrics

    Args:
        operation_name: Name of the operation for logging purposes
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            op_name = operation_name or f"{func.__module__}.{func.__name__}"
            start_time = time.perf_counter()

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                execution_time = time.perf_counter() - start_time
                _performance_metrics[op_name].append(
                    {"execution_time": execution_time, "success": False, "error": str(e)}
                )
                logger.debug(f"PERF ERROR: {op_name} - {execution_time:.3f}s, Error: {e}")
                raise

            execution_time = time.perf_counter() - start_time
            _performance_metrics[op_name].append(
                {"execution_time": execution_time, "success": True}
            )
            logger.debug(f"PERF: {op_name} - {execution_time:.3f}s")
            return result

        return wrapper

    return decorator


def get_performance_summary() -> Dict[str, Any]:
    """Get timing summary per operation"""
    summary = {}

    for op_name, metrics in _performance_metrics.items():
        if not metrics:
            continue

        successful = [m for m in metrics if m["success"]]
        times = [m["execution_time"] for m in successful]

        summary[op_name] = {
            "total_calls": len(metrics),
            "successful_calls": len(successful),
            "failed_calls": len(metrics) - len(successful),
            "avg_execution_time": sum(times) / len(times) if times else 0.0,
            "max_execution_time": max(times) if times else 0.0,
            "min_execution_time": min(times) if times else 0.0,
        }

    return summary


def clear_performance_metrics():
    """Clear all timing metrics"""
    _performance_metrics.clear()
    logger.debug("Performance metrics cleared")
