"""
Input validation utilities for the spin-direction toolkit
"""

import math
import re
import logging
from typing import Optional, Tuple

import numpy as np

from constants import (
    ASYMPTOTIC_ORDERS,
    CONSTRUCT_PREFIX,
    ENCODING_KINDS,
    ERROR_INVALID_SEED,
    ERROR_INVALID_SPIN_COUNT,
    ERROR_INVALID_TOLERANCE,
    ERROR_INVALID_TRIALS,
    ERROR_INVALID_TWICE_M,
    OUTPUT_FORMATS,
    PLATONIC_NAMES,
)
from exceptions import InvalidQuantumNumberError

logger = logging.getLogger(__name__)

# "2..7" or a single "5"
SPIN_RANGE_PATTERN = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$")


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def validate_spin_count(N) -> bool:
    """Validate a spin count (integer >= 1)"""
    return _is_int(N) and N >= 1


def validate_twice_m(N, twice_m) -> bool:
    """Validate 2m for N spins: same parity as N and |m| <= N/2"""
    if not validate_spin_count(N) or not _is_int(twice_m):
        return False
    return abs(twice_m) <= N and (N - twice_m) % 2 == 0


def validate_tolerance(tol) -> bool:
    """Validate a tolerance (finite and > 0)"""
    try:
        value = float(tol)
    except (TypeError, ValueError):
        return False
    return math.isfinite(value) and value > 0.0


def validate_trials(trials) -> bool:
    """Validate a Monte-Carlo trial count"""
    return _is_int(trials) and trials >= 1


def validate_seed(seed) -> bool:
    """Validate a 64-bit unsigned seed"""
    return _is_int(seed) and 0 <= seed < 2**64


def validate_node_count(nodes, minimum: int = 1) -> bool:
    """Validate a quadrature node count"""
    return _is_int(nodes) and nodes >= minimum


def parse_spin_range(text: str) -> Tuple[int, ...]:
    """Parse "a..b" (inclusive) or "a" into a tuple of spin counts"""
    match = SPIN_RANGE_PATTERN.match(text or "")
    if not match:
        raise ValueError(f"Invalid spin range {text!r}; expected 'a..b' or 'a'")
    low = int(match.group(1))
    high = int(match.group(2)) if match.group(2) is not None else low
    if low < 1 or high < low:
        raise ValueError(f"Invalid spin range {text!r}; need 1 <= a <= b")
    return tuple(range(low, high + 1))


def parse_half_int(text: str):
    """Parse "3/2", "1.5" or "2" into a HalfInt"""
    from models import HalfInt

    try:
        return HalfInt.of(str(text))
    except InvalidQuantumNumberError as e:
        raise ValueError(str(e)) from None


def validate_set_source(source: Optional[str]) -> bool:
    """Platonic name, construct:<J> or a non-empty path"""
    if not source or not isinstance(source, str):
        return False
    if source in PLATONIC_NAMES:
        return True
    if source.startswith(CONSTRUCT_PREFIX):
        try:
            value = parse_half_int(source[len(CONSTRUCT_PREFIX):])
        except ValueError:
            return False
        return value.twice_value >= 1
    return True


def validate_run_config(data: dict) -> Tuple[bool, str]:
    """Validate a command-line request before dispatch"""
    if not isinstance(data, dict):
        return False, "Invalid request data format"

    command = data.get("command")
    if not command:
        return False, "No command given"

    for N in data.get("n_values") or ():
        if not validate_spin_count(N):
            return False, f"{ERROR_INVALID_SPIN_COUNT}: {N}"

    encoding = data.get("encoding")
    if encoding is not None and encoding not in ENCODING_KINDS:
        return False, f"Invalid encoding: {encoding}"

    twice_m = data.get("twice_m")
    if encoding == "product":
        if twice_m is None:
            return False, "Product encoding needs --twice-m"
        for N in data.get("n_values") or ():
            if not validate_twice_m(N, twice_m):
                return False, f"{ERROR_INVALID_TWICE_M}: N={N}, twice_m={twice_m}"

    tolerance = data.get("tolerance")
    if tolerance is not None and not validate_tolerance(tolerance):
        return False, f"{ERROR_INVALID_TOLERANCE}: {tolerance}"

    nodes = data.get("nodes")
    if nodes is not None and not validate_node_count(nodes):
        return False, f"Invalid node count: {nodes}"

    trials = data.get("trials")
    if trials is not None and not validate_trials(trials):
        return False, f"{ERROR_INVALID_TRIALS}: {trials}"

    seed = data.get("seed")
    if seed is not None and not validate_seed(seed):
        return False, f"{ERROR_INVALID_SEED}: {seed}"

    workers = data.get("workers", 1)
    if not _is_int(workers) or workers < 1:
        return False, f"Invalid worker count: {workers}"

    order = data.get("order")
    if order is not None and order not in ASYMPTOTIC_ORDERS:
        return False, f"Invalid asymptotic order: {order}"

    output_format = data.get("output_format")
    if output_format is not None and output_format not in OUTPUT_FORMATS:
        return False, f"Invalid output format: {output_format}"

    if "set_source" in data and data["set_source"] is not None:
        if not validate_set_source(data["set_source"]):
            return False, f"Invalid direction set: {data['set_source']}"

    return True, "Valid"
