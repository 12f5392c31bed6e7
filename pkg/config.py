"""
Configuration management for the spin-direction toolkit
"""

import os
from dotenv import load_dotenv

from constants import (
    DEFAULT_CLOSURE_TOL,
    DEFAULT_EIGEN_TOL,
    DEFAULT_INFO_GAIN_MAX_NODES,
    DEFAULT_INFO_GAIN_NODES,
    DEFAULT_INFO_GAIN_TOL,
    DEFAULT_ISOTROPY_TOL,
    DEFAULT_ORTHOGONALITY_TOL,
    DEFAULT_TRIALS,
    MIN_INFO_GAIN_NODES,
)

# Load environment variables
load_dotenv()


class Config:
    """Toolkit configuration"""

    # Logging Configuration
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "")

    # Tolerances
    ISOTROPY_TOL = float(os.getenv("ISOTROPY_TOL", DEFAULT_ISOTROPY_TOL))
    ORTHOGONALITY_TOL = float(os.getenv("ORTHOGONALITY_TOL", DEFAULT_ORTHOGONALITY_TOL))
    CLOSURE_TOL = float(os.getenv("CLOSURE_TOL", DEFAULT_CLOSURE_TOL))
    EIGEN_TOL = float(os.getenv("EIGEN_TOL", DEFAULT_EIGEN_TOL))

    # Information gain quadrature
    INFO_GAIN_NODES = int(os.getenv("INFO_GAIN_NODES", DEFAULT_INFO_GAIN_NODES))
    INFO_GAIN_TOL = float(os.getenv("INFO_GAIN_TOL", DEFAULT_INFO_GAIN_TOL))
    INFO_GAIN_MAX_NODES = int(os.getenv("INFO_GAIN_MAX_NODES", DEFAULT_INFO_GAIN_MAX_NODES))

    # Simulation
    SIM_WORKERS = int(os.getenv("SIM_WORKERS", 1))
    SIM_DEFAULT_TRIALS = int(os.getenv("SIM_DEFAULT_TRIALS", DEFAULT_TRIALS))

    @classmethod
    def validate(cls):
        """Validate configuration values"""
        problems = []
        for key in ("ISOTROPY_TOL", "ORTHOGONALITY_TOL", "CLOSURE_TOL", "EIGEN_TOL", "INFO_GAIN_TOL"):
            if not getattr(cls, key) > 0:
                problems.append(f"{key} must be positive")

        if cls.INFO_GAIN_NODES < MIN_INFO_GAIN_NODES:
            problems.append(f"INFO_GAIN_NODES must be at least {MIN_INFO_GAIN_NODES}")
        if cls.INFO_GAIN_MAX_NODES < cls.INFO_GAIN_NODES:
            problems.append("INFO_GAIN_MAX_NODES must not be below INFO_GAIN_NODES")
        if cls.SIM_WORKERS < 1:
            problems.append("SIM_WORKERS must be at least 1")
        if cls.SIM_DEFAULT_TRIALS < 1:
            problems.append("SIM_DEFAULT_TRIALS must be at least 1")
        if cls.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            problems.append(f"LOG_LEVEL {cls.LOG_LEVEL!r} is not a logging level")

        if problems:
            raise ValueError(f"Invalid configuration: {'; '.join(problems)}")

        return True


Config.validate()
