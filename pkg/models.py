"""
Data models for the spin-direction toolkit
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from constants import (
    DIRECTION_SET_COLUMNS,
    DUPLICATE_DIRECTION_TOL,
    NORMALIZATION_TOL,
)
from exceptions import InvalidQuantumNumberError, InvalidStateError


@dataclass(frozen=True, eq=False)
class HalfInt:
    """Exact half-integer stored as twice its value"""

    twice_value: int

    def __post_init__(self):
        if isinstance(self.twice_value, bool) or not isinstance(
            self.twice_value, (int, np.integer)
        ):
            raise InvalidQuantumNumberError(
                f"twice_value must be an integer, got {self.twice_value!r}"
            )
        object.__setattr__(self, "twice_value", int(self.twice_value))

    @classmethod
    def of(cls, value: Union["HalfInt", int, Fraction, float, str]) -> "HalfInt":
        """
        Build a HalfInt from an int, Fraction, exact float or string.

        Strings may be written as "3/2", "1.5" or "2".
        """
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise InvalidQuantumNumberError(f"Not a half-integer: {value!r}")
        if isinstance(value, (int, np.integer)):
            return cls(2 * int(value))
        try:
            if isinstance(value, str):
                exact = Fraction(value.strip())
            elif isinstance(value, float):
                if not math.isfinite(value):
                    raise ValueError
                exact = Fraction(value)
            else:
                exact = Fraction(value)
        except (ValueError, TypeError, ZeroDivisionError):
            raise InvalidQuantumNumberError(f"Not a half-integer: {value!r}") from None
        doubled = 2 * exact
        if doubled.denominator != 1:
            raise InvalidQuantumNumberError(f"Not a half-integer: {value!r}")
        return cls(int(doubled))

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def to_int(self) -> int:
        """Integer value; raises for proper half-integers"""
        if not self.is_integer:
            raise InvalidQuantumNumberError(f"{self} is not an integer")
        return self.twice_value // 2

    def ceil(self) -> int:
        return -((-self.twice_value) // 2)

    def ladder_to(self, upper: "HalfInt") -> List["HalfInt"]:
        """Values self, self+1, ..., upper (upper - self must be an integer)"""
        upper = HalfInt.of(upper)
        gap = upper.twice_value - self.twice_value
        if gap % 2:
            raise InvalidQuantumNumberError(f"{upper} - {self} is not an integer")
        return [HalfInt(self.twice_value + 2 * step) for step in range(gap // 2 + 1)]

    def projections(self) -> List["HalfInt"]:
        """Magnetic quantum numbers -j, -j+1, ..., j"""
        return (-self).ladder_to(self)

    def _coerce(self, other) -> Optional["HalfInt"]:
        if isinstance(other, HalfInt):
            return other
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return HalfInt(2 * int(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return HalfInt(self.twice_value + other.twice_value)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return HalfInt(self.twice_value - other.twice_value)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return HalfInt(other.twice_value - self.twice_value)

    def __neg__(self):
        return HalfInt(-self.twice_value)

    def __abs__(self):
        return HalfInt(abs(self.twice_value))

    def __float__(self):
        return self.twice_value / 2.0

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.twice_value == other.twice_value

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.twice_value < other.twice_value

    def __le__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.twice_value <= other.twice_value

    def __gt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.twice_value > other.twice_value

    def __ge__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.twice_value >= other.twice_value

    def __hash__(self):
        return hash(Fraction(self.twice_value, 2))

    def __str__(self):
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"

    def __repr__(self):
        return f"HalfInt({self})"


@dataclass(frozen=True)
class Quadrature:
    """Gauss-Legendre nodes and weights on [-1, 1]"""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        """Apply the rule to samples taken at the nodes"""
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class EffectiveState:
    """
    Effective encoding state sum_j A_j |j, m> for j = |m|, ..., J.

    Coefficients are real, non-negative and unit-norm. Negative m is stored
    as given; every fidelity quantity depends on m only through m**2.
    """

    J: HalfInt
    m: HalfInt
    coeffs: Tuple[float, ...]

    def __post_init__(self):
        J = HalfInt.of(self.J)
        m = HalfInt.of(self.m)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "m", m)
        coeffs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)

        if abs(m) > J:
            raise InvalidStateError(f"|m| = {abs(m)} exceeds J = {J}")
        if (J - m).twice_value % 2:
            raise InvalidStateError(f"J - m must be an integer (J={J}, m={m})")
        expected = (J - abs(m)).twice_value // 2 + 1
        if len(coeffs) != expected:
            raise InvalidStateError(
                f"Expected {expected} coefficients for j = {abs(m)}..{J}, got {len(coeffs)}"
            )
        if any(not math.isfinite(c) for c in coeffs):
            raise InvalidStateError("Coefficients must be finite")
        if any(c < 0.0 for c in coeffs):
            raise InvalidStateError("Coefficients must be non-negative")
        norm = math.fsum(c * c for c in coeffs)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise InvalidStateError(f"State is not normalized: sum A_j^2 = {norm!r}")

    @property
    def N(self) -> int:
        return self.J.twice_value

    @property
    def js(self) -> List[HalfInt]:
        return abs(self.m).ladder_to(self.J)

    @property
    def dimension(self) -> int:
        """Dimension of the direct sum of multiplets carrying the state"""
        return sum(j.twice_value + 1 for j in self.js)

    def to_dict(self) -> dict:
        return {"N": self.N, "twice_m": self.m.twice_value, "coeffs": list(self.coeffs)}

    @classmethod
    def from_dict(cls, data: dict) -> "EffectiveState":
        try:
            return cls(
                J=HalfInt(int(data["N"])),
                m=HalfInt(int(data["twice_m"])),
                coeffs=tuple(data["coeffs"]),
            )
        except (KeyError, TypeError) as e:
            raise InvalidStateError(f"Malformed state object: {e}") from None


@dataclass(frozen=True)
class DecoderSeed:
    """Effective measurement state sum_j sqrt(2j+1) |j, m>"""

    J: HalfInt
    m: HalfInt
    coeffs: Tuple[float, ...]

    @classmethod
    def for_numbers(cls, J: HalfInt, m: HalfInt) -> "DecoderSeed":
        J, m = HalfInt.of(J), HalfInt.of(m)
        if abs(m) > J or (J - m).twice_value % 2:
            raise InvalidQuantumNumberError(f"Invalid (J, m) = ({J}, {m})")
        coeffs = tuple(math.sqrt(j.twice_value + 1) for j in abs(m).ladder_to(J))
        return cls(J=J, m=m, coeffs=coeffs)


@dataclass(frozen=True)
class FidelityQuadraticForm:
    """Symmetric tridiagonal matrix whose quadratic form is the average fidelity"""

    J: HalfInt
    m: HalfInt
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=float)
        offdiag = np.array(self.offdiag, dtype=float)
        if offdiag.shape != (max(len(diag) - 1, 0),):
            raise ValueError("offdiag must have one entry fewer than diag")
        if np.any(offdiag <= 0.0):
            raise ValueError("offdiag entries must be strictly positive")
        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def size(self) -> int:
        return len(self.diag)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def evaluate(self, coeffs: Sequence[float]) -> float:
        """a^T M a, computed from the bands"""
        a = np.asarray(coeffs, dtype=float)
        if a.shape != self.diag.shape:
            raise ValueError(f"Expected {self.size} coefficients, got {a.shape}")
        return float(np.dot(self.diag, a * a) + 2.0 * np.dot(self.offdiag, a[:-1] * a[1:]))


@dataclass(frozen=True)
class FidelityReport:
    """One row of the fidelity / information-gain table"""

    N: int
    f_parallel: float
    f_antiparallel: float
    f_optimal: float
    i_parallel: float
    i_antiparallel: float
    i_optimal: float

    def __post_init__(self):
        slack = 1e-10
        if not (
            0.5 - slack <= self.f_parallel
            and self.f_parallel <= self.f_antiparallel + slack
            and self.f_antiparallel <= self.f_optimal + slack
            and self.f_optimal < 1.0
        ):
            raise ValueError(f"Fidelity ordering violated for N={self.N}")
        if min(self.i_parallel, self.i_antiparallel, self.i_optimal) < -slack:
            raise ValueError(f"Negative information gain for N={self.N}")

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "F_P": self.f_parallel,
            "F_A": self.f_antiparallel,
            "F_O": self.f_optimal,
            "I_P": self.i_parallel,
            "I_A": self.i_antiparallel,
            "I_O": self.i_optimal,
        }


@dataclass(frozen=True)
class WeightedDirectionSet:
    """Unit vectors n_r (polar angles) with positive weights c_r"""

    thetas: np.ndarray
    phis: np.ndarray
    weights: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        thetas = np.atleast_1d(np.array(self.thetas, dtype=float))
        phis = np.atleast_1d(np.array(self.phis, dtype=float))
        weights = np.atleast_1d(np.array(self.weights, dtype=float))
        if not (thetas.ndim == phis.ndim == weights.ndim == 1):
            raise ValueError("Angles and weights must be one-dimensional")
        if not (len(thetas) == len(phis) == len(weights)) or len(thetas) == 0:
            raise ValueError("Angles and weights must be non-empty and of equal length")
        if not np.all(np.isfinite(thetas) & np.isfinite(phis) & np.isfinite(weights)):
            raise ValueError("Angles and weights must be finite")
        if np.any(weights <= 0.0):
            raise ValueError("All weights must be strictly positive")
        if np.any(thetas < -1e-12) or np.any(thetas > math.pi + 1e-12):
            raise ValueError("theta must lie in [0, pi]")
        thetas = np.clip(thetas, 0.0, math.pi)
        phis = np.mod(phis, 2.0 * math.pi)

        vectors = _unit_vectors(thetas, phis)
        gaps = np.linalg.norm(vectors[:, None, :] - vectors[None, :, :], axis=-1)
        np.fill_diagonal(gaps, np.inf)
        if np.any(gaps <= DUPLICATE_DIRECTION_TOL):
            raise ValueError("Direction set contains coincident directions")

        for arr in (thetas, phis, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_vectors(
        cls, vectors: np.ndarray, weights: Sequence[float], name: str = "custom"
    ) -> "WeightedDirectionSet":
        v = np.asarray(vectors, dtype=float)
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        thetas = np.arccos(np.clip(v[:, 2], -1.0, 1.0))
        phis = np.arctan2(v[:, 1], v[:, 0])
        # phi is meaningless on the axis
        phis = np.where(np.hypot(v[:, 0], v[:, 1]) < 1e-15, 0.0, phis)
        return cls(thetas=thetas, phis=phis, weights=weights, name=name)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def total_weight(self) -> float:
        return math.fsum(self.weights)

    @property
    def entries(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.thetas.tolist(), self.phis.tolist(), self.weights.tolist()))

    def vectors(self) -> np.ndarray:
        return _unit_vectors(self.thetas, self.phis)

    def rotated(self, rotation: np.ndarray) -> "WeightedDirectionSet":
        """Rigidly rotate every direction by a 3x3 rotation matrix"""
        rotation = np.asarray(rotation, dtype=float)
        return WeightedDirectionSet.from_vectors(
            self.vectors() @ rotation.T, self.weights, name=f"{self.name}-rotated"
        )

    def with_weight(self, index: int, weight: float) -> "WeightedDirectionSet":
        weights = self.weights.copy()
        weights[index] = weight
        return WeightedDirectionSet(self.thetas, self.phis, weights, name=self.name)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                DIRECTION_SET_COLUMNS[0]: self.thetas,
                DIRECTION_SET_COLUMNS[1]: self.phis,
                DIRECTION_SET_COLUMNS[2]: self.weights,
            }
        )


def _unit_vectors(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    sin_t = np.sin(thetas)
    return np.stack([sin_t * np.cos(phis), sin_t * np.sin(phis), np.cos(thetas)], axis=-1)


@dataclass(frozen=True)
class MultipoleReport:
    """Multipole moments z_L^M of a direction set and the isotropy verdict"""

    J: HalfInt
    moments: Dict[Tuple[int, int], complex]
    max_abs: float
    tolerance: float
    worst: Optional[Tuple[int, int]]

    @property
    def passed(self) -> bool:
        return self.max_abs <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "J2": self.J.twice_value,
            "max_abs": self.max_abs,
            "pass": self.passed,
            "worst": list(self.worst) if self.worst is not None else None,
        }


@dataclass(frozen=True)
class OrthogonalityReport:
    """Worst deviation from the finite Wigner-D orthogonality relation"""

    J: HalfInt
    max_deviation: float
    tolerance: float
    worst: Optional[Tuple[int, int, int, int, int]]  # twice (j, j', m, m', k)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "J2": self.J.twice_value,
            "max_deviation": self.max_deviation,
            "pass": self.passed,
            "worst_twice": list(self.worst) if self.worst is not None else None,
        }


@dataclass(frozen=True)
class SourceMomentReport:
    """Finite-prior source operator against its continuous counterpart"""

    finite: np.ndarray
    continuous: np.ndarray
    deviation: float

    def to_dict(self) -> dict:
        return {"dimension": int(self.finite.shape[0]), "deviation": self.deviation}


@dataclass(frozen=True)
class SimulationReport:
    """Monte-Carlo estimate of the protocol fidelity"""

    trials: int
    mean_fidelity: float
    std_error: float
    seed: int
    algorithm: str
    state: dict
    set_name: str
    set_size: int

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean_fidelity": self.mean_fidelity,
            "std_error": self.std_error,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "state": self.state,
            "set": {"name": self.set_name, "size": self.set_size},
        }

    def summary(self) -> str:
        return f"{self.mean_fidelity:.6f} ± {self.std_error:.6f} ({self.trials} trials, seed {self.seed})"


@dataclass(frozen=True)
class FrequencyReport:
    """Empirical outcome frequencies for a fixed source"""

    frequencies: np.ndarray
    probabilities: np.ndarray
    trials: int
    seed: int
    chi_square: float
    p_value: float

    def to_dict(self) -> dict:
        return {
            "frequencies": self.frequencies.tolist(),
            "probabilities": self.probabilities.tolist(),
            "trials": self.trials,
            "seed": self.seed,
            "chi_square": self.chi_square,
            "p_value": self.p_value,
        }


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line request"""

    command: str
    action: Optional[str] = None
    n_values: Tuple[int, ...] = ()
    encoding: str = "antiparallel"
    twice_m: Optional[int] = None
    set_source: Optional[str] = None
    j: Optional[HalfInt] = None
    tolerance: Optional[float] = None
    nodes: Optional[int] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    order: str = "next"
    output_format: str = "text"
    output: Optional[str] = None
    workers: int = 1
