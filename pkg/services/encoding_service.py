"""
Encoding-state construction in effective-coefficient form
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from config import Config
from constants import ENCODING_KINDS, ERROR_INVALID_SPIN_COUNT
from exceptions import ConvergenceError, InvalidQuantumNumberError, InvalidStateError
from models import DecoderSeed, EffectiveState, FidelityQuadraticForm, HalfInt
from utils.angular import log_factorial
from utils.validation import validate_spin_count

logger = logging.getLogger(__name__)


class EncodingService:
    """Service for building encoding states and their fidelity quadratic forms"""

    def __init__(self, eigen_tol: Optional[float] = None):
        self.eigen_tol = eigen_tol if eigen_tol is not None else Config.EIGEN_TOL

    @staticmethod
    def _spin_total(N: int) -> HalfInt:
        if not validate_spin_count(N):
            raise InvalidQuantumNumberError(f"{ERROR_INVALID_SPIN_COUNT}: {N!r}")
        return HalfInt(int(N))

    @staticmethod
    def minimal_projection(N: int) -> HalfInt:
        """Smallest |m| available to N spins: 0 for even N, 1/2 for odd N"""
        return HalfInt(int(N) % 2)

    def product_state(self, N: int, m) -> EffectiveState:
        """
        Effective state of a product of N spins with projection m.

        A_j = sqrt((1+2j)/(J+1+j)) * sqrt((J-m)!(J+m)!/((J-j)!(J+j)!)), J = N/2.
        The result is checked for unit norm, never renormalized. Negative m
        is replaced by |m|; the fidelity depends on m only through m**2.
        """
        J = self._spin_total(N)
        m = abs(HalfInt.of(m))
        if m > J:
            raise InvalidQuantumNumberError(f"|m| = {m} exceeds N/2 = {J}")
        if (J - m).twice_value % 2:
            raise InvalidQuantumNumberError(f"m = {m} has the wrong parity for N = {N}")

        j_minus_m, j_plus_m = (J - m).to_int(), (J + m).to_int()
        log_numerator = log_factorial(j_minus_m) + log_factorial(j_plus_m)
        coeffs = []
        for j in m.ladder_to(J):
            outer = (J - j).to_int()
            inner = (J + j).to_int()
            log_coeff = 0.5 * (
                math.log(j.twice_value + 1)
                - math.log(inner + 1)
                + log_numerator
                - log_factorial(outer)
                - log_factorial(inner)
            )
            coeffs.append(math.exp(log_coeff))

        return EffectiveState(J=J, m=m, coeffs=tuple(coeffs))

    def antiparallel_state(self, N: int) -> EffectiveState:
        """Product state with the minimal |m| (maximally antiparallel spins)"""
        self._spin_total(N)
        return self.product_state(N, self.minimal_projection(N))

    def parallel_state(self, N: int) -> EffectiveState:
        """All spins up: a single multiplet j = m = N/2"""
        J = self._spin_total(N)
        return EffectiveState(J=J, m=J, coeffs=(1.0,))

    def decoder_seed(self, J, m) -> DecoderSeed:
        return DecoderSeed.for_numbers(HalfInt.of(J), abs(HalfInt.of(m)))

    def quadratic_form(self, J, m) -> FidelityQuadraticForm:
        """
        Tridiagonal matrix with diag 1/2 + mu_j/2 and offdiag nu_j/2.

        mu_j = m^2/(j(j+1)) (0 for the singlet j = 0) and
        nu_j = (j^2 - m^2)/(j sqrt(4j^2 - 1)) for j = |m|+1, ..., J.
        """
        J = HalfInt.of(J)
        m = abs(HalfInt.of(m))
        if m > J or (J - m).twice_value % 2:
            raise InvalidQuantumNumberError(f"Invalid (J, m) = ({J}, {m})")

        m_sq = float(m) ** 2
        diag, offdiag = [], []
        for index, j_half in enumerate(m.ladder_to(J)):
            j = float(j_half)
            mu = 0.0 if j == 0.0 else m_sq / (j * (j + 1.0))
            diag.append(0.5 + 0.5 * mu)
            if index > 0:
                nu = (j * j - m_sq) / (j * math.sqrt(4.0 * j * j - 1.0))
                offdiag.append(0.5 * nu)

        return FidelityQuadraticForm(J=J, m=m, diag=np.array(diag), offdiag=np.array(offdiag))

    def optimal_state(self, N: int) -> Tuple[EffectiveState, float]:
        """
        Best effective state for N spins and its maximal average fidelity.

        Top eigenpair of the quadratic form at minimal |m|. The eigenvector
        is strictly positive because every off-diagonal entry is.
        """
        J = self._spin_total(N)
        m = self.minimal_projection(N)
        form = self.quadratic_form(J, m)

        if form.size == 1:
            return EffectiveState(J=J, m=m, coeffs=(1.0,)), float(form.diag[0])

        top = form.size - 1
        try:
            values, vectors = eigh_tridiagonal(
                form.diag, form.offdiag, select="i", select_range=(top, top)
            )
        except LinAlgError as e:
            logger.error(f"Tridiagonal eigen-solver failed for N={N}: {e}")
            raise ConvergenceError(f"Eigen-solver did not converge for N={N}: {e}") from e

        maf = float(values[0])
        vector = vectors[:, 0]
        vector = vector * np.sign(vector.sum())
        vector = vector / np.linalg.norm(vector)

        residual = float(np.linalg.norm(form.matrix() @ vector - maf * vector))
        if residual > self.eigen_tol or np.any(vector <= 0.0):
            logger.error(
                f"Top eigenpair rejected for N={N}: residual={residual:.3e}, "
                f"min component={vector.min():.3e}"
            )
            raise ConvergenceError(
                f"Top eigenpair for N={N} not converged (residual {residual:.3e})"
            )

        logger.debug(f"Optimal state N={N}: maf={maf:.15f}, residual={residual:.2e}")
        return EffectiveState(J=J, m=m, coeffs=tuple(vector.tolist())), maf

    def state_for(self, kind: str, N: int, twice_m: Optional[int] = None) -> EffectiveState:
        """Dispatch on the encoding kind used by the command line"""
        if kind == "parallel":
            return self.parallel_state(N)
        if kind == "antiparallel":
            return self.antiparallel_state(N)
        if kind == "optimal":
            return self.optimal_state(N)[0]
        if kind == "product":
            if twice_m is None:
                raise InvalidQuantumNumberError("Product encoding needs twice_m")
            return self.product_state(N, HalfInt(int(twice_m)))
        raise ValueError(f"Unknown encoding {kind!r}; expected one of {', '.join(ENCODING_KINDS)}")

    @staticmethod
    def state_from_dict(data: dict) -> EffectiveState:
        """Rebuild a state from {"N", "twice_m", "coeffs"}"""
        if not isinstance(data, dict):
            raise InvalidStateError("State must be a JSON object")
        return EffectiveState.from_dict(data)
