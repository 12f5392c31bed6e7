"""
Finite isotropic measurements: construction, verification and use.

A weighted direction set {n_r, c_r} is isotropic up to spin J when its
multipole moments z_L^M vanish for L = 1..2J, equivalently when the Wigner-D
functions up to spin J stay orthogonal under the weighted sum. Moments are
reported as raw weighted sums; orthogonality sums are divided by the total
weight C.
"""

import logging
import math
import os
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, norm, solve

from config import Config
from constants import (
    CONSTRUCT_PREFIX,
    DIRECTION_SET_COLUMNS,
    ERROR_UNKNOWN_SET,
    FLOAT_FORMAT,
    LINEAR_RESIDUAL_TOL,
    PLATONIC_NAMES,
)
from exceptions import (
    ClosureViolationError,
    DirectionSetFormatError,
    InvalidQuantumNumberError,
    NonPositiveWeightError,
    SingularSystemError,
    UnknownDirectionSetError,
)
from models import (
    DecoderSeed,
    EffectiveState,
    HalfInt,
    MultipoleReport,
    OrthogonalityReport,
    SourceMomentReport,
    WeightedDirectionSet,
)
from utils.angular import (
    gauss_legendre,
    half_integers_up_to,
    legendre_p,
    spherical_harmonic,
    three_j,
    wigner_d_column,
    wigner_d_matrix,
)
from utils.performance import monitor_performance

logger = logging.getLogger(__name__)

TETRAHEDRON_POLAR = math.acos(-1.0 / 3.0)


def multiplet_vectors(
    state: EffectiveState, amplitudes: Sequence[float], thetas, phis
) -> np.ndarray:
    """
    Components of sum_j a_j U(n)|j, m> in the direct-sum basis |j, m'>.

    Shape (directions, dimension); multiplets are stacked j = |m|..J, and
    inside each multiplet m' runs -j..j.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    blocks = [
        amplitude * wigner_d_column(j, state.m, thetas, phis)
        for j, amplitude in zip(state.js, amplitudes)
    ]
    return np.concatenate(blocks, axis=-1)


def decoder_amplitudes(state: EffectiveState) -> np.ndarray:
    return np.array(DecoderSeed.for_numbers(state.J, state.m).coeffs)


def angles_of(vector: Sequence[float]) -> Tuple[float, float]:
    """Polar and azimuthal angle of a (not necessarily normalized) 3-vector"""
    v = np.asarray(vector, dtype=float)
    length = float(np.linalg.norm(v))
    if v.shape != (3,) or not math.isfinite(length) or length == 0.0:
        raise ValueError(f"Expected a non-zero 3-vector, got {vector!r}")
    v = v / length
    theta = math.acos(min(1.0, max(-1.0, v[2])))
    phi = math.atan2(v[1], v[0]) % (2.0 * math.pi)
    return theta, phi


def sphere_rule(J: HalfInt) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Product rule on the sphere, exact for harmonics of degree <= 2J + 1.

    Gauss-Legendre in cos(theta) with 2J + 2 nodes and a uniform azimuth grid
    of 4J + 3 points. Returns thetas, phis and weights summing to one.
    """
    n_theta = J.twice_value + 2
    n_phi = 2 * J.twice_value + 3
    rule = gauss_legendre(n_theta)
    thetas = np.arccos(rule.nodes)
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    theta_grid, phi_grid = np.meshgrid(thetas, phis, indexing="ij")
    weights = np.outer(rule.weights / 2.0, np.full(n_phi, 1.0 / n_phi))
    return theta_grid.ravel(), phi_grid.ravel(), weights.ravel()


class PovmService:
    """Service for finite isotropic direction sets and the measurements they define"""

    def __init__(
        self,
        isotropy_tol: Optional[float] = None,
        orthogonality_tol: Optional[float] = None,
        closure_tol: Optional[float] = None,
    ):
        self.isotropy_tol = isotropy_tol or Config.ISOTROPY_TOL
        self.orthogonality_tol = orthogonality_tol or Config.ORTHOGONALITY_TOL
        self.closure_tol = closure_tol or Config.CLOSURE_TOL

    # ------------------------------------------------------------------
    # Multipoles and isotropy
    # ------------------------------------------------------------------

    @staticmethod
    def multipole(direction_set: WeightedDirectionSet, L: int, M: int) -> complex:
        """z_L^M = sqrt(4pi/(2L+1)) sum_r c_r Y_L^{-M}(n_r), any -L <= M <= L"""
        values = spherical_harmonic(L, -M, direction_set.thetas, direction_set.phis)
        return complex(math.sqrt(4.0 * math.pi / (2 * L + 1)) * np.dot(direction_set.weights, values))

    def multipole_moments(
        self, direction_set: WeightedDirectionSet, L_max: int, tol: Optional[float] = None
    ) -> MultipoleReport:
        """Moments for L = 1..L_max, M = 0..L, with the worst offender"""
        if L_max < 1:
            raise ValueError(f"L_max must be at least 1, got {L_max}")
        tol = tol or self.isotropy_tol

        moments: Dict[Tuple[int, int], complex] = {}
        worst, max_abs = None, 0.0
        for L in range(1, L_max + 1):
            for M in range(0, L + 1):
                value = self.multipole(direction_set, L, M)
                moments[(L, M)] = value
                if worst is None or abs(value) > max_abs:
                    worst, max_abs = (L, M), abs(value)

        return MultipoleReport(
            J=HalfInt(L_max), moments=moments, max_abs=max_abs, tolerance=tol, worst=worst
        )

    def verify_isotropy(
        self, direction_set: WeightedDirectionSet, J, tol: Optional[float] = None
    ) -> MultipoleReport:
        """Pass iff every multipole of order 1..2J vanishes within tol"""
        J = HalfInt.of(J)
        if J.twice_value < 1:
            raise InvalidQuantumNumberError(f"Isotropy needs J >= 1/2, got {J}")
        report = self.multipole_moments(direction_set, J.twice_value, tol)
        logger.debug(
            f"Isotropy of {direction_set.name} at J={J}: max |z|={report.max_abs:.3e} "
            f"at {report.worst}, pass={report.passed}"
        )
        return report

    @staticmethod
    def _rotation_matrices(direction_set: WeightedDirectionSet, j: HalfInt) -> np.ndarray:
        """D^j_{mk}(phi_r, theta_r, 0), shape (directions, 2j+1, 2j+1)"""
        small_d = wigner_d_matrix(j, direction_set.thetas)
        m_values = np.array([float(m) for m in j.projections()])
        phase = np.exp(-1j * np.outer(direction_set.phis, m_values))
        return phase[:, :, None] * small_d

    def verify_wigner_orthogonality(
        self, direction_set: WeightedDirectionSet, J, tol: Optional[float] = None
    ) -> OrthogonalityReport:
        """
        Check sum_r (c_r/C) D^j_{mk}(n_r) conj(D^{j'}_{m'k}(n_r)) = delta_jj' delta_mm' / (2j+1)

        for all j, j' <= J and every common k.
        """
        J = HalfInt.of(J)
        tol = tol or self.orthogonality_tol
        weights = direction_set.weights / direction_set.total_weight
        spins = half_integers_up_to(J)
        matrices = {j: self._rotation_matrices(direction_set, j) for j in spins}

        max_dev, worst = 0.0, None
        for a, j in enumerate(spins):
            for jp in spins[a:]:
                if (jp - j).twice_value % 2:
                    continue
                Dj, Djp = matrices[j], matrices[jp]
                for k in min(j, jp).projections():
                    col = (k + j).twice_value // 2
                    colp = (k + jp).twice_value // 2
                    gram = np.einsum("r,ra,rb->ab", weights, Dj[:, :, col], Djp[:, :, colp].conj())
                    expected = np.zeros(gram.shape)
                    if j == jp:
                        expected = np.eye(gram.shape[0]) / (j.twice_value + 1)
                    deviation = np.abs(gram - expected)
                    index = np.unravel_index(np.argmax(deviation), deviation.shape)
                    if deviation[index] > max_dev or worst is None:
                        max_dev = float(deviation[index])
                        m = j.projections()[index[0]]
                        mp = jp.projections()[index[1]]
                        worst = (
                            j.twice_value,
                            jp.twice_value,
                            m.twice_value,
                            mp.twice_value,
                            k.twice_value,
                        )

        logger.debug(
            f"Wigner orthogonality of {direction_set.name} at J={J}: max deviation {max_dev:.3e}"
        )
        return OrthogonalityReport(J=J, max_deviation=max_dev, tolerance=tol, worst=worst)

    def verify_multipole_expansion(self, direction_set: WeightedDirectionSet, J) -> float:
        """
        Largest gap between the weighted D-products and their 3-j expansion

            (-1)^{m'-k} sum_l (2l+1) (j j' l; m -m' m'-m)(j j' l; k -k 0) z_l^{m-m'} / C

        over j, j' <= J. This is an identity; it holds for any weighted set.
        """
        J = HalfInt.of(J)
        weights = direction_set.weights / direction_set.total_weight
        total = direction_set.total_weight
        spins = half_integers_up_to(J)
        matrices = {j: self._rotation_matrices(direction_set, j) for j in spins}
        z_cache: Dict[Tuple[int, int], complex] = {}

        def z(L: int, M: int) -> complex:
            if (L, M) not in z_cache:
                z_cache[(L, M)] = self.multipole(direction_set, L, M) / total
            return z_cache[(L, M)]

        worst = 0.0
        for a, j in enumerate(spins):
            for jp in spins[a:]:
                if (jp - j).twice_value % 2:
                    continue
                l_values = range((jp - j).twice_value // 2, (j + jp).twice_value // 2 + 1)
                for k in min(j, jp).projections():
                    col = (k + j).twice_value // 2
                    colp = (k + jp).twice_value // 2
                    for ia, m in enumerate(j.projections()):
                        for ib, mp in enumerate(jp.projections()):
                            direct = np.dot(
                                weights, matrices[j][:, ia, col] * matrices[jp][:, ib, colp].conj()
                            )
                            M = (m - mp).to_int()
                            expansion = 0.0j
                            for L in l_values:
                                if abs(M) > L:
                                    continue
                                coupling = three_j(j, jp, L, m, -mp, mp - m) * three_j(
                                    j, jp, L, k, -k, 0
                                )
                                if coupling:
                                    expansion += (2 * L + 1) * coupling * z(L, M)
                            if (mp - k).to_int() % 2:
                                expansion = -expansion
                            worst = max(worst, abs(direct - expansion))
        return float(worst)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @monitor_performance("povm.construct_isotropic_set")
    def construct_isotropic_set(self, J) -> WeightedDirectionSet:
        """
        Weighted grid isotropic up to spin J (rounded up to an integer J').

        Polar angles theta_k = k pi/(2J'+1), k = 0..2J'+1, and 2J'+1 equally
        spaced azimuths per ring. Pole weights are 1 (merged into one entry of
        weight 2J'+1 each); ring weights solve sum_k c_k P_L(cos theta_k) = 0
        for L = 1..2J'.
        """
        J = HalfInt.of(J)
        if J.twice_value < 1:
            raise InvalidQuantumNumberError(f"Construction needs J >= 1/2, got {J}")
        j_hat = J.ceil()
        azimuths = 2 * j_hat + 1
        polar = math.pi * np.arange(2 * j_hat + 2) / azimuths
        cosines = np.cos(polar)

        system = np.array(
            [[legendre_p(L, cosines[k]) for k in range(1, 2 * j_hat + 1)] for L in range(1, 2 * j_hat + 1)]
        )
        rhs = np.array([-(legendre_p(L, 1.0) + legendre_p(L, -1.0)) for L in range(1, 2 * j_hat + 1)])

        try:
            ring_weights = solve(system, rhs)
        except LinAlgError as e:
            condition = float(np.linalg.cond(system))
            logger.error(f"Legendre system singular for J={J}: {e}")
            raise SingularSystemError(f"Legendre system singular for J={J}", condition) from e

        residual = float(norm(system @ ring_weights - rhs, np.inf))
        scale = float(norm(system, np.inf) * norm(ring_weights, np.inf) + norm(rhs, np.inf))
        if not np.all(np.isfinite(ring_weights)) or residual > LINEAR_RESIDUAL_TOL * scale:
            condition = float(np.linalg.cond(system))
            logger.error(f"Legendre system residual {residual:.3e} too large for J={J}")
            raise SingularSystemError(
                f"Legendre system badly solved for J={J}", condition, residual
            )

        for index, weight in enumerate(ring_weights, start=1):
            if weight <= 0.0:
                logger.error(f"Non-positive ring weight c_{index}={weight} for J={J}")
                raise NonPositiveWeightError(
                    f"Ring weight c_{index} = {weight!r} is not positive for J={J}", index, weight
                )

        ring_phis = 2.0 * math.pi * np.arange(azimuths) / azimuths
        thetas = [0.0, math.pi]
        phis = [0.0, 0.0]
        weights = [float(azimuths), float(azimuths)]
        for index, weight in enumerate(ring_weights, start=1):
            thetas.extend([polar[index]] * azimuths)
            phis.extend(ring_phis.tolist())
            weights.extend([float(weight)] * azimuths)

        direction_set = WeightedDirectionSet(
            thetas=thetas, phis=phis, weights=weights, name=f"{CONSTRUCT_PREFIX}{J}"
        )
        report = self.verify_isotropy(direction_set, HalfInt(2 * j_hat))
        if not report.passed:
            raise SingularSystemError(
                f"Constructed set for J={J} is not isotropic (worst {report.worst})",
                float(np.linalg.cond(system)),
                report.max_abs,
            )

        logger.info(
            f"Constructed isotropic set for J={J}: {direction_set.size} directions, "
            f"C={direction_set.total_weight:.6g}, ring weights {np.round(ring_weights, 6).tolist()}"
        )
        return direction_set

    @staticmethod
    def ring_weights(direction_set: WeightedDirectionSet) -> np.ndarray:
        """Distinct off-pole weights of a constructed grid, north to south"""
        off_pole = (direction_set.thetas > 0.0) & (direction_set.thetas < math.pi)
        thetas = direction_set.thetas[off_pole]
        weights = direction_set.weights[off_pole]
        _, first = np.unique(np.round(thetas, 12), return_index=True)
        return weights[np.sort(first)]

    @staticmethod
    def platonic_set(name: str) -> WeightedDirectionSet:
        """
        Unit-weight vertices of a regular polyhedron.

        tetrahedron: one vertex at the north pole, the others at
        theta = arccos(-1/3), phi = 0, 2pi/3, 4pi/3.
        octahedron: the six coordinate half-axes.
        """
        if name == "tetrahedron":
            thetas = [0.0] + [TETRAHEDRON_POLAR] * 3
            phis = [0.0, 0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0]
        elif name == "octahedron":
            half = math.pi / 2.0
            thetas = [0.0, half, half, half, half, math.pi]
            phis = [0.0, 0.0, half, math.pi, 3.0 * half, 0.0]
        else:
            raise UnknownDirectionSetError(
                f"{ERROR_UNKNOWN_SET}: {name!r} (expected one of {', '.join(PLATONIC_NAMES)})"
            )
        return WeightedDirectionSet(thetas=thetas, phis=phis, weights=[1.0] * len(thetas), name=name)

    @staticmethod
    def rotated(direction_set: WeightedDirectionSet, rotation: np.ndarray) -> WeightedDirectionSet:
        return direction_set.rotated(rotation)

    # ------------------------------------------------------------------
    # Measurement statistics
    # ------------------------------------------------------------------

    def outcome_probabilities(
        self, state: EffectiveState, direction_set: WeightedDirectionSet, thetas, phis
    ) -> np.ndarray:
        """
        Outcome probabilities for many sources, shape (outcomes, sources).

        p_r = (c_r/C) |<B|U(n_r)^dagger U(n_src)|A>|^2 with the effective
        measurement state B = sum_j sqrt(2j+1)|j, m>. Raises when the set does
        not close on the state.
        """
        thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        bob = multiplet_vectors(
            state, decoder_amplitudes(state), direction_set.thetas, direction_set.phis
        )
        alice = multiplet_vectors(state, state.coeffs, thetas, phis)
        amplitudes = bob.conj() @ alice.T
        weights = direction_set.weights / direction_set.total_weight
        probabilities = weights[:, None] * np.abs(amplitudes) ** 2

        defect = np.abs(probabilities.sum(axis=0) - 1.0)
        worst = int(np.argmax(defect))
        if defect[worst] > self.closure_tol:
            logger.warning(
                f"Closure violated by {direction_set.name} for state N={state.N}: "
                f"{defect[worst]:.3e}"
            )
            raise ClosureViolationError(float(defect[worst]), (float(thetas[worst]), float(phis[worst])))
        return probabilities

    def outcome_distribution(
        self, state: EffectiveState, direction_set: WeightedDirectionSet, source
    ) -> np.ndarray:
        """Probabilities of every outcome for a single source direction"""
        theta, phi = angles_of(source)
        return self.outcome_probabilities(state, direction_set, [theta], [phi])[:, 0]

    def fixed_source_fidelity(
        self, state: EffectiveState, direction_set: WeightedDirectionSet, source
    ) -> float:
        """sum_r p_r (1 + n_src . n_r)/2"""
        theta, phi = angles_of(source)
        probabilities = self.outcome_probabilities(state, direction_set, [theta], [phi])[:, 0]
        unit = np.asarray(source, dtype=float) / np.linalg.norm(source)
        scores = 0.5 * (1.0 + direction_set.vectors() @ unit)
        return float(np.dot(probabilities, scores))

    def averaged_finite_fidelity(
        self, state: EffectiveState, direction_set: WeightedDirectionSet
    ) -> float:
        """Fixed-source fidelity averaged over the sphere with an exact product rule"""
        thetas, phis, rule_weights = sphere_rule(state.J)
        probabilities = self.outcome_probabilities(state, direction_set, thetas, phis)
        sources = np.stack(
            [np.sin(thetas) * np.cos(phis), np.sin(thetas) * np.sin(phis), np.cos(thetas)], axis=-1
        )
        scores = 0.5 * (1.0 + direction_set.vectors() @ sources.T)
        per_source = np.sum(probabilities * scores, axis=0)
        return float(np.dot(rule_weights, per_source))

    def source_moment_operator(
        self, state: EffectiveState, direction_set: WeightedDirectionSet, guess
    ) -> SourceMomentReport:
        """
        Compare sum_r (c_r/C) (1 + n_r.g)/2 |A_r><A_r| with its continuous
        counterpart, |A_r> = U(n_r)|A> in the direct-sum multiplet basis.

        The two agree when the set is isotropic to order 2J >= 2j + 1.
        """
        unit = np.asarray(guess, dtype=float)
        unit = unit / np.linalg.norm(unit)

        vectors = multiplet_vectors(state, state.coeffs, direction_set.thetas, direction_set.phis)
        weights = direction_set.weights / direction_set.total_weight
        scores = 0.5 * (1.0 + direction_set.vectors() @ unit)
        finite = np.einsum("r,ra,rb->ab", weights * scores, vectors, vectors.conj())

        thetas, phis, rule_weights = sphere_rule(state.J)
        sources = np.stack(
            [np.sin(thetas) * np.cos(phis), np.sin(thetas) * np.sin(phis), np.cos(thetas)], axis=-1
        )
        rule_vectors = multiplet_vectors(state, state.coeffs, thetas, phis)
        rule_scores = 0.5 * (1.0 + sources @ unit)
        continuous = np.einsum(
            "r,ra,rb->ab", rule_weights * rule_scores, rule_vectors, rule_vectors.conj()
        )

        deviation = float(norm(finite - continuous, "fro"))
        logger.debug(f"Source moment operator deviation for {direction_set.name}: {deviation:.3e}")
        return SourceMomentReport(finite=finite, continuous=continuous, deviation=deviation)

    # ------------------------------------------------------------------
    # Files and lookup
    # ------------------------------------------------------------------

    @staticmethod
    def save_direction_set(direction_set: WeightedDirectionSet, path) -> Path:
        """Write "theta,phi,weight" rows with 17 significant digits"""
        path = Path(path)
        if path.parent and not path.parent.exists():
            os.makedirs(path.parent, exist_ok=True)
        direction_set.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT)
        logger.info(f"Saved {direction_set.size} directions to {path}")
        return path

    @staticmethod
    def load_direction_set(path) -> WeightedDirectionSet:
        """Read a "theta,phi,weight" CSV; the header row is optional"""
        path = Path(path)
        try:
            frame = pd.read_csv(path, header=None, dtype=str, comment="#", skip_blank_lines=True)
        except (OSError, pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            raise DirectionSetFormatError(f"Cannot read direction set {path}: {e}") from None

        if frame.shape[1] != len(DIRECTION_SET_COLUMNS):
            raise DirectionSetFormatError(
                f"{path}: expected {len(DIRECTION_SET_COLUMNS)} columns, found {frame.shape[1]}"
            )
        rows = [tuple(str(value).strip() for value in row) for row in frame.itertuples(index=False)]
        if rows and rows[0][0].lower() == DIRECTION_SET_COLUMNS[0]:
            rows = rows[1:]
        try:
            values = np.array([[float(value) for value in row] for row in rows], dtype=float)
            return WeightedDirectionSet(
                thetas=values[:, 0], phis=values[:, 1], weights=values[:, 2], name=path.stem
            )
        except (ValueError, IndexError) as e:
            raise DirectionSetFormatError(f"{path}: {e}") from None

    def resolve_direction_set(self, source: str) -> WeightedDirectionSet:
        """Platonic name, construct:<J> or a CSV path"""
        if source in PLATONIC_NAMES:
            return self.platonic_set(source)
        if source.startswith(CONSTRUCT_PREFIX):
            return self.construct_isotropic_set(HalfInt.of(source[len(CONSTRUCT_PREFIX):]))
        return self.load_direction_set(source)
