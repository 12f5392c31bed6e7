"""
Monte-Carlo play of the direction-transmission protocol
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence
from scipy.stats import chisquare

from config import Config
from constants import (
    ERROR_INVALID_SEED,
    ERROR_INVALID_TRIALS,
    RNG_ALGORITHM,
    SIMULATION_BLOCK_SIZE,
)
from models import EffectiveState, FrequencyReport, SimulationReport, WeightedDirectionSet
from services.povm_service import PovmService
from utils.performance import monitor_performance
from utils.validation import validate_seed, validate_trials

logger = logging.getLogger(__name__)

# sources handled per vectorized probability evaluation inside a block
SIMULATION_SLICE = 4096

BlockMoments = Tuple[int, float, float]


def fresh_seed() -> int:
    """Draw a 64-bit seed from OS entropy"""
    return int(SeedSequence().entropy % 2**64)


def merge_moments(left: BlockMoments, right: BlockMoments) -> BlockMoments:
    """Combine (count, mean, M2) of two samples"""
    n_a, mean_a, m2_a = left
    n_b, mean_b, m2_b = right
    n = n_a + n_b
    if n == 0:
        return 0, 0.0, 0.0
    delta = mean_b - mean_a
    mean = mean_a + delta * n_b / n
    m2 = m2_a + m2_b + delta * delta * n_a * n_b / n
    return n, mean, m2


class SimulationService:
    """Service for seeded, reproducible protocol simulation"""

    def __init__(self, povm_service: Optional[PovmService] = None, workers: Optional[int] = None):
        self.povm = povm_service or PovmService()
        self.workers = workers or Config.SIM_WORKERS

    def _play_block(
        self,
        state: EffectiveState,
        direction_set: WeightedDirectionSet,
        seed_sequence: SeedSequence,
        size: int,
    ) -> BlockMoments:
        """
        One block of trials with its own generator.

        Draw order inside a block is fixed: all source directions first, then
        one uniform per trial for the outcome.
        """
        rng = Generator(PCG64(seed_sequence))
        cos_theta = 1.0 - 2.0 * rng.random(size)
        phis = 2.0 * math.pi * rng.random(size)
        picks = rng.random(size)

        thetas = np.arccos(cos_theta)
        outcome_vectors = direction_set.vectors()
        scores = np.empty(size)
        for start in range(0, size, SIMULATION_SLICE):
            stop = min(start + SIMULATION_SLICE, size)
            probabilities = self.povm.outcome_probabilities(
                state, direction_set, thetas[start:stop], phis[start:stop]
            )
            cumulative = np.cumsum(probabilities, axis=0)
            cumulative /= cumulative[-1]
            outcomes = np.minimum(
                np.sum(cumulative < picks[start:stop], axis=0), direction_set.size - 1
            )
            sin_theta = np.sin(thetas[start:stop])
            sources = np.stack(
                [
                    sin_theta * np.cos(phis[start:stop]),
                    sin_theta * np.sin(phis[start:stop]),
                    cos_theta[start:stop],
                ],
                axis=-1,
            )
            scores[start:stop] = 0.5 * (
                1.0 + np.einsum("ti,ti->t", outcome_vectors[outcomes], sources)
            )

        mean = float(np.mean(scores))
        return size, mean, float(np.sum((scores - mean) ** 2))

    @monitor_performance("simulation.run_protocol")
    def run_protocol(
        self,
        state: EffectiveState,
        direction_set: WeightedDirectionSet,
        trials: int,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> SimulationReport:
        """
        Average fidelity estimated from `trials` rounds of the protocol.

        Sources are area-uniform; outcomes follow the finite measurement.
        Trials are split into fixed-size blocks, each seeded by a child of
        SeedSequence(seed), so the result is identical for any worker count.
        """
        if not validate_trials(trials):
            raise ValueError(f"{ERROR_INVALID_TRIALS}: {trials!r}")
        if seed is None:
            seed = fresh_seed()
            logger.info(f"No seed given, drew {seed}")
        if not validate_seed(seed):
            raise ValueError(f"{ERROR_INVALID_SEED}: {seed!r}")
        workers = workers or self.workers

        n_blocks = -(-trials // SIMULATION_BLOCK_SIZE)
        children = SeedSequence(seed).spawn(n_blocks)
        sizes = [min(SIMULATION_BLOCK_SIZE, trials - b * SIMULATION_BLOCK_SIZE) for b in range(n_blocks)]

        logger.info(
            f"Simulating N={state.N} with {direction_set.name} ({direction_set.size} outcomes): "
            f"{trials} trials in {n_blocks} blocks on {workers} worker(s)"
        )

        def play(index: int) -> BlockMoments:
            return self._play_block(state, direction_set, children[index], sizes[index])

        if workers == 1:
            blocks: List[BlockMoments] = [play(index) for index in range(n_blocks)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                blocks = list(executor.map(play, range(n_blocks)))

        total: BlockMoments = (0, 0.0, 0.0)
        for block in blocks:
            total = merge_moments(total, block)
        count, mean, m2 = total

        std_error = 0.0
        if count > 1:
            std_error = math.sqrt(m2 / (count - 1) / count)

        return SimulationReport(
            trials=count,
            mean_fidelity=mean,
            std_error=std_error,
            seed=int(seed),
            algorithm=RNG_ALGORITHM,
            state=state.to_dict(),
            set_name=direction_set.name,
            set_size=direction_set.size,
        )

    def empirical_outcome_frequencies(
        self,
        state: EffectiveState,
        direction_set: WeightedDirectionSet,
        source,
        trials: int,
        seed: int,
    ) -> FrequencyReport:
        """Multinomial outcome counts for one source and a chi-square test against p_r"""
        if not validate_trials(trials):
            raise ValueError(f"{ERROR_INVALID_TRIALS}: {trials!r}")
        if not validate_seed(seed):
            raise ValueError(f"{ERROR_INVALID_SEED}: {seed!r}")

        probabilities = self.povm.outcome_distribution(state, direction_set, source)
        probabilities = probabilities / probabilities.sum()
        rng = Generator(PCG64(SeedSequence(seed)))
        counts = rng.multinomial(trials, probabilities)
        frequencies = counts / trials

        support = probabilities > 0.0
        if np.count_nonzero(support) < 2:
            statistic, p_value = 0.0, 1.0
        else:
            # outcomes outside the support never occur
            result = chisquare(counts[support], trials * probabilities[support])
            statistic, p_value = float(result[0]), float(result[1])

        logger.debug(f"Outcome frequencies for {trials} trials: chi2={statistic:.4f}, p={p_value:.4f}")
        return FrequencyReport(
            frequencies=frequencies,
            probabilities=probabilities,
            trials=trials,
            seed=int(seed),
            chi_square=statistic,
            p_value=p_value,
        )
