"""Gate-by-gate stochastic model of the pair source, splitter, and detectors.

The simulation stays at the photon level: draw the pair number for each gate,
then let every photon independently survive the optics, pick an arm, and fire
its detector; a detector clicks on at least one registration or on a dark
Bernoulli. No generating-function algebra enters, so the simulator is a
genuinely independent check on the closed forms.

Determinism contract: gates are processed in fixed blocks of ``BLOCK_GATES``;
block b of a run with seed s draws from a counter-based Philox stream keyed
(s, b). Block results combine by integer addition, so totals are bitwise
identical for any worker count or execution order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .click_model import DetectionSetup
from .dark_counts import RawRates
from .distributions import PairDistribution, PumpMapping
from .errors import ParameterError, SimulationError

#: Fixed block length; part of the determinism contract, do not tune per run.
BLOCK_GATES = 16384

#: Safety cap on pairs per gate before photon arrays are allocated.
PAIRS_PER_GATE_CAP = 1_000_000


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: gate count, seed, pair law, detection setup."""

    n_gates: int
    seed: int
    dist: PairDistribution
    setup: DetectionSetup

    def __post_init__(self) -> None:
        if not isinstance(self.n_gates, int) or isinstance(self.n_gates, bool) or self.n_gates < 1:
            raise ParameterError(f"n_gates must be a positive integer, got {self.n_gates!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class SimResult:
    """Click totals of a run plus the gate rate needed to express them in Hz."""

    n_gates: int
    n_s1: int
    n_s2: int
    n_coinc: int
    gate_rate_hz: float

    def __post_init__(self) -> None:
        if not 0 <= self.n_coinc <= min(self.n_s1, self.n_s2) <= max(self.n_s1, self.n_s2) <= self.n_gates:
            raise ParameterError("click counts must satisfy n_coinc <= n_s1, n_s2 <= n_gates")

    @property
    def s1_rate_hz(self) -> float:
        return self.n_s1 / self.n_gates * self.gate_rate_hz

    @property
    def s2_rate_hz(self) -> float:
        return self.n_s2 / self.n_gates * self.gate_rate_hz

    @property
    def coincidence_rate_hz(self) -> float:
        return self.n_coinc / self.n_gates * self.gate_rate_hz

    @property
    def raw_rates(self) -> RawRates:
        return RawRates(self.s1_rate_hz, self.s2_rate_hz, self.coincidence_rate_hz)


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    key = np.array([seed, block_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _simulate_block(
    seed: int, block_index: int, n_gates: int, dist: PairDistribution, setup: DetectionSetup
) -> tuple[int, int, int]:
    """Click counts for one block. Draw order is fixed: pairs, photons, darks."""
    rng = _block_rng(seed, block_index)
    pairs = dist.sample(rng, size=n_gates)
    if int(pairs.max(initial=0)) > PAIRS_PER_GATE_CAP:
        raise SimulationError(
            f"a gate produced more than {PAIRS_PER_GATE_CAP} pairs; "
            "the distribution mean is outside the simulable range"
        )
    photons_per_gate = 2 * pairs
    total_photons = int(photons_per_gate.sum())
    # Per photon, the survive -> pick-arm -> register chain has categorical
    # marginal {detected@1: T*eta1/2, detected@2: T*eta2/2, no click: rest},
    # drawn here with one uniform and two thresholds.
    threshold1 = 0.5 * setup.t_eta1
    threshold2 = threshold1 + 0.5 * setup.t_eta2
    if total_photons > 0:
        u = rng.random(total_photons)
        gate_ids = np.repeat(np.arange(n_gates), photons_per_gate)
        hit1 = np.bincount(gate_ids[u < threshold1], minlength=n_gates) > 0
        hit2 = np.bincount(gate_ids[(u >= threshold1) & (u < threshold2)], minlength=n_gates) > 0
    else:
        hit1 = np.zeros(n_gates, dtype=bool)
        hit2 = np.zeros(n_gates, dtype=bool)
    click1 = hit1 | (rng.random(n_gates) < setup.dark1_hz / setup.gate_rate_hz)
    click2 = hit2 | (rng.random(n_gates) < setup.dark2_hz / setup.gate_rate_hz)
    return int(click1.sum()), int(click2.sum()), int((click1 & click2).sum())


def _blocks(n_gates: int) -> list[tuple[int, int]]:
    full, remainder = divmod(n_gates, BLOCK_GATES)
    sizes = [(index, BLOCK_GATES) for index in range(full)]
    if remainder:
        sizes.append((full, remainder))
    return sizes


def simulate(config: SimConfig, workers: int = 1) -> SimResult:
    """Run the gate-by-gate simulation; identical output for any worker count."""
    blocks = _blocks(config.n_gates)
    if workers <= 1:
        results = [
            _simulate_block(config.seed, index, size, config.dist, config.setup)
            for index, size in blocks
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda block: _simulate_block(
                        config.seed, block[0], block[1], config.dist, config.setup
                    ),
                    blocks,
                )
            )
    n_s1 = sum(r[0] for r in results)
    n_s2 = sum(r[1] for r in results)
    n_coinc = sum(r[2] for r in results)
    return SimResult(config.n_gates, n_s1, n_s2, n_coinc, config.setup.gate_rate_hz)


def point_seed(seed: int, point_index: int) -> int:
    """Per-point seed for sweeps, derived deterministically from (seed, index)."""
    sequence = np.random.SeedSequence([seed, point_index])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def sweep(
    powers_mw,
    mapping: PumpMapping,
    setup: DetectionSetup,
    n_gates_per_point: int,
    seed: int,
    workers: int = 1,
) -> list[tuple[float, SimResult]]:
    """Simulate one run per pump power, mean set by the pump mapping."""
    results: list[tuple[float, SimResult]] = []
    for index, power in enumerate(powers_mw):
        dist = mapping.distribution_at(float(power))
        config = SimConfig(n_gates_per_point, point_seed(seed, index), dist, setup)
        results.append((float(power), simulate(config, workers=workers)))
    return results
