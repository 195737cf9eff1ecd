"""Click statistics of two gated threshold detectors behind a 50/50 splitter.

Given m pairs in a gate, each of the 2m photons independently survives the
optics with probability T, exits through one splitter arm with probability
1/2, and fires detector k with probability eta_k. A threshold detector clicks
when at least one photon registers. Averaging the binomial routing weights
collapses every conditional term to a power of

    q_k  = 1 - T*eta_k / 2          (single detector k)
    q_12 = 1 - (T*eta1 + T*eta2)/2  (neither detector)

so the gate-averaged click probabilities reduce to the pair law's even-power
generating function G:

    p_s_k   = 1 - G(q_k)
    p_coinc = 1 - G(q_1) - G(q_2) + G(q_12)
    p_single = p_s1 + p_s2 - p_coinc = 1 - G(q_12)

The closed forms are the production path. Truncated direct sums over the pair
number and an exhaustive small-m enumeration are kept as independent
verification routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import Kind, PairDistribution, check_kind, pgf_even_complement
from .errors import ParameterError
from .validation import (
    check_finite_nonnegative,
    check_index,
    check_positive,
    check_unit_interval,
)

#: Largest pair number evaluated through the literal binomial inner sums.
BINOMIAL_M_CAP = 12
#: Largest pair number the exhaustive enumeration accepts (5**(2m) outcomes).
ENUMERATION_M_CAP = 4

_PROB_SLACK = 1e-9


@dataclass(frozen=True)
class DetectionSetup:
    """Gate rate plus the optical and detector parameters of both arms."""

    gate_rate_hz: float
    transmittivity: float
    eta1: float
    eta2: float
    dark1_hz: float = 0.0
    dark2_hz: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gate_rate_hz", check_positive("gate_rate_hz", self.gate_rate_hz))
        object.__setattr__(self, "transmittivity", check_unit_interval("transmittivity", self.transmittivity))
        object.__setattr__(self, "eta1", check_unit_interval("eta1", self.eta1))
        object.__setattr__(self, "eta2", check_unit_interval("eta2", self.eta2))
        for name in ("dark1_hz", "dark2_hz"):
            value = check_finite_nonnegative(name, getattr(self, name))
            if value >= self.gate_rate_hz:
                raise ParameterError(f"{name} must be < gate_rate_hz, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def ideal(cls, gate_rate_hz: float = 316000.0) -> "DetectionSetup":
        """Lossless optics, unit-efficiency detectors, no dark counts."""
        return cls(gate_rate_hz, 1.0, 1.0, 1.0, 0.0, 0.0)

    @property
    def t_eta1(self) -> float:
        return self.transmittivity * self.eta1

    @property
    def t_eta2(self) -> float:
        return self.transmittivity * self.eta2

    def t_eta(self, detector_index: int) -> float:
        if detector_index == 1:
            return self.t_eta1
        if detector_index == 2:
            return self.t_eta2
        raise ParameterError(f"detector_index must be 1 or 2, got {detector_index!r}")

    def dark_hz(self, detector_index: int) -> float:
        if detector_index == 1:
            return self.dark1_hz
        if detector_index == 2:
            return self.dark2_hz
        raise ParameterError(f"detector_index must be 1 or 2, got {detector_index!r}")


@dataclass(frozen=True)
class ClickProbabilities:
    """Per-gate click probabilities: each single, the coincidence, and their union."""

    p_s1: float
    p_s2: float
    p_coinc: float
    p_single: float

    def __post_init__(self) -> None:
        for name in ("p_s1", "p_s2", "p_coinc", "p_single"):
            value = getattr(self, name)
            if not -_PROB_SLACK <= value <= 1.0 + _PROB_SLACK:
                raise ParameterError(f"{name} must lie in [0, 1], got {value}")
        if self.p_coinc > min(self.p_s1, self.p_s2) + _PROB_SLACK:
            raise ParameterError("p_coinc cannot exceed either single-click probability")
        if abs(self.p_single - (self.p_s1 + self.p_s2 - self.p_coinc)) > _PROB_SLACK:
            raise ParameterError("p_single must equal p_s1 + p_s2 - p_coinc")


def _gap(x: float):
    """1 - q**2 for q = 1 - x, computed as x*(2 - x) so tiny x stays exact."""
    return x * (2.0 - x)


def single_click_probability(dist: PairDistribution, t_eta: float) -> float:
    """Per-gate probability that a detector seeing click chance t_eta/2 per photon fires."""
    t_eta = check_unit_interval("t_eta", t_eta)
    return float(pgf_even_complement(dist.kind, dist.mean, _gap(0.5 * t_eta)))


def combined_click_probability(dist: PairDistribution, t_eta1: float, t_eta2: float) -> float:
    """Per-gate probability that at least one of the two detectors fires."""
    t_eta1 = check_unit_interval("t_eta1", t_eta1)
    t_eta2 = check_unit_interval("t_eta2", t_eta2)
    return float(pgf_even_complement(dist.kind, dist.mean, _gap(0.5 * (t_eta1 + t_eta2))))


def coincidence_probability(dist: PairDistribution, t_eta1: float, t_eta2: float) -> float:
    """Per-gate probability that both detectors fire in the same gate."""
    t_eta1 = check_unit_interval("t_eta1", t_eta1)
    t_eta2 = check_unit_interval("t_eta2", t_eta2)
    c1 = pgf_even_complement(dist.kind, dist.mean, _gap(0.5 * t_eta1))
    c2 = pgf_even_complement(dist.kind, dist.mean, _gap(0.5 * t_eta2))
    c12 = pgf_even_complement(dist.kind, dist.mean, _gap(0.5 * (t_eta1 + t_eta2)))
    return max(float(c1 + c2 - c12), 0.0)


def click_probabilities(dist: PairDistribution, setup: DetectionSetup) -> ClickProbabilities:
    """All four per-gate probabilities for one pair law and one setup."""
    p1 = single_click_probability(dist, setup.t_eta1)
    p2 = single_click_probability(dist, setup.t_eta2)
    pc = coincidence_probability(dist, setup.t_eta1, setup.t_eta2)
    return ClickProbabilities(p1, p2, pc, p1 + p2 - pc)


def single_rate(dist: PairDistribution, setup: DetectionSetup, detector_index: int) -> float:
    """Photon-induced single-count rate (Hz) at detector 1 or 2."""
    return setup.gate_rate_hz * single_click_probability(dist, setup.t_eta(detector_index))


def coincidence_rate(dist: PairDistribution, setup: DetectionSetup) -> float:
    """Photon-induced coincidence-count rate (Hz)."""
    return setup.gate_rate_hz * coincidence_probability(dist, setup.t_eta1, setup.t_eta2)


def probabilities_for_means(kind: Kind, means, t_eta1: float, t_eta2: float):
    """Vectorized (p_s1, p_s2, p_coinc, p_single) for an array of means."""
    check_kind(kind)
    t_eta1 = check_unit_interval("t_eta1", t_eta1)
    t_eta2 = check_unit_interval("t_eta2", t_eta2)
    means = np.asarray(means, dtype=float)
    c1 = pgf_even_complement(kind, means, _gap(0.5 * t_eta1))
    c2 = pgf_even_complement(kind, means, _gap(0.5 * t_eta2))
    c12 = pgf_even_complement(kind, means, _gap(0.5 * (t_eta1 + t_eta2)))
    p_coinc = np.maximum(c1 + c2 - c12, 0.0)
    return c1, c2, p_coinc, c1 + c2 - p_coinc


def _one_minus_power(x: float, exponent):
    """1 - (1 - x)**exponent, accurate for tiny x; exponent may be an array."""
    if x >= 1.0:
        ones = np.asarray(exponent) > 0
        return ones.astype(float) if ones.ndim else float(ones)
    return -np.expm1(exponent * math.log1p(-x))


def _per_pair_binomial(m: int, t_eta1: float, t_eta2: float) -> tuple[float, float, float]:
    if m == 0:
        return (0.0, 0.0, 0.0)
    photons = 2 * m
    scale = 4.0**m
    weights = [math.comb(photons, n) / scale for n in range(photons + 1)]
    hit1 = [float(_one_minus_power(t_eta1, n)) for n in range(photons + 1)]
    hit2 = [float(_one_minus_power(t_eta2, photons - n)) for n in range(photons + 1)]
    p1 = math.fsum(w * a for w, a in zip(weights, hit1))
    p2 = math.fsum(w * b for w, b in zip(weights, hit2))
    pc = math.fsum(w * a * b for w, a, b in zip(weights, hit1, hit2))
    return (p1, p2, pc)


def _per_pair_closed(m: int, t_eta1: float, t_eta2: float) -> tuple[float, float, float]:
    if m == 0:
        return (0.0, 0.0, 0.0)
    photons = 2 * m
    s1 = float(_one_minus_power(0.5 * t_eta1, photons))
    s2 = float(_one_minus_power(0.5 * t_eta2, photons))
    s12 = float(_one_minus_power(0.5 * (t_eta1 + t_eta2), photons))
    return (s1, s2, max(s1 + s2 - s12, 0.0))


def per_pair_click_terms(
    m: int, t_eta1: float, t_eta2: float, method: str = "binomial"
) -> tuple[float, float, float]:
    """Conditional (p_click1, p_click2, p_coinc) given exactly m pairs.

    ``method`` selects the literal binomial inner sums ("binomial", capped at
    m = 12), the equivalent q-power forms ("closed"), or a size-based switch
    ("auto").
    """
    check_index("m", m)
    t_eta1 = check_unit_interval("t_eta1", t_eta1)
    t_eta2 = check_unit_interval("t_eta2", t_eta2)
    if method not in ("binomial", "closed", "auto"):
        raise ParameterError(f"method must be 'binomial', 'closed' or 'auto', got {method!r}")
    if method == "auto":
        method = "binomial" if m <= BINOMIAL_M_CAP else "closed"
    if method == "binomial":
        if m > BINOMIAL_M_CAP:
            raise ParameterError(
                f"binomial evaluation is capped at m = {BINOMIAL_M_CAP}; "
                "pass method='closed' or 'auto' for larger m"
            )
        return _per_pair_binomial(m, t_eta1, t_eta2)
    return _per_pair_closed(m, t_eta1, t_eta2)


@lru_cache(maxsize=8)
def _outcome_digits(n_photons: int) -> np.ndarray:
    """Every categorical outcome tuple for ``n_photons`` photons, one per row."""
    count = 5**n_photons
    codes = np.arange(count, dtype=np.int64)
    digits = np.empty((count, n_photons), dtype=np.int8)
    for position in range(n_photons):
        codes, digits[:, position] = np.divmod(codes, 5)
    digits.setflags(write=False)
    return digits


def enumerate_bruteforce(
    m: int, transmittivity: float, eta1: float, eta2: float
) -> tuple[float, float, float]:
    """Exact conditional click probabilities by exhausting per-photon outcomes.

    Each photon lands in one of five categories: lost in the optics, detected
    or missed at detector 1, detected or missed at detector 2. Summing the
    product probabilities over all 5**(2m) tuples is exponentially slow but
    involves none of the binomial or generating-function algebra, so it serves
    as the independent oracle for the other evaluation routes.
    """
    check_index("m", m)
    if m > ENUMERATION_M_CAP:
        raise ParameterError(
            f"enumeration is capped at m = {ENUMERATION_M_CAP} (5**(2m) outcomes), got {m}"
        )
    transmittivity = check_unit_interval("transmittivity", transmittivity)
    eta1 = check_unit_interval("eta1", eta1)
    eta2 = check_unit_interval("eta2", eta2)
    if m == 0:
        return (0.0, 0.0, 0.0)
    outcome_probs = np.array(
        [
            1.0 - transmittivity,
            transmittivity * eta1 / 2.0,
            transmittivity * (1.0 - eta1) / 2.0,
            transmittivity * eta2 / 2.0,
            transmittivity * (1.0 - eta2) / 2.0,
        ]
    )
    digits = _outcome_digits(2 * m)
    tuple_probs = outcome_probs[digits].prod(axis=1)
    click1 = (digits == 1).any(axis=1)
    click2 = (digits == 3).any(axis=1)
    return (
        float(tuple_probs[click1].sum()),
        float(tuple_probs[click2].sum()),
        float(tuple_probs[click1 & click2].sum()),
    )


def _per_pair_terms_vector(max_m: int, t_eta1: float, t_eta2: float):
    """Per-pair click terms for every m in 0..max_m (binomial head, q-power tail)."""
    p1 = np.empty(max_m + 1)
    p2 = np.empty(max_m + 1)
    pc = np.empty(max_m + 1)
    head = min(max_m, BINOMIAL_M_CAP)
    for m in range(head + 1):
        p1[m], p2[m], pc[m] = _per_pair_binomial(m, t_eta1, t_eta2)
    if max_m > head:
        tail = np.arange(head + 1, max_m + 1)
        photons = 2 * tail
        s1 = _one_minus_power(0.5 * t_eta1, photons)
        s2 = _one_minus_power(0.5 * t_eta2, photons)
        s12 = _one_minus_power(0.5 * (t_eta1 + t_eta2), photons)
        p1[head + 1 :] = s1
        p2[head + 1 :] = s2
        pc[head + 1 :] = np.maximum(s1 + s2 - s12, 0.0)
    return p1, p2, pc


def single_click_probability_direct(
    dist: PairDistribution, t_eta: float, tail_bound: float = 1e-14
) -> float:
    """Single-click probability by truncated summation over the pair number.

    Verification path only; the closed form is the production route.
    """
    t_eta = check_unit_interval("t_eta", t_eta)
    max_m = dist.truncation_index(tail_bound)
    weights = dist.pmf(np.arange(max_m + 1))
    p1, _, _ = _per_pair_terms_vector(max_m, t_eta, t_eta)
    return float(weights @ p1)


def coincidence_probability_direct(
    dist: PairDistribution, t_eta1: float, t_eta2: float, tail_bound: float = 1e-14
) -> float:
    """Coincidence probability by truncated summation over the pair number."""
    t_eta1 = check_unit_interval("t_eta1", t_eta1)
    t_eta2 = check_unit_interval("t_eta2", t_eta2)
    max_m = dist.truncation_index(tail_bound)
    weights = dist.pmf(np.arange(max_m + 1))
    _, _, pc = _per_pair_terms_vector(max_m, t_eta1, t_eta2)
    return float(weights @ pc)
