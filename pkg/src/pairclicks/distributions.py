"""Photon-pair number laws per gate pulse and their pump-power mappings.

Two single-parameter laws cover the sources handled here: a thermal
(geometric) law with mean ``mean`` pairs per gate,

    p(m) = mean^m / (mean + 1)^(m + 1),

and a Poissonian law

    p(m) = mean^m exp(-mean) / m!.

Both expose the even-power generating function G(q) = sum_m p(m) q^(2m),
which is the kernel the analytic click model reduces to, plus exact sampling
and a provable truncation rule for the infinite sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special

from .errors import ParameterError
from .validation import check_finite_nonnegative, check_positive

Kind = Literal["thermal", "poissonian"]

THERMAL: Kind = "thermal"
POISSONIAN: Kind = "poissonian"
KINDS: tuple[Kind, Kind] = (THERMAL, POISSONIAN)

#: Hard ceiling on the adaptive truncation index of the pair-number sums.
TRUNCATION_CAP = 100_000


def check_kind(kind: str) -> Kind:
    if kind not in KINDS:
        raise ParameterError(f"unknown distribution kind {kind!r}; expected one of {KINDS}")
    return kind  # type: ignore[return-value]


def pgf_even_gap(kind: Kind, mean, gap):
    """G as a function of gap = 1 - q**2: 1/(1 + mean*gap) or exp(-mean*gap).

    Accepts scalars or arrays in ``mean``/``gap``. Taking the gap instead of q
    keeps tiny 1 - q exact, which matters when detection is weak.
    """
    if kind == THERMAL:
        return 1.0 / (1.0 + mean * gap)
    return np.exp(-mean * gap)


def pgf_even_complement(kind: Kind, mean, gap):
    """1 - G(q) for gap = 1 - q**2, without cancellation when mean*gap is tiny."""
    if kind == THERMAL:
        scaled = mean * gap
        return scaled / (1.0 + scaled)
    return -np.expm1(-mean * gap)


@dataclass(frozen=True)
class PairDistribution:
    """Number of photon pairs generated in one gate: thermal or Poissonian."""

    kind: Kind
    mean: float

    def __post_init__(self) -> None:
        check_kind(self.kind)
        object.__setattr__(self, "mean", check_finite_nonnegative("mean", self.mean))

    @classmethod
    def thermal(cls, mean: float) -> "PairDistribution":
        return cls(THERMAL, mean)

    @classmethod
    def poissonian(cls, mean: float) -> "PairDistribution":
        return cls(POISSONIAN, mean)

    def pmf(self, m):
        """Probability of exactly ``m`` pairs; ``m`` may be an int or integer array.

        Evaluated in log space so large means (hundreds of pairs per gate)
        neither overflow nor lose the far tail.
        """
        m_arr = np.asarray(m)
        if not np.issubdtype(m_arr.dtype, np.integer):
            raise ParameterError(f"pair count m must be an integer, got {m!r}")
        if np.any(m_arr < 0):
            raise ParameterError("pair count m must be >= 0")
        if self.mean == 0.0:
            out = np.where(m_arr == 0, 1.0, 0.0)
        elif self.kind == THERMAL:
            log_ratio = math.log(self.mean) - math.log1p(self.mean)
            out = np.exp(m_arr * log_ratio - math.log1p(self.mean))
        else:
            out = np.exp(m_arr * math.log(self.mean) - self.mean - special.gammaln(m_arr + 1.0))
        if m_arr.ndim == 0:
            return float(out)
        return out

    def pgf_even(self, q) -> float:
        """G(q) = sum_m p(m) q**(2m) for q in [0, 1], in closed form."""
        q = float(q)
        if math.isnan(q) or not 0.0 <= q <= 1.0:
            raise ParameterError(f"q must lie in [0, 1], got {q}")
        gap = (1.0 - q) * (1.0 + q)
        return float(pgf_even_gap(self.kind, self.mean, gap))

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw pair counts; returns an int, or an int64 array when ``size`` is given.

        Thermal counts come from exact inversion of the geometric law with
        success probability 1/(mean + 1); Poissonian counts use the
        generator's exact Poisson sampler.
        """
        n = 1 if size is None else int(size)
        if self.mean == 0.0:
            draws = np.zeros(n, dtype=np.int64)
        elif self.kind == THERMAL:
            log_ratio = math.log(self.mean) - math.log1p(self.mean)
            u = rng.random(n)
            draws = np.floor(np.log1p(-u) / log_ratio).astype(np.int64)
        else:
            draws = rng.poisson(self.mean, n).astype(np.int64)
        if size is None:
            return int(draws[0])
        return draws

    def truncation_index(self, tail_bound: float = 1e-14) -> int:
        """Index M with the mass above M provably below ``tail_bound``.

        Thermal tail is the exact geometric remainder (mean/(mean+1))**(M+1);
        the Poissonian tail is bounded by 2*pmf(M+1) once M + 2 >= 2*mean,
        where successive terms at least halve.
        """
        if self.mean == 0.0:
            return 0
        if self.kind == THERMAL:
            log_ratio = math.log(self.mean) - math.log1p(self.mean)
            index = max(math.ceil(math.log(tail_bound) / log_ratio) - 1, 0)
        else:
            index = self._poisson_truncation(tail_bound)
        if index > TRUNCATION_CAP:
            raise ParameterError(
                f"truncation index {index} exceeds cap {TRUNCATION_CAP}; "
                f"mean {self.mean} is too large for direct summation"
            )
        return index

    def _poisson_truncation(self, tail_bound: float) -> int:
        log_target = math.log(tail_bound) - math.log(2.0)
        start = int(max(math.ceil(2.0 * self.mean), 8))
        for index in range(start, TRUNCATION_CAP + 2):
            log_term = (
                (index + 1) * math.log(self.mean) - self.mean - math.lgamma(index + 2)
            )
            if log_term < log_target:
                return index
        return TRUNCATION_CAP + 1


@dataclass(frozen=True)
class PumpMapping:
    """Average pump power (mW) -> mean pairs per gate.

    Thermal sources follow sinh(sqrt(constant * power))**2 with ``constant``
    in 1/mW; Poissonian sources are linear, ``constant`` in pairs/mW.
    """

    kind: Kind
    constant: float

    def __post_init__(self) -> None:
        check_kind(self.kind)
        object.__setattr__(self, "constant", check_positive("constant", self.constant))

    @property
    def constant_units(self) -> str:
        return "1/mW" if self.kind == THERMAL else "pairs/mW"

    def mean_at(self, power_mw: float) -> float:
        power = check_finite_nonnegative("power_mw", power_mw)
        if self.kind == THERMAL:
            return math.sinh(math.sqrt(self.constant * power)) ** 2
        return self.constant * power

    def means_at(self, powers_mw) -> np.ndarray:
        powers = np.asarray(powers_mw, dtype=float)
        if powers.size and (np.any(~np.isfinite(powers)) or np.any(powers < 0)):
            raise ParameterError("pump powers must be finite and >= 0")
        if self.kind == THERMAL:
            return np.sinh(np.sqrt(self.constant * powers)) ** 2
        return self.constant * powers

    def distribution_at(self, power_mw: float) -> PairDistribution:
        return PairDistribution(self.kind, self.mean_at(power_mw))
