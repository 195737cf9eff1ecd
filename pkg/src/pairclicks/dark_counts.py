"""Dark-count compensation and the exact forward noise model it inverts.

Dark counts are modeled as a per-gate Bernoulli with probability
``dark_hz / gate_rate_hz`` at each detector, independent of the photons and
of the other detector. A raw click is then photon-click OR dark-click, which
fixes both the forward model and its inversion:

    singles:      s_raw/R = p + d*(1 - p)              (exactly invertible)
    coincidence:  c_raw/R = p12 + d2*(p1 - p12) + d1*(p2 - p12)
                           + d1*d2*(1 - p1 - p2 + p12)

The standard compensation drops the d1*d2 cross term from the coincidence
inversion; ``invert_dark_exact`` keeps it. Negative compensated rates are
reported with a warning and returned as-is so downstream fits stay unbiased.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import NegativeRateWarning, ParameterError
from .validation import check_finite, check_finite_nonnegative, check_positive

_RATE_SLACK = 1e-9


@dataclass(frozen=True)
class RawRates:
    """Measured count rates (Hz), dark counts included."""

    s1_raw_hz: float
    s2_raw_hz: float
    c_raw_hz: float

    def __post_init__(self) -> None:
        for name in ("s1_raw_hz", "s2_raw_hz", "c_raw_hz"):
            object.__setattr__(self, name, check_finite_nonnegative(name, getattr(self, name)))
        if self.c_raw_hz > min(self.s1_raw_hz, self.s2_raw_hz) * (1.0 + _RATE_SLACK) + _RATE_SLACK:
            raise ParameterError(
                f"c_raw_hz ({self.c_raw_hz}) cannot exceed either single rate "
                f"({self.s1_raw_hz}, {self.s2_raw_hz})"
            )


@dataclass(frozen=True)
class PhotonRates:
    """Photon-induced count rates (Hz).

    Compensated estimates may come out slightly negative in the noise floor;
    they are kept (see module docstring), so only finiteness is enforced here.
    """

    s1_ph_hz: float
    s2_ph_hz: float
    c_ph_hz: float

    def __post_init__(self) -> None:
        for name in ("s1_ph_hz", "s2_ph_hz", "c_ph_hz"):
            object.__setattr__(self, name, check_finite(name, getattr(self, name)))


def _check_dark(name: str, dark_hz: float, gate_rate_hz: float) -> float:
    dark_hz = check_finite_nonnegative(name, dark_hz)
    if dark_hz >= gate_rate_hz:
        raise ParameterError(f"{name} must be < gate_rate_hz, got {dark_hz} >= {gate_rate_hz}")
    return dark_hz


def correct_singles(s_raw_hz: float, dark_hz: float, gate_rate_hz: float) -> float:
    """Photon-induced single rate: (s_raw - dark) / (1 - dark/gate_rate)."""
    gate_rate_hz = check_positive("gate_rate_hz", gate_rate_hz)
    dark_hz = _check_dark("dark_hz", dark_hz, gate_rate_hz)
    s_raw_hz = check_finite_nonnegative("s_raw_hz", s_raw_hz)
    if s_raw_hz > gate_rate_hz * (1.0 + _RATE_SLACK):
        raise ParameterError(f"s_raw_hz ({s_raw_hz}) cannot exceed gate_rate_hz ({gate_rate_hz})")
    corrected = (s_raw_hz - dark_hz) / (1.0 - dark_hz / gate_rate_hz)
    if corrected < 0.0:
        warnings.warn(
            f"singles compensation went negative ({corrected:.6g} Hz): "
            f"raw rate {s_raw_hz} Hz is below the dark rate {dark_hz} Hz",
            NegativeRateWarning,
            stacklevel=2,
        )
    return corrected


def correct_coincidence(
    c_raw_hz: float,
    s1_ph_hz: float,
    s2_ph_hz: float,
    dark1_hz: float,
    dark2_hz: float,
    gate_rate_hz: float,
) -> float:
    """Photon-induced coincidence rate, cross term d1*d2 neglected.

    Expects the single rates to be compensated already (``correct_singles``).
    """
    gate_rate_hz = check_positive("gate_rate_hz", gate_rate_hz)
    dark1_hz = _check_dark("dark1_hz", dark1_hz, gate_rate_hz)
    dark2_hz = _check_dark("dark2_hz", dark2_hz, gate_rate_hz)
    c_raw_hz = check_finite_nonnegative("c_raw_hz", c_raw_hz)
    s1_ph_hz = check_finite("s1_ph_hz", s1_ph_hz)
    s2_ph_hz = check_finite("s2_ph_hz", s2_ph_hz)
    denominator = gate_rate_hz - dark1_hz - dark2_hz
    if denominator <= 0.0:
        raise ParameterError("gate_rate_hz must exceed dark1_hz + dark2_hz")
    corrected = (
        c_raw_hz * gate_rate_hz - s1_ph_hz * dark2_hz - dark1_hz * s2_ph_hz
    ) / denominator
    if corrected < 0.0:
        warnings.warn(
            f"coincidence compensation went negative ({corrected:.6g} Hz)",
            NegativeRateWarning,
            stacklevel=2,
        )
    return corrected


def apply_dark_forward(
    photon: PhotonRates, dark1_hz: float, dark2_hz: float, gate_rate_hz: float
) -> RawRates:
    """Exact forward noise model: photon rates -> raw rates with dark counts.

    Keeps the d1*d2 cross term, so it is the ground truth the approximate
    compensation is validated against, and what the simulator must reproduce.
    """
    gate_rate_hz = check_positive("gate_rate_hz", gate_rate_hz)
    d1 = _check_dark("dark1_hz", dark1_hz, gate_rate_hz) / gate_rate_hz
    d2 = _check_dark("dark2_hz", dark2_hz, gate_rate_hz) / gate_rate_hz
    p1 = photon.s1_ph_hz / gate_rate_hz
    p2 = photon.s2_ph_hz / gate_rate_hz
    p12 = photon.c_ph_hz / gate_rate_hz
    for name, value in (("s1_ph", p1), ("s2_ph", p2), ("c_ph", p12)):
        if not 0.0 <= value <= 1.0:
            raise ParameterError(f"per-gate probability for {name} must lie in [0, 1], got {value}")
    if p12 > min(p1, p2) + _RATE_SLACK or p1 + p2 - p12 > 1.0 + _RATE_SLACK:
        raise ParameterError("photon rates do not form a consistent joint click distribution")
    raw1 = p1 + d1 * (1.0 - p1)
    raw2 = p2 + d2 * (1.0 - p2)
    raw12 = (
        p12
        + d2 * (p1 - p12)
        + d1 * (p2 - p12)
        + d1 * d2 * (1.0 - p1 - p2 + p12)
    )
    return RawRates(gate_rate_hz * raw1, gate_rate_hz * raw2, gate_rate_hz * raw12)


def invert_dark_exact(
    raw: RawRates, dark1_hz: float, dark2_hz: float, gate_rate_hz: float
) -> PhotonRates:
    """Exact inversion of ``apply_dark_forward``, cross term included.

    Extension beyond the standard compensation formulas; singles agree with
    ``correct_singles`` identically, only the coincidence differs at order
    d1*d2.
    """
    gate_rate_hz = check_positive("gate_rate_hz", gate_rate_hz)
    d1 = _check_dark("dark1_hz", dark1_hz, gate_rate_hz) / gate_rate_hz
    d2 = _check_dark("dark2_hz", dark2_hz, gate_rate_hz) / gate_rate_hz
    s1_ph = correct_singles(raw.s1_raw_hz, dark1_hz, gate_rate_hz)
    s2_ph = correct_singles(raw.s2_raw_hz, dark2_hz, gate_rate_hz)
    p1 = s1_ph / gate_rate_hz
    p2 = s2_ph / gate_rate_hz
    c_raw = raw.c_raw_hz / gate_rate_hz
    p12 = (c_raw - d2 * (1.0 - d1) * p1 - d1 * (1.0 - d2) * p2 - d1 * d2) / (
        (1.0 - d1) * (1.0 - d2)
    )
    c_ph = gate_rate_hz * p12
    if c_ph < 0.0:
        warnings.warn(
            f"exact coincidence inversion went negative ({c_ph:.6g} Hz)",
            NegativeRateWarning,
            stacklevel=2,
        )
    return PhotonRates(s1_ph, s2_ph, c_ph)


def correct_rates(
    raw: RawRates,
    dark1_hz: float,
    dark2_hz: float,
    gate_rate_hz: float,
    exact: bool = False,
) -> PhotonRates:
    """Compensate a full raw triple; ``exact=True`` keeps the d1*d2 cross term."""
    if exact:
        return invert_dark_exact(raw, dark1_hz, dark2_hz, gate_rate_hz)
    s1_ph = correct_singles(raw.s1_raw_hz, dark1_hz, gate_rate_hz)
    s2_ph = correct_singles(raw.s2_raw_hz, dark2_hz, gate_rate_hz)
    c_ph = correct_coincidence(raw.c_raw_hz, s1_ph, s2_ph, dark1_hz, dark2_hz, gate_rate_hz)
    return PhotonRates(s1_ph, s2_ph, c_ph)
