"""Fitting measured sweeps to the click model and classifying the pair law.

The only free parameter on each branch is the pump constant that maps average
pump power to the mean pair number. Fitting minimizes the unweighted squared
residuals of the three per-gate probabilities (both singles and the
coincidence), which share scale and stay dimensionless. Classification fits
both branches and compares residual sums.

``PumpConstantFitter`` and ``PairStatisticsClassifier`` wrap the plain
functions in the scikit-learn estimator protocol (get_params/set_params,
fit attributes with trailing underscores) so sweeps can ride inside standard
pipelines and grid searches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .click_model import DetectionSetup, probabilities_for_means
from .dark_counts import PhotonRates, RawRates
from .distributions import (
    KINDS,
    Kind,
    PumpMapping,
    check_kind,
    pgf_even_complement,
)
from .errors import FitError, ParameterError
from .validation import check_finite_nonnegative, check_positive

# Exact SI-defined constants.
PLANCK_J_S = 6.62607015e-34
LIGHT_SPEED_M_S = 299792458.0

DEFAULT_BRACKET = (1e-6, 1e3)
DEFAULT_REL_TOL = 1e-8
DEFAULT_RATIO_THRESHOLD = 3.0

_GRID_POINTS = 121


@dataclass(frozen=True)
class CountRecord:
    """One pump-power point of a sweep: raw rates, optionally compensated ones."""

    power_mw: float
    raw: RawRates
    corrected: PhotonRates | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "power_mw", check_finite_nonnegative("power_mw", self.power_mw))

    def observed(self) -> tuple[float, float, float]:
        """The rates a fit should see: compensated if present, raw otherwise."""
        if self.corrected is not None:
            return (self.corrected.s1_ph_hz, self.corrected.s2_ph_hz, self.corrected.c_ph_hz)
        return (self.raw.s1_raw_hz, self.raw.s2_raw_hz, self.raw.c_raw_hz)


@dataclass(frozen=True)
class CurvePoint:
    """One point of the single-vs-coincidence probability curve."""

    mean_pairs: float
    p_single: float
    p_coinc: float

    def __post_init__(self) -> None:
        check_finite_nonnegative("mean_pairs", self.mean_pairs)
        for name in ("p_single", "p_coinc"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {value}")
        if self.p_coinc > self.p_single + 1e-12:
            raise ParameterError("p_coinc cannot exceed p_single")


@dataclass(frozen=True)
class FitResult:
    """Fitted pump constant and the per-point diagnostics behind it."""

    kind: Kind
    constant: float
    constant_units: str
    per_point_means: tuple[float, ...]
    per_point_rss: tuple[float, ...]
    rss: float
    verdict: str | None = None
    verdict_ratio: float | None = None
    rss_by_kind: dict[str, float] | None = None

    def __post_init__(self) -> None:
        check_positive("constant", self.constant)
        check_finite_nonnegative("rss", self.rss)


def invert_mean(
    p_single_target: float,
    kind: Kind,
    setup: DetectionSetup,
    rel_tol: float = 1e-10,
    bracket_high: float = 1e8,
) -> float:
    """Mean pairs per gate at which the combined single-click probability hits the target.

    The map mean -> p_single is strictly monotone, so a plain bisection on
    [0, bracket_high] suffices.
    """
    check_kind(kind)
    target = float(p_single_target)
    if not 0.0 < target < 1.0:
        raise ParameterError(f"p_single_target must lie strictly inside (0, 1), got {target}")
    x12 = 0.5 * (setup.t_eta1 + setup.t_eta2)
    if x12 <= 0.0:
        raise ParameterError("setup must detect something: transmittivity*(eta1+eta2) > 0")
    gap = x12 * (2.0 - x12)
    if float(pgf_even_complement(kind, bracket_high, gap)) < target:
        raise ParameterError(
            f"p_single_target {target} is not reachable with mean <= {bracket_high}"
        )
    low, high = 0.0, bracket_high
    for _ in range(400):
        mid = 0.5 * (low + high)
        if float(pgf_even_complement(kind, mid, gap)) < target:
            low = mid
        else:
            high = mid
        if high - low <= rel_tol * max(abs(mid), 1e-300):
            break
    return 0.5 * (low + high)


def curve(
    kind: Kind,
    setup: DetectionSetup,
    mean_min: float,
    mean_max: float,
    n_points: int,
    spacing: str = "linear",
) -> list[CurvePoint]:
    """Single-vs-coincidence probability curve sampled over a range of means."""
    check_kind(kind)
    mean_min = check_finite_nonnegative("mean_min", mean_min)
    mean_max = check_finite_nonnegative("mean_max", mean_max)
    if mean_min >= mean_max:
        raise ParameterError(f"mean_min must be < mean_max, got {mean_min} >= {mean_max}")
    if not isinstance(n_points, int) or isinstance(n_points, bool) or n_points < 2:
        raise ParameterError(f"n_points must be an integer >= 2, got {n_points!r}")
    if spacing == "linear":
        means = np.linspace(mean_min, mean_max, n_points)
    elif spacing == "log":
        if mean_min <= 0.0:
            raise ParameterError("log spacing needs mean_min > 0")
        means = np.geomspace(mean_min, mean_max, n_points)
    else:
        raise ParameterError(f"spacing must be 'linear' or 'log', got {spacing!r}")
    _, _, p_coinc, p_single = probabilities_for_means(kind, means, setup.t_eta1, setup.t_eta2)
    return [
        CurvePoint(float(mean), float(ps), float(pc))
        for mean, ps, pc in zip(means, p_single, p_coinc)
    ]


def _observed_probabilities(records, gate_rate_hz: float) -> np.ndarray:
    observed = np.array([record.observed() for record in records], dtype=float) / gate_rate_hz
    if np.any(observed > 1.0 + 1e-9):
        raise ParameterError("observed rates exceed the gate rate; check gate_rate_hz")
    return observed


def _model_probabilities(
    kind: Kind, constant: float, powers: np.ndarray, setup: DetectionSetup
) -> tuple[np.ndarray, np.ndarray]:
    means = PumpMapping(kind, constant).means_at(powers)
    p1, p2, pc, _ = probabilities_for_means(kind, means, setup.t_eta1, setup.t_eta2)
    return means, np.stack([p1, p2, pc], axis=1)


def _golden_section_log(objective, low: float, high: float, rel_tol: float) -> float:
    """Golden-section minimum of objective(exp(x)) over [log low, log high]."""
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(low), math.log(high)
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = objective(math.exp(c)), objective(math.exp(d))
    while (b - a) > rel_tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = objective(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = objective(math.exp(d))
    return math.exp(0.5 * (a + b))


def fit_pump_constant(
    records,
    kind: Kind,
    setup: DetectionSetup,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    rel_tol: float = DEFAULT_REL_TOL,
) -> FitResult:
    """Least-squares fit of the pump constant to a dark-compensated sweep.

    The objective is scanned on a log-spaced grid across ``bracket`` to find a
    unimodal pocket, then refined by golden-section search to ``rel_tol``
    relative width.
    """
    check_kind(kind)
    records = list(records)
    low, high = (check_positive("bracket low", bracket[0]), check_positive("bracket high", bracket[1]))
    if low >= high:
        raise ParameterError("bracket must satisfy low < high")
    powers = np.array([record.power_mw for record in records], dtype=float)
    if len(set(powers[powers > 0.0])) < 2:
        raise ParameterError("need at least two records with distinct positive pump powers")
    observed = _observed_probabilities(records, setup.gate_rate_hz)
    if np.all(observed == 0.0):
        raise FitError("degenerate fit: every observed count is zero")

    def objective(constant: float) -> float:
        _, model = _model_probabilities(kind, constant, powers, setup)
        return float(((model - observed) ** 2).sum())

    grid = np.geomspace(low, high, _GRID_POINTS)
    values = [objective(c) for c in grid]
    best = int(np.argmin(values))
    constant = _golden_section_log(
        objective, grid[max(best - 1, 0)], grid[min(best + 1, _GRID_POINTS - 1)], rel_tol
    )
    means, model = _model_probabilities(kind, constant, powers, setup)
    per_point = ((model - observed) ** 2).sum(axis=1)
    units = PumpMapping(kind, constant).constant_units
    return FitResult(
        kind=kind,
        constant=float(constant),
        constant_units=units,
        per_point_means=tuple(float(m) for m in means),
        per_point_rss=tuple(float(r) for r in per_point),
        rss=float(per_point.sum()),
    )


def classify(
    records,
    setup: DetectionSetup,
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    rel_tol: float = DEFAULT_REL_TOL,
) -> FitResult:
    """Fit both pair laws and call the sweep thermal, poissonian, or intermediate.

    The verdict ratio is rss_thermal / rss_poissonian; below 1/threshold the
    sweep reads thermal, above threshold poissonian, in between intermediate.
    Returns the better-fitting branch's result with the verdict fields set.
    """
    if ratio_threshold <= 1.0:
        raise ParameterError(f"ratio_threshold must exceed 1, got {ratio_threshold}")
    records = list(records)
    fits = {
        kind: fit_pump_constant(records, kind, setup, bracket=bracket, rel_tol=rel_tol)
        for kind in KINDS
    }
    rss_thermal = fits["thermal"].rss
    rss_poissonian = fits["poissonian"].rss
    if rss_poissonian == 0.0:
        ratio = 1.0 if rss_thermal == 0.0 else math.inf
    else:
        ratio = rss_thermal / rss_poissonian
    if ratio <= 1.0 / ratio_threshold:
        verdict = "thermal"
    elif ratio >= ratio_threshold:
        verdict = "poissonian"
    else:
        verdict = "intermediate"
    best = fits["thermal"] if rss_thermal <= rss_poissonian else fits["poissonian"]
    return replace(
        best,
        verdict=verdict,
        verdict_ratio=float(ratio),
        rss_by_kind={"thermal": rss_thermal, "poissonian": rss_poissonian},
    )


def pairs_to_power(mean_pairs_per_pulse: float, wavelength_nm: float, rep_rate_hz: float) -> float:
    """Optical power (W) carried by the pairs: 2 photons each at hc/wavelength, per pulse."""
    mean_pairs_per_pulse = check_finite_nonnegative("mean_pairs_per_pulse", mean_pairs_per_pulse)
    wavelength_nm = check_positive("wavelength_nm", wavelength_nm)
    rep_rate_hz = check_positive("rep_rate_hz", rep_rate_hz)
    photon_energy_j = PLANCK_J_S * LIGHT_SPEED_M_S / (wavelength_nm * 1e-9)
    return mean_pairs_per_pulse * 2.0 * photon_energy_j * rep_rate_hz


def _records_from_array(X) -> tuple[list[CountRecord], np.ndarray]:
    X = check_array(X, ensure_2d=True, dtype=float, ensure_all_finite=True)
    if X.shape[1] != 4:
        raise ParameterError(
            f"X must have 4 columns (power_mw, s1_hz, s2_hz, c_hz), got {X.shape[1]}"
        )
    records = [
        CountRecord(row[0], RawRates(row[1], row[2], row[3])) for row in X
    ]
    return records, X


class PumpConstantFitter(BaseEstimator):
    """Scikit-learn estimator around :func:`fit_pump_constant`.

    X is an (n, 4) array of dark-compensated sweep rows
    (power_mw, s1_hz, s2_hz, c_hz); y is ignored.
    """

    def __init__(
        self,
        kind: Kind = "thermal",
        setup: DetectionSetup | None = None,
        bracket: tuple[float, float] = DEFAULT_BRACKET,
        rel_tol: float = DEFAULT_REL_TOL,
    ):
        self.kind = kind
        self.setup = setup
        self.bracket = bracket
        self.rel_tol = rel_tol

    def _resolved_setup(self) -> DetectionSetup:
        return self.setup if self.setup is not None else DetectionSetup.ideal()

    def fit(self, X, y=None):
        records, X = _records_from_array(X)
        result = fit_pump_constant(
            records, self.kind, self._resolved_setup(), bracket=self.bracket, rel_tol=self.rel_tol
        )
        self.result_ = result
        self.constant_ = result.constant
        self.rss_ = result.rss
        self.per_point_means_ = np.asarray(result.per_point_means)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X) -> np.ndarray:
        """Model rates (n, 3) in Hz for the powers in X's first (or only) column."""
        check_is_fitted(self, "constant_")
        X = check_array(X, ensure_2d=False, dtype=float, ensure_all_finite=True)
        powers = X if X.ndim == 1 else X[:, 0]
        setup = self._resolved_setup()
        _, model = _model_probabilities(self.kind, self.constant_, powers, setup)
        return model * setup.gate_rate_hz


class PairStatisticsClassifier(BaseEstimator):
    """Scikit-learn estimator around :func:`classify`; same X layout as the fitter."""

    def __init__(
        self,
        setup: DetectionSetup | None = None,
        ratio_threshold: float = DEFAULT_RATIO_THRESHOLD,
        bracket: tuple[float, float] = DEFAULT_BRACKET,
        rel_tol: float = DEFAULT_REL_TOL,
    ):
        self.setup = setup
        self.ratio_threshold = ratio_threshold
        self.bracket = bracket
        self.rel_tol = rel_tol

    def fit(self, X, y=None):
        records, X = _records_from_array(X)
        setup = self.setup if self.setup is not None else DetectionSetup.ideal()
        result = classify(
            records,
            setup,
            ratio_threshold=self.ratio_threshold,
            bracket=self.bracket,
            rel_tol=self.rel_tol,
        )
        self.result_ = result
        self.verdict_ = result.verdict
        self.verdict_ratio_ = result.verdict_ratio
        self.rss_by_kind_ = dict(result.rss_by_kind or {})
        self.constant_ = result.constant
        self.n_features_in_ = X.shape[1]
        return self
