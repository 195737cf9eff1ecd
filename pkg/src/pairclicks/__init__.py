"""Click statistics of pulsed photon-pair sources behind a 50/50 splitter.

Models thermal and Poissonian pair-number laws per gate, evaluates the
resulting single and coincidence click rates of two gated threshold detectors
in closed form, compensates dark counts, cross-checks everything against a
photon-level Monte Carlo, and fits the pump constant of measured sweeps.
"""

from .click_model import (
    ClickProbabilities,
    DetectionSetup,
    click_probabilities,
    coincidence_probability,
    coincidence_probability_direct,
    coincidence_rate,
    combined_click_probability,
    enumerate_bruteforce,
    per_pair_click_terms,
    probabilities_for_means,
    single_click_probability,
    single_click_probability_direct,
    single_rate,
)
from .dark_counts import (
    PhotonRates,
    RawRates,
    apply_dark_forward,
    correct_coincidence,
    correct_rates,
    correct_singles,
    invert_dark_exact,
)
from .distributions import (
    KINDS,
    POISSONIAN,
    THERMAL,
    PairDistribution,
    PumpMapping,
)
from .errors import (
    DataError,
    FitError,
    NegativeRateWarning,
    PairClicksError,
    ParameterError,
    SimulationError,
)
from .estimation import (
    CountRecord,
    CurvePoint,
    FitResult,
    PairStatisticsClassifier,
    PumpConstantFitter,
    classify,
    curve,
    fit_pump_constant,
    invert_mean,
    pairs_to_power,
)
from .io import (
    Config,
    Dataset,
    parse_config,
    read_corrected_csv,
    read_counts_csv,
    read_dataset,
    write_corrected_csv,
    write_counts_csv,
)
from .montecarlo import SimConfig, SimResult, simulate, sweep

__version__ = "0.1.0"

__all__ = [
    "ClickProbabilities",
    "Config",
    "CountRecord",
    "CurvePoint",
    "DataError",
    "Dataset",
    "DetectionSetup",
    "FitError",
    "FitResult",
    "KINDS",
    "NegativeRateWarning",
    "POISSONIAN",
    "PairClicksError",
    "PairDistribution",
    "PairStatisticsClassifier",
    "ParameterError",
    "PhotonRates",
    "PumpConstantFitter",
    "PumpMapping",
    "RawRates",
    "SimConfig",
    "SimResult",
    "SimulationError",
    "THERMAL",
    "apply_dark_forward",
    "classify",
    "click_probabilities",
    "coincidence_probability",
    "coincidence_probability_direct",
    "coincidence_rate",
    "combined_click_probability",
    "correct_coincidence",
    "correct_rates",
    "correct_singles",
    "curve",
    "enumerate_bruteforce",
    "fit_pump_constant",
    "invert_dark_exact",
    "invert_mean",
    "pairs_to_power",
    "parse_config",
    "per_pair_click_terms",
    "probabilities_for_means",
    "read_corrected_csv",
    "read_counts_csv",
    "read_dataset",
    "simulate",
    "single_click_probability",
    "single_click_probability_direct",
    "single_rate",
    "sweep",
    "write_corrected_csv",
    "write_counts_csv",
]
