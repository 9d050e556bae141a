"""Word-trace averages, pinching and counterexample search for two PSD matrices."""

from .numeric import (
    ContractViolation,
    SpectralDecomposition,
    UnsupportedInput,
    exact_matrix,
    float_matrix,
    psd_check,
    random_psd,
    spectral_decompose,
)
from .pinching import pinch, pinched_average, sandwich_check, two_b_closed_form
from .words import (
    clustered_trace,
    trace_polynomial,
    word_average,
    word_average_compositions,
    word_average_enumeration,
    word_average_from_polynomial,
)
from .bridges import bridge_report, composition_trace_identity
from .cha import cha_exact_values, cha_pair
from .harness import (
    SearchConfig,
    search_counterexample,
    test_clustered_upper,
    test_pinching_conjecture,
)
from .report import InequalityReport

__version__ = "0.1.0"
