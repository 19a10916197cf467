"""Design and evaluation of generalized fuzzy multiple deferred state (GFMDS) attribute sampling plans."""

from .errors import ConsistencyError, DomainError
from .fuzzy import Interval, PentagonalFuzzy, TriangularFuzzy, alpha_cut_pentagonal, alpha_cut_triangular, theta_shift
from .kernels import DistModel, DspParams, PlanParams, SspParams, asn_dsp, pa_dsp, pa_gmds, pa_mds, pa_ssp, tail_cdf
from .fuzzyprob import (
    InspectionErrors,
    apply_inspection_errors,
    ati_band,
    pa_band,
    pa_band_with_errors,
)
from .bands import FocBandPoint, foc_band
from .design import (
    DesignResult,
    OCRequirement,
    SearchLimits,
    compare_asn,
    design_dsp,
    design_gmds,
    design_mds,
    design_ssp,
)
from .simulate import SimConfig, SimResult, simulate_gmds

__version__ = "0.1.0"
