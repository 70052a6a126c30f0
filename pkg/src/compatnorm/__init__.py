"""Compatibility of dichotomic quantum measurements via tensor norms and SDP."""

from .errors import (
    CompatNormError,
    InvalidInput,
    NotAnEffectTuple,
    NotPsd,
    SolverError,
    TooLarge,
    TooManyMeasurements,
)
from .measure import (
    EffectTuple,
    GeneralPovmFamily,
    JointPovm,
    add_white_noise,
    from_tensor,
    is_compatible,
    is_compatible_marginal_form,
    robustness,
    to_tensor,
)
from .norms import (
    ObservableTuple,
    compat_dual_norm,
    compat_norm,
    inj_norm_l1,
    inj_norm_linf,
    proj_norm_l1,
    wit_norm,
    wit_norm_sample_lb,
)
from .regions import gamma_probe, known_gamma, phase_diagram, qc_contains, simplex_contains, tau_star
from .sdp import SdpProblem, SdpSolution, Status, solve
from .witness import WitnessKind, classify, max_violation, witness_from_pair

__version__ = "0.1.0"
