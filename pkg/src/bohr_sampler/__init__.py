"""Random sampling sets for almost periodic and polynomial-phase functions.

Exact left-polar neighborhoods, matching and sampling checks, discrepancy
estimates, certified bounds for rational character families, random block
constructions and t-set diagnostics.
"""

from .config import DEFAULTS, Defaults
from .core import (
    IntegerInterval,
    Interval,
    IntervalUnion,
    PhasePolynomial,
    angular_distance,
    character,
    eval_phase,
)
from .exceptions import (
    BohrSamplerError,
    GridTooLargeError,
    HypothesisError,
    IndependenceError,
    RankDeficiencyError,
    ScheduleError,
)
from .neighborhoods import FunctionFamily, in_P_family, n_left, n_left_exact, n_left_grid, n_left_integer
from .matching import (
    PointSet,
    TrigPolynomial,
    TrigRegressor,
    is_matching_set,
    mat_to_samp_certificate,
    reconstruct_coefficients,
    sampling_inequality_check,
)
from .discrepancy import (
    BoxFamily,
    PhaseEmbedding,
    discrepancy_estimate,
    find_L,
    is_strongly_independent,
    weyl_integral,
)
from .char_bounds import (
    RationalCharacterFamily,
    eqint_check,
    mfetnei1_witnesses,
    mfetnei_reduce,
    mfetneisimpl_reduce,
    sparse_lacunary_interval,
)
from .random_construction import (
    ChirpGrid,
    DependenceReduction,
    GeneratedSet,
    SamplingSchedule,
    aest_bound,
    bd_r_ell_threshold,
    chirp_grid,
    event_A_montecarlo,
    event_B_montecarlo,
    firtsglobal_threshold,
    generate,
    schedule_bd,
)
from .tsets import (
    BlockedSet,
    step_length,
    stl_tset_check,
    translate_intersection,
    ts_r_event_montecarlo,
    ts_r_pair_probability,
    ts_z_bound,
)

__version__ = "0.1.0"
