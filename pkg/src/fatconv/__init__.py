"""Uniform convergence machinery for finite real-valued function classes."""
from .classes import (
    Distribution, EmpiricalRestriction, FunctionClass, SampleVector, exact_mean,
    make_full_binary_class, make_threshold_class, random_class, restrict,
)
from .dimensions import ShatterCertificate, check_certificate, fat_dim, is_shattered, vc_dim
from .geometry import (
    UNIT_PROFILE, BoundConstants, SeparatedNet, distance, greedy_net,
    calibrate_C_tilde, packing_number_exact, rv_packing_bound,
)
from .chaining import ChainStructure, build_chain, chain_depth, increment_halved_norm, verify_chain
from .empirical import (
    RademacherLaw, TailEstimate, hoeffding_tail, multiscale_bound, rademacher_sup_tail,
    sup_deviation, symmetrization_threshold, symmetrized_deviation_tail,
    tail_probability_mc, weight_schedule,
)
from .bounds import compare_bounds, legacy_sample_bound, theorem_sample_bound
from .errors import ConfigError, InvalidArgument, InvalidSample, SizeLimitError

__version__ = "0.1.0"
