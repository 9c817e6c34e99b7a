"""Logarithmic densities of r-way prime races in abelian number fields."""

from .construct import (
    Caps,
    ConstructionError,
    build_b_dense_family,
    build_theorem_c_prefix,
    build_u_dense_family,
    moderacy_report,
    prime_density_step,
)
from .density import decomposition_check, delta_r_way, delta_three_way, delta_two_way
from .fields import cyclotomic_subgroup, multiquadratic, parse_field_spec
from .gaussian import mvn_cdf, w_r
from .partitions import bell_number, lambda_operator, set_partitions
from .race import RaceSpec, bias_B, covariance_matrix, mean_E, u_map, variance_V
from .simulate import SimConfig, empirical_delta, sample_mu
from .zeros import (
    ASYMPTOTIC,
    ZERO_DATA,
    ZeroArchive,
    build_field_archive,
    find_zeros_real_character,
    ingest_zeros,
    write_archive,
)

__version__ = "0.1.0"

__all__ = [
    "ASYMPTOTIC",
    "Caps",
    "ConstructionError",
    "RaceSpec",
    "SimConfig",
    "ZERO_DATA",
    "ZeroArchive",
    "bell_number",
    "bias_B",
    "build_b_dense_family",
    "build_field_archive",
    "build_theorem_c_prefix",
    "build_u_dense_family",
    "covariance_matrix",
    "cyclotomic_subgroup",
    "decomposition_check",
    "delta_r_way",
    "delta_three_way",
    "delta_two_way",
    "empirical_delta",
    "find_zeros_real_character",
    "ingest_zeros",
    "lambda_operator",
    "mean_E",
    "moderacy_report",
    "multiquadratic",
    "mvn_cdf",
    "parse_field_spec",
    "prime_density_step",
    "sample_mu",
    "set_partitions",
    "u_map",
    "variance_V",
    "w_r",
    "write_archive",
]
