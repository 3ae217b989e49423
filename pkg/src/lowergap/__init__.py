"""Certified lower spectral gap inequalities for Cayley-type and vertex-transitive graphs."""

from .certify import CertificateReport, CertifyOptions, CheckResult, certify_instance
from .corpus import acceptance_corpus
from .errors import LowerGapError
from .freiman import correlation_profile, dichotomy_test, extract_index_two, verify_left2right
from .graphs import SpectralInstance, build_instance, vertex_transitive_instance
from .groups import FiniteGroup, GroupAction, builtin_group, group_from_permutation_generators
from .instances import load_family_spec, load_instance
from .invariants import combinatorial_constants
from .scan import scan_family
from .spectral import bottom_eigenfunction, derived_constants, spectrum

__version__ = "0.1.0"

__all__ = [
    "CertificateReport", "CertifyOptions", "CheckResult", "FiniteGroup", "GroupAction", "LowerGapError",
    "SpectralInstance", "acceptance_corpus", "bottom_eigenfunction", "build_instance", "builtin_group",
    "certify_instance", "combinatorial_constants", "correlation_profile", "derived_constants",
    "dichotomy_test", "extract_index_two", "group_from_permutation_generators", "load_family_spec",
    "load_instance", "scan_family", "spectrum", "verify_left2right", "vertex_transitive_instance",
]
