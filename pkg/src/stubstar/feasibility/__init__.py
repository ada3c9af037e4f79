"""Integer feasibility systems over stub-star ensembles and their solver."""

from .build import Encoding, StubStarSystem, build_system
from .solver import Enumeration, SearchLimit, enumerate_all, solve_first
from .system import (
    Assignment,
    LinExpr,
    LinearSystem,
    audit_links,
    encode_max,
    encode_min,
)
from .validate import ValidationReport, forest_violations, validate_ensemble
from .count import CountResult, count_ensembles
from .diagnostics import DivergenceReport, eg_divergence_report
