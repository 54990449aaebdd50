"""Leader-follower continuum-deformation coordination: simulation and verification."""

from .continuum import (
    HomogeneousTransform,
    WeightTable,
    build_weight_table,
    communication_weights,
    desired_position,
    solve_transform,
    validate_scenario_structure,
)
from .conditions import PSI_NAMES, build_conditions, build_psi
from .dynamics import ControlGains, SimulationFault, Trace, follower_acceleration, simulate
from .formula_text import FormulaSyntaxError, formula_to_text, parse_formula
from .geometry import (
    DegenerateSimplexError,
    GeometryError,
    Simplex,
    barycentric,
    boundary_distance,
    classify_region,
    contains,
    min_pairwise_distance,
)
from .ltl import ExprError, Verdict, Witness, eval_expr, satisfies
from .safety import (
    SafetyMargins,
    check_leader_only,
    check_theorem1,
    compute_margins,
    deformation_eigenvalues,
    deformation_spectrum,
    derive_margins,
)
from .scenario import Scenario, ScenarioError, load_scenario, save_scenario
from .trace_io import read_trace, write_trace
from .trajectory import WaypointPath

__version__ = "0.1.0"

__all__ = [
    "ControlGains",
    "DegenerateSimplexError",
    "ExprError",
    "FormulaSyntaxError",
    "GeometryError",
    "HomogeneousTransform",
    "PSI_NAMES",
    "SafetyMargins",
    "Scenario",
    "ScenarioError",
    "Simplex",
    "SimulationFault",
    "Trace",
    "Verdict",
    "WaypointPath",
    "WeightTable",
    "Witness",
    "barycentric",
    "boundary_distance",
    "build_conditions",
    "build_psi",
    "build_weight_table",
    "check_leader_only",
    "check_theorem1",
    "classify_region",
    "communication_weights",
    "compute_margins",
    "contains",
    "deformation_eigenvalues",
    "deformation_spectrum",
    "derive_margins",
    "desired_position",
    "eval_expr",
    "follower_acceleration",
    "formula_to_text",
    "load_scenario",
    "min_pairwise_distance",
    "parse_formula",
    "read_trace",
    "satisfies",
    "save_scenario",
    "simulate",
    "solve_transform",
    "validate_scenario_structure",
    "write_trace",
]
