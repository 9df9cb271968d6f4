"""Verification engine for submanifolds of locally product Riemannian manifolds.

Given a parametric immersion into a chart with a metric and an almost
product structure, the package computes the per-point first and
second-order invariants (frames, second fundamental form, shape operators,
mean curvature, the tangential/normal split of the structure tensor),
classifies the submanifold as invariant, anti-invariant, semi-invariant or
generic, and numerically verifies the identity suites relating the
covariant derivatives of the structure projections to the second
fundamental form, including the characterization statements for
pseudo-umbilical submanifolds.

All derivatives are exact (truncated Taylor jets); an independent
finite-difference oracle cross-checks them in the test-suite.
"""

from .ambient import (
    AmbientSpace,
    AmbientValidationReport,
    BlockVariableLeak,
    SingularMetric,
    ambient_cov_derivative,
    christoffel,
    product_of,
    validate_ambient,
)
from .calculus import (
    DirectionalContext,
    LemmaReport,
    check_lemma1,
    check_lemma2,
    check_lemmas,
    nabla_C,
    nabla_omega,
    normal_connection,
    tangential_connection,
)
from .catalog import Scenario, UnknownScenario, catalog_get, catalog_list
from .expr import ExprAst, ParseError, UnknownVariable, evaluate, parse, pretty
from .jets import InsufficientJetOrder, Jet, lift_constant, seed_point, seed_variable
from .oracle import FDConfig, fd_derivative, fd_directional, fd_second, fd_third
from .scenario import (
    AmbientValidationFailure,
    DimensionMismatch,
    LoadedScenario,
    ScenarioError,
    Tolerances,
    export_scenario,
    load_scenario,
)
from .subgeom import (
    ClassificationResult,
    DegenerateImmersion,
    Immersion,
    PointGeometry,
    classify,
    f_decompose,
    frames_at,
    is_minimal,
    is_pseudo_umbilical,
    point_geometry,
    pseudo_umbilical_gap,
    second_fundamental_form,
)
from .theorems import (
    NotPseudoUmbilical,
    TheoremVerdict,
    check_theorems,
    theorem2_check,
    theorem3_check,
    theorem4_check,
)

__version__ = "0.1.0"
