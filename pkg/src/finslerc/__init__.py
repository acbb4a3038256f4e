"""Finsler-geometry curvature engine and special-space classifier.

Evaluate the Cartan-connection curvature apparatus of a Finsler metric
(given as a DSL expression or a built-in family) at points of the slit
tangent bundle, and decide membership in the Ricci, generalized Ricci,
semi-isotropic and recurrence classes with per-point residuals.
"""

__version__ = "0.1.0"

from .cartan import (ConnectionData, connection_at, fundamental_tensor,
                     h_covariant_derivative, h_curvature, hv_and_v_curvature,
                     v_covariant_derivative)
from .classify import (PointClassification, Verdict, classify_point,
                       verify_theorems)
from .dsl import (MetricExpr, MetricSpec, builtin_family, check_homogeneity,
                  eval_expr, metric_from_json, parse_metric)
from .fdcheck import FDConfig, fd_covariant_commutator, fd_partial
from .jets import Jet, JetSpace, constant_jet, jet_space, seed_jets
from .report import RunConfig, emit_report, run, sample_points
from .special import (SpecialTensors, property_suite_residuals,
                      semi_isotropic_residual, special_tensors)
from .tensors import (ComponentTensor, TangentPoint, contract, raise_lower,
                      rank1_fit, sym_eigenvalues)

__all__ = [
    "__version__",
    "ConnectionData", "connection_at", "fundamental_tensor",
    "h_covariant_derivative", "h_curvature", "hv_and_v_curvature",
    "v_covariant_derivative",
    "PointClassification", "Verdict", "classify_point", "verify_theorems",
    "MetricExpr", "MetricSpec", "builtin_family", "check_homogeneity",
    "eval_expr", "metric_from_json", "parse_metric",
    "FDConfig", "fd_covariant_commutator", "fd_partial",
    "Jet", "JetSpace", "constant_jet", "jet_space", "seed_jets",
    "RunConfig", "emit_report", "run", "sample_points",
    "SpecialTensors", "property_suite_residuals", "semi_isotropic_residual",
    "special_tensors",
    "ComponentTensor", "TangentPoint", "contract", "raise_lower",
    "rank1_fit", "sym_eigenvalues",
]
