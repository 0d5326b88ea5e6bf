"""hgkit: almost hypercomplex manifolds with Hermitian and Norden metrics.

Builds (H, G)-structures on finite-dimensional models, constructs the
combined connection with totally skew-symmetric torsion, and numerically
verifies the structural, classification and curvature identities of that
geometry.  See the README for the CLI and the acceptance suite.
"""

from ._backend import BACKEND, COMPILED
from .tensor_core import (
    DEFAULT_RTOL,
    EPSILON,
    Dim,
    HypercomplexTriple,
    Metric,
    associated_forms,
    check_structure,
    standard_hypercomplex,
    standard_metric,
)
from .model import (
    LieAlgebraModel,
    PointModel,
    abelian_model,
    curvature_R,
    derive_F3,
    levi_civita,
    nabla_J,
    random_model,
    sample_point_model,
)
from .structural import (
    fundamental_identity_residuals,
    nijenhuis,
    square_norm,
    structural_F,
)
from .classify import (
    ClassificationReport,
    class_nullspace_dimension,
    class_residuals,
    dimension_gate,
    project_to_classes,
    w133_identity_suite,
)
from .connection import (
    connection_D,
    kt_potential_hermitian,
    kt_potential_norden,
    naturality_residuals,
    phkt_potential,
    torsion,
    torsion_derivatives,
)
from .curvature import (
    hyper_curvature_residuals,
    kahler_like_nullspace,
    kr_relation_residual,
    nearly_kahler_curvature_residuals,
    ricci_identity_residuals,
    scalar_relations,
    strong_weak_flat_report,
)
from .search import perturb, search_class

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "COMPILED", "DEFAULT_RTOL", "EPSILON",
    "Dim", "Metric", "HypercomplexTriple",
    "standard_hypercomplex", "standard_metric", "check_structure",
    "associated_forms",
    "LieAlgebraModel", "PointModel", "abelian_model", "random_model",
    "levi_civita", "curvature_R", "nabla_J", "derive_F3", "sample_point_model",
    "structural_F", "fundamental_identity_residuals", "square_norm", "nijenhuis",
    "ClassificationReport", "class_residuals", "project_to_classes",
    "class_nullspace_dimension", "w133_identity_suite", "dimension_gate",
    "kt_potential_hermitian", "kt_potential_norden", "phkt_potential",
    "connection_D", "naturality_residuals", "torsion", "torsion_derivatives",
    "kahler_like_nullspace", "nearly_kahler_curvature_residuals",
    "ricci_identity_residuals", "hyper_curvature_residuals",
    "scalar_relations", "kr_relation_residual", "strong_weak_flat_report",
    "search_class", "perturb",
    "__version__",
]
