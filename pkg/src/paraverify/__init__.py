"""Numerical verification of almost paracontact metric geometry.

The package represents coordinate expressions as evaluable trees (exact first
and second derivatives via second-order forward-mode numbers), builds
pseudo-Riemannian metrics, structure tensors, immersions and warped products
on top of them, and verifies the defining identities and classification
criteria at sampled points.  ``scenarios`` bundles everything into named,
reproducible verification runs; the ``paraverify`` CLI drives them.
"""

from .errors import (
    DegenerateMetricError,
    EvaluationDomainError,
    ExpressionSyntaxError,
    FrameDegeneracyError,
    ParaverifyError,
    ScenarioError,
    SignatureMismatchError,
    UnknownIdentifierError,
    UnsupportedValenceError,
)
from .expressions import ScalarExpr, eval_hyperdual, eval_value, parse_expression
from .hyperdual import HyperDual
from .manifold import (
    Chart,
    MetricField,
    TensorField,
    chart,
    christoffel,
    coordinate_field,
    cov_deriv_tensor,
    cov_deriv_vector,
    covector_field,
    lie_bracket,
    sample_points,
    vector_field,
)
from .paracontact import (
    ParacontactStructure,
    check_almost_paracontact_metric,
    classify_structure,
    fundamental_two_form,
)
from .report import CheckResult, VerificationReport, VerifyConfig
from .scenarios import (
    Scenario,
    get_scenario,
    list_scenarios,
    load_scenario_file,
    run_scenario,
)
from .submanifold import (
    DistributionSpec,
    Immersion,
    PointFrame,
    build_point_frame,
    classify_submanifold,
    classify_umbilic,
    distribution_integrability,
    immersion,
    induced_metric,
    second_fundamental_data,
    second_fundamental_form,
    shape_operator,
    tn_decompose,
    warped_shape_criterion,
)
from .warped import (
    WarpedSpec,
    build_doubly_warped_metric,
    build_warped_metric,
    detect_warped_splitting,
)

__version__ = "0.1.0"
