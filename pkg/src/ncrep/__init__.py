"""Representation schemes of finitely presented algebras over Q.

Tangent spaces and Ext groups at rational points via the Hochschild cochain
complex, smoothness certificates, and k-points of the Nori-Hilbert scheme.
"""

__version__ = "0.1.0"

from .exactla import DualScalar, KernelBasis, RationalMatrix, kernel, rank, rref, solve  # noqa: E402
from .ncalg import BimoduleElement, NCPolynomial, Presentation, fox_derivative, nc_multiply  # noqa: E402
from .repscheme import (  # noqa: E402
    CommPolynomial,
    GenericVariable,
    GroupElement,
    RepPoint,
    check_point,
    conjugate,
    emit_ideal_generators,
    evaluate,
    module_isomorphic,
)
from .cohomology import (  # noqa: E402
    CochainData,
    ExtReport,
    ResolutionStep,
    build_complex,
    deformation_check,
    ext_dimensions,
    lift_deformation,
    semicontinuity_scan,
    smooth_certificate,
    tangent_space,
)
from .hilbert import (  # noqa: E402
    CanonicalForm,
    PointedRep,
    abelianization,
    hilb1_points_check,
    hilb_canonical_form,
    hilb_dimension_at,
    is_cyclic,
    krylov_span,
)
from .formats import parse_algebra, format_algebra  # noqa: E402
