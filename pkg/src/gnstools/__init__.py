"""Numerical toolkit for GNS representations, modular data and gauge entropy
on finite-dimensional operator algebras with a faithful state."""

from .algebra import (
    AlgebraElement,
    AlgebraShape,
    FaithfulState,
    MatrixUnitSystem,
    canonical_matrix_units,
    random_element,
    random_hermitian,
    random_unitary,
)
from .bipartite import BipartiteModel, OracleMismatch, oracle_suite
from .channels import (
    EntropyGap,
    EntropyReport,
    ExtremizeOptions,
    ExtremizeResult,
    GaugeElement,
    GaugeProjectorFamily,
    KrausChannel,
    apply_channel,
    commutant_entropy,
    commutant_relative_entropy,
    commutant_trace,
    entropy_gap,
    extremize_entropy,
    gauge_measured_state,
    gauge_projectors,
    lift_gauge,
    measurement_weights,
    projective_channel,
    random_commutant_channel,
    restrict_to_commutant,
    state_mirror,
)
from .errors import (
    InvalidChannelError,
    InvalidDensityError,
    InvalidGaugeError,
    NotFaithfulError,
    NumericalError,
    ShapeMismatchError,
)
from .gns import GnsRep, build_gns, represent, restrict_to_algebra, unrepresent
from .modular import (
    AntilinearOp,
    ModularData,
    algebra_image_basis,
    build_modular,
    commutant,
    gauge_commutant_distance,
    generating_unitaries,
    joint_commutant,
    lifted_gauge_unitary,
    modular_flow_residual,
    polar_decompose,
    tomita_operator,
)

__version__ = "0.1.0"
