"""Exact arithmetic for Jacobian groups of graphs and their abelian
coverings: group-ring Laplacians, Fitting ideals, equivariant zeta
polynomials, and p-power tower invariants."""

from .covering import (
    DerivedCover,
    GammaModule,
    VoltageGraph,
    connectivity_criterion,
    derived_graph,
    dual_module,
    equivariant_laplacian,
    jacobian_module,
    picard_and_jacobian,
    picard_module,
    quotient_by_norm,
    sequence_cardinality_check,
    z_element,
)
from .errors import (
    DisconnectedGraphError,
    ResourceLimitError,
    RingMismatchError,
)
from .fitting import (
    closed_form_shift1,
    fitting_ideal_group_ring,
    module_fitting_ideal,
    shift1_via_presentation,
)
from .graphs import (
    AbelianGroupStructure,
    Graph,
    build_graph,
    graph_from_json,
    graph_to_json,
    jacobian,
    laplacian,
    spanning_tree_count,
)
from .groupring import (
    R,
    RBAR,
    CayleyGroup,
    FinAbGroup,
    GroupRingElement,
    IdealLattice,
    det_group_ring,
    norm_element,
)
from .iwasawa import (
    PadicPolynomial,
    ZpVoltageGraph,
    iwasawa_fit,
    layer_graph,
    layer_orders,
    verify_icnf,
    verify_kida,
    weierstrass_invariants,
    z_power_series,
)
from .theorems import (
    VerificationReport,
    run_corpus,
    verify_decomposition_invariance,
    verify_duality,
    verify_main_theorem,
    verify_norm_identities,
)
from .zeta import (
    GroupRingPoly,
    edge_matrix_zeta,
    euler_product_truncation,
    primitive_rotation_classes,
    verify_three_term,
    zeta_polynomial,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianGroupStructure",
    "CayleyGroup",
    "DerivedCover",
    "DisconnectedGraphError",
    "FinAbGroup",
    "GammaModule",
    "Graph",
    "GroupRingElement",
    "GroupRingPoly",
    "IdealLattice",
    "PadicPolynomial",
    "R",
    "RBAR",
    "ResourceLimitError",
    "RingMismatchError",
    "VerificationReport",
    "VoltageGraph",
    "ZpVoltageGraph",
    "build_graph",
    "closed_form_shift1",
    "connectivity_criterion",
    "derived_graph",
    "det_group_ring",
    "dual_module",
    "edge_matrix_zeta",
    "equivariant_laplacian",
    "euler_product_truncation",
    "fitting_ideal_group_ring",
    "graph_from_json",
    "graph_to_json",
    "iwasawa_fit",
    "jacobian",
    "jacobian_module",
    "laplacian",
    "layer_graph",
    "layer_orders",
    "module_fitting_ideal",
    "norm_element",
    "picard_and_jacobian",
    "picard_module",
    "primitive_rotation_classes",
    "quotient_by_norm",
    "run_corpus",
    "sequence_cardinality_check",
    "shift1_via_presentation",
    "spanning_tree_count",
    "verify_decomposition_invariance",
    "verify_duality",
    "verify_icnf",
    "verify_kida",
    "verify_main_theorem",
    "verify_norm_identities",
    "verify_three_term",
    "weierstrass_invariants",
    "z_element",
    "z_power_series",
    "zeta_polynomial",
]
