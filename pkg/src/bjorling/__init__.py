"""Minimal surfaces through planar geodesics.

Construct the Schwarz solution of the Björling problem for real-analytic
planar curves, extract Weierstrass data, and analyze the epitrochoid family:
degeneration points of the induced metric, zero/pole order tables on the
hyperelliptic model, and the finite-distance obstruction to completeness.
"""

from .analysis import (
    DegeneracyReport,
    NonConvergent,
    OrderRow,
    OrderTable,
    VModel,
    degeneracy_points,
    expected_orders,
    obstruction_report,
    order_estimate,
    order_table,
    strip_halfwidth,
    v_model,
)
from .continuation import (
    BranchJump,
    BranchValue,
    PathPolyline,
    SingularityOnPath,
    nearest_zero_distance,
    singularity_scan,
    speed_squared,
    sqrt_along_path,
    strip_sqrt,
)
from .curves import (
    EpitrochoidParams,
    InvalidCurveParameters,
    PlanarCurve,
    TrigPolySeries,
    curve_from_config,
    epitrochoid_from_radii,
    make_circle,
    make_cycloid,
    make_epitrochoid,
    make_parabola,
    regularity_margin,
)
from .meshing import (
    SurfaceMesh,
    clip_halfspace,
    export_csv,
    export_obj,
    export_ply,
    load_obj,
    mesh_area,
    sample_mesh,
)
from .schwarz import (
    HolomorphicTriple,
    PatchGrid,
    QuadratureFailure,
    StripTooWide,
    phi,
    planar_normal,
    schwarz_integrate,
    strip_limit,
    surface_patch,
    surface_point,
)
from .verify import (
    DegenerateMetric,
    VerificationReport,
    geodesic_residual,
    mean_curvature_residual,
    symmetry_residual,
    verification_report,
)
from .weierstrass import (
    DivisionNearZero,
    WeierstrassData,
    data_from_curve,
    data_from_phi,
    gauss_map_check,
    metric_density,
    period_residual,
    stereographic,
)

__version__ = "0.1.0"
