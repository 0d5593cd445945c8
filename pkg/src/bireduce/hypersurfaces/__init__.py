"""Invariant hypersurfaces of cohomogeneity-two actions on Euclidean space."""

from .actions import (
    OrbitAction,
    action_catalog,
    action_from_descriptor,
    lookup_action,
    rotational,
    so2_so_m,
    so_p_so_q,
    sp2_sp_m,
    su2_um,
)
from .geometry import (
    BoundaryProximityError,
    CurvatureReport,
    ProfileCurve,
    biharmonic_residuals,
    bitension_explicit_d2,
    bitension_variational,
    cone_mean_f,
    curvatures,
    in_cone,
    mean_f_jet,
    minimal_cone_angles,
    ray_curve,
    tangential_identity_d2,
    tension_d2,
    volume_sq,
    w_form,
)
from .flows import CSV_COLUMNS, FlowResult, biconservative_flow, biharmonic_flow, cmc_flow, polyline_csv

__all__ = [
    "BoundaryProximityError",
    "CSV_COLUMNS",
    "CurvatureReport",
    "FlowResult",
    "OrbitAction",
    "ProfileCurve",
    "action_catalog",
    "action_from_descriptor",
    "biconservative_flow",
    "biharmonic_flow",
    "biharmonic_residuals",
    "bitension_explicit_d2",
    "bitension_variational",
    "cmc_flow",
    "cone_mean_f",
    "curvatures",
    "in_cone",
    "lookup_action",
    "mean_f_jet",
    "minimal_cone_angles",
    "polyline_csv",
    "ray_curve",
    "rotational",
    "so2_so_m",
    "so_p_so_q",
    "sp2_sp_m",
    "su2_um",
    "tangential_identity_d2",
    "tension_d2",
    "volume_sq",
    "w_form",
]
