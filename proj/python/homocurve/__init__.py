"""Elastic shape analysis of curves in homogeneous spaces."""

from ._core import (
    HomocurveError,
    OptimizerConfig,
    align,
    classical_mds,
    distance,
    distance_matrix,
    geodesic,
    horizontal_lift,
    karcher_mean,
    latlon_to_s2,
    parse_hurdat2,
    project,
    q_roundtrip_error,
    read_curve,
    reparametrize,
    resample_geodesic,
    run_cli,
    srv,
    tangent_pca,
    track_to_curve,
    write_curve,
)

__all__ = [
    "HomocurveError",
    "OptimizerConfig",
    "align",
    "classical_mds",
    "distance",
    "distance_matrix",
    "geodesic",
    "horizontal_lift",
    "karcher_mean",
    "latlon_to_s2",
    "parse_hurdat2",
    "project",
    "q_roundtrip_error",
    "read_curve",
    "reparametrize",
    "resample_geodesic",
    "run_cli",
    "srv",
    "tangent_pca",
    "track_to_curve",
    "write_curve",
]
