"""Conservative tangential flow fields and transport on triangulated fissure surfaces."""

from ._core import (
    ConfigError,
    MeshError,
    NumericError,
    Triangulation,
    conservation_residual,
    example_config,
    project_conservative,
    run,
    surface_preset,
    triangulate,
)

__all__ = [
    "ConfigError",
    "MeshError",
    "NumericError",
    "Triangulation",
    "conservation_residual",
    "example_config",
    "project_conservative",
    "run",
    "surface_preset",
    "triangulate",
]
