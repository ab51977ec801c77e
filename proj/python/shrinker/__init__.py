"""Python access to the shrinker library."""

from ._shrinker import (
    ShrinkerError,
    TriMesh,
    __version__,
    entropy,
    f_density,
    gauss_degree,
    gaussian_area,
    generate,
    read_obj,
    run_criterion,
    set_threads,
    shrinker_residual,
    stability_spectrum,
    tighten,
    translate_dilate,
    width,
    write_obj,
)

__all__ = [
    "ShrinkerError",
    "TriMesh",
    "__version__",
    "entropy",
    "f_density",
    "gauss_degree",
    "gaussian_area",
    "generate",
    "read_obj",
    "run_criterion",
    "set_threads",
    "shrinker_residual",
    "stability_spectrum",
    "tighten",
    "translate_dilate",
    "width",
    "write_obj",
]
