"""Affine mappability and representation similarity.

Every estimator takes plain ``(N, d)`` float arrays whose rows are aligned.
``estimate_dj(h, g)`` maps the rows of ``g`` onto ``h``.
"""

from ._core import (
    DegenerateInputError,
    FitConfig,
    FormatError,
    HomotopyError,
    IoError,
    OptimizationError,
    ValidationError,
    __version__,
    cca,
    correlate,
    estimate_dj,
    estimate_extrinsic,
    estimate_hausdorff_extrinsic,
    linear_cka,
    linreg_r2,
    load,
    preorder_verdict,
    procrustes,
    rank_to_precision,
    sample_classifier,
    save,
    svd_truncate_rank,
    synth,
)

__all__ = [
    "DegenerateInputError",
    "FitConfig",
    "FormatError",
    "HomotopyError",
    "IoError",
    "OptimizationError",
    "ValidationError",
    "__version__",
    "cca",
    "correlate",
    "estimate_dj",
    "estimate_extrinsic",
    "estimate_hausdorff_extrinsic",
    "linear_cka",
    "linreg_r2",
    "load",
    "preorder_verdict",
    "procrustes",
    "rank_to_precision",
    "sample_classifier",
    "save",
    "svd_truncate_rank",
    "synth",
]
