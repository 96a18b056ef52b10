"""Scribble synthesis from dense 3D label volumes, partial losses with
verified gradients, and Dice benchmark reporting."""

from scribkit._core import (
    NiftiError,
    Volume,
    aggregate,
    default_config,
    dice_per_class,
    evaluate_nurbs,
    finite_diff_check,
    generate_scribbles,
    partial_cross_entropy,
    partial_dice,
    partial_loss,
    read_nifti,
    scribble_stats,
    synthesize_phantom,
    write_nifti,
    __version__,
)

__all__ = [
    "NiftiError",
    "Volume",
    "aggregate",
    "default_config",
    "dice_per_class",
    "evaluate_nurbs",
    "finite_diff_check",
    "generate_scribbles",
    "partial_cross_entropy",
    "partial_dice",
    "partial_loss",
    "read_nifti",
    "scribble_stats",
    "synthesize_phantom",
    "write_nifti",
    "__version__",
]
