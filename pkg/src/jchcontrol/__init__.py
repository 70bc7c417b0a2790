"""Controllability certification for excitation-truncated Jaynes-Cummings-Hubbard models."""

__version__ = "0.1.0"

from .exceptions import PreconditionError, ResourceLimitError  # noqa: E402
from .hilbert import BasisState, TruncatedSpace, block_dimensions, enumerate_basis, two_cavity_order  # noqa: E402
from .operators import BlockOperator, ModelParams, build, project_block, project_joint, propagate  # noqa: E402

__all__ = [
    "BasisState", "BlockOperator", "ModelParams", "PreconditionError", "ResourceLimitError",
    "TruncatedSpace", "block_dimensions", "build", "enumerate_basis", "project_block",
    "project_joint", "propagate", "two_cavity_order",
]
