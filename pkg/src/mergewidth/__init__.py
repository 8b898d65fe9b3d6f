"""Merge-width toolkit: merge sequences, flip metrics, width variants and their applications."""

from __future__ import annotations

from .flips import FlipConfig, FlipSpec, Mode, ResolvedSet, flip_ball, flip_balls, flip_dist, homogeneous_modulo
from .graph import (
    BudgetExceeded,
    Graph,
    Partition,
    PartitionChain,
    VertexOrder,
    atomic_types,
    neighbourhood_complexity,
    s_refinement,
    vc_dimension,
)
from .sequences import (
    MergeSequence,
    TransientSequence,
    canonicalize,
    firmness,
    shape_metrics,
    transient_width,
    verify_merge,
    verify_transient,
    width_merge,
)
from .widths import definable_width, exact_width, infinite_radius, partition_width

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "FlipConfig",
    "FlipSpec",
    "Graph",
    "MergeSequence",
    "Mode",
    "Partition",
    "PartitionChain",
    "ResolvedSet",
    "TransientSequence",
    "VertexOrder",
    "atomic_types",
    "canonicalize",
    "definable_width",
    "exact_width",
    "firmness",
    "flip_ball",
    "flip_balls",
    "flip_dist",
    "homogeneous_modulo",
    "infinite_radius",
    "neighbourhood_complexity",
    "partition_width",
    "s_refinement",
    "shape_metrics",
    "transient_width",
    "vc_dimension",
    "verify_merge",
    "verify_transient",
    "width_merge",
]
