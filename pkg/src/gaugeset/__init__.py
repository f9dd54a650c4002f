"""Gauge integrals of vector functions and of determined multifunctions conv{0, g}."""

__version__ = "0.1.0"

from .convex_geometry import (
    DirectionGrid,
    Segment,
    SupportVector,
    VPolytope,
    Zonotope,
    embed,
    hausdorff_grid,
    hausdorff_segments,
    make_grid,
    support,
)
from .functions import (
    DerivativePathological,
    DeterminedMF,
    ScalarWeight,
    StepVectorFunction,
    determined,
    selection,
)
from .integrators import (
    IntegralResult,
    bang_bang_max,
    birkhoff_integrate,
    henstock_integrate,
    isg_zonotope,
    mcshane_integrate,
    pettis_step,
    variational_defect,
)
from .partitions import (
    ConstantGauge,
    PowerFloorGauge,
    StepGauge,
    TaggedPartition,
    cousin_partition,
    is_delta_fine,
)

__all__ = [
    "__version__",
    "DirectionGrid",
    "Segment",
    "SupportVector",
    "VPolytope",
    "Zonotope",
    "embed",
    "hausdorff_grid",
    "hausdorff_segments",
    "make_grid",
    "support",
    "DerivativePathological",
    "DeterminedMF",
    "ScalarWeight",
    "StepVectorFunction",
    "determined",
    "selection",
    "IntegralResult",
    "bang_bang_max",
    "birkhoff_integrate",
    "henstock_integrate",
    "isg_zonotope",
    "mcshane_integrate",
    "pettis_step",
    "variational_defect",
    "ConstantGauge",
    "PowerFloorGauge",
    "StepGauge",
    "TaggedPartition",
    "cousin_partition",
    "is_delta_fine",
]
