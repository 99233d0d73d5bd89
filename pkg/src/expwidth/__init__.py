"""Logarithmic densities of complex point distributions, widths of convex
bodies, and completeness criteria for exponential systems at a finite horizon."""

from .convexgeom import EMPTY, Disk, Polygon, Strip, breadth, diameter, point_cloud, support, width
from .criteria import (
    EstimationParams,
    Verdict,
    breadth_criterion,
    critical_width,
    diameter_sufficient,
    theorem1_verdict,
    theorem2_verdict,
)
from .divisor import (
    Annulus,
    ClosedDisk,
    PointDistribution,
    Sector,
    count,
    difference,
    rotate,
    scale,
    sector_part,
    union,
    upper_density,
)
from .generators import generate
from .logmeasure import (
    IntervalMeasureTable,
    block_density,
    check_submeasure_axioms,
    density_report,
    left_log_measure,
    log_submeasure,
    right_log_measure,
)

__all__ = [
    "EMPTY", "Disk", "Polygon", "Strip", "breadth", "diameter", "point_cloud", "support", "width",
    "EstimationParams", "Verdict", "breadth_criterion", "critical_width", "diameter_sufficient",
    "theorem1_verdict", "theorem2_verdict",
    "Annulus", "ClosedDisk", "PointDistribution", "Sector", "count", "difference", "rotate", "scale",
    "sector_part", "union", "upper_density", "generate",
    "IntervalMeasureTable", "block_density", "check_submeasure_axioms", "density_report",
    "left_log_measure", "log_submeasure", "right_log_measure",
]
