"""Curvature-homogeneous 3-metrics from a pair of scalar functions.

Construction and numeric verification of the warped metric family
(cosh u - h sinh u)^2 dx^2 + (du - f v dx)^2 + (dv + f u dx)^2, together
with the hyperbolic-plane foliation picture behind it and the free-group
length-function combinatorics of its fundamental groups.
"""

from .metric import ChartPoint, Frame, MetricSpec

__all__ = ["ChartPoint", "Frame", "MetricSpec"]
__version__ = "0.1.0"
