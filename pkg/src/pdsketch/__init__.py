"""pdsketch: greedy sketches of persistence diagrams.

Preprocess a persistence diagram into a nested sequence of reweighted
sub-diagrams with precomputed optimal transportation plans, stored in O(n)
space, and use the sketches for fast approximate bottleneck and Hausdorff
distance computation with certified error bounds.
"""

from .diagram import DIAG, Diagram, Point, diag_dist, diag_proj, linf_dist, parse_diagram, serialize_diagram
from .errors import (
    ParseError,
    PDSketchError,
    PrecisionUnreachableError,
    PreconditionError,
    UnsupportedInputError,
    ValidationError,
)
from .greedy import BuildStats, GreedyResult, build_sketch, keep_edge
from .sketch import Sketch, TransportationPlan, build, from_greedy, read_sketch, write_sketch

__all__ = [
    "DIAG",
    "Diagram",
    "Point",
    "diag_dist",
    "diag_proj",
    "linf_dist",
    "parse_diagram",
    "serialize_diagram",
    "PDSketchError",
    "ParseError",
    "ValidationError",
    "UnsupportedInputError",
    "PreconditionError",
    "PrecisionUnreachableError",
    "BuildStats",
    "GreedyResult",
    "build_sketch",
    "keep_edge",
    "Sketch",
    "TransportationPlan",
    "build",
    "from_greedy",
    "read_sketch",
    "write_sketch",
]

__version__ = "0.1.0"
