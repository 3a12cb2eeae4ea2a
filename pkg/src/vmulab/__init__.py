"""Graph-state pairability and vertex-minor universality toolkit."""

from .bounds import BoundsReport, bounds_report, local_min_degree, vertex_cover_number
from .graph import Graph, GraphError, local_complement, make_named
from .orbit import (
    Certificate,
    TargetSweepReport,
    check_pairable_clocc,
    check_vmu,
    is_vertex_minor,
    orbit_explore,
    verify_certificate,
)
from .stabsim import graph_state_tableau, run_certificate_protocol, run_robust_protocol

__all__ = [
    "BoundsReport",
    "Certificate",
    "Graph",
    "GraphError",
    "TargetSweepReport",
    "bounds_report",
    "check_pairable_clocc",
    "check_vmu",
    "graph_state_tableau",
    "is_vertex_minor",
    "local_complement",
    "local_min_degree",
    "make_named",
    "orbit_explore",
    "run_certificate_protocol",
    "run_robust_protocol",
    "vertex_cover_number",
    "verify_certificate",
]

__version__ = "0.1.0"
