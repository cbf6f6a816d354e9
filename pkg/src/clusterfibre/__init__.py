"""Special fibres of minimal SNC models of tame hyperelliptic curves, computed
from cluster pictures."""

from __future__ import annotations

from .cluster_model import Cluster, ClusterPicture, Orbit, PictureError
from .fibre_graph import FibreComponent, FibreGraph
from .snc_assembler import assemble, kodaira_type

__all__ = [
    "Cluster",
    "ClusterPicture",
    "Orbit",
    "PictureError",
    "FibreComponent",
    "FibreGraph",
    "assemble",
    "kodaira_type",
]

__version__ = "0.1.0"
