"""
treecontain - decide whether a phylogenetic network displays a tree
"""

__version__ = "0.1.0"
__author__ = "treecontain Development Team"
__description__ = "Linear-time tree containment for reticulation-visible and nearly stable networks"

from .engine import ContainmentEngine, EngineResult, Verdict, contains, max_reticulation_path, network_profile
from .network import MulTree, Network, Tree, validate
from .newick import parse_network, parse_tree, serialize_network
from .oracle import oracle_displays
from .stability import NetworkClass, classify

__all__ = [
    "ContainmentEngine",
    "EngineResult",
    "MulTree",
    "Network",
    "NetworkClass",
    "Tree",
    "Verdict",
    "classify",
    "contains",
    "max_reticulation_path",
    "network_profile",
    "oracle_displays",
    "parse_network",
    "parse_tree",
    "serialize_network",
    "validate",
]
