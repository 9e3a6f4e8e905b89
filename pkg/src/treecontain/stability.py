"""Stability witnesses and network classification.

A vertex v is stable on a leaf l when every root-l path contains v, which is
exactly "v dominates l" in the DAG rooted at r(N). Dominators come from
networkx's iterative intersection algorithm; witnesses are then pushed up the
dominator tree so every vertex gets one leaf below it in that tree.
"""

from enum import Enum
from typing import Dict, List, Optional

import networkx as nx

from .network import Network


class NetworkClass(str, Enum):
    """Strongest class a network belongs to"""

    RETICULATION_VISIBLE = "reticulation-visible"
    NEARLY_STABLE = "nearly-stable"
    GENERAL_OK = "general"
    UNSUPPORTED = "unsupported"


def stability_witnesses(net: Network) -> Dict[int, Optional[str]]:
    """Map every vertex to a label it is stable on, or None"""
    if net.root is None:
        return {v: None for v in net.vertices()}
    idom = nx.immediate_dominators(net.to_networkx(), net.root)
    dom_children: Dict[int, List[int]] = {v: [] for v in idom}
    for v, d in idom.items():
        if v != d:
            dom_children[d].append(v)

    witness: Dict[int, Optional[str]] = {v: None for v in net.vertices()}
    stack = [(net.root, False)]
    while stack:
        v, done = stack.pop()
        if not done:
            stack.append((v, True))
            stack.extend((c, False) for c in dom_children[v])
            continue
        if net.is_leaf(v):
            witness[v] = net.label(v)
        else:
            for c in dom_children[v]:
                if witness[c] is not None:
                    witness[v] = witness[c]
                    break
    return witness


def is_reticulation_visible(net: Network, witnesses: Optional[Dict[int, Optional[str]]] = None) -> bool:
    witnesses = stability_witnesses(net) if witnesses is None else witnesses
    return all(witnesses[r] is not None for r in net.reticulations())


def is_nearly_stable(net: Network, witnesses: Optional[Dict[int, Optional[str]]] = None) -> bool:
    witnesses = stability_witnesses(net) if witnesses is None else witnesses
    for v in net.vertices():
        if witnesses[v] is None and not all(witnesses[p] is not None for p in net.parents(v)):
            return False
    return True


def precondition_violation(net: Network, witnesses: Optional[Dict[int, Optional[str]]] = None) -> Optional[int]:
    """First tree vertex with a reticulation parent that is not stable"""
    witnesses = stability_witnesses(net) if witnesses is None else witnesses
    for v in sorted(net.vertices()):
        parents = net.parents(v)
        if len(parents) == 1 and net.is_reticulation(parents[0]) and witnesses[v] is None:
            return v
    return None


def classify(net: Network) -> NetworkClass:
    """Strongest matching class of a valid network"""
    witnesses = stability_witnesses(net)
    if is_reticulation_visible(net, witnesses):
        return NetworkClass.RETICULATION_VISIBLE
    if is_nearly_stable(net, witnesses):
        return NetworkClass.NEARLY_STABLE
    if precondition_violation(net, witnesses) is None:
        return NetworkClass.GENERAL_OK
    return NetworkClass.UNSUPPORTED
