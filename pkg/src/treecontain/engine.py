"""Tree containment main loop"""

import random
import time
from enum import Enum
from typing import Dict, List, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, Field

from .config import EngineConfig
from .decomposition import (
    DecompositionError,
    build_component_dag,
    build_reticulation_leaf_map,
    pop_pyramid,
    retire_component,
)
from .multree import maximal_displayed
from .network import (
    LabelMismatchError,
    MulTree,
    Network,
    Tree,
    UnsupportedNetworkError,
    require_valid,
)
from .reductions import (
    LabelFactory,
    apply_cherry_reductions,
    apply_pyramid_placement,
    find_anchor_leaf,
    pyramid_to_multree,
    select_anchored_maximum,
)
from .stability import NetworkClass, classify, precondition_violation, stability_witnesses


class Verdict(str, Enum):
    """Answer of a containment check"""

    YES = "yes"
    NO = "no"
    UNSUPPORTED = "unsupported"


class TraceEvent(BaseModel):
    """One reduction step"""

    kind: str
    rho: Optional[int] = None
    tip: int = 0
    base: int = 0
    base_height: int = 0
    anchor: Optional[str] = None
    placed: Optional[int] = None
    label: Optional[str] = None
    pair: Optional[Tuple[str, str]] = None


class RunTrace(BaseModel):
    """Counters and events of one engine run"""

    initial_size: int = 0
    cherries_reduced: int = 0
    pyramids: int = 0
    degenerate_pyramids: int = 0
    tip_total: int = 0
    max_multiplicity: int = 0
    max_base_height: int = 0
    events: List[TraceEvent] = Field(default_factory=list)
    phase_seconds: Dict[str, float] = Field(default_factory=dict)

    @property
    def budget_ok(self) -> bool:
        """Sum of tip sizes stays within |N|"""
        return self.tip_total <= self.initial_size


class EngineResult(BaseModel):
    """Verdict plus trace"""

    verdict: Verdict
    trace: RunTrace
    diagnostic: Optional[str] = None

    @property
    def displays(self) -> bool:
        return self.verdict == Verdict.YES


class NetworkProfile(BaseModel):
    """Summary reported by `treecontain classify`"""

    network_class: NetworkClass
    vertices: int
    arcs: int
    leaves: int
    reticulations: int
    max_reticulation_path: int
    violation: Optional[int] = None


def max_reticulation_path(net: Network) -> int:
    """Arc count of the longest path whose vertices, except the last, are reticulations"""
    longest: Dict[int, int] = {}
    best = 0
    for v in reversed(net.topological_order()):
        if not net.is_reticulation(v):
            continue
        child = net.children(v)[0]
        longest[v] = 1 + longest.get(child, 0)
        best = max(best, longest[v])
    return best


def network_profile(net: Network) -> NetworkProfile:
    witnesses = stability_witnesses(net)
    network_class = classify(net)
    return NetworkProfile(
        network_class=network_class,
        vertices=net.num_vertices,
        arcs=net.num_arcs,
        leaves=len(net.leaves()),
        reticulations=net.num_reticulations,
        max_reticulation_path=max_reticulation_path(net),
        violation=precondition_violation(net, witnesses) if network_class == NetworkClass.UNSUPPORTED else None,
    )


def _single_leaf(net: Network) -> Optional[str]:
    if net.root is not None and net.num_vertices == 1:
        return net.label(net.root)
    return None


class ContainmentEngine:
    """Decides whether a network displays a tree.

    Works on copies of its inputs: cherry reduction first, then pyramids are
    taken bottom-up from the component DAG and placed one at a time.
    """

    def __init__(self, config: Optional[EngineConfig] = None):
        self.config = config or EngineConfig()
        self.rng = random.Random(self.config.seed) if self.config.seed is not None else None
        self.trace = RunTrace()
        self._clock = 0.0

    def _phase(self, name: str) -> None:
        now = time.perf_counter()
        if self._clock:
            self.trace.phase_seconds[name] = self.trace.phase_seconds.get(name, 0.0) + now - self._clock
        self._clock = now

    def _event(self, **fields) -> None:
        if self.config.trace == "full":
            self.trace.events.append(TraceEvent(**fields))

    def _finish(self, verdict: Verdict, diagnostic: Optional[str] = None) -> EngineResult:
        logger.info(f"Verdict: {verdict.value}" + (f" ({diagnostic})" if diagnostic else ""))
        if self.config.trace == "off":
            trace = RunTrace(initial_size=self.trace.initial_size, tip_total=self.trace.tip_total)
        else:
            trace = self.trace
        return EngineResult(verdict=verdict, trace=trace, diagnostic=diagnostic)

    def _reduce_cherries(self, net: Network, t: Network, seeds=None) -> bool:
        report = apply_cherry_reductions(net, t, seeds)
        self.trace.cherries_reduced += len(report.pairs)
        for pair in report.pairs:
            self._event(kind="cherry", pair=pair)
        return not report.rejected

    def run(self, network: Network, tree: Network) -> EngineResult:
        self.trace = RunTrace(initial_size=network.size())
        self._clock = time.perf_counter()

        require_valid(network, "network")
        t = tree if isinstance(tree, Tree) else Tree.from_network(tree)
        require_valid(t, "tree")
        only_network = network.labels() - t.labels()
        only_tree = t.labels() - network.labels()
        if only_network or only_tree:
            raise LabelMismatchError(only_network, only_tree)
        if self.config.strict:
            violation = precondition_violation(network)
            if violation is not None:
                self._phase("validate")
                return self._finish(
                    Verdict.UNSUPPORTED,
                    f"precondition fails at vertex {violation}: tree vertex with a reticulation parent is not stable",
                )
        self._phase("validate")

        net = network.copy()
        t = t.copy()
        if not net.num_reticulations:
            mul = net.copy(as_type=MulTree)
            found = maximal_displayed(mul, t, rng=self.rng) == {t.root}
            self.trace.tip_total = net.num_vertices
            self.trace.pyramids = 1
            self.trace.max_multiplicity = 1
            self._phase("pyramids")
            return self._finish(Verdict.YES if found else Verdict.NO)

        if not self._reduce_cherries(net, t):
            self._phase("cherry")
            return self._finish(Verdict.NO, "network cherry is not a cherry of the tree")
        self._phase("cherry")
        if _single_leaf(net) is not None and _single_leaf(t) is not None:
            return self._finish(Verdict.YES if _single_leaf(net) == _single_leaf(t) else Verdict.NO)

        rmap = build_reticulation_leaf_map(net)
        q = build_component_dag(net, rng=self.rng)
        labels = LabelFactory(net.labels())
        self._phase("decompose")

        while q.queue:
            p = pop_pyramid(q, net)
            if p.degenerate:
                self.trace.degenerate_pyramids += 1
                retire_component(q, p.rho, net)
                continue
            self.trace.pyramids += 1
            self.trace.tip_total += len(p.tip)
            self.trace.max_base_height = max(self.trace.max_base_height, p.base_height)
            if self.config.check_budget and not self.trace.budget_ok:
                raise DecompositionError(
                    f"tip total {self.trace.tip_total} exceeds the network size {self.trace.initial_size}"
                )

            mul = pyramid_to_multree(p, net, rmap)
            self.trace.max_multiplicity = max(self.trace.max_multiplicity, mul.k)
            maxima = maximal_displayed(mul, t, rng=self.rng)
            try:
                c = find_anchor_leaf(p, net)
            except UnsupportedNetworkError as e:
                logger.warning(f"Unsupported network: {e}")
                self._phase("pyramids")
                return self._finish(Verdict.UNSUPPORTED, str(e))
            v = select_anchored_maximum(maxima, t, c)

            placed = apply_pyramid_placement(net, t, p, v, labels, rmap)
            retire_component(q, p.rho, net)
            self._event(
                kind="pyramid", rho=p.rho, tip=len(p.tip), base=len(p.base),
                base_height=p.base_height, anchor=c, placed=v, label=placed.label,
            )
            if placed.stranded:
                self._phase("pyramids")
                return self._finish(
                    Verdict.NO, f"labels {sorted(placed.stranded)[:5]} cannot be placed in the tree"
                )
            if not self._reduce_cherries(net, t, placed.touched):
                self._phase("pyramids")
                return self._finish(Verdict.NO, "network cherry is not a cherry of the tree")

        self._phase("pyramids")
        if q:
            raise DecompositionError(f"{len(q)} components left without a leaf of the component DAG")
        net_label = _single_leaf(net)
        t_label = _single_leaf(t)
        if net_label is not None and net_label == t_label:
            return self._finish(Verdict.YES)
        return self._finish(Verdict.NO)


def contains(net: Network, t: Network, config: Optional[EngineConfig] = None) -> EngineResult:
    """Does net display t?"""
    return ContainmentEngine(config).run(net, t)
