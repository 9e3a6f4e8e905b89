"""Seeded random instances: networks by class, displayed trees and perturbed trees.

All randomness comes from random.Random (Mersenne Twister) seeded with the
caller's seed, so instances are reproducible across platforms.
"""

import random
from typing import Dict, List, Optional, Tuple

from loguru import logger

from .config import ClassTarget
from .network import Network, Tree, clean_up
from .oracle import resolve_network
from .stability import (
    is_nearly_stable,
    is_reticulation_visible,
    precondition_violation,
    stability_witnesses,
)

CLASS_TARGETS = ("any", "reticulation_visible", "nearly_stable", "theorem2")
CLASS_ALIASES = {"rv": "reticulation_visible", "ns": "nearly_stable", "t2": "theorem2"}


class GeneratorError(RuntimeError):
    """No instance with the requested parameters could be produced"""


class _ArcPool:
    """Arcs with O(1) insert, delete and uniform choice"""

    def __init__(self, arcs):
        self.items: List[Tuple[int, int]] = list(arcs)
        self.index: Dict[Tuple[int, int], int] = {a: i for i, a in enumerate(self.items)}

    def add(self, arc: Tuple[int, int]) -> None:
        self.index[arc] = len(self.items)
        self.items.append(arc)

    def discard(self, arc: Tuple[int, int]) -> None:
        i = self.index.pop(arc)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.index[last] = i

    def choice(self, rng: random.Random) -> Tuple[int, int]:
        return self.items[rng.randrange(len(self.items))]

    def __len__(self) -> int:
        return len(self.items)


def normalize_class(target: str) -> str:
    target = CLASS_ALIASES.get(target, target)
    if target not in CLASS_TARGETS:
        raise GeneratorError(f"Unknown class target {target!r}; choose from {', '.join(CLASS_TARGETS)}")
    return target


def satisfies(net: Network, target: str) -> bool:
    """Does net belong to the class named by target?"""
    target = normalize_class(target)
    if target == "any":
        return True
    witnesses = stability_witnesses(net)
    if target == "reticulation_visible":
        return is_reticulation_visible(net, witnesses)
    if target == "nearly_stable":
        return is_nearly_stable(net, witnesses)
    return precondition_violation(net, witnesses) is None


def subdivide(net: Network, u: int, w: int, pool: Optional[_ArcPool] = None) -> int:
    """Replace arc u->w by u->s->w and return s"""
    net.remove_arc(u, w)
    s = net.add_vertex()
    net.add_arc(u, s)
    net.add_arc(s, w)
    if pool is not None:
        pool.discard((u, w))
        pool.add((u, s))
        pool.add((s, w))
    return s


def speciate(net: Network, u: int, w: int, pool: Optional[_ArcPool] = None) -> int:
    """Hang a new leaf from a subdivision of u->w; returns the leaf"""
    s = subdivide(net, u, w, pool)
    leaf = net.add_vertex()
    net.add_arc(s, leaf)
    if pool is not None:
        pool.add((s, leaf))
    return leaf


def hybridize(net: Network, source: Tuple[int, int], target: Tuple[int, int],
              pool: Optional[_ArcPool] = None) -> int:
    """Join a subdivision of source to a subdivision of target; returns the new reticulation"""
    h = subdivide(net, *target, pool)
    s = subdivide(net, *source, pool)
    net.add_arc(s, h)
    if pool is not None:
        pool.add((s, h))
    return h


def taxon_labels(n: int) -> List[str]:
    return [f"t{i}" for i in range(1, n + 1)]


def random_tree(rng: random.Random, n_leaves: int, labels: Optional[List[str]] = None) -> Tuple[Network, _ArcPool]:
    """Random binary tree grown by repeated speciation on a random arc"""
    if n_leaves < 1:
        raise GeneratorError("A network needs at least one leaf")
    net = Network()
    net.root = net.add_vertex()
    pool = _ArcPool([])
    if n_leaves > 1:
        for _ in range(2):
            leaf = net.add_vertex()
            net.add_arc(net.root, leaf)
            pool.add((net.root, leaf))
        for _ in range(n_leaves - 2):
            speciate(net, *pool.choice(rng), pool)
    labels = list(labels or taxon_labels(n_leaves))
    rng.shuffle(labels)
    for leaf, label in zip(net.leaves(), labels):
        net.set_label(leaf, label)
    return net, pool


def _grow_random(rng: random.Random, net: Network, pool: _ArcPool, n_reticulations: int) -> bool:
    for _ in range(n_reticulations):
        for _ in range(100):
            if len(pool) < 2:
                return False
            source = pool.choice(rng)
            target = pool.choice(rng)
            if source == target or source[0] in net.descendants(target[1]):
                continue
            hybridize(net, source, target, pool)
            break
        else:
            return False
    return True


def _grow_structured(rng: random.Random, net: Network, pool: _ArcPool, n_reticulations: int, target_class: str) -> bool:
    """Add reticulations that keep the stability structure of the class.

    Every new reticulation sits directly above a leaf nothing else covers,
    or (outside reticulation-visible targets) extends a reticulation whose
    child is a leaf. Tree vertices under reticulations only appear above
    leaves.
    """
    uncovered = [v for v in net.leaves() if net.parents(v)]
    chains: List[int] = []
    allow_chains = target_class != "reticulation_visible"
    for _ in range(n_reticulations):
        chains = [r for r in chains if net.is_leaf(net.children(r)[0])]
        if target_class == "nearly_stable":
            chains = [r for r in chains if not any(net.is_reticulation(p) for p in net.parents(r))]
        use_chain = allow_chains and chains and (not uncovered or rng.random() < 0.3)
        if use_chain:
            r = chains[rng.randrange(len(chains))]
            target = (r, net.children(r)[0])
        elif uncovered:
            i = rng.randrange(len(uncovered))
            uncovered[i], uncovered[-1] = uncovered[-1], uncovered[i]
            leaf = uncovered.pop()
            target = (net.parent(leaf), leaf)
        else:
            return False
        for _ in range(100):
            source = pool.choice(rng)
            if source == target:
                continue
            if net.is_reticulation(source[0]) and not net.is_leaf(source[1]):
                continue
            break
        else:
            return False
        chains.append(hybridize(net, source, target, pool))
    return True


def gen_network(
    seed: int,
    n_leaves: int,
    n_reticulations: int,
    class_target: ClassTarget = "any",
    strategy: str = "random",
    retry_budget: int = 1000,
    verify: bool = True,
) -> Network:
    """Random valid binary network of the requested size and class"""
    target_class = normalize_class(class_target)
    if n_leaves < 1 or n_reticulations < 0:
        raise GeneratorError("Need at least one leaf and a non-negative reticulation count")
    if n_reticulations and n_leaves < 2:
        raise GeneratorError("A single-leaf network cannot have reticulations")
    if strategy == "structured" and target_class == "reticulation_visible" and n_reticulations > n_leaves:
        raise GeneratorError(
            f"Structured reticulation-visible networks take at most one reticulation per leaf "
            f"({n_reticulations} > {n_leaves}); lower --rets or raise --leaves"
        )
    if strategy not in ("random", "structured"):
        raise GeneratorError(f"Unknown strategy {strategy!r}")

    rng = random.Random(seed)
    for attempt in range(1, retry_budget + 1):
        net, pool = random_tree(rng, n_leaves)
        if strategy == "random":
            grown = _grow_random(rng, net, pool, n_reticulations)
        else:
            grown = _grow_structured(rng, net, pool, n_reticulations, target_class)
        if grown and (not verify or satisfies(net, target_class)):
            logger.debug(f"Generated {net!r} ({target_class}, {strategy}) after {attempt} attempt(s)")
            return net
    raise GeneratorError(
        f"No {target_class} network with {n_leaves} leaves and {n_reticulations} reticulations after "
        f"{retry_budget} attempts; try fewer reticulations, more leaves or --strategy structured"
    )


def gen_displayed_tree(seed: int, net: Network) -> Tree:
    """Tree read off a random resolution of net, so net displays it"""
    rng = random.Random(seed)
    resolution = {r: rng.choice(net.parents(r)) for r in sorted(net.reticulations())}
    return resolve_network(net, resolution)


def gen_perturbed_tree(seed: int, t: Network) -> Tree:
    """t after one random leaf swap or subtree regraft"""
    leaves = sorted(t.leaves())
    if len(leaves) < 4:
        raise GeneratorError("Perturbation needs a tree with at least four leaves")
    rng = random.Random(seed)
    work = t.copy(as_type=Network)
    if rng.random() < 0.5:
        a, b = rng.sample(leaves, 2)
        label_a, label_b = work.label(a), work.label(b)
        work.set_label(a, label_b)
        work.set_label(b, label_a)
        return Tree.from_network(work)

    x = rng.choice(sorted(v for v in work.vertices() if v != work.root))
    p = work.parent(x)
    work.remove_arc(p, x)
    clean_up(work, [p])
    moved = set(work.preorder(x))
    arcs = sorted(a for a in work.arcs() if a[0] not in moved)
    if arcs:
        s = subdivide(work, *rng.choice(arcs))
        work.add_arc(s, x)
    else:
        old_root = work.root
        work.root = work.add_vertex()
        work.add_arc(work.root, old_root)
        work.add_arc(work.root, x)
    return Tree.from_network(work)
