"""Scaling benchmark over a size ladder of generated networks"""

import gc
import statistics
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Iterable, List, Tuple

from loguru import logger
from pydantic import BaseModel
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from .config import BenchConfig, EngineConfig
from .engine import ContainmentEngine, Verdict, max_reticulation_path
from .generator import gen_displayed_tree, gen_network

CSV_HEADER = "# treecontain-bench v1"
CSV_COLUMNS = ("n", "k", "class", "median_ns", "ns_per_vertex")

console = Console(stderr=True)


class BenchRow(BaseModel):
    """One measured ladder rung"""

    n: int
    k: int
    network_class: str
    median_ns: int
    ns_per_vertex: float
    verdict: Verdict

    def csv(self) -> str:
        return f"{self.n},{self.k},{self.network_class},{self.median_ns},{self.ns_per_vertex:.2f}"


def leaves_for(target_vertices: int, network_class: str) -> Tuple[int, int]:
    """(leaves, reticulations) giving roughly target_vertices vertices.

    Networks get one reticulation per four leaves; each reticulation adds two
    vertices to the 2L - 1 of the underlying tree.
    """
    if network_class == "tree":
        return max(2, (target_vertices + 1) // 2), 0
    leaves = max(4, round(target_vertices / 2.5))
    return leaves, leaves // 4


def measure(exp: int, network_class: str, repeats: int, seed: int) -> BenchRow:
    """Generate one instance of about 2**exp vertices and time the engine on it"""
    n_leaves, n_rets = leaves_for(1 << exp, network_class)
    target = "any" if network_class == "tree" else network_class
    net = gen_network(seed, n_leaves, n_rets, target, strategy="structured", verify=False)
    tree = gen_displayed_tree(seed + 1, net)
    engine_config = EngineConfig(trace="off", check_budget=False)

    timings: List[int] = []
    verdict = Verdict.NO
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            start = time.perf_counter_ns()
            result = ContainmentEngine(engine_config).run(net, tree)
            timings.append(time.perf_counter_ns() - start)
            verdict = result.verdict
    finally:
        if gc_was_enabled:
            gc.enable()
    median_ns = int(statistics.median(timings))
    return BenchRow(
        n=net.num_vertices,
        k=max_reticulation_path(net),
        network_class=network_class,
        median_ns=median_ns,
        ns_per_vertex=median_ns / net.num_vertices,
        verdict=verdict,
    )


class BenchmarkRunner:
    """Runs the size ladder, optionally across worker processes"""

    def __init__(self, config: BenchConfig):
        self.config = config
        self.rows: List[BenchRow] = []

    def ladder(self) -> List[int]:
        return list(range(self.config.min_exp, self.config.max_exp + 1))

    def run(self, show_progress: bool = True) -> List[BenchRow]:
        exps = self.ladder()
        network_class = self.config.class_target
        jobs = [(exp, network_class, self.config.repeats, self.config.seed + exp) for exp in exps]
        logger.info(f"Benchmark ladder 2^{exps[0]}..2^{exps[-1]} ({network_class}, {self.config.workers} worker(s))")

        rows: List[BenchRow] = []
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
            console=console,
            disable=not show_progress,
        ) as progress:
            task = progress.add_task("Benchmarking...", total=len(jobs))
            if self.config.workers > 1:
                with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                    futures = [pool.submit(measure, *job) for job in jobs]
                    for future in as_completed(futures):
                        rows.append(future.result())
                        progress.update(task, advance=1)
            else:
                for job in jobs:
                    rows.append(measure(*job))
                    progress.update(task, advance=1)

        rows.sort(key=lambda row: row.n)
        for row in rows:
            if row.verdict != Verdict.YES:
                logger.warning(f"Planted tree not recognized at n={row.n} (verdict {row.verdict.value})")
        self.rows = rows
        return rows


def to_csv(rows: Iterable[BenchRow]) -> str:
    lines = [CSV_HEADER, ",".join(CSV_COLUMNS)]
    lines.extend(row.csv() for row in rows)
    return "\n".join(lines) + "\n"
