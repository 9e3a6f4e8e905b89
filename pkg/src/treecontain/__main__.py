"""treecontain main entry point"""

import sys
from pathlib import Path

import click
import yaml
from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .bench import BenchmarkRunner, to_csv
from .config import TreecontainConfig, apply_env_overrides, load_config, save_config
from .decomposition import DecompositionError
from .engine import ContainmentEngine, EngineResult, Verdict, network_profile
from .generator import CLASS_ALIASES, CLASS_TARGETS, GeneratorError, gen_displayed_tree, gen_network, gen_perturbed_tree
from .lca import LcaIndexError
from .multree import MinsetInvariantError
from .network import NetworkError
from .newick import NewickParseError, read_network, read_tree, serialize_network, write_network
from .oracle import OracleRefusal, oracle_displays
from .stability import NetworkClass

console = Console()

EXIT_YES = 0
EXIT_NO = 1
EXIT_ERROR = 2


def setup_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level)


def _fail(message: str, code: int = EXIT_ERROR) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _display_trace(result: EngineResult) -> None:
    """Show the run trace"""
    trace = result.trace
    table = Table(title="Run Trace", style="cyan")
    table.add_column("Item", style="dim")
    table.add_column("Value", justify="right")
    table.add_row("Verdict", result.verdict.value.upper())
    table.add_row("|N|", str(trace.initial_size))
    table.add_row("Cherries reduced", str(trace.cherries_reduced))
    table.add_row("Pyramids", str(trace.pyramids))
    table.add_row("Degenerate pyramids", str(trace.degenerate_pyramids))
    table.add_row("Sum of tip sizes", f"{trace.tip_total} ({'ok' if trace.budget_ok else 'over budget'})")
    table.add_row("Max label multiplicity", str(trace.max_multiplicity))
    table.add_row("Max base height", str(trace.max_base_height))
    for phase, seconds in trace.phase_seconds.items():
        table.add_row(f"Time: {phase}", f"{seconds * 1000:.2f} ms")
    console.print(table)

    if trace.events:
        events = Table(title="Reductions", style="cyan")
        events.add_column("#", justify="right")
        events.add_column("Step")
        events.add_column("Detail")
        for i, event in enumerate(trace.events, 1):
            if event.kind == "cherry":
                detail = f"({event.pair[0]},{event.pair[1]})"
            else:
                detail = (
                    f"rho={event.rho} tip={event.tip} base={event.base} height={event.base_height} "
                    f"anchor={event.anchor} v={event.placed} -> {event.label}"
                )
            events.add_row(str(i), event.kind, detail)
        console.print(events)
    if result.diagnostic:
        console.print(Panel(result.diagnostic, title="Diagnostic", style="yellow"))


@click.group()
@click.option('--config', '-c', type=click.Path(dir_okay=False),
              default='configs/default.yaml', help='Configuration file path')
@click.option('--verbose', '-v', is_flag=True, help='Show detailed logs')
@click.pass_context
def main(ctx, config, verbose):
    """treecontain - does a phylogenetic network display a tree?

    Usage examples:
        treecontain check network.nwk tree.nwk
        treecontain check network.nwk tree.nwk --oracle --trace
        treecontain classify network.nwk
        treecontain gen --leaves 10 --rets 3 --class rv --seed 7
        treecontain bench --min-exp 10 --max-exp 14 > bench.csv
    """
    try:
        treecontain_config = apply_env_overrides(load_config(Path(config)))
    except (ValidationError, TypeError, UnicodeDecodeError, yaml.YAMLError) as e:
        _fail(f"invalid configuration {config}: {e}")
    setup_logging("DEBUG" if verbose else treecontain_config.log_level)
    logger.debug(f"treecontain starting with config: {config}")
    ctx.obj = treecontain_config


@main.command()
@click.argument('network_file')
@click.argument('tree_file')
@click.option('--strict', is_flag=True, default=None, help='Refuse unsupported networks before running')
@click.option('--oracle', 'use_oracle', is_flag=True, help='Cross-check the verdict by exhaustive search')
@click.option('--seed', type=int, default=None, help='Shuffle processing order with this seed')
@click.option('--trace', 'show_trace', is_flag=True, help='Show the reduction trace')
@click.pass_obj
def check(config: TreecontainConfig, network_file, tree_file, strict, use_oracle, seed, show_trace):
    """Decide whether NETWORK_FILE displays TREE_FILE ('-' reads stdin)"""
    try:
        network = read_network(network_file)
        tree = read_tree(tree_file)
    except NewickParseError as e:
        _fail(f"parse error at byte {e.position}: {e}")
    except OSError as e:
        _fail(str(e))

    engine_config = config.engine.model_copy()
    if strict is not None:
        engine_config.strict = strict
    if seed is not None:
        engine_config.seed = seed
    if show_trace:
        engine_config.trace = "full"

    try:
        result = ContainmentEngine(engine_config).run(network, tree)
    except NetworkError as e:
        _fail(str(e))
    except (DecompositionError, MinsetInvariantError, LcaIndexError) as e:
        logger.exception("Engine invariant violated")
        _fail(f"internal error: {e}")

    click.echo(result.verdict.value.upper())
    if show_trace:
        _display_trace(result)

    if use_oracle and result.verdict != Verdict.UNSUPPORTED:
        try:
            expected = oracle_displays(network, tree, config.oracle.max_reticulations)
        except OracleRefusal as e:
            logger.warning(f"Oracle refused: {e}")
            _fail(f"oracle refused: {e}")
        click.echo(f"oracle: {'YES' if expected else 'NO'}")
        if expected != result.displays:
            logger.error("Engine and oracle disagree")
            sys.exit(EXIT_ERROR)

    if result.verdict == Verdict.UNSUPPORTED:
        click.echo(f"unsupported: {result.diagnostic}", err=True)
        sys.exit(EXIT_ERROR)
    sys.exit(EXIT_YES if result.displays else EXIT_NO)


@main.command()
@click.argument('network_file')
def classify(network_file):
    """Report the class, reticulation count and longest reticulation path"""
    try:
        network = read_network(network_file)
    except NewickParseError as e:
        _fail(f"parse error at byte {e.position}: {e}")
    except OSError as e:
        _fail(str(e))

    profile = network_profile(network)
    if profile.network_class == NetworkClass.UNSUPPORTED:
        click.echo(f"unsupported (stability precondition fails at vertex {profile.violation})")
    else:
        click.echo(
            f"{profile.network_class.value}, k={profile.reticulations}, path={profile.max_reticulation_path}"
        )

    table = Table(title="Network Profile", style="cyan")
    table.add_column("Item", style="dim")
    table.add_column("Value", justify="right")
    table.add_row("Class", profile.network_class.value)
    table.add_row("Vertices", str(profile.vertices))
    table.add_row("Arcs", str(profile.arcs))
    table.add_row("Leaves", str(profile.leaves))
    table.add_row("Reticulations", str(profile.reticulations))
    table.add_row("Longest reticulation path", str(profile.max_reticulation_path))
    console.print(table)


@main.command()
@click.option('--leaves', type=int, required=True, help='Number of leaves')
@click.option('--rets', type=int, default=0, help='Number of reticulations')
@click.option('--class', 'class_target', default='any',
              type=click.Choice(list(CLASS_TARGETS) + list(CLASS_ALIASES)), help='Network class')
@click.option('--seed', type=int, default=0, help='Random seed')
@click.option('--strategy', type=click.Choice(['random', 'structured']), default=None,
              help='Growth strategy (default from config)')
@click.option('--tree', 'tree_kind', type=click.Choice(['displayed', 'perturbed', 'none']),
              default='displayed', help='Companion tree to write')
@click.option('--output-dir', '-o', type=click.Path(file_okay=False), default='.', help='Output directory')
@click.option('--prefix', default='instance', help='Output file name prefix')
@click.pass_obj
def gen(config: TreecontainConfig, leaves, rets, class_target, seed, strategy, tree_kind, output_dir, prefix):
    """Generate a network (and a tree) as Newick files"""
    strategy = strategy or config.generator.strategy
    try:
        network = gen_network(seed, leaves, rets, class_target, strategy, config.generator.retry_budget)
        tree = None
        if tree_kind != 'none':
            tree = gen_displayed_tree(seed, network)
            if tree_kind == 'perturbed':
                tree = gen_perturbed_tree(seed, tree)
    except GeneratorError as e:
        _fail(str(e), code=EXIT_NO)

    out = Path(output_dir)
    network_path = write_network(network, out / f"{prefix}.net.nwk")
    table = Table(title="Generated Instance", style="cyan")
    table.add_column("File", style="dim")
    table.add_column("Content")
    table.add_row(str(network_path), serialize_network(network)[:60])
    if tree is not None:
        tree_path = write_network(tree, out / f"{prefix}.tree.nwk")
        table.add_row(str(tree_path), serialize_network(tree)[:60])
    console.print(table)
    logger.info(f"Generated {network!r} with seed {seed}")


@main.command()
@click.option('--min-exp', type=int, default=None, help='Smallest size exponent')
@click.option('--max-exp', type=int, default=None, help='Largest size exponent')
@click.option('--repeats', type=int, default=None, help='Timed runs per size')
@click.option('--class', 'class_target', type=click.Choice(['reticulation_visible', 'theorem2', 'tree']),
              default=None, help='Network class of the ladder')
@click.option('--workers', type=int, default=None, help='Worker processes')
@click.option('--seed', type=int, default=None, help='Base seed')
@click.pass_obj
def bench(config: TreecontainConfig, min_exp, max_exp, repeats, class_target, workers, seed):
    """Time the engine over a size ladder and print CSV"""
    overrides = {
        key: value
        for key, value in dict(
            min_exp=min_exp, max_exp=max_exp, repeats=repeats,
            class_target=class_target, workers=workers, seed=seed,
        ).items()
        if value is not None
    }
    try:
        bench_config = config.bench.model_copy(update=overrides)
        bench_config = type(bench_config).model_validate(bench_config.model_dump())
    except ValidationError as e:
        _fail(f"invalid benchmark parameters: {e}")
    if bench_config.min_exp > bench_config.max_exp:
        _fail("--min-exp must not exceed --max-exp")
    rows = BenchmarkRunner(bench_config).run()
    click.echo(to_csv(rows), nl=False)


@main.command(name='init-config')
@click.argument('path', type=click.Path(dir_okay=False), default='configs/default.yaml')
@click.option('--force', is_flag=True, help='Overwrite an existing file')
def init_config(path, force):
    """Write the default configuration file"""
    config_path = Path(path)
    if config_path.exists() and not force:
        _fail(f"{config_path} exists (use --force to overwrite)")
    save_config(TreecontainConfig(), config_path)
    console.print(f"[green]✓ Configuration written to[/green] [blue]{config_path}[/blue]")


if __name__ == '__main__':
    main()
