#!/usr/bin/env python3
"""
rrnash CLI

Usage:
    rrnash [-v] [--seed-offset N] [--jobs N] [--debug-inner] <command> ...

    rrnash run <config> [--output DIR]
    rrnash solve-ne <config>
    rrnash check <config>
    rrnash variance <config> [--output DIR]

Exit codes: 0 success, 1 configuration error (including an unbuildable
network or a degenerate start point), 2 oracle, schedule, bounds or pairing
failure.
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click

# repo root on the path for running from a checkout
sys.path.insert(0, str(Path(__file__).parent.parent))

from core import __version__
from core.errors import (
    BoundsError,
    ConfigurationError,
    GraphError,
    MetricError,
    MonotonicityViolationError,
    OracleError,
    PairingError,
    ScheduleError,
)
from core.harness import (
    check_experiment,
    load_config,
    run_experiment,
    solve_ne_for_config,
    variance_study,
)

EXIT_CONFIG = 1
EXIT_FAILURE = 2
CONFIG_ERRORS = (ConfigurationError, GraphError, MetricError)
FAILURES = (OracleError, ScheduleError, MonotonicityViolationError, BoundsError, PairingError)


def handle_errors(command):
    """Map library errors to exit codes"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except CONFIG_ERRORS as e:
            click.echo(f"config error: {e}", err=True)
            sys.exit(EXIT_CONFIG)
        except FAILURES as e:
            click.echo(f"{type(e).__name__}: {e}", err=True)
            sys.exit(EXIT_FAILURE)

    return wrapper


@click.group()
@click.version_option(version=__version__)
@click.option("-v", "--verbose", is_flag=True, help="Debug logging")
@click.option("--seed-offset", default=0, show_default=True, type=int, help="Added to every run seed")
@click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1), help="Parallel runs")
@click.option("--debug-inner", is_flag=True, help="Write per-inner-step traces")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, seed_offset: int, jobs: int, debug_inner: bool):
    """Random-reshuffling Nash equilibrium seeking experiments"""
    ctx.obj = {"seed_offset": seed_offset, "jobs": jobs, "debug_inner": debug_inner}
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command("run")
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--output", "output_dir", type=click.Path(path_type=Path), help="Overrides output.directory")
@click.pass_obj
@handle_errors
def run_command(options: dict, config_path: Path, output_dir: Optional[Path]):
    """Run every configured arm and write the artifact directory"""
    config = load_config(config_path)
    out = run_experiment(
        config,
        output_dir=output_dir,
        seed_offset=options["seed_offset"],
        jobs=options["jobs"],
        debug_inner=options["debug_inner"],
    )
    click.echo(f"Results written to {out}")


@cli.command("solve-ne")
@click.argument("config_path", type=click.Path(path_type=Path))
@handle_errors
def solve_ne_command(config_path: Path):
    """Solve and print the Nash equilibrium of the configured game"""
    config = load_config(config_path)
    _, ne = solve_ne_for_config(config)
    click.echo(ne.format_text(), nl=False)


@cli.command("check")
@click.argument("config_path", type=click.Path(path_type=Path))
@click.pass_obj
@handle_errors
def check_command(options: dict, config_path: Path):
    """Print the schedule conditions and bounds without running"""
    config = load_config(config_path)
    setup, bounds = check_experiment(config, options["seed_offset"])
    click.echo(setup.schedule.describe())
    click.echo(setup.report.format_table(), nl=False)
    if bounds is not None:
        click.echo(bounds.format_text(setup.K), nl=False)
    else:
        click.echo("bounds: not applicable")
    if not setup.report.passed:
        sys.exit(EXIT_FAILURE)


@cli.command("variance")
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--output", "output_dir", type=click.Path(path_type=Path), help="Overrides output.directory")
@handle_errors
def variance_command(config_path: Path, output_dir: Optional[Path]):
    """Shuffling variance against its bound over a step-size grid"""
    config = load_config(config_path)
    frame, slope = variance_study(config, output_dir or Path(config.output.directory))
    click.echo(frame.to_string(index=False))
    click.echo(f"slope = {slope:.4f}")


if __name__ == "__main__":
    cli()
