"""
CLI interface for sacoder.

All Click commands and the main entry point.
"""

import functools
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from rich.console import Console
from rich.markup import escape

from sacoder import __version__
from sacoder.errors import SacError
from sacoder.manager import SacManager

console = Console()


# ========== Alias Support ==========

# Maps short alias -> canonical command name
_ALIASES = {
    "enc": "encode",
    "dec": "decode",
    "stats": "analyze",
    "check": "validate",
}


class AliasGroup(click.Group):
    """Click group subclass that supports command aliases."""

    def get_command(self, ctx: click.Context, cmd_name: str) -> click.Command | None:
        rv = click.Group.get_command(self, ctx, cmd_name)
        if rv is not None:
            return rv
        canonical = _ALIASES.get(cmd_name)
        if canonical is not None:
            return click.Group.get_command(self, ctx, canonical)
        return None

    def format_help_text(self, ctx: click.Context, formatter: click.HelpFormatter) -> None:
        super().format_help_text(ctx, formatter)
        formatter.write("\n")
        formatter.write("Aliases:\n")
        for alias, target in sorted(_ALIASES.items()):
            formatter.write(f"  {alias:<10} -> {target}\n")


# ========== CLI Interface ==========

_EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
_OUTPUT_FILE = click.Path(dir_okay=False, writable=True, path_type=Path)


def _resolve_input(positional: Path | None, option: Path | None) -> Path:
    """Input given either as INPUT or as --input, exactly once."""
    if positional is not None and option is not None:
        raise click.UsageError("Give the input either as INPUT or with --input, not both")
    path = positional or option
    if path is None:
        raise click.UsageError("Missing input file (INPUT or --input)")
    return path


@click.group(cls=AliasGroup, invoke_without_command=True)
@click.version_option(version=__version__, prog_name="sacoder")
@click.option("--debug", "-d", is_flag=True, help="Echo every pipeline step", envvar="SAC_DEBUG")
@click.option("--save-history", is_flag=True, help="Save pipeline events to .sac_history.json")
@click.option("--quiet", "-q", is_flag=True, help="Suppress non-error output", envvar="SAC_QUIET")
@click.option("--verbose", "-v", is_flag=True, help="Show extra detail beyond default output", envvar="SAC_VERBOSE")
@click.option("--json", "json_output", is_flag=True, help="Output machine-readable JSON")
@click.pass_context
def cli(ctx, debug, save_history, quiet, verbose, json_output):
    """
    Semantic arithmetic coding for 2x2-block edge maps.

    Codes the sequence of synonymous sets a source visits instead of the
    symbols themselves, so the payload approaches the semantic entropy.

    Common workflow:

        sac gen --count 50 --out corpus/      # Synthetic edge maps

        sac analyze corpus/edge_000.pbm       # H vs H_s

        sac encode corpus/edge_000.pbm -o a.sac

        sac decode a.sac -o a.pbm --reference corpus/edge_000.pbm

        sac bench corpus/*.pbm --csv report.csv
    """
    if quiet and verbose:
        raise click.UsageError("Cannot use --quiet and --verbose together")
    if json_output and verbose:
        raise click.UsageError("Cannot use --json and --verbose together")

    ctx.ensure_object(dict)
    ctx.obj = {"json_output": json_output}

    if ctx.invoked_subcommand == "version":
        return

    try:
        manager = SacManager(
            debug=debug,
            save_history=save_history,
            quiet=quiet,
            verbose=verbose,
            json_output=json_output,
        )
        ctx.obj = manager
    except SacError as e:
        console.print(f"[red]ERROR: {escape(str(e))}[/red]")
        sys.exit(1)

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())

    if save_history and ctx.invoked_subcommand:
        ctx.call_on_close(manager.logger.save_history)


def _handle_error(func: Callable[..., Any]) -> Callable[..., Any]:
    """Decorator that catches SacError and exits cleanly."""

    @click.pass_obj
    @functools.wraps(func)
    def wrapper(manager: SacManager, *args: Any, **kwargs: Any) -> None:
        try:
            func(manager, *args, **kwargs)
        except SacError as e:
            console.print(f"[red]ERROR: {escape(str(e))}[/red]")
            sys.exit(1)

    return wrapper


# ========== Version Command ==========


@cli.command()
def version() -> None:
    """Show sacoder version."""
    click.echo(f"sacoder {__version__}")


@cli.command()
@click.option("--force", is_flag=True, help="Overwrite an existing .sac.toml without asking")
@_handle_error
def init(manager, force):
    """Write a default .sac.toml in the current directory."""
    manager.init_config(force=force)


# ========== Coding Commands ==========


@cli.command()
@click.argument("input_path", metavar="[INPUT]", required=False, type=_EXISTING_FILE)
@click.option("--input", "-i", "input_option", type=_EXISTING_FILE, help="Input file (alternative to INPUT)")
@click.option("--output", "-o", type=_OUTPUT_FILE, required=True, help="Container file to write")
@click.option("--partition", "-p", type=_EXISTING_FILE, help="Partition file (default: built-in edge2x2-11)")
@click.option("--model", "-m", type=_EXISTING_FILE, help="Model sidecar file")
@click.option("--estimate", is_flag=True, help="Estimate the model from the input (default without --model)")
@click.option("--mode", type=click.Choice(["semantic", "syntactic"]), envvar="SAC_MODE", help="Coding mode")
@_handle_error
def encode(manager, input_path, input_option, output, partition, model, estimate, mode):
    """Encode a PBM edge map into a container."""
    input_path = _resolve_input(input_path, input_option)
    if model is not None and estimate:
        raise click.UsageError("Use either --model or --estimate, not both")
    manager.encode(input_path, output, partition, model, mode)


@cli.command()
@click.argument("input_path", metavar="[INPUT]", required=False, type=_EXISTING_FILE)
@click.option("--input", "-i", "input_option", type=_EXISTING_FILE, help="Input file (alternative to INPUT)")
@click.option("--output", "-o", type=_OUTPUT_FILE, required=True, help="PBM file to write")
@click.option("--partition", "-p", type=_EXISTING_FILE, help="Partition file; must match the container")
@click.option("--model", "-m", type=_EXISTING_FILE, help="Model sidecar; must match the container")
@click.option(
    "--export-policy",
    type=click.Choice(["canonical", "argmax", "random"]),
    envvar="SAC_EXPORT_POLICY",
    help="Member exported from each decoded set",
)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), envvar="SAC_SEED", help="Seed for --export-policy random")
@click.option("--width", type=click.IntRange(min=2), envvar="SAC_WIDTH", help="Pixel width of the decoded map")
@click.option("--raw", is_flag=True, help="Write raw P4 instead of plain P1")
@click.option("--reference", type=_EXISTING_FILE, help="Original PBM to compare the reconstruction against")
@_handle_error
def decode(manager, input_path, input_option, output, partition, model, export_policy, seed, width, raw, reference):
    """Decode a container into a PBM edge map."""
    input_path = _resolve_input(input_path, input_option)
    manager.decode(input_path, output, partition, model, export_policy, seed, width, raw, reference)


# ========== Analysis Commands ==========


@cli.command()
@click.argument("input_path", metavar="[INPUT]", required=False, type=_EXISTING_FILE)
@click.option("--input", "-i", "input_option", type=_EXISTING_FILE, help="Input file (alternative to INPUT)")
@click.option("--partition", "-p", type=_EXISTING_FILE, help="Partition file (default: built-in edge2x2-11)")
@click.option("--model", "-m", type=_EXISTING_FILE, help="Model sidecar (default: estimate from the input)")
@_handle_error
def analyze(manager, input_path, input_option, partition, model):
    """Print H, H_s and the ideal saving (H - H_s) / H."""
    input_path = _resolve_input(input_path, input_option)
    manager.analyze(input_path, partition, model)


@cli.command()
@click.argument("inputs", nargs=-1, required=True, type=_EXISTING_FILE)
@click.option("--partition", "-p", type=_EXISTING_FILE, help="Partition file (default: built-in edge2x2-11)")
@click.option("--model", "model_source", type=click.Choice(["pooled", "per-file"]), help="Model statistics source")
@click.option("--workers", "-j", type=click.IntRange(min=1), envvar="SAC_WORKERS", help="Parallel worker processes")
@click.option("--csv", "csv_path", type=_OUTPUT_FILE, help="Write the per-file report as CSV")
@_handle_error
def bench(manager, inputs, partition, model_source, workers, csv_path):
    """Compare traditional AC and SAC over a corpus of PBM files."""
    manager.bench(list(inputs), partition, model_source, workers, csv_path)


@cli.command()
@click.option("--count", type=click.IntRange(min=1), default=50, show_default=True, help="Number of maps")
@click.option("--width", type=click.IntRange(min=2), default=1280, show_default=True, help="Pixel width (even)")
@click.option("--height", type=click.IntRange(min=2), default=720, show_default=True, help="Pixel height (even)")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True, help="Corpus seed")
@click.option(
    "--out", "output_dir", type=click.Path(file_okay=False, path_type=Path), required=True, help="Output directory"
)
@click.option("--raw", is_flag=True, help="Write raw P4 instead of plain P1")
@_handle_error
def gen(manager, count, width, height, seed, output_dir, raw):
    """Generate a synthetic corpus of polygon-outline edge maps."""
    manager.gen(count, width, height, seed, output_dir, raw)


@cli.command()
@click.option("--max-m", type=click.IntRange(min=0), help="Longest sequence in the exhaustive sweep")
@click.option("--alphabet", type=click.IntRange(min=1), help="Alphabet size for the sweep")
@click.option("--trials", type=click.IntRange(min=0), help="Random stream-vs-exact trials")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True, help="Trial seed")
@_handle_error
def verify(manager, max_m, alphabet, trials, seed):
    """Check the codeword-length bound and stream/exact agreement."""
    manager.verify(max_m, alphabet, trials, seed)


@cli.command()
@click.argument("partition", type=_EXISTING_FILE)
@click.option("--model", "-m", type=_EXISTING_FILE, help="Model sidecar to check as well")
@click.option("--alphabet", type=click.IntRange(min=1), default=16, show_default=True, help="Alphabet size")
@_handle_error
def validate(manager, partition, model, alphabet):
    """Validate a partition file and optional model sidecar."""
    manager.validate(partition, model, alphabet)
