"""
Pipeline manager for sacoder.

Binds file I/O, configuration and console output to the coding modules.
Every command method raises SacError on failure; the CLI turns that into
exit code 1.
"""

import json
from pathlib import Path
from typing import Any

import click
import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from sacoder.bench import ModelSource, batch, write_csv
from sacoder.config import CONFIG_FILENAME, SacSettings, generate_config, load_config
from sacoder.container import CodingMode, Container
from sacoder.edgemap import (
    BLOCK_ALPHABET,
    BlockSequence,
    detokenize,
    estimate_model,
    format_pbm,
    generate_corpus,
    parse_pbm,
    reshape_blocks,
    tokenize_blocks,
)
from sacoder.errors import SacError, ValidationError
from sacoder.logger import CodecEventLogger
from sacoder.model import Alphabet, ProbabilityTable, parse_model_file, validate
from sacoder.reconstruct import ExportKind, ExportPolicy
from sacoder.stream import decode_stream, encode_stream, measure_code_length
from sacoder.synonymy import (
    SynonymousPartition,
    load_builtin_partition,
    parse_partition_file,
    semantic_entropy,
    set_probability,
    shannon_entropy,
    to_set_sequence,
)
from sacoder.validator import Issue, ensure_valid
from sacoder.verify import run_all

console = Console()


class SacManager:
    """
    Runs the encode / decode / analysis pipelines behind each CLI command.
    """

    def __init__(
        self,
        debug: bool = False,
        save_history: bool = False,
        quiet: bool = False,
        verbose: bool = False,
        json_output: bool = False,
        root: Path | None = None,
    ):
        """
        Initialize the manager.

        Args:
            debug: Echo every pipeline step
            save_history: Save the event history on exit
            quiet: Suppress non-error output
            verbose: Show extra detail beyond default output
            json_output: Output machine-readable JSON instead of Rich tables
            root: Directory holding .sac.toml (default: current directory)
        """
        self.debug = debug
        self.save_history = save_history
        self.quiet = quiet
        self.verbose = verbose
        self.json_output = json_output
        self.root = root or Path.cwd()
        self.logger = CodecEventLogger(debug=debug)
        self.config: SacSettings = load_config(self.root)

    def info(self, message: Any) -> None:
        """Print an informational message, suppressed in quiet mode."""
        if not self.quiet:
            console.print(message)

    def detail(self, message: Any) -> None:
        """Print a detailed message, only shown in verbose mode."""
        if self.verbose and not self.quiet:
            console.print(message)

    def error(self, message: Any) -> None:
        """Print an error message (always shown, even in quiet mode)."""
        console.print(message)

    def emit_json(self, data: Any) -> None:
        click.echo(json.dumps(data, indent=2))

    # ========== Inputs ==========

    def _read(self, path: Path) -> bytes:
        try:
            return path.read_bytes()
        except OSError as exc:
            raise SacError(f"Cannot read {path}: {exc.strerror or exc}") from exc

    def _write(self, path: Path, data: bytes) -> None:
        try:
            path.write_bytes(data)
        except OSError as exc:
            raise SacError(f"Cannot write {path}: {exc.strerror or exc}") from exc

    def load_partition(self, path: Path | None = None) -> SynonymousPartition:
        """Partition from ``path``, the configured path, or the built-in edge2x2-11."""
        if path is None and self.config.partition:
            path = self.root / self.config.partition
        if path is None:
            self.logger.log("partition", "Load built-in partition edge2x2-11")
            return load_builtin_partition()
        self.logger.log("partition", f"Load partition {path}")
        return parse_partition_file(self._read(path), Alphabet(BLOCK_ALPHABET))

    def load_model(self, path: Path) -> ProbabilityTable:
        self.logger.log("model", f"Load model {path}")
        table = parse_model_file(self._read(path))
        ensure_valid("model", validate(table, Alphabet(BLOCK_ALPHABET)))
        return table

    def load_blocks(self, path: Path) -> BlockSequence:
        with self.logger.track("tokenize", f"Parse {path} and split into 2x2 blocks") as event:
            blocks = tokenize_blocks(parse_pbm(self._read(path)))
            event.details["m"] = len(blocks)
        return blocks

    def _model_for(self, blocks: BlockSequence, model: Path | None) -> ProbabilityTable:
        if model is not None:
            return self.load_model(model)
        with self.logger.track("estimate", "Estimate block statistics"):
            return estimate_model(blocks, self.config.model_total)

    # ========== Commands ==========

    def encode(
        self,
        input_path: Path,
        output: Path,
        partition_path: Path | None = None,
        model: Path | None = None,
        mode: str | None = None,
    ) -> Container:
        """Encode a PBM edge map into a container file."""
        coding_mode = CodingMode(mode or self.config.mode)
        partition = self.load_partition(partition_path)
        blocks = self.load_blocks(input_path)
        table = self._model_for(blocks, model)

        with self.logger.track("encode", f"{coding_mode} arithmetic coding", m=len(blocks)) as event:
            container = encode_stream(blocks.tolist(), partition, table, coding_mode)
            event.details["payload_bits"] = container.payload_bit_count
        self._write(output, container.to_bytes())

        m = container.length
        sebits = measure_code_length(container)
        h = shannon_entropy(table)
        hs = semantic_entropy(partition, table)
        data = {
            "input": str(input_path),
            "output": str(output),
            "mode": str(coding_mode),
            "m": m,
            "payload_sebits": sebits,
            "header_bytes": container.header_bytes,
            "avg_sebits_pb": sebits / m if m else 0.0,
            "H_bits_pb": h,
            "Hs_sebits_pb": hs,
        }
        if self.json_output:
            self.emit_json(data)
            return container

        self.info(f"[green]✓ Encoded {input_path} -> {output}[/green]")
        table_out = Table(show_header=False, box=None, padding=(0, 2))
        table_out.add_column("Property", style="cyan")
        table_out.add_column("Value")
        table_out.add_row("Mode:", str(coding_mode))
        table_out.add_row("Blocks (m):", str(m))
        table_out.add_row("Payload:", f"{sebits} sebits")
        table_out.add_row("Header:", f"{container.header_bytes} bytes")
        self.info(table_out)
        self.detail(f"  average {data['avg_sebits_pb']:.6f} sebit/pb, H {h:.6f} bit/pb, H_s {hs:.6f} sebit/pb")
        return container

    def decode(
        self,
        input_path: Path,
        output: Path,
        partition_path: Path | None = None,
        model: Path | None = None,
        policy: str | None = None,
        seed: int | None = None,
        width: int | None = None,
        raw: bool = False,
        reference: Path | None = None,
    ) -> list[int]:
        """
        Decode a container into a PBM edge map.

        A supplied partition or model must match the container's digest.
        """
        container = Container.from_bytes(self._read(input_path))
        partition = self.load_partition(partition_path) if partition_path is not None else None
        table = self.load_model(model) if model is not None else None
        export = ExportPolicy(
            kind=ExportKind(policy or self.config.export_policy),
            seed=self.config.seed if seed is None else seed,
        )

        with self.logger.track("decode", f"{container.mode} decoding, {export.kind} export", m=container.length):
            symbols = decode_stream(container, partition, table, export)
        edge_map = detokenize(reshape_blocks(symbols, width or self.config.width))
        self._write(output, format_pbm(edge_map, raw=raw))

        data: dict[str, Any] = {
            "input": str(input_path),
            "output": str(output),
            "mode": str(container.mode),
            "m": container.length,
            "width": edge_map.width,
            "height": edge_map.height,
            "export_policy": str(export.kind),
        }
        if reference is not None:
            original = parse_pbm(self._read(reference))
            if original.bits.shape != edge_map.bits.shape:
                raise SacError(
                    f"Reference is {original.width}x{original.height}, "
                    f"decoded map is {edge_map.width}x{edge_map.height}"
                )
            used = container.partition
            same_sets = to_set_sequence(tokenize_blocks(original).tolist(), used) == to_set_sequence(symbols, used)
            data["semantically_identical"] = same_sets
            data["differing_pixels"] = int(np.count_nonzero(original.bits != edge_map.bits))

        if self.json_output:
            self.emit_json(data)
            return symbols

        self.info(f"[green]✓ Decoded {input_path} -> {output}[/green] ({edge_map.width}x{edge_map.height})")
        if reference is not None:
            if data["semantically_identical"]:
                self.info("[green]✓ Same synonymous-set sequence as the reference[/green]")
            else:
                self.error("[red]✗ Set sequence differs from the reference[/red]")
            self.info(f"  Differing pixels: {data['differing_pixels']}")
        return symbols

    def analyze(self, input_path: Path, partition_path: Path | None = None, model: Path | None = None) -> dict:
        """Print Shannon and semantic entropy of an edge map's block source."""
        partition = self.load_partition(partition_path)
        blocks = self.load_blocks(input_path)
        table = self._model_for(blocks, model)

        h = shannon_entropy(table)
        hs = semantic_entropy(partition, table)
        data = {
            "input": str(input_path),
            "m": len(blocks),
            "sets": partition.num_sets,
            "H_bits_pb": h,
            "Hs_sebits_pb": hs,
            "ideal_saving": (h - hs) / h if h else 0.0,
        }
        if self.json_output:
            self.emit_json(data)
            return data

        self.info(Panel.fit(f"[bold]Entropy of {input_path}[/bold]", style="cyan"))
        out = Table(show_header=False, box=None, padding=(0, 2))
        out.add_column("Property", style="cyan")
        out.add_column("Value")
        out.add_row("Blocks (m):", str(data["m"]))
        out.add_row("Synonymous sets:", str(partition.num_sets))
        out.add_row("H:", f"{h:.4f} bit/pb")
        out.add_row("H_s:", f"{hs:.4f} sebit/pb")
        out.add_row("Ideal saving:", f"{data['ideal_saving'] * 100:.4f}%")
        self.info(out)

        if self.verbose:
            sets = Table(show_header=True)
            sets.add_column("Set", style="cyan")
            sets.add_column("Members")
            sets.add_column("Probability", justify="right")
            for k, members in enumerate(partition.sets):
                p = set_probability(partition, table, k)
                sets.add_row(partition.name_of(k), " ".join(map(str, members)), f"{float(p):.6f}")
            self.detail(sets)
        return data

    def bench(
        self,
        inputs: list[Path],
        partition_path: Path | None = None,
        model_source: str | None = None,
        workers: int | None = None,
        csv_path: Path | None = None,
    ):
        """Compare traditional AC with SAC over a corpus and write the CSV report."""
        partition = self.load_partition(partition_path)
        source = ModelSource(model_source or self.config.model_source)
        with self.logger.track("bench", f"{len(inputs)} files, {source} model") as event:
            result = batch(inputs, partition, source, workers or self.config.workers, self.config.model_total)
            event.details["failed"] = len(result.failed)

        if csv_path is not None:
            try:
                write_csv(result, csv_path)
            except OSError as exc:
                raise SacError(f"Cannot write {csv_path}: {exc.strerror or exc}") from exc

        aggregate = result.aggregate
        if self.json_output:
            self.emit_json(
                {
                    "model_source": str(source),
                    "files": [
                        {
                            "file": r.file,
                            "m": r.m,
                            "L_AC_sebits": r.l_ac,
                            "L_SAC_sebits": r.l_sac,
                            "header_bytes": r.header_bytes,
                            "saving": r.saving,
                            "gap": r.gap,
                            "error": r.error,
                        }
                        for r in result.reports
                    ],
                    "aggregate": None
                    if aggregate is None
                    else {
                        "mean_saving": aggregate.saving,
                        "weighted_saving": aggregate.weighted_saving,
                        "corpus_saving": aggregate.corpus_saving,
                        "mean_gap": aggregate.gap,
                        "mean_avg_AC": aggregate.avg_ac,
                        "mean_avg_SAC": aggregate.avg_sac,
                    },
                    "ideal_saving": result.ideal_saving,
                }
            )
            return result

        rows = Table(show_header=True)
        rows.add_column("File", style="cyan")
        rows.add_column("m", justify="right")
        rows.add_column("L_AC", justify="right")
        rows.add_column("L_SAC", justify="right")
        rows.add_column("Saving", justify="right")
        rows.add_column("Gap (sebit/pb)", justify="right")
        for r in result.reports:
            if r.ok:
                rows.add_row(r.file, str(r.m), str(r.l_ac), str(r.l_sac), f"{r.saving * 100:.3f}%", f"{r.gap:.2e}")
            else:
                rows.add_row(r.file, "", "", "", "", f"[red]{r.error}[/red]")
        if self.verbose or len(result.reports) <= 20:
            self.info(rows)

        if aggregate is not None:
            summary = Table(show_header=False, box=None, padding=(0, 2))
            summary.add_column("Property", style="cyan")
            summary.add_column("Value")
            summary.add_row("Files:", f"{aggregate.files} ok, {len(result.failed)} failed")
            summary.add_row("Mean saving:", f"{aggregate.saving * 100:.4f}%")
            summary.add_row("Corpus saving:", f"{aggregate.corpus_saving * 100:.4f}%")
            if result.ideal_saving is not None:
                summary.add_row("(H - H_s) / H:", f"{result.ideal_saving * 100:.4f}%")
            summary.add_row("Mean gap:", f"{aggregate.gap:.3e} sebit/pb")
            self.info(Panel.fit("[bold]Corpus summary[/bold]", style="cyan"))
            self.info(summary)
        if csv_path is not None:
            self.info(f"[green]✓ CSV report written to {csv_path}[/green]")
        return result

    def gen(self, count: int, width: int, height: int, seed: int, output_dir: Path, raw: bool = False) -> list[Path]:
        """Write a synthetic corpus of polygon-outline edge maps."""
        with self.logger.track("gen", f"{count} maps of {width}x{height}, seed {seed}"):
            maps = generate_corpus(count, width, height, seed)
        try:
            output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise SacError(f"Cannot create {output_dir}: {exc.strerror or exc}") from exc

        paths = []
        for i, edge_map in enumerate(maps):
            path = output_dir / f"edge_{i:03d}.pbm"
            self._write(path, format_pbm(edge_map, raw=raw))
            paths.append(path)

        if self.json_output:
            self.emit_json({"files": [str(p) for p in paths]})
        else:
            self.info(f"[green]✓ Wrote {len(paths)} edge maps to {output_dir}[/green]")
            for path in paths:
                self.detail(f"  {path}")
        return paths

    def verify(self, max_m: int | None = None, alphabet: int | None = None, trials: int | None = None, seed: int = 0):
        """Run the self-checks; raises SacError with the first counterexample."""
        cfg = self.config
        with self.logger.track("verify", "Exhaustive bound sweep and oracle trials"):
            results = run_all(
                cfg.max_m if max_m is None else max_m,
                cfg.alphabet if alphabet is None else alphabet,
                cfg.trials if trials is None else trials,
                seed,
            )

        if self.json_output:
            self.emit_json(
                [
                    {"check": r.name, "cases": r.cases, "passed": r.passed, "counterexample": r.counterexample}
                    for r in results
                ]
            )
        else:
            table = Table(show_header=True)
            table.add_column("Check", style="cyan")
            table.add_column("Cases", justify="right")
            table.add_column("Result")
            for r in results:
                table.add_row(r.name, str(r.cases), "[green]✓ pass[/green]" if r.passed else "[red]✗ FAIL[/red]")
            self.info(table)

        failed = next((r for r in results if not r.passed), None)
        if failed is not None:
            raise SacError(f"{failed.name} failed: {failed.counterexample}")
        return results

    def validate(self, partition_path: Path, model: Path | None = None, alphabet: int = BLOCK_ALPHABET) -> None:
        """Check a partition file (and optional model sidecar) and list every issue found."""
        issues: list[tuple[str, Issue]] = []
        partition = None
        try:
            partition = parse_partition_file(self._read(partition_path), Alphabet(alphabet))
        except ValidationError as exc:
            issues.extend(("partition", issue) for issue in exc.issues)

        if model is not None:
            table = parse_model_file(self._read(model))
            issues.extend(("model", issue) for issue in validate(table, Alphabet(alphabet)))

        if self.json_output:
            self.emit_json(
                {
                    "valid": not issues,
                    "sets": partition.num_sets if partition is not None else None,
                    "issues": [{"file": where, "kind": str(i.kind), "message": str(i)} for where, i in issues],
                }
            )
        elif not issues:
            self.info(f"[green]✓ {partition_path} is a valid partition[/green]")
            if partition is not None:
                self.info(f"  {partition.num_sets} sets over {alphabet} symbols")
        else:
            for where, issue in issues:
                self.error(f"  [yellow]{where}[/yellow]: {issue}")

        if issues:
            raise SacError(f"{len(issues)} validation issue(s) found")

    def init_config(self, force: bool = False) -> Path:
        """Write a default .sac.toml in the working directory."""
        config_path = self.root / CONFIG_FILENAME
        if config_path.exists() and not force:
            self.info(f"[yellow]Config file already exists: {config_path}[/yellow]")
            if not click.confirm("Overwrite?", default=False):
                self.info("Aborted.")
                return config_path

        content = generate_config(self.config)
        try:
            config_path.write_text(content)
        except OSError as exc:
            raise SacError(f"Cannot write {config_path}: {exc.strerror or exc}") from exc
        self.info(f"[green]✓ Config written to {config_path}[/green]")
        return config_path
