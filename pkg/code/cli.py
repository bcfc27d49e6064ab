import logging
from pathlib import Path
from typing import Optional

import typer
import uvicorn
from rich.console import Console
from rich.table import Table

from code.splitspan.config import DEFAULT_ORACLE_CAP, MAX_BUNEMAN_SPLITS, Config
from code.splitspan.errors import SplitSpanError
from code.splitspan.formats import exporters
from code.splitspan.orchestrator import Orchestrator, PipelineResult

app = typer.Typer(help="Exact tight spans of totally split-decomposable metrics.")
console = Console()
err_console = Console(stderr=True)

EXIT_MISMATCH = 1
EXIT_INVALID = 2

InputArg = typer.Argument(..., help="Distance matrix or splits file")
OutputOpt = typer.Option(None, "--output", "-o", help="Write the result here instead of stdout")
FormatOpt = typer.Option("text", "--format", "-f", help="json, dot or text")
KindOpt = typer.Option(None, "--kind", help="matrix or splits (default: detect from the file)")
DecimalOpt = typer.Option(None, "--decimal", help="Add k-digit decimal approximations to JSON output")
MaxSplitsOpt = typer.Option(MAX_BUNEMAN_SPLITS, "--max-splits", help="Bound on splits for Buneman vertex enumeration")
WorkersOpt = typer.Option(1, "--workers", help="Threads for isolation indices and oracle edge tests")
VerboseOpt = typer.Option(0, "--verbose", "-v", count=True, help="-v for INFO, -vv for DEBUG")


def _setup_logging(verbosity: int) -> None:
    level = logging.DEBUG if verbosity >= 2 else logging.INFO if verbosity == 1 else logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s', force=True)


def _fail(message: str, code: int = EXIT_INVALID) -> None:
    err_console.print(f"[bold red]Error:[/bold red] {message}", markup=True, highlight=False)
    raise typer.Exit(code=code)


def _build(input_path: str, **kwargs) -> Orchestrator:
    try:
        config = Config(input_path=input_path, **kwargs)
    except ValueError as e:
        _fail(str(e))
    _setup_logging(config.verbosity)
    return Orchestrator(config)


def _emit(result: PipelineResult, config: Config) -> None:
    try:
        rendered = result.render(config.output_format)
    except SplitSpanError as e:
        _fail(str(e))
    if config.output_path:
        Path(config.output_path).write_text(rendered)
        console.print(f"[bold green]Wrote {config.output_format} output to {config.output_path}[/bold green]")
        console.print(result.summary, markup=False, highlight=False, end="")
    else:
        typer.echo(rendered, nl=False)


@app.command()
def decompose(
    input_path: str = InputArg,
    output: Optional[str] = OutputOpt,
    fmt: str = FormatOpt,
    residual: Optional[str] = typer.Option(None, "--residual", help="Also write the residual matrix here"),
    decimal: Optional[int] = DecimalOpt,
    workers: int = WorkersOpt,
    verbose: int = VerboseOpt,
):
    """
    Split-decompose a distance matrix and write the weighted splits.
    """
    orchestrator = _build(input_path, input_kind="matrix", output_path=output, output_format=fmt,
                          decimal_digits=decimal, workers=workers, verbosity=verbose)
    try:
        result = orchestrator.decompose(orchestrator.load())
    except SplitSpanError as e:
        _fail(str(e))
    if residual:
        Path(residual).write_text(exporters.matrix_to_text(result.artifact.residual))
    _emit(result, orchestrator.config)
    if not orchestrator.config.output_path:
        err_console.print(result.summary, markup=False, highlight=False, end="")


@app.command()
def check(
    input_path: str = InputArg,
    output: Optional[str] = OutputOpt,
    fmt: str = FormatOpt,
    kind: Optional[str] = KindOpt,
    verbose: int = VerboseOpt,
):
    """
    Weak compatibility test and component classification.
    """
    orchestrator = _build(input_path, input_kind=kind, output_path=output, output_format=fmt, verbosity=verbose)
    try:
        result = orchestrator.check(orchestrator.load())
    except SplitSpanError as e:
        _fail(str(e))
    if fmt == "text" and not output:
        _print_components(result)
        return
    _emit(result, orchestrator.config)


@app.command()
def buneman(
    input_path: str = InputArg,
    output: Optional[str] = OutputOpt,
    fmt: str = FormatOpt,
    kind: Optional[str] = KindOpt,
    max_splits: int = MaxSplitsOpt,
    verbose: int = VerboseOpt,
):
    """
    Build the Buneman complex of a split system.
    """
    orchestrator = _build(input_path, input_kind=kind, output_path=output, output_format=fmt,
                          max_splits=max_splits, verbosity=verbose)
    try:
        result = orchestrator.buneman(orchestrator.load())
    except SplitSpanError as e:
        _fail(str(e))
    _emit(result, orchestrator.config)


@app.command()
def tightspan(
    input_path: str = InputArg,
    output: Optional[str] = OutputOpt,
    fmt: str = FormatOpt,
    kind: Optional[str] = KindOpt,
    decimal: Optional[int] = DecimalOpt,
    max_splits: int = MaxSplitsOpt,
    verbose: int = VerboseOpt,
    drop_edge: Optional[int] = typer.Option(None, "--drop-edge", hidden=True),
):
    """
    Assemble the tight span as a polytopal complex.
    """
    orchestrator = _build(input_path, input_kind=kind, output_path=output, output_format=fmt,
                          decimal_digits=decimal, max_splits=max_splits, verbosity=verbose)
    try:
        result = orchestrator.tightspan(orchestrator.load(), drop_edge=drop_edge)
    except SplitSpanError as e:
        _fail(str(e))
    _emit(result, orchestrator.config)


@app.command()
def verify(
    input_path: str = InputArg,
    output: Optional[str] = OutputOpt,
    fmt: str = FormatOpt,
    kind: Optional[str] = KindOpt,
    oracle_cap: int = typer.Option(DEFAULT_ORACLE_CAP, "--oracle-cap", help="Largest taxon count the oracle accepts"),
    force_oracle_cap: bool = typer.Option(False, "--force-oracle-cap", help=f"Allow --oracle-cap above {DEFAULT_ORACLE_CAP}"),
    oracle_method: str = typer.Option(
        "walk", "--oracle-method", help="walk (bounded edges) or basis (every basic solution)"
    ),
    decimal: Optional[int] = DecimalOpt,
    workers: int = WorkersOpt,
    verbose: int = VerboseOpt,
    drop_edge: Optional[int] = typer.Option(None, "--drop-edge", hidden=True),
):
    """
    Compare the assembled tight span with the brute-force oracle.
    """
    orchestrator = _build(input_path, input_kind=kind, output_path=output, output_format=fmt,
                          oracle_cap=oracle_cap, allow_large_oracle=force_oracle_cap,
                          oracle_method=oracle_method, decimal_digits=decimal,
                          workers=workers, verbosity=verbose)
    try:
        result = orchestrator.verify(orchestrator.load(), drop_edge=drop_edge)
    except SplitSpanError as e:
        _fail(str(e))
    _emit(result, orchestrator.config)
    if not result.ok:
        err_console.print("[bold red]Verification failed[/bold red]")
        raise typer.Exit(code=EXIT_MISMATCH)


@app.command()
def serve(host: str = "127.0.0.1", port: int = 8000):
    """
    Start the API server.
    """
    console.print(f"[bold green]Starting API server on {host}:{port}[/bold green]")
    uvicorn.run("code.api.main:app", host=host, port=port)


def _print_components(result: PipelineResult) -> None:
    data = result.data
    if not data["weakly_compatible"]:
        console.print("[bold red]Not weakly compatible[/bold red]")
        console.print(result.summary, markup=False, highlight=False, end="")
        return
    console.print("[bold green]Weakly compatible[/bold green]")
    table = Table(title="Incompatibility components")
    table.add_column("Splits")
    table.add_column("Class")
    table.add_column("Parts")
    for component in data["components"]:
        parts = " ".join("{" + ",".join(p) + "}" for p in component["parts"])
        table.add_row(", ".join(f"S{i}" for i in component["splits"]), component["class"], parts)
    console.print(table)


if __name__ == "__main__":
    app()
