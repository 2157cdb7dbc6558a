"""
Command Line Interface for Phase Annihilator

Exit codes: 0 success, 2 solve did not converge / bound or tolerance missed,
1 input or I/O error (diagnostic on stderr).
"""

import io
import json
import logging
import sys
from pathlib import Path
from typing import Union

import click

from . import __version__
from .core.quadrature import FunctionalSpec
from .core.funcspace import Problem
from .core.solver import (
    Partition,
    SolveMode,
    SolveReport,
    functional_for,
    solve_complex,
    solve_generic,
    solve_hobby_rice,
    solve_improved_real,
    solve_real_part,
    verify_report,
)
from .errors import MalformedDocumentError, ProblemFormatError
from .parsers.problem_parser import ProblemParser
from .parsers.report_parser import ReportParser
from .parsers.spec_parser import FunctionalSpecParser
from .utils.sampling import sample_rows, write_samples
from .utils.settings import Settings, dump_settings, load_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_SOLVED = 2

MODES = [mode.value for mode in SolveMode]

InputDocument = Union[Problem, FunctionalSpec]


def _fail(message: str) -> None:
    logger.error(message)
    click.echo(f"Error: {message}", err=True)
    sys.exit(EXIT_INPUT_ERROR)


def _load_input(path: Path) -> InputDocument:
    """Problem document (has "functions") or functional spec (has "linear")."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IOError(f"Error reading input {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedDocumentError(f"Invalid JSON in input {path}: {e}") from e
    if isinstance(data, dict) and "linear" in data:
        return FunctionalSpecParser().parse_text(text)
    return ProblemParser().parse_text(text)


def _settings(ctx: click.Context) -> Settings:
    return load_settings(ctx.obj.get("config_path"))


@click.group()
@click.version_option(version=__version__)
@click.option('-v', '--verbose', count=True, help='Increase log verbosity (-v info, -vv debug)')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False, path_type=Path),
              help='Settings TOML file (default: ~/.phase_annihilator.toml if present)')
@click.pass_context
def cli(ctx, verbose, config_path):
    """Phase Annihilator - circle-valued functions annihilating functionals"""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(dir_okay=False, path_type=Path),
              help='Problem JSON, or functional spec JSON for --mode generic')
@click.option('--mode', type=click.Choice(MODES), default=SolveMode.COMPLEX.value, show_default=True)
@click.option('--epsilon', type=float, default=0.1, show_default=True, help='Slack for --mode improved')
@click.option('--tol', type=float, default=None,
              help='Residual tolerance (default 1e-8 * (1 + sum of L1 norms))')
@click.option('--seed', type=int, default=None, help='Zero finder seed (default 0)')
@click.option('--max-level', type=int, default=None, help='Deepest triangulation level (default 8)')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False, path_type=Path),
              help='Write the report JSON here (default: stdout)')
@click.option('--samples', 'samples_path', type=click.Path(dir_okay=False, path_type=Path),
              help='Also write a samples CSV')
@click.option('--n-samples', type=int, default=201, show_default=True)
@click.option('--partition', type=click.Choice([p.value for p in Partition]), default=Partition.LIFTED.value,
              show_default=True, help='Parameterisation for --mode hobby-rice')
@click.option('--split-complex', is_flag=True, help='Hobby-rice on complex data: split into real and imaginary parts')
@click.option('--timing', is_flag=True, help='Include wall time in the report')
@click.pass_context
def solve(ctx, input_path, mode, epsilon, tol, seed, max_level, report_path, samples_path, n_samples,
          partition, split_complex, timing):
    """Find h annihilating the input functionals"""
    if n_samples < 1:
        _fail("--n-samples must be positive")
    try:
        settings = _settings(ctx).with_overrides(abs_tol=tol, seed=seed, max_level=max_level)
        cfg = settings.to_solver_config()
        document = _load_input(input_path)
        solve_mode = SolveMode(mode)

        if isinstance(document, FunctionalSpec):
            if solve_mode is not SolveMode.GENERIC:
                raise ProblemFormatError("Functional spec input requires --mode generic")
            report = solve_generic(document, cfg)
        elif solve_mode is SolveMode.COMPLEX:
            report = solve_complex(document, cfg)
        elif solve_mode is SolveMode.REAL_PART:
            report = solve_real_part(document, cfg)
        elif solve_mode is SolveMode.GENERIC:
            report = solve_generic(functional_for(document, SolveMode.GENERIC), cfg)
        elif solve_mode is SolveMode.HOBBY_RICE:
            report = solve_hobby_rice(document, cfg, Partition(partition), split_complex)
        else:
            report = solve_improved_real(document, epsilon, cfg)

        parser = ReportParser(include_timing=timing)
        if report_path is not None:
            parser.write(report, report_path)
        else:
            click.echo(parser.dumps(report), nl=False)
        if samples_path is not None:
            write_samples(sample_rows(report.phase_tree, n_samples), samples_path)
    except (ValueError, TypeError, IOError, RuntimeError) as e:
        _fail(str(e))

    summary = (f"mode={report.mode} converged={report.converged} residual={report.residual_norm:.3e} "
               f"bound_satisfied={report.bound_satisfied}")
    logger.info(summary)
    if report_path is not None:
        click.echo(summary, err=True)
    sys.exit(EXIT_OK if report.succeeded else EXIT_NOT_SOLVED)


@cli.command()
@click.option('--report', 'report_path', required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option('--input', 'input_path', required=True, type=click.Path(dir_okay=False, path_type=Path),
              help='The problem or functional spec the report was solved for')
@click.pass_context
def verify(ctx, report_path, input_path):
    """Re-check a report's residual at a tighter quadrature tolerance"""
    try:
        settings = _settings(ctx)
        report: SolveReport = ReportParser().parse(report_path)
        document = _load_input(input_path)
        if isinstance(document, FunctionalSpec):
            spec = document
        else:
            split = bool(report.diagnostics.get("split_complex", False))
            spec = functional_for(document, SolveMode(report.mode), split)
        result = verify_report(report, spec, settings.quadrature)
    except (ValueError, TypeError, IOError, RuntimeError) as e:
        _fail(str(e))

    ok = result.residual_norm <= report.abs_tol
    click.echo(f"residual_norm={result.residual_norm:.6e} tolerance={report.abs_tol:.6e}")
    if result.w11 is not None:
        click.echo(f"w11={result.w11:.12g} bound={report.bound:.12g}")
    if result.sign_changes is not None:
        click.echo(f"sign_changes={result.sign_changes} bound={report.bound:g}")
    click.echo("OK" if ok else "FAILED")
    sys.exit(EXIT_OK if ok else EXIT_NOT_SOLVED)


@cli.command()
@click.option('--report', 'report_path', required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option('--n-samples', type=int, default=201, show_default=True)
@click.option('--output', 'output_path', type=click.Path(dir_okay=False, path_type=Path),
              help='CSV file (default: stdout)')
def sample(report_path, n_samples, output_path):
    """Write t, g(t), Re h, Im h at uniform points as CSV"""
    try:
        report = ReportParser().parse(report_path)
        rows = sample_rows(report.phase_tree, n_samples)
        if output_path is not None:
            write_samples(rows, output_path)
        else:
            buffer = io.StringIO()
            write_samples(rows, buffer)
            click.echo(buffer.getvalue(), nl=False)
    except (ValueError, TypeError, IOError, RuntimeError) as e:
        _fail(str(e))
    sys.exit(EXIT_OK)


@cli.command()
@click.pass_context
def config(ctx):
    """Print the effective settings as TOML"""
    try:
        settings = _settings(ctx)
    except (ValueError, IOError) as e:
        _fail(str(e))
    click.echo(dump_settings(settings), nl=False)


def main():
    """Main entry point"""
    cli()


if __name__ == "__main__":
    main()
