"""Command-line driver: check, phase-space, describe and examples.

Exit codes: 0 every selected check passes, 1 a check failed (or a
precondition of phase-space), 2 usage or missing attachment, 3 parse or
construction error.
"""

import functools
import sys
from typing import Optional

import click

from homalgebroid.config import load_config
from homalgebroid.errors import (AlgebroidError, AttachmentError, PreconditionError,
                                 StructureParseError)
from homalgebroid.fixtures import fixture_names, fixture_text, load_fixture
from homalgebroid.logger import AlgebroidLogger, log_debug, log_error, log_info, log_warning
from homalgebroid.runner import emit_phase_space, parse_selection, run_checks
from homalgebroid.structure_file import StructureFile, parse_structure
from homalgebroid.timing import CheckTimings

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_PARSE = 3


def _fail(message: str, code: int) -> None:
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def handle_errors(func):
    """Map library exceptions onto the exit-code contract."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except AttachmentError as e:
            log_error(f"Attachment error: {e}")
            _fail(str(e), EXIT_USAGE)
        except PreconditionError as e:
            log_error(f"Precondition failed ({e.law}): {e}")
            _fail(str(e), EXIT_FAIL)
        except StructureParseError as e:
            log_error(f"Parse error: {e}")
            _fail(str(e), EXIT_PARSE)
        except AlgebroidError as e:
            log_error(f"Invalid structure: {e}")
            _fail(str(e), EXIT_PARSE)
        except KeyError as e:
            log_warning(f"Unknown name: {e}")
            _fail(str(e.args[0]) if e.args else 'unknown name', EXIT_USAGE)
    return wrapper


def _load(path: str) -> StructureFile:
    return parse_structure(path)


@click.group()
@click.option('--log-level', default=None,
              type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              help='Override the configured log level.')
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str]):
    """Exact verification of hom-Lie algebroid structures."""
    ctx.ensure_object(dict)
    ctx.obj['config'] = load_config()
    if log_level:
        AlgebroidLogger.get_instance().set_level(log_level)
        log_debug(f"Log level overridden to {log_level.upper()}")


@cli.command()
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('--only', default=None, help='Comma-separated check names.')
@click.option('--seed', type=int, default=None, help='Seed for the random section batches.')
@click.option('--json', 'json_path', type=click.Path(dir_okay=False, allow_dash=True), default=None,
              help="Write the machine-readable report here ('-' for stdout).")
@click.option('--timings', is_flag=True, default=False, help='Include elapsed seconds per check.')
@click.pass_context
@handle_errors
def check(ctx: click.Context, path: str, only: Optional[str], seed: Optional[int],
          json_path: Optional[str], timings: bool):
    """Verify the structure in PATH."""
    config = ctx.obj['config']
    include_timings = timings or config.report.include_timings
    sf = _load(path)
    report = run_checks(sf, parse_selection(only), seed, config, CheckTimings())
    log_info(f"{sf.name}: verdict {report.verdict} ({len(report.failures())} failing entries)")
    if json_path == '-':
        click.echo(report.to_json(include_timings, config.report.indent), nl=False)
    else:
        click.echo(report.render_text(include_timings), nl=False)
        if json_path:
            with open(json_path, 'w', encoding='utf-8') as f:
                f.write(report.to_json(include_timings, config.report.indent))
            log_debug(f"JSON report written to {json_path}")
    sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)


@cli.command('phase-space')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.option('-o', '--output', required=True, type=click.Path(dir_okay=False),
              help='Where to write the phase-space structure file.')
@click.option('--seed', type=int, default=None)
@click.pass_context
@handle_errors
def phase_space(ctx: click.Context, path: str, output: str, seed: Optional[int]):
    """Build the phase space of PATH and write it as a structure file."""
    sf = _load(path)
    result = emit_phase_space(sf, output, seed, ctx.obj['config'])
    log_info(f"Phase space {result.name} written to {output}")
    click.echo(f"Wrote {result.name} (rank {result.structure.rank}) to {output}")


@cli.command()
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@handle_errors
def describe(path: str):
    """Pretty-print the structure in PATH."""
    sf = _load(path)
    click.echo(sf.structure.describe())
    if sf.description:
        click.echo(f"  {sf.description}")
    attachments = sf.attachments()
    click.echo(f"  attachments: {', '.join(attachments) if attachments else 'none'}")


@cli.group()
def examples():
    """Builtin example structures."""


@examples.command('list')
def list_examples():
    for name in fixture_names():
        sf = load_fixture(name)
        click.echo(f"{name:24} rank {sf.structure.rank} over {sf.ring}")


@examples.command('write')
@click.argument('name')
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None,
              help='Target file; stdout when omitted.')
@handle_errors
def write_example(name: str, output: Optional[str]):
    """Write the example NAME as a structure file."""
    text = fixture_text(name)
    if output:
        with open(output, 'w', encoding='utf-8') as f:
            f.write(text)
        click.echo(f"Wrote {name} to {output}")
    else:
        click.echo(text, nl=False)


def main():
    cli(obj={})
