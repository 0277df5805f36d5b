"""
Adams Tower Engine - Command-Line Entry Point

Validates truncated simplicial algebras, computes their homotopy, and runs
the verification suites for the bar construction and the modified Adams
tower. Reports go to stdout, logs to stderr.

Exit status: 0 no falsification, 1 falsification, 2 usage, parse or
truncation error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add parent directory to path so that config/ and utils/ resolve
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import current_settings
from src.models.errors import EngineError
from src.models.exactlin import Field
from src.models.report import RunReport
from src.models.simplicial import Truncation, homotopy_groups, validate
from src.services.bar import build_bar
from src.services.campaign import OUTPUT_FORMATS, SUITES, RunConfig, load_input, new_run_report, run_verification
from src.services.fixtures import FIXTURES
from src.services.schema import export_schema
from utils.helpers import (
    configure_logging, create_error_message, export_to_csv, fixture_hash,
    pi_table_frame, render_run, safe_filename,
)

logger = logging.getLogger(__name__)


def _common_parser() -> argparse.ArgumentParser:
    defaults = current_settings.get_run_defaults()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--field', default=defaults['field'], help="q or fp:<p>")
    common.add_argument('--max-degree', type=int, default=defaults['max_degree'], metavar='N')
    common.add_argument('--max-weight', type=int, default=defaults['max_weight'], metavar='W')
    common.add_argument('--out', choices=OUTPUT_FORMATS, default=defaults['out'])
    common.add_argument('--seed', type=int, default=defaults['seed'])
    common.add_argument('--cap', type=int, default=defaults['cap'], help="basis elements per block")
    common.add_argument('--save', action='store_true', help="also write the output under the report directory")
    common.add_argument('-v', '--verbose', action='count', default=0)
    return common


def _add_source(parser: argparse.ArgumentParser, many: bool = False):
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--fixture', action='append' if many else 'store', choices=sorted(FIXTURES))
    source.add_argument('--input', type=Path, help="schema file")


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog='adams', description=current_settings.APP_NAME)
    commands = parser.add_subparsers(dest='command', required=True)

    validate_cmd = commands.add_parser('validate', parents=[common], help="check simplicial identities")
    _add_source(validate_cmd)

    pi_cmd = commands.add_parser('pi', parents=[common], help="homotopy dimensions per (q, w)")
    _add_source(pi_cmd)
    pi_cmd.add_argument('--q-max', type=int, default=None)
    pi_cmd.add_argument('--bar', type=int, default=0, metavar='R', help="apply the bar construction R times")

    verify_cmd = commands.add_parser('verify', parents=[common], help="run a verification suite")
    verify_cmd.add_argument('suite', choices=SUITES + ('all',))
    _add_source(verify_cmd, many=True)
    for name in ('t', 'q', 's', 'p'):
        verify_cmd.add_argument(f'--{name}', type=int, default=None)
    verify_cmd.add_argument('--samples', type=int, default=8, help="trees drawn per block by sampled checks")

    commands.add_parser('fixtures', parents=[common], help="list bundled fixtures")

    export_cmd = commands.add_parser('export', parents=[common], help="print an object in schema form")
    _add_source(export_cmd)
    export_cmd.add_argument('--bar', type=int, default=0, metavar='R')
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge parsed flags over the settings into a RunConfig"""
    fixtures = getattr(args, 'fixture', None) or ()
    if isinstance(fixtures, str):
        fixtures = (fixtures,)
    return RunConfig(
        field=Field.parse(args.field),
        truncation=Truncation(args.max_degree, args.max_weight),
        command=args.command if args.command != 'verify' else f"verify {args.suite}",
        fixtures=tuple(fixtures),
        input_path=getattr(args, 'input', None),
        output=args.out,
        seed=args.seed,
        cap=args.cap,
        t=getattr(args, 't', None),
        q=getattr(args, 'q', None),
        s=getattr(args, 's', None),
        p=getattr(args, 'p', None),
        samples=getattr(args, 'samples', 8),
    )


def cmd_validate(config: RunConfig) -> RunReport:
    run = new_run_report(config)
    for name, X in load_input(config).items():
        run.fixture_hashes[name] = fixture_hash(export_schema(X))
        run.add_check('validate', name, validate(X))
    return run


def cmd_pi(config: RunConfig, q_max: Optional[int], times: int) -> str:
    """Homotopy tables of every selected object, in the chosen format"""
    q_max = config.N - 1 if q_max is None else q_max
    blocks = []
    rows = []
    for name, X in load_input(config).items():
        V = build_bar(X, times, config.cap) if times else X
        table = homotopy_groups(V, q_max)
        rows.extend({'object': V.name, 'q': q, 'w': w, 'dim': dim} for (q, w), dim in sorted(table.items()))
        blocks.append(f"{V.name}\n{pi_table_frame(table).to_string()}")
    if config.output == 'csv':
        return export_to_csv(rows, ['object', 'q', 'w', 'dim'])
    if config.output == 'record':
        return ''.join(f"pi {row['object']} {row['q']} {row['w']} {row['dim']}\n" for row in rows)
    return '\n\n'.join(blocks) + '\n'


def cmd_fixtures(config: RunConfig) -> str:
    rows = []
    for name, fixture in FIXTURES.items():
        try:
            digest = fixture_hash(export_schema(fixture.build(config.field, config.truncation)))
        except ValueError as exc:
            digest = f"unavailable ({exc})"
        rows.append({'name': name, 'description': fixture.description, 'hash': digest})
    if config.output == 'csv':
        return export_to_csv(rows, ['name', 'description', 'hash'])
    return ''.join(f"{row['name']:<16}{row['hash']:<34}{row['description']}\n" for row in rows)


def cmd_export(config: RunConfig, times: int) -> str:
    return ''.join(export_schema(build_bar(X, times, config.cap) if times else X)
                   for X in load_input(config).values())


def _emit(text: str, config: RunConfig, args: argparse.Namespace):
    sys.stdout.write(text)
    if args.save:
        current_settings.ensure_directories()
        extension = {'csv': 'csv', 'record': 'txt'}.get(config.output, 'log')
        path = current_settings.REPORT_OUTPUT_DIR / safe_filename(f"{config.command}_{config.seed}.{extension}")
        path.write_text(text)
        logger.info("wrote %s", path)


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(current_settings.LOG_LEVEL, args.verbose)

    try:
        current_settings.validate()
        config = resolve_config(args)
        if args.command == 'validate':
            run = cmd_validate(config)
            _emit(render_run(run, config.output), config, args)
            return run.exit_status
        if args.command == 'verify':
            run = run_verification(config, args.suite)
            _emit(render_run(run, config.output), config, args)
            return run.exit_status
        if args.command == 'pi':
            _emit(cmd_pi(config, args.q_max, args.bar), config, args)
        elif args.command == 'fixtures':
            _emit(cmd_fixtures(config), config, args)
        elif args.command == 'export':
            _emit(cmd_export(config, args.bar), config, args)
        return 0
    except (EngineError, ValueError, KeyError, OSError) as e:
        sys.stderr.write(create_error_message(e, f"running {args.command}") + '\n')
        return 2


if __name__ == "__main__":
    sys.exit(main())
