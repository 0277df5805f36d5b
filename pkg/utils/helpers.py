"""
Utility functions and helpers for the Adams tower engine
"""

import re
import sys
import hashlib
import logging
from typing import Dict, List, Mapping, Optional, Tuple

import pandas as pd

from src.models.report import RunReport

RECORD_COLUMNS = ['suite', 'fixture', 'check', 'key', 'measure', 'value', 'verdict', 'witness']


def configure_logging(level: str = 'WARNING', verbose: int = 0):
    """
    Send log output to stderr so that reports on stdout stay byte-stable

    Args:
        level: Level name from the settings
        verbose: Count of -v flags; 1 means INFO, 2 or more DEBUG
    """
    if verbose >= 2:
        level = 'DEBUG'
    elif verbose == 1:
        level = 'INFO'
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
        force=True
    )


def fixture_hash(text: str) -> str:
    """
    Generate MD5 hash of an exported schema for provenance

    Args:
        text: Schema text

    Returns:
        MD5 hash string
    """
    return hashlib.md5(text.encode()).hexdigest()


def records_frame(run: RunReport) -> pd.DataFrame:
    """Sorted report records as a DataFrame"""
    rows = [record.to_dict() for record in run.sorted_records()]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)


def pi_table_frame(table: Mapping[Tuple[int, int], int]) -> pd.DataFrame:
    """
    Homotopy dimensions as a q-by-w grid

    Args:
        table: {(q, w): dim}

    Returns:
        DataFrame indexed by q with one column per weight
    """
    if not table:
        return pd.DataFrame()
    frame = pd.DataFrame(
        [{'q': q, 'w': w, 'dim': dim} for (q, w), dim in sorted(table.items())]
    )
    grid = frame.pivot(index='q', columns='w', values='dim').fillna(0).astype(int)
    grid.columns = [f"w={w}" for w in grid.columns]
    return grid


def format_header(header: Dict[str, str]) -> str:
    return '\n'.join(f"# {key}: {value}" for key, value in header.items())


def format_human(run: RunReport) -> str:
    """
    Header plus an aligned table, failures first

    Args:
        run: Finished run

    Returns:
        Text for a terminal
    """
    frame = records_frame(run)
    lines = [format_header(run.header())]
    failures = frame[frame['verdict'] == 'FALSIFICATION']
    if not failures.empty:
        lines.append(f"\n{len(failures)} falsification(s):")
        lines.append(failures[['suite', 'fixture', 'check', 'key', 'measure', 'witness']].to_string(index=False))
    verdicts = frame[frame['measure'] == 'verdict']
    if not verdicts.empty:
        lines.append('')
        lines.append(verdicts[['suite', 'fixture', 'check', 'verdict']].to_string(index=False))
    measured = frame[frame['verdict'] == 'info']
    if not measured.empty:
        lines.append('')
        lines.append(measured[['suite', 'fixture', 'check', 'key', 'measure', 'value']].to_string(index=False))
    return '\n'.join(lines) + '\n'


def export_to_csv(data: List[Dict], columns: Optional[List[str]] = None) -> str:
    """
    Export data to CSV format

    Args:
        data: List of dictionaries to export
        columns: Column order (defaults to the keys of the first row)

    Returns:
        CSV string
    """
    if not data:
        return ""

    df = pd.DataFrame(data, columns=columns)
    return df.to_csv(index=False, lineterminator='\n')


def _quote(value: str) -> str:
    if value and re.fullmatch(r"[^\s\"=]+", value):
        return value
    return '"' + value.replace('\\', '\\\\').replace('"', '\\"') + '"'


def format_record(run: RunReport) -> str:
    """
    Structured text in the line style of the input schema

    One ``header <key> <value>`` line per provenance entry, then one
    ``record key=value ...`` line per report record.
    """
    lines = [f"header {key} {_quote(value)}" for key, value in run.header().items()]
    for record in run.sorted_records():
        fields = record.to_dict()
        lines.append('record ' + ' '.join(f"{name}={_quote(fields[name])}" for name in RECORD_COLUMNS))
    lines.append(f"status {run.exit_status}")
    return '\n'.join(lines) + '\n'


def render_run(run: RunReport, output: str) -> str:
    """Dispatch on the --out format"""
    if output == 'csv':
        body = export_to_csv([r.to_dict() for r in run.sorted_records()], RECORD_COLUMNS)
        return format_header(run.header()) + '\n' + body
    if output == 'record':
        return format_record(run)
    return format_human(run)


def safe_filename(filename: str) -> str:
    """
    Create safe filename by removing/replacing invalid characters

    Args:
        filename: Original filename

    Returns:
        Safe filename
    """
    invalid_chars = '<>:"/\\|?*'
    for char in invalid_chars:
        filename = filename.replace(char, '_')

    filename = re.sub(r'[_\s]+', '_', filename)

    return filename.strip('_.')


def create_error_message(error: Exception, context: str = "") -> str:
    """
    Create a one-line error message for stderr

    Args:
        error: Exception object
        context: Additional context about where error occurred

    Returns:
        Formatted error message
    """
    base_message = f"error ({type(error).__name__})"
    if context:
        base_message += f" while {context}"

    line = getattr(error, 'line', None)
    if line is not None:
        column = getattr(error, 'column', None)
        base_message += f" at line {line}" + (f", column {column}" if column is not None else '')

    error_detail = getattr(error, 'reason', None) or str(error)
    if error_detail:
        base_message += f": {error_detail}"

    return base_message
