"""
Table and report output: CSV through pandas, JSON through pyserde and a
plain-text run summary rendered with jinja2.
"""
import json
import logging
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Optional, Sequence, List

import pandas as pd
from jinja2 import Environment
from serde import to_dict
from serde.json import to_json

from .config import OutputFormat
from .models import StmRegException, BoundReport


logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12g'


class OutputError(StmRegException):
    def __init__(self, msg, **kwargs):
        kwargs.setdefault('exit_code', 2)
        super().__init__(msg, **kwargs)


summary_template = Environment(trim_blocks=True, lstrip_blocks=True).from_string(r"""
stmreg {{ version }} :: {{ command }}
{% for r in reports %}
  [{{ 'PASS' if r.passed else 'FAIL' }}] {{ r.name }}  margin={{ '%.3e'|format(r.margin) }}  tol={{ '%.1e'|format(r.tolerance) }}
  {%- if r.detail and not r.passed %}  ({{ r.detail }}){% endif %}

{% endfor %}
{{ passed }}/{{ reports|length }} checks passed
""")


def _columns(rows: Sequence) -> List[str]:
    first = rows[0]
    if not is_dataclass(first):
        raise OutputError(f'rows must be dataclass records, got {type(first).__name__}')
    kind = type(first)
    if any(type(row) is not kind for row in rows):
        raise OutputError('rows of one table must share a record type')
    return [f.name for f in fields(kind)]


def _flat(row) -> dict:
    """Nested values (report contexts, per-ℓ cells) become JSON text in one cell."""
    record = to_dict(row)
    return {key: json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value
            for key, value in record.items()}


def render_table(rows: Sequence, fmt: OutputFormat, columns: Optional[List[str]] = None) -> str:
    """
    CSV with a fixed column order and 12 significant digits, or a JSON list
    with the record field names.
    """
    if not rows:
        raise OutputError('nothing to write: empty table')
    names = columns or _columns(rows)
    if fmt is OutputFormat.json:
        if columns:
            return json.dumps([{k: to_dict(row)[k] for k in names} for row in rows], indent=2)
        return to_json(list(rows))
    frame = pd.DataFrame([_flat(row) for row in rows], columns=names)
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def stamp_version(text: str, fmt: OutputFormat, version: str) -> str:
    """
    Mark a rendered table with the library version: a ``# stmreg <version>``
    line ahead of the CSV header, or a ``version`` key on every JSON record.
    """
    if fmt is OutputFormat.json:
        return json.dumps([dict(record, version=version) for record in json.loads(text)], indent=2)
    return f'# stmreg {version}\n{text}'


def emit_table(rows: Sequence, fmt: OutputFormat, out: Optional[Path] = None,
               columns: Optional[List[str]] = None, version: Optional[str] = None) -> str:
    """
    Write :func:`render_table` output to ``out``, or return it for stdout
    when ``out`` is None. With ``version`` the output is stamped by
    :func:`stamp_version`.
    """
    text = render_table(rows, fmt, columns)
    if version is not None:
        text = stamp_version(text, fmt, version)
    if out is not None:
        try:
            Path(out).write_text(text)
        except OSError as e:
            raise OutputError(f'cannot write {out}: {e}')
        logger.info('wrote %d rows to %s', len(rows), out)
    return text


def render_summary(command: str, reports: Sequence[BoundReport], version: str) -> str:
    passed = sum(1 for r in reports if r.passed)
    return summary_template.render(command=command, reports=reports, passed=passed, version=version)
