"""Streaming CSV ingestion: dialects, schema inference, and typed table loads.

The parser is a hand-rolled state machine so that memory stays bounded by the
longest record (never by file size), malformed quoting is reported with line
numbers, and the quote character can be disabled entirely.
"""

from __future__ import annotations

import codecs
import io
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Iterator, Union

from .errors import (
    EmptySample,
    EmptySchema,
    InvariantViolation,
    RaggedRow,
    TypeCoercionFailure,
    UnbalancedQuote,
)

SEMANTIC_TYPES = ("id64", "integer", "decimal", "text", "unit_code")

#: One coerced cell. Text cells are never None; empty text stays "".
Cell = Union[int, Decimal, str, None]

_CHUNK_SIZE = 1 << 16

_INT_RE = re.compile(r"[+-]?\d+\Z")
_DEC_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)\Z")


@dataclass(frozen=True)
class CsvDialect:
    """Field/record separators. `\\r\\n` is always accepted alongside `\\n`;
    quotechar=None disables enclosure entirely."""

    delimiter: str = ","
    quotechar: str | None = '"'
    lineterminator: str = "\n"

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise InvariantViolation("delimiter must be a single character")
        if self.quotechar is not None and len(self.quotechar) != 1:
            raise InvariantViolation("quotechar must be a single character")


#: Default dialect for the USDA-style dumps: comma, double-quote enclosure.
USDA_DIALECT = CsvDialect()


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    semantic_type: str = "text"

    def __post_init__(self):
        if not self.name:
            raise InvariantViolation("column name must be nonempty")
        if self.semantic_type not in SEMANTIC_TYPES:
            raise InvariantViolation(
                f"unknown semantic type {self.semantic_type!r}"
            )


@dataclass(frozen=True)
class TableSchema:
    table_name: str
    columns: tuple[ColumnSpec, ...]
    has_header: bool = True

    def __post_init__(self):
        cols = tuple(self.columns)
        object.__setattr__(self, "columns", cols)
        if not cols:
            raise EmptySchema(self.table_name)
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            raise InvariantViolation(
                f"schema {self.table_name!r} has duplicate column names"
            )

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def index_of(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise KeyError(name)

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)


@dataclass
class RawTable:
    schema: TableSchema
    rows: list[tuple[Cell, ...]]
    source_path: str = ""
    loaded_row_count: int = -1

    def __post_init__(self):
        if self.loaded_row_count < 0:
            self.loaded_row_count = len(self.rows)
        elif self.loaded_row_count != len(self.rows):
            raise InvariantViolation(
                "loaded_row_count does not match the number of rows"
            )
        width = len(self.schema.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise InvariantViolation(
                    f"table {self.schema.table_name!r} row {i} has "
                    f"{len(row)} cells, schema has {width} columns"
                )

    @property
    def name(self) -> str:
        return self.schema.table_name

    def column(self, name: str) -> list[Cell]:
        i = self.schema.index_of(name)
        return [row[i] for row in self.rows]


def _text_chunks(source) -> Iterator[str]:
    """Adapt bytes / str / (binary or text) file-likes / chunk iterables to a
    stream of text chunks, decoding bytes as UTF-8 incrementally."""
    if isinstance(source, str):
        if source:
            yield source
        return
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    if hasattr(source, "read"):
        first = source.read(_CHUNK_SIZE)
        if isinstance(first, str):
            while first:
                yield first
                first = source.read(_CHUNK_SIZE)
            return
        decoder = codecs.getincrementaldecoder("utf-8")()
        while first:
            text = decoder.decode(first)
            if text:
                yield text
            first = source.read(_CHUNK_SIZE)
        tail = decoder.decode(b"", final=True)
        if tail:
            yield tail
        return
    # iterable of str or bytes chunks
    decoder = None
    for item in source:
        if isinstance(item, str):
            if item:
                yield item
        else:
            if decoder is None:
                decoder = codecs.getincrementaldecoder("utf-8")()
            text = decoder.decode(item)
            if text:
                yield text
    if decoder is not None:
        tail = decoder.decode(b"", final=True)
        if tail:
            yield tail


def _records(
    chunks: Iterable[str],
    dialect: CsvDialect,
    capture_raw: bool = False,
) -> Iterator[tuple[int, list[str], str | None]]:
    """Yield (start_line, cells, raw_record_text_or_None) per CSV record.

    Completely blank physical lines yield nothing. Raw text excludes the
    record terminator and is only collected when capture_raw is set.
    """
    delim = dialect.delimiter
    quote = dialect.quotechar
    specials = [re.escape(delim), "\n", "\r"]
    if quote is not None:
        specials.append(re.escape(quote))
    special_re = re.compile("|".join(specials))

    it = iter(chunks)
    buf = ""
    pos = 0
    eof = False
    line = 1
    rec_line = 1
    parts: list[str] = []
    row: list[str] = []
    raw: list[str] = []
    in_quotes = False
    quote_line = 0
    started = False

    def refill() -> bool:
        nonlocal buf, pos, eof
        if pos:
            buf = buf[pos:]
            pos = 0
        for chunk in it:
            if chunk:
                buf += chunk
                return True
        eof = True
        return False

    def peek() -> str | None:
        while pos >= len(buf):
            if not refill():
                return None
        return buf[pos]

    def take_literal(seg: str):
        nonlocal started
        parts.append(seg)
        if capture_raw:
            raw.append(seg)
        started = True

    def finish_record() -> tuple[int, list[str], str | None] | None:
        nonlocal started, rec_line
        if not started and not row and not parts:
            rec_line = line
            return None
        row.append("".join(parts))
        parts.clear()
        out = (rec_line, row.copy(), "".join(raw) if capture_raw else None)
        row.clear()
        raw.clear()
        started = False
        rec_line = line
        return out

    while True:
        if pos >= len(buf) and not refill():
            break
        m = special_re.search(buf, pos)
        if m is None:
            if pos < len(buf):
                take_literal(buf[pos:])
                pos = len(buf)
            continue
        if m.start() > pos:
            take_literal(buf[pos : m.start()])
        ch = m.group()
        pos = m.start() + 1

        if in_quotes:
            if ch == quote:
                nxt = peek()
                if nxt == quote:
                    pos += 1
                    parts.append(quote)
                    if capture_raw:
                        raw.append(quote * 2)
                else:
                    in_quotes = False
                    if capture_raw:
                        raw.append(quote)
            else:
                if ch == "\n":
                    line += 1
                parts.append(ch)
                if capture_raw:
                    raw.append(ch)
            continue

        if ch == delim:
            if capture_raw:
                raw.append(delim)
            row.append("".join(parts))
            parts.clear()
            started = True
        elif ch == "\n":
            line += 1
            rec = finish_record()
            if rec is not None:
                yield rec
        elif ch == "\r":
            if peek() == "\n":
                pos += 1
                line += 1
                rec = finish_record()
                if rec is not None:
                    yield rec
            else:
                take_literal("\r")
        else:  # quote character
            if not parts:
                # field start: opens enclosure
                in_quotes = True
                quote_line = line
                started = True
                if capture_raw:
                    raw.append(quote)
            else:
                # mid-field quotes are literal (lenient, like common readers)
                take_literal(ch)

    if in_quotes:
        raise UnbalancedQuote(quote_line)
    rec = finish_record()
    if rec is not None:
        yield rec


def parse_csv_stream(
    source,
    dialect: CsvDialect = USDA_DIALECT,
    expected_width: int | None = None,
) -> Iterator[list[str]]:
    """Yield raw string rows lazily from bytes, text, or a file-like object.

    Quoted fields may contain delimiters, escaped quotes ("") and newlines.
    Raises UnbalancedQuote on EOF inside a quoted field, and RaggedRow when
    expected_width is given and a record's cell count differs.
    """
    for line_no, cells, _ in _records(_text_chunks(source), dialect):
        if expected_width is not None and len(cells) != expected_width:
            raise RaggedRow(line_no, expected_width, len(cells))
        yield cells


# --- schema inference -------------------------------------------------------


def _scan_value_type(values: Iterable[str]) -> str:
    """Value rules: all-integer -> integer, all-numeric -> decimal, else text.
    Empty cells are nulls and do not participate."""
    seen = False
    all_int = True
    all_dec = True
    for v in values:
        if v is None or v == "":
            continue
        seen = True
        if all_int and not _INT_RE.match(v):
            all_int = False
        if all_dec and not _DEC_RE.match(v):
            all_dec = False
            break
    if not seen or not all_dec:
        return "text"
    return "integer" if all_int else "decimal"


def _name_rule(name: str) -> str | None:
    if name == "fdc_id" or name.endswith("_id"):
        return "id64"
    return None


def infer_schema(
    sample_rows: list[list[str]],
    header: list[str],
    overrides: dict[str, str] | None = None,
    *,
    table_name: str = "inferred",
) -> TableSchema:
    """Type columns by name rule first (*_id -> id64), then by value scan.
    Overrides win over everything."""
    if not sample_rows:
        raise EmptySample()
    overrides = overrides or {}
    columns = []
    for i, name in enumerate(header):
        if name in overrides:
            semantic = overrides[name]
        else:
            semantic = _name_rule(name)
            if semantic is None:
                semantic = _scan_value_type(
                    row[i] for row in sample_rows if i < len(row)
                )
        columns.append(ColumnSpec(name, semantic))
    return TableSchema(table_name, tuple(columns))


# --- typed loading ----------------------------------------------------------


def coerce_cell(value: str, spec: ColumnSpec, line_no: int) -> Cell:
    """Coerce one raw cell to its column's semantic type.

    Empty cells in non-text columns become None, never zero.
    """
    t = spec.semantic_type
    if t == "text":
        return value
    if value == "":
        return None
    if t in ("id64", "integer"):
        try:
            return int(value)
        except ValueError:
            raise TypeCoercionFailure(line_no, spec.name, value) from None
    if t == "decimal":
        if not _DEC_RE.match(value):
            raise TypeCoercionFailure(line_no, spec.name, value)
        try:
            return Decimal(value)
        except InvalidOperation:
            raise TypeCoercionFailure(line_no, spec.name, value) from None
    # unit_code: canonical upper-case
    return value.strip().upper()


def load_rows(
    source,
    schema: TableSchema,
    *,
    dialect: CsvDialect = USDA_DIALECT,
    skip_header: bool = True,
    lenient: bool = False,
    source_path: str = "",
    rejects: list[tuple[int, str, str]] | None = None,
) -> RawTable:
    """Materialize a typed RawTable from any parse source.

    In lenient mode ragged rows are appended to `rejects` as
    (line_no, reason, raw_line) instead of raising.
    """
    width = len(schema.columns)
    rows: list[tuple[Cell, ...]] = []
    records = _records(_text_chunks(source), dialect, capture_raw=lenient)
    first = skip_header
    for line_no, cells, raw in records:
        if first:
            first = False
            continue
        if len(cells) != width:
            if lenient:
                if rejects is not None:
                    rejects.append(
                        (
                            line_no,
                            f"ragged row: expected {width} cells, "
                            f"got {len(cells)}",
                            raw or "",
                        )
                    )
                continue
            raise RaggedRow(line_no, width, len(cells))
        rows.append(
            tuple(
                coerce_cell(cell, spec, line_no)
                for cell, spec in zip(cells, schema.columns)
            )
        )
    return RawTable(schema, rows, source_path)


def load_table(
    path,
    schema: TableSchema,
    skip_header: bool = True,
    *,
    dialect: CsvDialect = USDA_DIALECT,
    lenient: bool = False,
    reject_path=None,
) -> RawTable:
    """Load a CSV file into a typed RawTable.

    When skip_header, the first record is discarded. With lenient=True,
    ragged rows are routed to reject_path (CSV of line_no, reason, raw_line)
    instead of failing the load.
    """
    path = Path(path)
    rejects: list[tuple[int, str, str]] = []
    with open(path, "rb") as fh:
        table = load_rows(
            fh,
            schema,
            dialect=dialect,
            skip_header=skip_header,
            lenient=lenient,
            source_path=str(path),
            rejects=rejects,
        )
    if lenient and reject_path is not None:
        write_reject_file(rejects, reject_path)
    return table


def write_reject_file(rejects: list[tuple[int, str, str]], path) -> None:
    from .export import emit_csv  # local import: export depends on ingest

    schema = TableSchema(
        "rejects",
        (
            ColumnSpec("line_no", "integer"),
            ColumnSpec("reason", "text"),
            ColumnSpec("raw_line", "text"),
        ),
    )
    table = RawTable(schema, [tuple(r) for r in rejects])
    Path(path).write_bytes(emit_csv(table))


def read_header(path, dialect: CsvDialect = USDA_DIALECT) -> list[str]:
    """Read only the header record of a CSV file."""
    with open(path, "rb") as fh:
        for cells in parse_csv_stream(fh, dialect):
            return cells
    raise EmptySample()


def sample_file(
    path,
    dialect: CsvDialect = USDA_DIALECT,
    limit: int = 200,
) -> tuple[list[str], list[list[str]]]:
    """Read the header and up to `limit` data rows for schema inference."""
    header: list[str] | None = None
    sample: list[list[str]] = []
    with open(path, "rb") as fh:
        for cells in parse_csv_stream(fh, dialect):
            if header is None:
                header = cells
                continue
            sample.append(cells)
            if len(sample) >= limit:
                break
    if header is None:
        raise EmptySample()
    return header, sample
