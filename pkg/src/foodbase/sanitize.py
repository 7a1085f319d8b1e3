"""Repair restaurant-CSV exports before ingestion.

The byte-visibility transform mirrors what `cat -v` shows: control bytes and
bytes that do not form valid UTF-8 are replaced by printable caret/meta
escapes (^M, M-^S, ...), so corruption stays visible and greppable in the
loaded data instead of being silently dropped. Line structure is never
altered: rows out always equals rows in.

The line-oriented pipeline helpers assume records do not contain embedded
newlines inside quoted fields; restaurant exports do not use them.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable, Iterator

from .errors import InvariantViolation
from .ingest import (
    Cell,
    ColumnSpec,
    RawTable,
    TableSchema,
    _INT_RE,
    _DEC_RE,
    _name_rule,
)

_CHUNK_SIZE = 1 << 16


def _byte_escape(b: int) -> str:
    """The visible rendering of one non-printable byte, cat -v style."""
    if b < 0x80:
        return "^" + chr(b ^ 0x40)
    low = b & 0x7F
    if low == 0x7F:
        return "M-^?"
    if 0x20 <= low < 0x7F:
        return "M-" + chr(low)
    return "M-^" + chr(low ^ 0x40)


# C0 controls minus \t and \n, plus DEL
_CTRL_RE = re.compile("[\x00-\x08\x0b-\x1f\x7f]")


@dataclass
class SanitizeReport:
    bytes_replaced: int = 0
    lines_with_trailing_cr: int = 0
    rows_in: int = 0
    rows_out: int = 0

    def merge(self, other: "SanitizeReport") -> None:
        self.bytes_replaced += other.bytes_replaced
        self.lines_with_trailing_cr += other.lines_with_trailing_cr
        self.rows_in += other.rows_in
        self.rows_out += other.rows_out

    def to_json(self) -> str:
        return json.dumps(
            {
                "bytes_replaced": self.bytes_replaced,
                "lines_with_trailing_cr": self.lines_with_trailing_cr,
                "rows_in": self.rows_in,
                "rows_out": self.rows_out,
            },
            sort_keys=True,
        )


def _byte_chunks(data) -> Iterator[bytes]:
    if isinstance(data, (bytes, bytearray)):
        data = io.BytesIO(bytes(data))
    if hasattr(data, "read"):
        chunk = data.read(_CHUNK_SIZE)
        while chunk:
            yield chunk
            chunk = data.read(_CHUNK_SIZE)
        return
    for item in data:
        if item:
            yield bytes(item)


class _Escaper:
    """Incremental UTF-8 scanner producing the escaped text stream.

    With drop_trailing_cr the CR of a CRLF pair (or a CR at EOF) is removed
    at the byte level instead of escaped; this is what makes the full repair
    pipeline idempotent, since its output then contains no raw CR at all.
    """

    def __init__(self, report: SanitizeReport, drop_trailing_cr: bool = False):
        self.report = report
        self.drop_trailing_cr = drop_trailing_cr
        self.pending = b""
        self.last_was_cr = False
        self.saw_any = False
        self.ended_with_newline = False

    def feed(self, chunk: bytes, final: bool = False) -> str:
        data = self.pending + chunk
        self.pending = b""
        out: list[str] = []
        rep = self.report
        i = 0
        n = len(data)
        while i < n:
            b = data[i]
            if b < 0x80:
                if b == 0x0A:
                    if self.last_was_cr:
                        rep.lines_with_trailing_cr += 1
                    rep.rows_in += 1
                    out.append("\n")
                elif b == 0x09:
                    out.append("\t")
                elif 0x20 <= b < 0x7F:
                    out.append(chr(b))
                elif b == 0x0D and self.drop_trailing_cr:
                    if i + 1 >= n and not final:
                        self.pending = data[i:]
                        break
                    if i + 1 >= n or data[i + 1] == 0x0A:
                        # line-end CR: removed, counted at the LF (or EOF)
                        pass
                    else:
                        out.append(_byte_escape(b))
                        rep.bytes_replaced += 1
                else:
                    out.append(_byte_escape(b))
                    rep.bytes_replaced += 1
                self.last_was_cr = b == 0x0D
                i += 1
                continue
            self.last_was_cr = False
            if 0xC2 <= b <= 0xDF:
                need = 2
            elif 0xE0 <= b <= 0xEF:
                need = 3
            elif 0xF0 <= b <= 0xF4:
                need = 4
            else:
                out.append(_byte_escape(b))
                rep.bytes_replaced += 1
                i += 1
                continue
            if i + need > n:
                if not final:
                    self.pending = data[i:]
                    break
                out.append(_byte_escape(b))
                rep.bytes_replaced += 1
                i += 1
                continue
            seq = data[i : i + need]
            try:
                ch = seq.decode("utf-8")
            except UnicodeDecodeError:
                out.append(_byte_escape(b))
                rep.bytes_replaced += 1
                i += 1
                continue
            o = ord(ch)
            if 0x80 <= o <= 0x9F:
                # C1 control smuggled through valid UTF-8: keep it visible
                out.append(_byte_escape(o))
                rep.bytes_replaced += 1
            else:
                out.append(ch)
            i += need
        if i > 0:
            self.saw_any = True
            self.ended_with_newline = data[i - 1] == 0x0A
        if final:
            if self.last_was_cr:
                # stream ends on a bare CR: that line still ended in a CR
                rep.lines_with_trailing_cr += 1
            if self.saw_any and not self.ended_with_newline:
                rep.rows_in += 1
        return "".join(out)


def _escaped_stream(
    data, report: SanitizeReport, drop_trailing_cr: bool
) -> Iterator[str]:
    esc = _Escaper(report, drop_trailing_cr)
    for chunk in _byte_chunks(data):
        text = esc.feed(chunk)
        if text:
            report.rows_out += text.count("\n")
            yield text
    tail = esc.feed(b"", final=True)
    if tail:
        report.rows_out += tail.count("\n")
        yield tail
    if esc.saw_any and not esc.ended_with_newline:
        report.rows_out += 1


def normalize_encoding(data) -> tuple[Iterator[str], SanitizeReport]:
    """Turn any byte stream into valid, visible text plus a report.

    Every byte sequence is representable after replacement, so this never
    fails. Line-end CRs stay visible as trailing ^M; the pipeline entry
    points remove them. The report's counters are final once the returned
    iterator is exhausted.
    """
    report = SanitizeReport()
    return _escaped_stream(data, report, drop_trailing_cr=False), report


def strip_trailing_cr(line: str) -> str:
    """Remove one trailing raw CR or its `^M` escape; interior ones stay."""
    if line.endswith("\r"):
        return line[:-1]
    if line.endswith("^M"):
        return line[:-2]
    return line


def sanitize_lines(data) -> tuple[Iterator[str], SanitizeReport]:
    """Full repair pipeline: escape bytes and drop line-end CRs.

    Yields repaired lines without terminators; never drops or adds a line.
    Running the pipeline on its own output is the identity.
    """
    report = SanitizeReport()
    chunks = _escaped_stream(data, report, drop_trailing_cr=True)

    def gen() -> Iterator[str]:
        tail = ""
        for chunk in chunks:
            tail += chunk
            if "\n" in tail:
                *lines, tail = tail.split("\n")
                yield from lines
        if tail:
            yield tail

    return gen(), report


def sanitized_text(data) -> tuple[str, SanitizeReport]:
    """Convenience: fully sanitize into one newline-joined string."""
    lines_iter, report = sanitize_lines(data)
    lines = list(lines_iter)
    text = "\n".join(lines)
    if text:
        text += "\n"
    return text, report


def widen_to_text(schema: TableSchema) -> TableSchema:
    """Every column becomes text so no row can be rejected at load time."""
    return TableSchema(
        schema.table_name,
        tuple(ColumnSpec(c.name, "text") for c in schema.columns),
        schema.has_header,
    )


def _refined_type(name: str, values: Iterable[str]) -> str:
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
    if all_int and _name_rule(name):
        return "id64"
    return "integer" if all_int else "decimal"


def refine_types(table: RawTable) -> RawTable:
    """Retype an all-text table by full-column scan.

    Null (empty) cells do not block retyping; columns with any unconvertible
    value stay text. Clean data round-trips: refine(widen-load) equals a
    direct typed load.
    """
    for spec in table.schema.columns:
        if spec.semantic_type != "text":
            raise InvariantViolation(
                f"refine_types expects an all-text table; column "
                f"{spec.name!r} is {spec.semantic_type}"
            )
    new_cols = []
    converters = []
    for i, spec in enumerate(table.schema.columns):
        t = _refined_type(spec.name, (row[i] for row in table.rows))
        new_cols.append(ColumnSpec(spec.name, t))
        if t in ("id64", "integer"):
            converters.append(lambda v: None if v == "" else int(v))
        elif t == "decimal":
            converters.append(lambda v: None if v == "" else Decimal(v))
        else:
            converters.append(lambda v: v)
    schema = TableSchema(
        table.schema.table_name, tuple(new_cols), table.schema.has_header
    )
    rows: list[tuple[Cell, ...]] = [
        tuple(conv(cell) for conv, cell in zip(converters, row))
        for row in table.rows
    ]
    return RawTable(schema, rows, table.source_path)
