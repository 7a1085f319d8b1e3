"""Serialize built tables as CSV files and SQL dump scripts.

Output is deterministic: same table in, identical bytes out. Dumps are
declarative artifacts; nothing here talks to a database server.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import UnmappableType
from .ingest import Cell, CsvDialect, RawTable, USDA_DIALECT


def format_decimal(value: Decimal) -> str:
    """Minimal decimal representation: no exponent, no trailing zeros."""
    return format(value.normalize(), "f")


def format_cell(cell: Cell) -> str:
    if cell is None:
        return ""
    if isinstance(cell, Decimal):
        return format_decimal(cell)
    if isinstance(cell, int):
        return str(cell)
    return cell


def _csv_field(text: str, dialect: CsvDialect) -> str:
    quote = dialect.quotechar
    if quote is None:
        return text
    if (
        dialect.delimiter in text
        or quote in text
        or "\n" in text
        or "\r" in text
    ):
        return quote + text.replace(quote, quote * 2) + quote
    return text


def emit_csv(table: RawTable, dialect: CsvDialect = USDA_DIALECT) -> bytes:
    """Header then rows, RFC-4180 quoting, LF terminated, UTF-8 bytes."""
    delim = dialect.delimiter
    lines = [
        delim.join(_csv_field(name, dialect) for name in table.schema.column_names)
    ]
    for row in table.rows:
        lines.append(
            delim.join(_csv_field(format_cell(c), dialect) for c in row)
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_csv(table: RawTable, path, dialect: CsvDialect = USDA_DIALECT) -> Path:
    path = Path(path)
    path.write_bytes(emit_csv(table, dialect))
    return path


# --- SQL dumps ---------------------------------------------------------------


@dataclass(frozen=True)
class SqlDialect:
    name: str
    identifier_quote: str
    type_names: Mapping[str, str]
    statement_terminator: str = ";"

    def quote_ident(self, ident: str) -> str:
        q = self.identifier_quote
        return q + ident.replace(q, q * 2) + q

    def type_name(self, semantic_type: str) -> str:
        try:
            return self.type_names[semantic_type]
        except KeyError:
            raise UnmappableType(semantic_type, self.name) from None


MYSQL_DIALECT = SqlDialect(
    name="mysql",
    identifier_quote="`",
    type_names=MappingProxyType(
        {
            "id64": "BIGINT",
            "integer": "INT",
            "decimal": "DECIMAL(20,6)",
            "text": "TEXT",
            "unit_code": "VARCHAR(16)",
        }
    ),
)

ANSI_DIALECT = SqlDialect(
    name="ansi",
    identifier_quote='"',
    type_names=MappingProxyType(
        {
            "id64": "BIGINT",
            "integer": "INTEGER",
            "decimal": "DECIMAL(20,6)",
            "text": "TEXT",
            "unit_code": "VARCHAR(16)",
        }
    ),
)

SQL_DIALECTS = {d.name: d for d in (MYSQL_DIALECT, ANSI_DIALECT)}


def _sql_literal(cell: Cell) -> str:
    if cell is None:
        return "NULL"
    if isinstance(cell, Decimal):
        return format_decimal(cell)
    if isinstance(cell, int):
        return str(cell)
    # single quotes double; the common denominator across dialects
    return "'" + cell.replace("'", "''") + "'"


def emit_sql_dump(
    table: RawTable,
    dialect: SqlDialect = MYSQL_DIALECT,
    *,
    rows_per_insert: int = 500,
) -> str:
    """One CREATE TABLE plus batched multi-row INSERT statements.

    64-bit id columns always get the dialect's 64-bit integer type. Output
    is byte-identical across runs on identical input.
    """
    q = dialect.quote_ident
    term = dialect.statement_terminator
    name = q(table.schema.table_name)
    col_defs = ",\n".join(
        f"  {q(c.name)} {dialect.type_name(c.semantic_type)}"
        for c in table.schema.columns
    )
    parts = [f"CREATE TABLE {name} (\n{col_defs}\n){term}\n"]
    col_list = ", ".join(q(c.name) for c in table.schema.columns)
    for start in range(0, len(table.rows), rows_per_insert):
        batch = table.rows[start : start + rows_per_insert]
        values = ",\n".join(
            "(" + ", ".join(_sql_literal(c) for c in row) + ")"
            for row in batch
        )
        parts.append(f"INSERT INTO {name} ({col_list}) VALUES\n{values}{term}\n")
    return "".join(parts)


def write_sql(
    table: RawTable,
    path,
    dialect: SqlDialect = MYSQL_DIALECT,
    *,
    rows_per_insert: int = 500,
) -> Path:
    path = Path(path)
    path.write_text(
        emit_sql_dump(table, dialect, rows_per_insert=rows_per_insert),
        encoding="utf-8",
    )
    return path
