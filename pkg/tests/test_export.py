"""CSV writer round trips and SQL dump shape."""

from __future__ import annotations

import random
from decimal import Decimal

import pytest

from foodbase.errors import UnmappableType
from foodbase.export import (
    ANSI_DIALECT,
    MYSQL_DIALECT,
    SqlDialect,
    emit_csv,
    emit_sql_dump,
    format_decimal,
)
from foodbase.ingest import (
    ColumnSpec,
    RawTable,
    TableSchema,
    load_rows,
)
from helpers import random_table

SIMPLE = RawTable(
    TableSchema(
        "t", (ColumnSpec("fdc_id", "id64"), ColumnSpec("note", "text"))
    ),
    [(1, "plain"), (2, "with,comma")],
)


class TestEmitCsv:
    def test_empty_table_is_header_only(self):
        table = RawTable(SIMPLE.schema, [])
        assert emit_csv(table) == b"fdc_id,note\n"

    def test_comma_cell_is_quoted(self):
        assert emit_csv(SIMPLE) == (
            b"fdc_id,note\n1,plain\n2,\"with,comma\"\n"
        )

    def test_quote_and_newline_cells(self):
        table = RawTable(
            SIMPLE.schema, [(1, 'say "hi"'), (2, "two\nlines")]
        )
        out = emit_csv(table).decode()
        assert '"say ""hi"""' in out
        assert '"two\nlines"' in out

    def test_trailing_newline(self):
        assert emit_csv(SIMPLE).endswith(b"\n")

    @pytest.mark.parametrize("seed", range(8))
    def test_round_trip_random_tables(self, seed):
        table = random_table(random.Random(seed), n_rows=25)
        reloaded = load_rows(emit_csv(table), table.schema)
        assert reloaded.rows == table.rows
        assert emit_csv(reloaded) == emit_csv(table)

    def test_minimal_decimal_representation(self):
        assert format_decimal(Decimal("130.05")) == "130.05"
        assert format_decimal(Decimal("2.50")) == "2.5"
        assert format_decimal(Decimal("0")) == "0"
        assert format_decimal(Decimal("1E+2")) == "100"

    def test_null_serializes_empty(self):
        table = RawTable(
            TableSchema("t", (ColumnSpec("a", "decimal"),)), [(None,)]
        )
        assert emit_csv(table) == b"a\n\n"


GOLDEN_TABLE = RawTable(
    TableSchema(
        "sr_legacy_food",
        (
            ColumnSpec("fdc_id", "id64"),
            ColumnSpec("description", "text"),
            ColumnSpec("kcals", "decimal"),
        ),
    ),
    [
        (100002, "SWANSON BROTH BEEF", Decimal("9.6")),
        (3000000000, "O'BRIEN'S BLEND", None),
    ],
)

# reviewed by hand against the dialect rules: backtick identifiers, BIGINT
# for id64, doubled single quotes, NULL for nulls, multi-row VALUES
GOLDEN_MYSQL_DUMP = """CREATE TABLE `sr_legacy_food` (
  `fdc_id` BIGINT,
  `description` TEXT,
  `kcals` DECIMAL(20,6)
);
INSERT INTO `sr_legacy_food` (`fdc_id`, `description`, `kcals`) VALUES
(100002, 'SWANSON BROTH BEEF', 9.6),
(3000000000, 'O''BRIEN''S BLEND', NULL);
"""


class TestEmitSqlDump:
    def test_id64_maps_to_bigint(self):
        dump = emit_sql_dump(SIMPLE, MYSQL_DIALECT)
        assert "`fdc_id` BIGINT" in dump

    def test_empty_table_emits_create_only(self):
        dump = emit_sql_dump(RawTable(SIMPLE.schema, []), MYSQL_DIALECT)
        assert dump.startswith("CREATE TABLE")
        assert "INSERT" not in dump

    def test_golden_dump(self):
        assert emit_sql_dump(GOLDEN_TABLE, MYSQL_DIALECT) == GOLDEN_MYSQL_DUMP

    def test_ansi_identifier_quoting(self):
        dump = emit_sql_dump(GOLDEN_TABLE, ANSI_DIALECT)
        assert '"sr_legacy_food"' in dump
        assert '"fdc_id" BIGINT' in dump

    def test_deterministic(self):
        assert emit_sql_dump(GOLDEN_TABLE) == emit_sql_dump(GOLDEN_TABLE)

    def test_insert_covers_every_row_in_batches(self):
        rng = random.Random(3)
        table = random_table(rng, n_rows=7)
        dump = emit_sql_dump(table, MYSQL_DIALECT, rows_per_insert=2)
        assert dump.count("INSERT INTO") == 4
        # one VALUES tuple per row: count lines that start with an open paren
        values_rows = [
            line for line in dump.splitlines()
            if line.startswith("(")
        ]
        assert len(values_rows) == 7

    def test_unmappable_type(self):
        dialect = SqlDialect("tiny", "`", {"text": "TEXT"})
        with pytest.raises(UnmappableType):
            emit_sql_dump(SIMPLE, dialect)
