"""Byte-visibility transform, CR stripping, widen/refine round trips."""

from __future__ import annotations

import random
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foodbase.errors import EmptySchema, InvariantViolation
from foodbase.ingest import (
    ColumnSpec,
    RawTable,
    TableSchema,
    infer_schema,
    load_rows,
)
from foodbase.sanitize import (
    SanitizeReport,
    normalize_encoding,
    refine_types,
    sanitize_lines,
    sanitized_text,
    strip_trailing_cr,
    widen_to_text,
)


def normalize(data: bytes) -> tuple[str, SanitizeReport]:
    chunks, report = normalize_encoding(data)
    return "".join(chunks), report


def oracle_single_byte(b: int) -> str:
    """Independent visible-rendering table, written from the byte ranges."""
    if b in (0x09, 0x0A):
        return chr(b)
    if 0x20 <= b <= 0x7E:
        return chr(b)
    if b < 0x20:
        return "^" + chr(b + 0x40)
    if b == 0x7F:
        return "^?"
    low = b - 0x80
    if low < 0x20:
        return "M-^" + chr(low + 0x40)
    if low == 0x7F:
        return "M-^?"
    return "M-" + chr(low)


class TestNormalizeEncoding:
    def test_all_256_byte_values_against_oracle(self):
        for b in range(256):
            text, report = normalize(bytes([b]))
            assert text == oracle_single_byte(b), f"byte {b:#04x}"
            replaced = 0 if (
                b in (0x09, 0x0A) or 0x20 <= b <= 0x7E
            ) else 1
            assert report.bytes_replaced == replaced, f"byte {b:#04x}"

    def test_known_anchors(self):
        assert normalize(b"\x0d")[0] == "^M"
        assert normalize(b"\x00")[0] == "^@"
        assert normalize(b"\x7f")[0] == "^?"
        assert normalize(b"\x93")[0] == "M-^S"
        assert normalize(b"\xff")[0] == "M-^?"

    def test_clean_input_is_identity(self):
        text, report = normalize(b"plain text, nothing odd\n")
        assert text == "plain text, nothing odd\n"
        assert report.bytes_replaced == 0

    def test_cr_at_line_end_renders_trailing_caret_m(self):
        text, report = normalize(b"abc\r\ndef\r\n")
        assert text == "abc^M\ndef^M\n"
        assert report.lines_with_trailing_cr == 2

    def test_one_invalid_byte_is_one_replacement(self):
        text, report = normalize(b"one \x93 here\n")
        assert report.bytes_replaced == 1
        assert "M-^S" in text

    def test_valid_multibyte_utf8_passes_through(self):
        text, report = normalize("café — ok\n".encode("utf-8"))
        assert text == "café — ok\n"
        assert report.bytes_replaced == 0

    def test_multibyte_split_across_chunks(self):
        raw = "café\n".encode("utf-8")
        chunks, report = normalize_encoding([raw[:3], raw[3:]])
        assert "".join(chunks) == "café\n"
        assert report.bytes_replaced == 0

    def test_rows_preserved_counts(self):
        _, report = normalize(b"a\nb\nc")
        assert report.rows_in == 3 and report.rows_out == 3

    @given(st.binary(max_size=400))
    @settings(max_examples=200, deadline=None)
    def test_rows_out_equals_rows_in(self, data):
        _, report = normalize(data)
        assert report.rows_out == report.rows_in

    @given(st.binary(max_size=400))
    @settings(max_examples=200, deadline=None)
    def test_full_pipeline_idempotent(self, data):
        once, _ = sanitized_text(data)
        twice, report2 = sanitized_text(once.encode("utf-8"))
        assert twice == once
        assert report2.bytes_replaced == 0

    @given(st.binary(max_size=400))
    @settings(max_examples=200, deadline=None)
    def test_pipeline_never_drops_rows(self, data):
        _, report = sanitized_text(data)
        assert report.rows_out == report.rows_in


class TestStripTrailingCr:
    def test_escape_form(self):
        assert strip_trailing_cr("abc^M") == "abc"

    def test_noop(self):
        assert strip_trailing_cr("abc") == "abc"

    def test_only_trailing_occurrence(self):
        assert strip_trailing_cr("a^Mb^M") == "a^Mb"

    def test_raw_cr(self):
        assert strip_trailing_cr("abc\r") == "abc"


WIDE_INPUT = TableSchema(
    "t", (ColumnSpec("fdc_id", "id64"), ColumnSpec("kcal", "decimal"))
)


class TestWidenToText:
    def test_all_columns_become_text(self):
        widened = widen_to_text(WIDE_INPUT)
        assert [c.semantic_type for c in widened.columns] == ["text", "text"]
        assert widened.column_names == ("fdc_id", "kcal")

    def test_idempotent(self):
        widened = widen_to_text(WIDE_INPUT)
        assert widen_to_text(widened) == widened

    def test_empty_schema_propagates(self):
        with pytest.raises(EmptySchema):
            TableSchema("t", ())


def _text_table(columns, rows):
    schema = TableSchema("t", tuple(ColumnSpec(c) for c in columns))
    return RawTable(schema, [tuple(r) for r in rows])


class TestRefineTypes:
    def test_numeric_with_nulls_becomes_integer(self):
        table = _text_table(["kcal"], [["340"], ["840"], [""]])
        refined = refine_types(table)
        assert refined.schema.columns[0].semantic_type == "integer"
        assert [r[0] for r in refined.rows] == [340, 840, None]

    def test_mixed_stays_text(self):
        table = _text_table(["size"], [["20"], ["oz"]])
        refined = refine_types(table)
        assert refined.schema.columns[0].semantic_type == "text"
        assert refined.rows == table.rows

    def test_id_column_refines_to_id64(self):
        table = _text_table(["restaurant_id"], [["11"], ["2"]])
        refined = refine_types(table)
        assert refined.schema.columns[0].semantic_type == "id64"

    def test_unconvertible_id_column_stays_text(self):
        table = _text_table(["odd_id"], [["x1"], ["x2"]])
        assert refine_types(table).schema.columns[0].semantic_type == "text"

    def test_requires_all_text_input(self):
        typed = RawTable(WIDE_INPUT, [(1, Decimal("2"))])
        with pytest.raises(InvariantViolation):
            refine_types(typed)

    def test_refine_after_widen_load_matches_direct_typed_load(self):
        # dual-path oracle over randomized clean tables
        rng = random.Random(42)
        makers = {
            "id64": lambda: str(rng.randint(1, 4_000_000_000)),
            "integer": lambda: str(rng.randint(0, 900)),
            "decimal": lambda: f"{rng.randint(0, 90000) / 100:.2f}",
            "text": lambda: rng.choice(["BROTH", "OIL 1 GAL", "x y", "z"]),
        }
        for trial in range(25):
            names = []
            kinds = []
            for i, kind in enumerate(
                rng.sample(list(makers), rng.randint(1, 4))
            ):
                names.append(
                    f"col{i}_id" if kind == "id64" else f"col{i}"
                )
                kinds.append(kind)
            data_rows = [
                [makers[k]() for k in kinds]
                for _ in range(rng.randint(1, 30))
            ]
            header = ",".join(names) + "\n"
            body = "".join(",".join(row) + "\n" for row in data_rows)

            direct_schema = infer_schema(data_rows, names)
            direct = load_rows(header + body, direct_schema)

            widened = widen_to_text(direct_schema)
            refined = refine_types(load_rows(header + body, widened))

            assert refined.schema.columns == direct.schema.columns, trial
            assert refined.rows == direct.rows, trial


class TestPipelineOnCsv:
    def test_dirty_crlf_file_loads_every_row(self):
        raw = (
            b"restaurant,kcal\r\n"
            b"Taco Bell,840\r\n"
            b"Dunkin\x92 Donuts,340\r\n"
            b"Wendy\x92s,\r\n"
        )
        lines, report = sanitize_lines(raw)
        text = "\n".join(lines) + "\n"
        assert report.rows_in == 4 and report.rows_out == 4
        assert report.bytes_replaced == 2
        assert report.lines_with_trailing_cr == 4
        widened = _text_table(["restaurant", "kcal"], [])
        table = load_rows(text, widened.schema)
        assert table.loaded_row_count == 3
        assert table.rows[1][0] == "DunkinM-^R Donuts"
        refined = refine_types(table)
        assert refined.rows[0][1] == 840
        assert refined.rows[2][1] is None
