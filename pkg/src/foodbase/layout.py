"""Row-based (one record per food/nutrient fact) and column-based (one record
per food, fixed nutrient slots) table layouts, with lossless conversion.

Slot matching is by name slug: the slug is the lowercased text before the
first comma, non-alphanumerics collapsed to underscores, so a set entry
"fiber" matches the dictionary name "fiber, total dietary" and becomes the
fiber_amount / fiber_unit column pair of the wide table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable

from .errors import EmptyNutrientSet, InvariantViolation
from .export import emit_csv
from .ingest import Cell, ColumnSpec, RawTable, TableSchema
from .store import FoodStore

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slot_key(name: str) -> str:
    """Column slug for a nutrient name: text before the first comma,
    lowercased, non-alphanumerics collapsed to underscores."""
    head = name.split(",", 1)[0].strip().lower()
    return _SLUG_RE.sub("_", head).strip("_")


class NutrientSet:
    """The ordered nutrient names defining the wide table's slots."""

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise EmptyNutrientSet()
        if len(set(names)) != len(names):
            raise InvariantViolation("nutrient set has duplicate names")
        keys = [slot_key(n) for n in names]
        if "" in keys:
            raise InvariantViolation("nutrient set entry slugs to nothing")
        if len(set(keys)) != len(keys):
            raise InvariantViolation(
                "nutrient set entries collide after slugging"
            )
        self.names = names
        self.keys = tuple(keys)

    @classmethod
    def parse(cls, spec: str) -> "NutrientSet":
        return cls(n.strip() for n in spec.split(",") if n.strip())

    def __iter__(self):
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, NutrientSet) and self.names == other.names


#: Figure-style default: energy and fiber slots.
DEFAULT_NUTRIENT_SET = NutrientSet(("energy", "fiber"))


@dataclass(frozen=True)
class RowLayoutRecord:
    description: str
    brand_owner: str | None
    servings: Decimal | None
    serving_size: Decimal | None
    unit: str | None
    nutrient_name: str
    nutrient_unit: str
    nutrient_amount: Decimal


@dataclass(frozen=True)
class ColumnLayoutRecord:
    description: str
    brand_owner: str | None
    servings: Decimal | None
    serving_size: Decimal | None
    unit: str | None
    #: slot key -> (nutrient_name, nutrient_unit, amount) or None when absent
    slots: tuple[tuple[str, tuple[str, str, Decimal] | None], ...]

    def slot(self, key: str):
        for k, v in self.slots:
            if k == key:
                return v
        raise KeyError(key)


def _food_meta(store: FoodStore, fdc_id: int):
    food = store.food(fdc_id)
    portion = store.first_portion(fdc_id)
    return (
        food.description,
        food.brand_owner or food.restaurant,
        portion.servings if portion else None,
        portion.serving_size if portion else None,
        portion.serving_size_unit if portion else None,
    )


def to_row_layout(store: FoodStore) -> list[RowLayoutRecord]:
    """Exactly one record per (food, nutrient) fact, food metadata repeated,
    ordered by (food, nutrient name)."""
    records: list[RowLayoutRecord] = []
    for food in store.foods:
        meta = _food_meta(store, food.fdc_id)
        facts = sorted(
            store.facts(food.fdc_id),
            key=lambda v: store.dictionary.by_id(v.nutrient_id).name,
        )
        for v in facts:
            d = store.dictionary.by_id(v.nutrient_id)
            records.append(
                RowLayoutRecord(*meta, d.name, v.unit, v.amount)
            )
    return records


def to_column_layout(
    store: FoodStore, nutrient_set: NutrientSet = DEFAULT_NUTRIENT_SET
) -> tuple[list[ColumnLayoutRecord], int]:
    """Exactly one record per food; facts outside the set are dropped and
    counted. Missing facts leave null slots."""
    records: list[ColumnLayoutRecord] = []
    dropped = 0
    for food in store.foods:
        meta = _food_meta(store, food.fdc_id)
        filled: dict[str, tuple[str, str, Decimal]] = {}
        facts = sorted(
            store.facts(food.fdc_id),
            key=lambda v: store.dictionary.by_id(v.nutrient_id).name,
        )
        for v in facts:
            d = store.dictionary.by_id(v.nutrient_id)
            key = slot_key(d.name)
            if key not in nutrient_set.keys or key in filled:
                dropped += 1
                continue
            filled[key] = (d.name, v.unit, v.amount)
        records.append(
            ColumnLayoutRecord(
                *meta,
                slots=tuple(
                    (key, filled.get(key)) for key in nutrient_set.keys
                ),
            )
        )
    return records, dropped


def unpivot(records: list[ColumnLayoutRecord]) -> list[RowLayoutRecord]:
    """Wide back to row records: null slots produce nothing, each filled
    slot produces one record carrying its original nutrient name."""
    out: list[RowLayoutRecord] = []
    for rec in records:
        for _, value in rec.slots:
            if value is None:
                continue
            name, unit, amount = value
            out.append(
                RowLayoutRecord(
                    rec.description,
                    rec.brand_owner,
                    rec.servings,
                    rec.serving_size,
                    rec.unit,
                    name,
                    unit,
                    amount,
                )
            )
    return out


def restrict_rows(
    records: list[RowLayoutRecord], nutrient_set: NutrientSet
) -> list[RowLayoutRecord]:
    """The row records whose nutrient matches a slot of the set."""
    return [
        r for r in records if slot_key(r.nutrient_name) in nutrient_set.keys
    ]


# --- serialization -----------------------------------------------------------

_ROW_META_COLS = (
    ColumnSpec("description", "text"),
    ColumnSpec("brand_owner", "text"),
    ColumnSpec("servings", "decimal"),
    ColumnSpec("serving_size", "decimal"),
    ColumnSpec("unit", "unit_code"),
)

ROW_LAYOUT_SCHEMA = TableSchema(
    "row_layout",
    _ROW_META_COLS
    + (
        ColumnSpec("nutrient_name", "text"),
        ColumnSpec("nutrient_unit", "unit_code"),
        ColumnSpec("nutrient_amount", "decimal"),
    ),
)


def column_layout_schema(nutrient_set: NutrientSet) -> TableSchema:
    slot_cols: list[ColumnSpec] = []
    for key in nutrient_set.keys:
        slot_cols.append(ColumnSpec(f"{key}_amount", "decimal"))
        slot_cols.append(ColumnSpec(f"{key}_unit", "unit_code"))
    return TableSchema("column_layout", _ROW_META_COLS + tuple(slot_cols))


def row_layout_table(records: list[RowLayoutRecord]) -> RawTable:
    rows: list[tuple[Cell, ...]] = [
        (
            r.description,
            r.brand_owner or "",
            r.servings,
            r.serving_size,
            r.unit,
            r.nutrient_name,
            r.nutrient_unit,
            r.nutrient_amount,
        )
        for r in records
    ]
    return RawTable(ROW_LAYOUT_SCHEMA, rows)


def column_layout_table(
    records: list[ColumnLayoutRecord], nutrient_set: NutrientSet
) -> RawTable:
    schema = column_layout_schema(nutrient_set)
    rows: list[tuple[Cell, ...]] = []
    for rec in records:
        cells: list[Cell] = [
            rec.description,
            rec.brand_owner or "",
            rec.servings,
            rec.serving_size,
            rec.unit,
        ]
        by_key = dict(rec.slots)
        for key in nutrient_set.keys:
            value = by_key.get(key)
            if value is None:
                cells += [None, None]
            else:
                _, unit, amount = value
                cells += [amount, unit]
        rows.append(tuple(cells))
    return RawTable(schema, rows)


def layout_size_report(
    row_records: list[RowLayoutRecord],
    column_records: list[ColumnLayoutRecord],
    nutrient_set: NutrientSet = DEFAULT_NUTRIENT_SET,
) -> tuple[int, int]:
    """Exact serialized byte counts of each layout, via the CSV writer."""
    row_bytes = len(emit_csv(row_layout_table(row_records)))
    column_bytes = len(
        emit_csv(column_layout_table(column_records, nutrient_set))
    )
    return row_bytes, column_bytes
