"""Ingest restaurant-CSV exports (Menustat-shaped) through the repair
pipeline into RestaurantItem records, and map those onto the unified model.

The expected header is the restaurant-export shape: restaurant_id,
restaurant, food_category, description, item_description, serving_size,
serving_size_unit, servings_per_serving_size, serving_size_text,
grams_per_serving_size, kcals, energy, energy_unit. The energy value of a
row is the first populated of (energy, kcals); files carry it in either
column. Unknown extra columns are preserved as opaque text in a side map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .errors import IdRangeCollision, InvariantViolation, RaggedRow
from .ingest import (
    Cell,
    ColumnSpec,
    CsvDialect,
    RawTable,
    TableSchema,
    USDA_DIALECT,
    _records,
)
from .model import (
    Category,
    ENERGY_NUTRIENT_ID,
    FoodItem,
    NutrientValue,
    Portion,
)
from .sanitize import SanitizeReport, refine_types, sanitize_lines

#: Default first id for restaurant foods; far above any real fdc_id, and
#: decimal-obvious when debugging mixed id sets.
RESTAURANT_ID_BASE = 10_000_000_000

KNOWN_COLUMNS = (
    "restaurant_id",
    "restaurant",
    "food_category",
    "description",
    "item_description",
    "serving_size",
    "serving_size_unit",
    "servings_per_serving_size",
    "serving_size_text",
    "grams_per_serving_size",
    "kcals",
    "energy",
    "energy_unit",
)


@dataclass(frozen=True)
class RestaurantItem:
    restaurant_id: int
    restaurant: str
    food_category: str
    item_name: str
    item_description: str
    serving_size: Decimal | None = None
    serving_size_unit: str | None = None
    servings_per_serving_size: Decimal | None = None
    serving_size_text: str | None = None
    grams_per_serving_size: Decimal | None = None
    kcal: Decimal | None = None
    year: int | None = None

    def __post_init__(self):
        if not self.restaurant:
            raise InvariantViolation("restaurant must be nonempty")
        if not self.item_name:
            raise InvariantViolation("item_name must be nonempty")
        if self.kcal is not None and self.kcal < 0:
            raise InvariantViolation(f"kcal must be >= 0, got {self.kcal}")


@dataclass
class MenustatResult:
    items: list[RestaurantItem]
    extras: list[dict[str, str]] = field(default_factory=list)
    report: SanitizeReport = field(default_factory=SanitizeReport)


def _dec(cell: Cell) -> Decimal | None:
    """Numeric view of a refined cell; non-numeric text reads as absent."""
    if cell is None or cell == "":
        return None
    if isinstance(cell, Decimal):
        return cell
    if isinstance(cell, int):
        return Decimal(cell)
    try:
        return Decimal(cell)
    except InvalidOperation:
        return None


def parse_menustat(
    path,
    *,
    year: int | None = None,
    dialect: CsvDialect = USDA_DIALECT,
) -> MenustatResult:
    """Sanitize, load all-text, refine types, and map rows to items.

    One RestaurantItem per data row; absent numeric cells become None.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        lines, report = sanitize_lines(fh)
        table = _load_sanitized(lines, dialect, str(path))
    table = refine_types(table)
    schema = table.schema
    known = {name: schema.index_of(name) for name in KNOWN_COLUMNS
             if schema.has_column(name)}
    extra_cols = [
        (i, c.name)
        for i, c in enumerate(schema.columns)
        if c.name not in KNOWN_COLUMNS
    ]

    def get(row, name) -> Cell:
        i = known.get(name)
        return row[i] if i is not None else None

    def text(row, name) -> str:
        v = get(row, name)
        return "" if v is None else str(v)

    items: list[RestaurantItem] = []
    extras: list[dict[str, str]] = []
    for row in table.rows:
        energy = _dec(get(row, "energy"))
        if energy is None:
            energy = _dec(get(row, "kcals"))
        unit = get(row, "serving_size_unit")
        rid = get(row, "restaurant_id")
        items.append(
            RestaurantItem(
                restaurant_id=int(rid) if rid not in (None, "") else 0,
                restaurant=text(row, "restaurant"),
                food_category=text(row, "food_category"),
                item_name=text(row, "description"),
                item_description=text(row, "item_description"),
                serving_size=_dec(get(row, "serving_size")),
                serving_size_unit=str(unit).upper() if unit else None,
                servings_per_serving_size=_dec(
                    get(row, "servings_per_serving_size")
                ),
                serving_size_text=text(row, "serving_size_text") or None,
                grams_per_serving_size=_dec(
                    get(row, "grams_per_serving_size")
                ),
                kcal=energy,
                year=year,
            )
        )
        extras.append(
            {name: "" if row[i] is None else str(row[i])
             for i, name in extra_cols}
        )
    return MenustatResult(items, extras, report)


def _load_sanitized(lines, dialect: CsvDialect, source_path: str) -> RawTable:
    """All-text load of sanitized lines; the header row names the columns."""
    records = _records((ln + "\n" for ln in lines), dialect)
    first = next(records, None)
    if first is None:
        return RawTable(
            TableSchema("menustat", (ColumnSpec("restaurant", "text"),)),
            [],
            source_path,
        )
    _, header, _ = first
    schema = TableSchema(
        "menustat",
        tuple(
            ColumnSpec(name or f"column_{i}") for i, name in enumerate(header)
        ),
    )
    width = len(header)
    rows: list[tuple[Cell, ...]] = []
    for line_no, cells, _ in records:
        if len(cells) != width:
            raise RaggedRow(line_no, width, len(cells))
        rows.append(tuple(cells))
    return RawTable(schema, rows, source_path)


def restaurant_items_to_foods(
    items: list[RestaurantItem],
    id_base: int = RESTAURANT_ID_BASE,
    *,
    existing_max_id: int | None = None,
) -> tuple[list[FoodItem], dict[int, list[NutrientValue]], dict[int, list[Portion]]]:
    """Turn restaurant items into model records with sequential ids.

    kcal maps to the energy nutrient (1008); serving fields map to a Portion
    when at least a serving size or gram weight is present.
    """
    if existing_max_id is not None and id_base <= existing_max_id:
        raise IdRangeCollision(id_base, existing_max_id)
    foods: list[FoodItem] = []
    values: dict[int, list[NutrientValue]] = {}
    portions: dict[int, list[Portion]] = {}
    for offset, item in enumerate(items):
        fid = id_base + offset
        foods.append(
            FoodItem(
                fdc_id=fid,
                description=item.item_name,
                category=Category.RESTAURANT,
                restaurant=item.restaurant,
            )
        )
        if item.kcal is not None:
            values[fid] = [
                NutrientValue(fid, ENERGY_NUTRIENT_ID, item.kcal, "KCAL")
            ]
        if item.serving_size is not None or item.grams_per_serving_size is not None:
            portions[fid] = [
                Portion(
                    food_id=fid,
                    servings=item.servings_per_serving_size,
                    serving_size=item.serving_size,
                    serving_size_unit=item.serving_size_unit,
                    gram_weight=item.grams_per_serving_size,
                )
            ]
    return foods, values, portions


RESTAURANT_ITEMS_SCHEMA = TableSchema(
    "restaurant_items",
    tuple(
        ColumnSpec(name, t)
        for name, t in (
            ("restaurant_id", "id64"),
            ("restaurant", "text"),
            ("food_category", "text"),
            ("description", "text"),
            ("item_description", "text"),
            ("serving_size", "decimal"),
            ("serving_size_unit", "unit_code"),
            ("servings_per_serving_size", "decimal"),
            ("serving_size_text", "text"),
            ("grams_per_serving_size", "decimal"),
            ("kcal", "decimal"),
            ("year", "integer"),
        )
    ),
)


def items_table(items: list[RestaurantItem]) -> RawTable:
    rows: list[tuple[Cell, ...]] = [
        (
            item.restaurant_id,
            item.restaurant,
            item.food_category,
            item.item_name,
            item.item_description,
            item.serving_size,
            item.serving_size_unit,
            item.servings_per_serving_size,
            item.serving_size_text or "",
            item.grams_per_serving_size,
            item.kcal,
            item.year,
        )
        for item in items
    ]
    return RawTable(RESTAURANT_ITEMS_SCHEMA, rows)
