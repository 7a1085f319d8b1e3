"""Unified domain model: foods, nutrient facts, portions, and column indexes.

Category tables reproduce the bulk workflow: restrict to one source category,
inner-join the nutrient rows for one nutrient id, inner-join portions, and
keep one output row per surviving combination.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Iterable, Mapping

from .errors import (
    DuplicateFoodId,
    InvariantViolation,
    MissingIndex,
    NoSuchColumn,
    UnknownNutrient,
)
from .ingest import Cell, ColumnSpec, RawTable, TableSchema


class Category(Enum):
    BRANDED = "branded"
    FOUNDATION = "foundation"
    SR_LEGACY = "sr_legacy"
    EXPERIMENTAL = "experimental"
    RESTAURANT = "restaurant"

    @classmethod
    def of(cls, value) -> "Category":
        if isinstance(value, cls):
            return value
        return cls(value)


#: Order used for deterministic food listings.
CATEGORY_ORDER = {c: i for i, c in enumerate(Category)}


@dataclass(frozen=True)
class FoodItem:
    fdc_id: int
    description: str
    category: Category
    brand_owner: str | None = None
    restaurant: str | None = None

    def __post_init__(self):
        if self.fdc_id <= 0:
            raise InvariantViolation(f"fdc_id must be positive: {self.fdc_id}")
        if self.category is Category.RESTAURANT and not self.restaurant:
            raise InvariantViolation(
                f"restaurant food {self.fdc_id} has no restaurant name"
            )
        if self.category is Category.BRANDED and not self.brand_owner:
            raise InvariantViolation(
                f"branded food {self.fdc_id} has no brand owner"
            )


@dataclass(frozen=True)
class NutrientDef:
    nutrient_id: int
    name: str
    unit: str


@dataclass(frozen=True)
class NutrientValue:
    food_id: int
    nutrient_id: int
    amount: Decimal
    unit: str

    def __post_init__(self):
        if self.amount < 0:
            raise InvariantViolation(
                f"nutrient amount must be >= 0: {self.amount}"
            )


@dataclass(frozen=True)
class Portion:
    food_id: int
    servings: Decimal | None = None
    serving_size: Decimal | None = None
    serving_size_unit: str | None = None
    gram_weight: Decimal | None = None

    def __post_init__(self):
        if self.serving_size is None and self.gram_weight is None:
            raise InvariantViolation(
                f"portion for food {self.food_id} needs a serving size "
                f"or a gram weight"
            )
        for name in ("servings", "serving_size"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise InvariantViolation(f"{name} must be > 0, got {v}")
        if self.gram_weight is not None and self.gram_weight < 0:
            raise InvariantViolation("gram_weight must be >= 0")


#: The energy-in-kilocalories id of the standard nutrient dictionary.
ENERGY_NUTRIENT_ID = 1008

#: Standard nutrient ids, names and units. Ordered so a dictionary built
#: from the first N entries stays useful for the scraped-page field set.
CANONICAL_NUTRIENTS: tuple[NutrientDef, ...] = (
    NutrientDef(1008, "Energy", "KCAL"),
    NutrientDef(1003, "Protein", "G"),
    NutrientDef(1004, "Total lipid (fat)", "G"),
    NutrientDef(1005, "Carbohydrate, by difference", "G"),
    NutrientDef(1079, "Fiber, total dietary", "G"),
    NutrientDef(2000, "Sugars, total including NLEA", "G"),
    NutrientDef(1093, "Sodium, Na", "MG"),
    NutrientDef(1253, "Cholesterol", "MG"),
    NutrientDef(1258, "Fatty acids, total saturated", "G"),
    NutrientDef(1257, "Fatty acids, total trans", "G"),
    NutrientDef(1087, "Calcium, Ca", "MG"),
    NutrientDef(1089, "Iron, Fe", "MG"),
    NutrientDef(1092, "Potassium, K", "MG"),
    NutrientDef(1292, "Fatty acids, total monounsaturated", "G"),
    NutrientDef(1293, "Fatty acids, total polyunsaturated", "G"),
)


class NutrientDictionary:
    """Id and case-insensitive name lookups over nutrient definitions."""

    def __init__(self, defs: Iterable[NutrientDef]):
        self._by_id: dict[int, NutrientDef] = {}
        self._by_name: dict[str, NutrientDef] = {}
        for d in defs:
            if d.nutrient_id in self._by_id:
                raise InvariantViolation(
                    f"duplicate nutrient id {d.nutrient_id}"
                )
            self._by_id[d.nutrient_id] = d
            self._by_name.setdefault(d.name.lower(), d)

    @classmethod
    def from_table(cls, table: RawTable) -> "NutrientDictionary":
        """Build from a nutrient.csv-shaped table (id, name, unit_name)."""
        schema = table.schema
        id_col = "id" if schema.has_column("id") else "nutrient_id"
        unit_col = "unit_name" if schema.has_column("unit_name") else "unit"
        i_id = schema.index_of(id_col)
        i_name = schema.index_of("name")
        i_unit = schema.index_of(unit_col)
        return cls(
            NutrientDef(int(row[i_id]), str(row[i_name]), str(row[i_unit]).upper())
            for row in table.rows
        )

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self):
        return iter(self._by_id.values())

    def __contains__(self, nutrient_id: int) -> bool:
        return nutrient_id in self._by_id

    def by_id(self, nutrient_id: int) -> NutrientDef:
        try:
            return self._by_id[nutrient_id]
        except KeyError:
            raise UnknownNutrient(nutrient_id) from None

    def lookup_id(self, name: str) -> int:
        try:
            return self._by_name[name.lower()].nutrient_id
        except KeyError:
            raise UnknownNutrient(name) from None


def canonical_dictionary() -> NutrientDictionary:
    return NutrientDictionary(CANONICAL_NUTRIENTS)


def lookup_nutrient_id(name: str, dictionary: NutrientDictionary) -> int:
    """Case-insensitive name -> nutrient id; Energy resolves to 1008."""
    return dictionary.lookup_id(name)


# --- indexes ----------------------------------------------------------------


class IndexHandle:
    """Equality index over one column: key -> ordered row ordinals."""

    def __init__(self, table: RawTable, column: str):
        if not table.schema.has_column(column):
            raise NoSuchColumn(table.schema.table_name, column)
        self.table = table
        self.column = column
        i = table.schema.index_of(column)
        mapping: dict[Cell, list[int]] = {}
        for ordinal, row in enumerate(table.rows):
            mapping.setdefault(row[i], []).append(ordinal)
        self._mapping = mapping

    def lookup(self, key: Cell) -> list[int]:
        return list(self._mapping.get(key, ()))

    def rows(self, key: Cell) -> list[tuple[Cell, ...]]:
        rows = self.table.rows
        return [rows[i] for i in self._mapping.get(key, ())]

    def keys(self):
        return self._mapping.keys()


def build_index(table: RawTable, column: str) -> IndexHandle:
    """Index a column so equality lookups match full scans at sub-linear
    average cost."""
    return IndexHandle(table, column)


# --- category tables --------------------------------------------------------


def _require_index(
    index: IndexHandle | None, table: RawTable, column: str
) -> IndexHandle:
    if index is None or index.table is not table or index.column != column:
        raise MissingIndex(table.schema.table_name, column)
    return index


def category_table_schema(category: Category, with_brand: bool) -> TableSchema:
    cols = [ColumnSpec("fdc_id", "id64"), ColumnSpec("description", "text")]
    if with_brand:
        cols.append(ColumnSpec("brand_owner", "text"))
    cols += [
        ColumnSpec("kcals", "decimal"),
        ColumnSpec("servings", "decimal"),
        ColumnSpec("gram_weight", "decimal"),
    ]
    return TableSchema(f"{category.value}_food", tuple(cols))


def build_category_table(
    category,
    food: RawTable,
    category_file: RawTable | None,
    nutrients: RawTable,
    portions: RawTable,
    nutrient_id: int,
    *,
    nutrient_index: IndexHandle | None = None,
    portion_index: IndexHandle | None = None,
    food_index: IndexHandle | None = None,
    dictionary: NutrientDictionary | None = None,
) -> RawTable:
    """Inner-join one category's foods with one nutrient and their portions.

    Output columns: fdc_id, description, (brand_owner for branded), kcals,
    servings, gram_weight. Foods missing the nutrient row or a portion are
    absent, exactly as in the source workflow; multiple portion rows per
    food yield multiple output rows.
    """
    category = Category.of(category)
    nutrient_index = _require_index(nutrient_index, nutrients, "fdc_id")
    portion_index = _require_index(portion_index, portions, "fdc_id")
    if dictionary is not None and nutrient_id not in dictionary:
        raise UnknownNutrient(nutrient_id)
    if food_index is None:
        food_index = build_index(food, "fdc_id")

    with_brand = (
        category_file is not None
        and category_file.schema.has_column("brand_owner")
    )
    schema = category_table_schema(category, with_brand)
    out_rows: list[tuple[Cell, ...]] = []
    if category_file is None:
        return RawTable(schema, out_rows)

    cf_schema = category_file.schema
    i_fid = cf_schema.index_of("fdc_id")
    i_brand = cf_schema.index_of("brand_owner") if with_brand else -1
    i_desc = food.schema.index_of("description")
    i_nid = nutrients.schema.index_of("nutrient_id")
    i_amount = nutrients.schema.index_of("amount")
    i_p_amount = portions.schema.index_of("amount")
    i_p_gram = portions.schema.index_of("gram_weight")

    for row in category_file.rows:
        fid = row[i_fid]
        food_rows = food_index.rows(fid)
        if not food_rows:
            continue
        description = food_rows[0][i_desc]
        nutrient_rows = [
            r for r in nutrient_index.rows(fid) if r[i_nid] == nutrient_id
        ]
        if not nutrient_rows:
            continue
        portion_rows = portion_index.rows(fid)
        if not portion_rows:
            continue
        for nr in nutrient_rows:
            for pr in portion_rows:
                out: tuple[Cell, ...]
                if with_brand:
                    out = (
                        fid,
                        description,
                        row[i_brand],
                        nr[i_amount],
                        pr[i_p_amount],
                        pr[i_p_gram],
                    )
                else:
                    out = (
                        fid,
                        description,
                        nr[i_amount],
                        pr[i_p_amount],
                        pr[i_p_gram],
                    )
                out_rows.append(out)
    return RawTable(schema, out_rows)


def join_diagnostics(
    food: RawTable,
    category_file: RawTable | None,
    nutrients: RawTable,
    portions: RawTable,
    nutrient_id: int,
    *,
    nutrient_index: IndexHandle,
    portion_index: IndexHandle,
    food_index: IndexHandle,
) -> dict[str, int]:
    """Count the silent inner-join losses so the report can surface them."""
    missing_food = missing_nutrient = missing_portion = 0
    if category_file is None:
        return {
            "missing_food_row": 0,
            "missing_energy_row": 0,
            "missing_portion": 0,
        }
    i_fid = category_file.schema.index_of("fdc_id")
    i_nid = nutrients.schema.index_of("nutrient_id")
    for row in category_file.rows:
        fid = row[i_fid]
        if not food_index.lookup(fid):
            missing_food += 1
            continue
        if not any(
            r[i_nid] == nutrient_id for r in nutrient_index.rows(fid)
        ):
            missing_nutrient += 1
            continue
        if not portion_index.lookup(fid):
            missing_portion += 1
    return {
        "missing_food_row": missing_food,
        "missing_energy_row": missing_nutrient,
        "missing_portion": missing_portion,
    }


def assemble_food_items(
    joined: Mapping,
) -> list[FoodItem]:
    """One FoodItem per distinct fdc_id per category, ordered by
    (category, fdc_id).

    A fdc_id carrying conflicting metadata within one category raises
    DuplicateFoodId; identical repeated join rows (multi-portion output)
    collapse into a single item.
    """
    items: list[FoodItem] = []
    for category, table in joined.items():
        category = Category.of(category)
        schema = table.schema
        i_fid = schema.index_of("fdc_id")
        i_desc = schema.index_of("description")
        i_brand = (
            schema.index_of("brand_owner")
            if schema.has_column("brand_owner")
            else -1
        )
        i_rest = (
            schema.index_of("restaurant")
            if schema.has_column("restaurant")
            else -1
        )
        seen: dict[int, tuple] = {}
        for row in table.rows:
            fid = int(row[i_fid])
            meta = (
                row[i_desc],
                row[i_brand] if i_brand >= 0 else None,
                row[i_rest] if i_rest >= 0 else None,
            )
            if fid in seen:
                if seen[fid] != meta:
                    raise DuplicateFoodId(fid, category.value)
                continue
            seen[fid] = meta
        for fid in sorted(seen):
            desc, brand, rest = seen[fid]
            items.append(
                FoodItem(
                    fdc_id=fid,
                    description=str(desc),
                    category=category,
                    brand_owner=str(brand) if brand else None,
                    restaurant=str(rest) if rest else None,
                )
            )
    items.sort(key=lambda f: (CATEGORY_ORDER[f.category], f.fdc_id))
    return items
