"""The built database: foods with their facts and portions, plus the query
surface (text search and per-food nutrient profiles) and CSV persistence."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from .errors import InvariantViolation, UnknownFood
from .export import write_csv
from .ingest import (
    Cell,
    ColumnSpec,
    RawTable,
    TableSchema,
    load_table,
)
from .model import (
    CATEGORY_ORDER,
    Category,
    FoodItem,
    NutrientDictionary,
    NutrientValue,
    Portion,
)


@dataclass
class FoodStore:
    dictionary: NutrientDictionary
    foods: list[FoodItem] = field(default_factory=list)
    nutrient_values: dict[int, list[NutrientValue]] = field(default_factory=dict)
    portions: dict[int, list[Portion]] = field(default_factory=dict)

    def __post_init__(self):
        self._by_id = {f.fdc_id: f for f in self.foods}

    def add(
        self,
        foods: list[FoodItem],
        nutrient_values: dict[int, list[NutrientValue]],
        portions: dict[int, list[Portion]],
    ) -> None:
        for f in foods:
            if f.fdc_id in self._by_id:
                raise InvariantViolation(
                    f"food id {f.fdc_id} already present in the store"
                )
            self._by_id[f.fdc_id] = f
        self.foods.extend(foods)
        self.foods.sort(key=lambda f: (CATEGORY_ORDER[f.category], f.fdc_id))
        for fid, values in nutrient_values.items():
            bucket = self.nutrient_values.setdefault(fid, [])
            bucket.extend(values)
            bucket.sort(key=lambda v: v.nutrient_id)
        for fid, plist in portions.items():
            self.portions.setdefault(fid, []).extend(plist)

    def food(self, fdc_id: int) -> FoodItem:
        try:
            return self._by_id[fdc_id]
        except KeyError:
            raise UnknownFood(fdc_id) from None

    def __contains__(self, fdc_id: int) -> bool:
        return fdc_id in self._by_id

    def __len__(self) -> int:
        return len(self.foods)

    def facts(self, fdc_id: int) -> list[NutrientValue]:
        return self.nutrient_values.get(fdc_id, [])

    def portions_of(self, fdc_id: int) -> list[Portion]:
        return self.portions.get(fdc_id, [])

    def first_portion(self, fdc_id: int) -> Portion | None:
        plist = self.portions.get(fdc_id)
        return plist[0] if plist else None

    def max_food_id(self) -> int:
        return max(self._by_id, default=0)

    def fact_count(self) -> int:
        return sum(len(v) for v in self.nutrient_values.values())


# --- queries ------------------------------------------------------------------


@dataclass(frozen=True)
class NutrientConstraint:
    name: str
    minimum: Decimal | None = None
    maximum: Decimal | None = None

    def __post_init__(self):
        if (
            self.minimum is not None
            and self.maximum is not None
            and self.minimum > self.maximum
        ):
            raise InvariantViolation(
                f"constraint on {self.name!r}: min > max"
            )


@dataclass(frozen=True)
class QueryRequest:
    text_query: str
    category: Category | None = None
    brand_or_restaurant: str | None = None
    constraints: tuple[NutrientConstraint, ...] = ()
    limit: int = 10

    def __post_init__(self):
        if not self.text_query:
            raise InvariantViolation("text_query must be nonempty")
        if self.limit < 1:
            raise InvariantViolation("limit must be >= 1")


@dataclass(frozen=True)
class SearchHit:
    food: FoodItem
    matched: tuple[tuple[str, Decimal, str], ...]


def search(request: QueryRequest, store: FoodStore) -> list[SearchHit]:
    """Case-insensitive substring search with conjunctive filters.

    Deterministic order: match position, then description, then id.
    """
    needle = request.text_query.lower()
    constraint_ids = [
        (store.dictionary.lookup_id(c.name), c) for c in request.constraints
    ]
    scored: list[tuple[int, str, int, SearchHit]] = []
    for food in store.foods:
        pos = food.description.lower().find(needle)
        if pos < 0:
            continue
        if request.category is not None and food.category is not request.category:
            continue
        if request.brand_or_restaurant is not None:
            want = request.brand_or_restaurant.lower()
            have = (food.brand_owner or food.restaurant or "").lower()
            if have != want:
                continue
        facts = {v.nutrient_id: v for v in store.facts(food.fdc_id)}
        matched: list[tuple[str, Decimal, str]] = []
        ok = True
        for nid, constraint in constraint_ids:
            value = facts.get(nid)
            if value is None:
                ok = False
                break
            if constraint.minimum is not None and value.amount < constraint.minimum:
                ok = False
                break
            if constraint.maximum is not None and value.amount > constraint.maximum:
                ok = False
                break
            matched.append(
                (store.dictionary.by_id(nid).name, value.amount, value.unit)
            )
        if not ok:
            continue
        scored.append(
            (
                pos,
                food.description,
                food.fdc_id,
                SearchHit(food, tuple(matched)),
            )
        )
    scored.sort(key=lambda t: (t[0], t[1], t[2]))
    return [hit for _, _, _, hit in scored[: request.limit]]


def nutrient_profile(
    food_id: int, store: FoodStore
) -> list[tuple[str, Decimal, str]]:
    """All facts for one food, sorted by nutrient name."""
    store.food(food_id)  # raises UnknownFood
    rows = [
        (store.dictionary.by_id(v.nutrient_id).name, v.amount, v.unit)
        for v in store.facts(food_id)
    ]
    rows.sort(key=lambda r: r[0])
    return rows


# --- persistence ----------------------------------------------------------------

FOODS_SCHEMA = TableSchema(
    "foods",
    (
        ColumnSpec("fdc_id", "id64"),
        ColumnSpec("description", "text"),
        ColumnSpec("category", "text"),
        ColumnSpec("brand_owner", "text"),
        ColumnSpec("restaurant", "text"),
    ),
)

VALUES_SCHEMA = TableSchema(
    "nutrient_values",
    (
        ColumnSpec("food_id", "id64"),
        ColumnSpec("nutrient_id", "id64"),
        ColumnSpec("amount", "decimal"),
        ColumnSpec("unit", "unit_code"),
    ),
)

PORTIONS_SCHEMA = TableSchema(
    "portions",
    (
        ColumnSpec("food_id", "id64"),
        ColumnSpec("servings", "decimal"),
        ColumnSpec("serving_size", "decimal"),
        ColumnSpec("serving_size_unit", "unit_code"),
        ColumnSpec("gram_weight", "decimal"),
    ),
)

DICTIONARY_SCHEMA = TableSchema(
    "nutrients",
    (
        ColumnSpec("id", "id64"),
        ColumnSpec("name", "text"),
        ColumnSpec("unit_name", "unit_code"),
    ),
)


def store_tables(store: FoodStore) -> dict[str, RawTable]:
    """The store as plain tables, in deterministic order."""
    food_rows: list[tuple[Cell, ...]] = []
    value_rows: list[tuple[Cell, ...]] = []
    portion_rows: list[tuple[Cell, ...]] = []
    for f in store.foods:
        food_rows.append(
            (
                f.fdc_id,
                f.description,
                f.category.value,
                f.brand_owner or "",
                f.restaurant or "",
            )
        )
        for v in store.facts(f.fdc_id):
            value_rows.append((v.food_id, v.nutrient_id, v.amount, v.unit))
        for p in store.portions_of(f.fdc_id):
            portion_rows.append(
                (
                    p.food_id,
                    p.servings,
                    p.serving_size,
                    p.serving_size_unit,
                    p.gram_weight,
                )
            )
    dict_rows: list[tuple[Cell, ...]] = [
        (d.nutrient_id, d.name, d.unit)
        for d in sorted(store.dictionary, key=lambda d: d.nutrient_id)
    ]
    return {
        "foods": RawTable(FOODS_SCHEMA, food_rows),
        "nutrient_values": RawTable(VALUES_SCHEMA, value_rows),
        "portions": RawTable(PORTIONS_SCHEMA, portion_rows),
        "nutrients": RawTable(DICTIONARY_SCHEMA, dict_rows),
    }


def save_store(store: FoodStore, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, table in store_tables(store).items():
        write_csv(table, directory / f"{name}.csv")
    return directory


def load_store(directory) -> FoodStore:
    directory = Path(directory)
    dictionary = NutrientDictionary.from_table(
        load_table(directory / "nutrients.csv", DICTIONARY_SCHEMA)
    )
    foods_table = load_table(directory / "foods.csv", FOODS_SCHEMA)
    values_table = load_table(directory / "nutrient_values.csv", VALUES_SCHEMA)
    portions_table = load_table(directory / "portions.csv", PORTIONS_SCHEMA)

    foods = [
        FoodItem(
            fdc_id=int(r[0]),
            description=str(r[1]),
            category=Category(r[2]),
            brand_owner=str(r[3]) or None,
            restaurant=str(r[4]) or None,
        )
        for r in foods_table.rows
    ]
    values: dict[int, list[NutrientValue]] = {}
    for r in values_table.rows:
        values.setdefault(int(r[0]), []).append(
            NutrientValue(int(r[0]), int(r[1]), r[2], str(r[3]))
        )
    portions: dict[int, list[Portion]] = {}
    for r in portions_table.rows:
        portions.setdefault(int(r[0]), []).append(
            Portion(
                food_id=int(r[0]),
                servings=r[1],
                serving_size=r[2],
                serving_size_unit=r[3],
                gram_weight=r[4],
            )
        )
    return FoodStore(dictionary, foods, values, portions)
