"""Shared builders for in-memory stores and random tables."""

from __future__ import annotations

import random
from decimal import Decimal

from foodbase.ingest import ColumnSpec, RawTable, TableSchema
from foodbase.model import (
    Category,
    FoodItem,
    NutrientDef,
    NutrientDictionary,
    NutrientValue,
    Portion,
)
from foodbase.store import FoodStore

#: small name pool with figure-style comma names included
NUTRIENT_POOL = (
    NutrientDef(1008, "energy", "KCAL"),
    NutrientDef(1003, "protein", "G"),
    NutrientDef(1004, "total lipid (fat)", "G"),
    NutrientDef(1079, "fiber, total dietary", "G"),
    NutrientDef(1093, "sodium, na", "MG"),
    NutrientDef(2000, "sugars, total including nlea", "G"),
    NutrientDef(1253, "cholesterol", "MG"),
    NutrientDef(1005, "carbohydrate, by difference", "G"),
)


def make_store(food_specs, dictionary=None) -> FoodStore:
    """food_specs: (fdc_id, description, brand, {nutrient_id: amount}, portion)
    where portion is (servings, serving_size, unit, gram_weight) or None."""
    dictionary = dictionary or NutrientDictionary(NUTRIENT_POOL)
    foods = []
    values = {}
    portions = {}
    for fdc_id, desc, brand, facts, portion in food_specs:
        foods.append(
            FoodItem(
                fdc_id=fdc_id,
                description=desc,
                category=Category.BRANDED if brand else Category.FOUNDATION,
                brand_owner=brand,
            )
        )
        if facts:
            values[fdc_id] = [
                NutrientValue(
                    fdc_id, nid, Decimal(str(amount)),
                    dictionary.by_id(nid).unit,
                )
                for nid, amount in facts.items()
            ]
        if portion is not None:
            servings, size, unit, grams = portion
            portions[fdc_id] = [
                Portion(
                    food_id=fdc_id,
                    servings=Decimal(str(servings)) if servings else None,
                    serving_size=Decimal(str(size)) if size else None,
                    serving_size_unit=unit,
                    gram_weight=Decimal(str(grams)) if grams else None,
                )
            ]
    store = FoodStore(dictionary, [], {}, {})
    store.add(foods, values, portions)
    return store


def random_store(
    rng: random.Random,
    n_foods: int,
    *,
    nutrient_ids=None,
    full_coverage: bool = False,
) -> FoodStore:
    """Random store over the shared pool; full_coverage gives every food a
    fact for every chosen nutrient."""
    dictionary = NutrientDictionary(NUTRIENT_POOL)
    pool = nutrient_ids or [d.nutrient_id for d in NUTRIENT_POOL]
    specs = []
    next_id = 1000
    for _ in range(n_foods):
        next_id += rng.randint(1, 9)
        if full_coverage:
            chosen = list(pool)
        else:
            chosen = rng.sample(pool, rng.randint(0, len(pool)))
        facts = {
            nid: Decimal(rng.randint(0, 99999)) / 100 for nid in chosen
        }
        portion = (
            rng.randint(1, 9),
            rng.randint(1, 500),
            rng.choice(("G", "ML", "OZ")),
            rng.randint(1, 500),
        )
        brand = rng.choice(("Blue Harbor Packing", "Sunrise Mills"))
        specs.append(
            (next_id, f"FOOD {next_id} SAMPLE", brand, facts, portion)
        )
    return make_store(specs, dictionary)


def load_usda(fixture_dir, name):
    """Load one fixture USDA file the way the build pipeline does."""
    from foodbase.build import _USDA_OVERRIDES, _load_usda_file

    table, _ = _load_usda_file(
        fixture_dir / "usda" / name,
        sanitize=False,
        overrides=_USDA_OVERRIDES.get(name),
    )
    return table


def usda_tables(fixture_dir):
    return {
        name: load_usda(fixture_dir, name)
        for name in (
            "food.csv", "branded_food.csv", "foundation_food.csv",
            "sr_legacy_food.csv", "food_nutrient.csv", "food_portion.csv",
            "nutrient.csv",
        )
    }


def join_args(tables, category=Category.BRANDED):
    from foodbase.model import build_index

    files = {
        Category.BRANDED: "branded_food.csv",
        Category.FOUNDATION: "foundation_food.csv",
        Category.SR_LEGACY: "sr_legacy_food.csv",
    }
    nutrients = tables["food_nutrient.csv"]
    portions = tables["food_portion.csv"]
    return dict(
        category=category,
        food=tables["food.csv"],
        category_file=tables[files[category]],
        nutrients=nutrients,
        portions=portions,
        nutrient_id=1008,
        nutrient_index=build_index(nutrients, "fdc_id"),
        portion_index=build_index(portions, "fdc_id"),
    )


def brute_force_join(category_file, food, nutrients, portions, nutrient_id,
                     with_brand):
    """Independent O(n^2) nested-loop version of the category join."""
    out = []
    cf = category_file
    i_fid = cf.schema.index_of("fdc_id")
    i_brand = cf.schema.index_of("brand_owner") if with_brand else None
    fi_fid = food.schema.index_of("fdc_id")
    fi_desc = food.schema.index_of("description")
    ni_fid = nutrients.schema.index_of("fdc_id")
    ni_nid = nutrients.schema.index_of("nutrient_id")
    ni_amount = nutrients.schema.index_of("amount")
    pi_fid = portions.schema.index_of("fdc_id")
    pi_amount = portions.schema.index_of("amount")
    pi_gram = portions.schema.index_of("gram_weight")
    for crow in cf.rows:
        fid = crow[i_fid]
        for frow in food.rows:
            if frow[fi_fid] != fid:
                continue
            for nrow in nutrients.rows:
                if nrow[ni_fid] != fid or nrow[ni_nid] != nutrient_id:
                    continue
                for prow in portions.rows:
                    if prow[pi_fid] != fid:
                        continue
                    row = [fid, frow[fi_desc]]
                    if with_brand:
                        row.append(crow[i_brand])
                    row += [nrow[ni_amount], prow[pi_amount], prow[pi_gram]]
                    out.append(tuple(row))
    return out


def random_table(rng: random.Random, n_rows: int = 20) -> RawTable:
    """Random typed table exercising quoting-sensitive text."""
    tricky = ("plain", 'quo"te', "com,ma", "new\nline", "", "end\r", "x,y")
    columns = (
        ColumnSpec("row_id", "id64"),
        ColumnSpec("label", "text"),
        ColumnSpec("count", "integer"),
        ColumnSpec("amount", "decimal"),
        ColumnSpec("unit", "unit_code"),
    )
    rows = []
    for i in range(n_rows):
        rows.append(
            (
                100 + i,
                rng.choice(tricky),
                rng.randint(-5, 5) if rng.random() < 0.8 else None,
                Decimal(rng.randint(0, 9999)) / 100
                if rng.random() < 0.8
                else None,
                rng.choice(("G", "ML", None)),
            )
        )
    return RawTable(TableSchema("random_table", columns), rows)
