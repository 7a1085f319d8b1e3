"""Deterministic, manifest-backed fixture generation.

A fixture directory is a desk-scale stand-in for the real source dumps: the
seven USDA-style CSVs under usda/, a restaurant CSV (CRLF line endings, a
few deliberately corrupt bytes), a scrape tree under fixtures/, source PNGs
with a listing under images/, two source configs, and manifest.json,
the ground truth every oracle test compares against. Identical seeds produce
byte-identical directories.
"""

from __future__ import annotations

import hashlib
import json
import random
from decimal import Decimal
from pathlib import Path

from .export import emit_csv, format_decimal
from .ingest import ColumnSpec, RawTable, TableSchema
from .model import CANONICAL_NUTRIENTS, NutrientDef
from .scrape import FIELD_NUTRIENT_IDS, NUTRIENT_FIELDS

USDA_FILE_NAMES = (
    "branded_food.csv",
    "food.csv",
    "food_nutrient.csv",
    "food_portion.csv",
    "foundation_food.csv",
    "nutrient.csv",
    "sr_legacy_food.csv",
)

_BRAND_POOL = (
    "CAMPBELL SOUP COMPANY",
    "Bush Brothers And Company",
    "PEPPERIDGE FARM",
    "Richardson Oilseed Products (US) Inc.",
    "General Provisions Co.",
    "Hearthside Foods",
    "Blue Harbor Packing",
    "Sunrise Mills",
    "Prairie Gold Foods",
    "Coastal Cannery",
)

_FOOD_WORDS = (
    "BROTH", "SOUP", "BEANS", "BREAD", "PASTA", "SAUCE", "OIL", "COOKIES",
    "CEREAL", "JUICE", "CHEESE", "YOGURT", "GRANOLA", "RICE", "SALSA",
    "CRACKERS", "TOMATO", "CHICKEN", "BEEF", "GARDEN", "KETTLE", "ORGANIC",
    "CLASSIC", "GOLDEN", "SMOKED", "ROASTED", "SWEET", "SPICY", "COUNTRY",
    "HARVEST",
)

_MENU_RESTAURANTS = (
    "Taco Bell",
    "Dunkin' Donuts",
    "Wendy's",
    "Papa John's",
    "Burger Barn",
    "Noodle Nook",
    "Salad Station",
    "Pita Palace",
)

_MENU_ITEM_WORDS = (
    "Burrito", "Sandwich", "Coffee", "Pizza", "Salad", "Wrap", "Bowl",
    "Taco", "Shake", "Nuggets", "Fries", "Melt", "Panini", "Smoothie",
    "Sundae", "Combo", "Deluxe", "Crispy", "Grande", "Classic",
)

_MENU_CATEGORIES = (
    "Beverages", "Sandwiches", "Burgers", "Pizza", "Toppings & Condiments",
    "Salads", "Desserts", "Sides",
)

_SCRAPE_FIRST = (
    "Amber", "Birch", "Cedar", "Dune", "Ember", "Fern", "Grove", "Harbor",
    "Iris", "Juniper", "Kiln", "Laurel", "Maple", "North", "Olive", "Pine",
)
_SCRAPE_SECOND = ("Bistro", "Cantina", "Diner", "Grill", "Kitchen", "Tavern")

_SCRAPE_FOOD_FIRST = (
    "Grilled", "Crispy", "Smoky", "Garden", "Classic", "Double", "Golden",
    "Spicy", "Harvest", "Stacked", "Farmhouse", "Midnight",
)
_SCRAPE_FOOD_SECOND = (
    "Burger", "Wrap", "Salad", "Platter", "Melt", "Bowl", "Skillet",
    "Sandwich", "Tacos", "Flatbread",
)

#: Units per scraped nutrient field; these agree with the standard
#: dictionary so folded facts keep their dictionary unit.
FIELD_UNITS = {
    "energy": "KCAL",
    "sodium": "MG",
    "cholesterol": "MG",
}

#: One food always carries this id to pin 64-bit ingestion end to end.
BIG_FDC_ID = 3_000_000_000


def _cents(rng: random.Random, lo: int, hi: int) -> Decimal:
    return Decimal(rng.randint(lo * 100, hi * 100)) / 100


def _tenths(rng: random.Random, lo: int, hi: int) -> Decimal:
    return Decimal(rng.randint(lo * 10, hi * 10)) / 10


def fixture_dictionary(n_nutrients: int) -> list[NutrientDef]:
    defs = list(CANONICAL_NUTRIENTS[:n_nutrients])
    for i in range(len(defs), n_nutrients):
        defs.append(NutrientDef(9001 + i, f"Factor {i + 1}", "G"))
    return defs


def _slug(name: str) -> str:
    out = []
    prev_dash = False
    for ch in name.lower():
        if ch.isalnum():
            out.append(ch)
            prev_dash = False
        elif not prev_dash:
            out.append("-")
            prev_dash = True
    return "".join(out).strip("-")


def _text_table(name: str, columns: tuple[str, ...], rows) -> RawTable:
    schema = TableSchema(name, tuple(ColumnSpec(c) for c in columns))
    return RawTable(schema, [tuple(rows_cells) for rows_cells in rows])


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


# --- USDA file set ------------------------------------------------------------


def _usda_files(rng: random.Random, n_foods: int, n_nutrients: int):
    """Rows for the seven-file set plus the ground-truth food list."""
    defs = fixture_dictionary(n_nutrients)
    split_foundation = max(1, n_foods * 15 // 100) if n_foods >= 3 else 0
    split_sr = split_foundation
    split_branded = n_foods - split_foundation - split_sr

    foods = []
    next_id = 100_000
    for i in range(n_foods):
        next_id += rng.randint(1, 97)
        if i < split_branded:
            category = "branded"
            brand = rng.choice(_BRAND_POOL)
        elif i < split_branded + split_foundation:
            category, brand = "foundation", None
        else:
            category, brand = "sr_legacy", None
        words = rng.sample(_FOOD_WORDS, 3)
        description = " ".join(words) + f" {rng.randint(1, 99)}"
        foods.append(
            {
                "fdc_id": next_id,
                "category": category,
                "description": description,
                "brand_owner": brand,
            }
        )
    if split_branded:
        # pin one branded food to the 64-bit id
        foods[split_branded - 1]["fdc_id"] = BIG_FDC_ID

    food_rows = []
    branded_rows = []
    foundation_rows = []
    sr_rows = []
    nutrient_rows = []
    portion_rows = []
    facts: dict[str, list[dict]] = {}
    portions: dict[str, dict] = {}
    fn_id = 0
    fp_id = 0
    for food in foods:
        fid = str(food["fdc_id"])
        food_rows.append(
            (
                fid,
                f"{food['category']}_food",
                food["description"],
                str(rng.randint(1, 28)),
            )
        )
        if food["category"] == "branded":
            branded_rows.append((fid, food["brand_owner"]))
        elif food["category"] == "foundation":
            foundation_rows.append((fid, str(rng.randint(1000, 99999))))
        else:
            sr_rows.append((fid, str(rng.randint(1000, 99999))))
        fact_list = []
        for d in defs:
            if d.nutrient_id == 1008:
                amount = Decimal(rng.randint(0, 18000)) / 20
            else:
                amount = _cents(rng, 0, 400)
            fn_id += 1
            nutrient_rows.append(
                (str(fn_id), fid, str(d.nutrient_id), format_decimal(amount))
            )
            fact_list.append(
                {
                    "nutrient_id": d.nutrient_id,
                    "amount": format_decimal(amount),
                    "unit": d.unit,
                }
            )
        facts[fid] = fact_list
        fp_id += 1
        servings = Decimal(rng.randint(1, 10))
        serving_size = Decimal(rng.randint(1, 500))
        unit = rng.choice(("G", "ML", "OZ"))
        gram_weight = _tenths(rng, 1, 500)
        portion_rows.append(
            (
                str(fp_id),
                fid,
                format_decimal(servings),
                format_decimal(serving_size),
                unit,
                format_decimal(gram_weight),
            )
        )
        portions[fid] = {
            "servings": format_decimal(servings),
            "serving_size": format_decimal(serving_size),
            "serving_size_unit": unit,
            "gram_weight": format_decimal(gram_weight),
        }

    tables = {
        "food.csv": _text_table(
            "food",
            ("fdc_id", "data_type", "description", "food_category_id"),
            food_rows,
        ),
        "branded_food.csv": _text_table(
            "branded_food", ("fdc_id", "brand_owner"), branded_rows
        ),
        "foundation_food.csv": _text_table(
            "foundation_food", ("fdc_id", "NDB_number"), foundation_rows
        ),
        "sr_legacy_food.csv": _text_table(
            "sr_legacy_food", ("fdc_id", "NDB_number"), sr_rows
        ),
        "food_nutrient.csv": _text_table(
            "food_nutrient", ("id", "fdc_id", "nutrient_id", "amount"),
            nutrient_rows,
        ),
        "food_portion.csv": _text_table(
            "food_portion",
            ("id", "fdc_id", "amount", "serving_size", "serving_size_unit",
             "gram_weight"),
            portion_rows,
        ),
        "nutrient.csv": _text_table(
            "nutrient",
            ("id", "name", "unit_name"),
            [(str(d.nutrient_id), d.name, d.unit) for d in defs],
        ),
    }
    manifest = {
        "dictionary": [
            {"id": d.nutrient_id, "name": d.name, "unit": d.unit}
            for d in defs
        ],
        "foods": foods,
        "facts": facts,
        "portions": portions,
        "per_category": {
            "branded": split_branded,
            "foundation": split_foundation,
            "sr_legacy": split_sr,
            "experimental": 0,
        },
    }
    return tables, manifest


# --- restaurant CSV -------------------------------------------------------------

MENUSTAT_HEADER = (
    "restaurant_id", "restaurant", "food_category", "description",
    "item_description", "serving_size", "serving_size_unit",
    "servings_per_serving_size", "serving_size_text",
    "grams_per_serving_size", "kcals", "energy", "energy_unit",
)

# placeholders swapped for raw corrupt bytes after encoding
_DIRTY_OPEN = ""
_DIRTY_CLOSE = ""


def _menustat_bytes(rng: random.Random, n_rows: int):
    rows = []
    kcal_rows = 0
    dirty_rows = 0
    for i in range(1, n_rows + 1):
        restaurant = rng.choice(_MENU_RESTAURANTS)
        category = rng.choice(_MENU_CATEGORIES)
        name = " ".join(rng.sample(_MENU_ITEM_WORDS, 2))
        description = f"{name}, {category}"
        dirty = i % 7 == 0
        if dirty:
            description += f" {_DIRTY_OPEN}promo{_DIRTY_CLOSE}"
            dirty_rows += 1
        has_kcal = rng.random() < 0.8
        if has_kcal:
            kcal_rows += 1
            serving = str(rng.randint(1, 600))
            unit = rng.choice(("g", "oz", "ml"))
            grams = serving if unit == "g" else str(rng.randint(50, 900))
            energy = str(rng.randint(0, 1200))
            row = (
                str(i), restaurant, category, name, description,
                serving, unit, "1", f"1 {name.split()[0]}", grams,
                "", energy, "kcal",
            )
        else:
            row = (
                str(i), restaurant, category, name, description,
                "", "", "", "", "", "", "", "",
            )
        rows.append(row)
    table = _text_table("menustat", MENUSTAT_HEADER, rows)
    text = emit_csv(table).decode("utf-8")
    data = text.replace("\n", "\r\n").encode("utf-8")
    data = data.replace(_DIRTY_OPEN.encode("utf-8"), b"\x93")
    data = data.replace(_DIRTY_CLOSE.encode("utf-8"), b"\x94")
    manifest = {
        "rows": n_rows,
        "kcal_rows": kcal_rows,
        "dirty_rows": dirty_rows,
        "dirty_bytes": dirty_rows * 2,
    }
    return data, manifest


# --- scrape tree ---------------------------------------------------------------

_INDEX_TEMPLATE = """<!DOCTYPE html>
<html><head><title>Restaurants</title></head>
<body>
<h1>All restaurants</h1>
<ul class="restaurant-index">
{items}
</ul>
</body></html>
"""

_MENU_TEMPLATE = """<!DOCTYPE html>
<html><head><title>{name}</title></head>
<body>
<div class="menu">
<h1>{name}</h1>
{sections}
</div>
</body></html>
"""

_SECTION_TEMPLATE = """<section class="food-category">
<h2>{category}</h2>
<ul class="food-list">
{items}
</ul>
</section>"""

_FOOD_TEMPLATE = """<!DOCTYPE html>
<html><head><title>{food}</title></head>
<body>
<div class="food-detail">
<h1 class="food-name">{food}</h1>
<p>Served at <span class="restaurant-name">{restaurant}</span></p>
<table class="nutrition-facts">
{rows}
</table>
</div>
</body></html>
"""


def food_page_html(restaurant: str, food: str, nutrients: dict) -> str:
    rows = "\n".join(
        f'<tr><td class="nutrient-name">{fld.replace("_", " ")}</td>'
        f'<td class="nutrient-amount">{amount}</td>'
        f'<td class="nutrient-unit">{unit}</td></tr>'
        for fld, (amount, unit) in nutrients.items()
    )
    return _FOOD_TEMPLATE.format(food=food, restaurant=restaurant, rows=rows)


def _scrape_tree(rng: random.Random, n_restaurants: int):
    pool = [
        f"{a} {b}" for a in _SCRAPE_FIRST for b in _SCRAPE_SECOND
    ]
    if n_restaurants > len(pool):
        pool += [f"Restaurant {i}" for i in range(1, n_restaurants - len(pool) + 1)]
    names = sorted(rng.sample(pool, n_restaurants))

    files: dict[str, str] = {}
    restaurants = []
    total_foods = 0
    planted_facts = 0
    first_food = True
    for name in names:
        rdir = _slug(name)
        categories = rng.sample(_MENU_CATEGORIES, rng.randint(1, 3))
        food_pool = [
            f"{a} {b}" for a in _SCRAPE_FOOD_FIRST for b in _SCRAPE_FOOD_SECOND
        ]
        rng.shuffle(food_pool)
        sections = []
        menu = []
        for category in categories:
            foods = []
            for _ in range(rng.randint(1, 4)):
                food = food_pool.pop()
                if first_food:
                    fields = list(NUTRIENT_FIELDS)
                    first_food = False
                else:
                    k = rng.randint(1, len(NUTRIENT_FIELDS))
                    fields = sorted(
                        rng.sample(NUTRIENT_FIELDS, k),
                        key=NUTRIENT_FIELDS.index,
                    )
                nutrients = {
                    fld: (
                        format_decimal(_tenths(rng, 0, 999)),
                        FIELD_UNITS.get(fld, "G"),
                    )
                    for fld in fields
                }
                fname = _slug(food) + ".html"
                files[f"{rdir}/{fname}"] = food_page_html(
                    name, food, nutrients
                )
                foods.append(
                    {"name": food, "file": fname, "nutrients": nutrients}
                )
                total_foods += 1
                planted_facts += len(nutrients)
            menu.append({"category": category, "foods": foods})
            sections.append(
                _SECTION_TEMPLATE.format(
                    category=category,
                    items="\n".join(
                        f'<li><a href="{f["file"]}">{f["name"]}</a></li>'
                        for f in foods
                    ),
                )
            )
        files[f"{rdir}/menu.html"] = _MENU_TEMPLATE.format(
            name=name, sections="\n".join(sections)
        )
        restaurants.append({"name": name, "dir": rdir, "menu": menu})

    files["index.html"] = _INDEX_TEMPLATE.format(
        items="\n".join(
            f'<li><a href="{r["dir"]}/menu.html">{r["name"]}</a></li>'
            for r in restaurants
        )
    )
    manifest = {
        "restaurants": restaurants,
        "restaurant_count": len(restaurants),
        "food_count": total_foods,
        "planted_facts": planted_facts,
    }
    return files, manifest


# --- images ----------------------------------------------------------------------


def _image_entries(rng: random.Random, foods: list[dict]):
    fixed = [(1237, 841), (800, 600), (100, 100)]
    entries = []
    branded = [f for f in foods if f["brand_owner"]]
    for i, food in enumerate(branded[:6]):
        if i < len(fixed):
            w, h = fixed[i]
        else:
            w, h = rng.randint(40, 1600), rng.randint(40, 1600)
        entries.append(
            {
                "brand": food["brand_owner"],
                "food": food["description"],
                "file": f"img_{i:03d}.png",
                "width": w,
                "height": h,
            }
        )
    return entries


def _write_images(out_dir: Path, entries: list[dict]) -> None:
    from PIL import Image

    colors = [(200, 80, 40), (60, 140, 200), (90, 180, 90), (220, 180, 40),
              (150, 90, 190), (40, 40, 40)]
    img_dir = out_dir / "images"
    img_dir.mkdir(parents=True, exist_ok=True)
    for i, entry in enumerate(entries):
        img = Image.new(
            "RGB", (entry["width"], entry["height"]), colors[i % len(colors)]
        )
        img.save(img_dir / entry["file"], format="PNG")
    listing = _text_table(
        "image_listing",
        ("brand", "food", "source_file", "width", "height"),
        [
            (e["brand"], e["food"], e["file"], str(e["width"]),
             str(e["height"]))
            for e in entries
        ],
    )
    _write(img_dir / "listing.csv", emit_csv(listing))


# --- top-level generation -----------------------------------------------------------


def generate_fixture(
    out_dir,
    seed: int = 1,
    n_foods: int = 100,
    n_nutrients: int = 8,
    *,
    n_restaurants: int = 5,
    menustat_rows: int = 60,
    with_scrape: bool = True,
    with_menustat: bool = True,
    with_images: bool = True,
) -> dict:
    """Write a complete fixture directory; returns the manifest."""
    if n_foods < 1 or n_nutrients < 1:
        raise ValueError("n_foods and n_nutrients must be >= 1")
    out_dir = Path(out_dir)
    rng = random.Random(seed)

    tables, usda_manifest = _usda_files(rng, n_foods, n_nutrients)
    for name, table in tables.items():
        _write(out_dir / "usda" / name, emit_csv(table))

    manifest: dict = {
        "seed": seed,
        "n_foods": n_foods,
        "n_nutrients": n_nutrients,
        "usda": usda_manifest,
        "special": {"big_fdc_id": BIG_FDC_ID if n_foods >= 1 else None},
    }

    menustat_kcal = 0
    menustat_count = 0
    if with_menustat:
        data, menustat_manifest = _menustat_bytes(rng, menustat_rows)
        _write(out_dir / "menustat.csv", data)
        manifest["menustat"] = menustat_manifest
        menustat_kcal = menustat_manifest["kcal_rows"]
        menustat_count = menustat_manifest["rows"]

    scrape_foods = 0
    scrape_facts = 0
    if with_scrape:
        files, scrape_manifest = _scrape_tree(rng, n_restaurants)
        for rel, html in files.items():
            _write(out_dir / "fixtures" / rel, html.encode("utf-8"))
        manifest["scrape"] = scrape_manifest
        scrape_foods = scrape_manifest["food_count"]
        dict_ids = {d["id"] for d in usda_manifest["dictionary"]}
        scrape_facts = sum(
            1
            for r in scrape_manifest["restaurants"]
            for section in r["menu"]
            for food in section["foods"]
            for fld in food["nutrients"]
            if FIELD_NUTRIENT_IDS[fld] in dict_ids
        )
        manifest["scrape"]["mappable_facts"] = scrape_facts

    if with_images:
        entries = _image_entries(rng, usda_manifest["foods"])
        _write_images(out_dir, entries)
        manifest["images"] = entries

    usda_facts = n_foods * n_nutrients
    manifest["counts"] = {
        "usda": {
            "foods": n_foods,
            "facts": usda_facts,
            "row_layout": usda_facts,
            "column_layout": n_foods,
        },
        "full": {
            "foods": n_foods + menustat_count + scrape_foods,
            "row_layout": usda_facts + menustat_kcal + scrape_facts,
            "column_layout": n_foods + menustat_count + scrape_foods,
        },
    }

    _write(out_dir / "sources_usda.cfg", b"usda_dir = usda\n")
    full_cfg = ["usda_dir = usda"]
    if with_menustat:
        full_cfg.append("menustat = menustat.csv")
    if with_scrape:
        full_cfg.append("scrape_dir = fixtures")
    _write(out_dir / "sources_full.cfg", ("\n".join(full_cfg) + "\n").encode())

    _write(
        out_dir / "manifest.json",
        (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode(),
    )
    return manifest


# --- golden fixture -------------------------------------------------------------
#
# Hand-transcribed rows used by the exact-value tests: three branded foods
# with their energy/nutrient facts and portions, and an eight-row restaurant
# CSV including rows with no energy value at all.

GOLDEN_WESSON_ID = 100001
GOLDEN_SWANSON_ID = 100002
GOLDEN_CAMPBELLS_ID = 100003

GOLDEN_DICTIONARY = (
    (1008, "energy", "KCAL"),
    (1003, "protein", "G"),
    (1004, "total lipid (fat)", "G"),
    (1005, "carbohydrate, by difference", "G"),
    (2000, "sugars, total including nlea", "G"),
    (1093, "sodium, na", "MG"),
    (1079, "fiber, total dietary", "G"),
    (1253, "cholesterol", "MG"),
    (1258, "fatty acids, total saturated", "G"),
    (1292, "fatty acids, total monounsaturated", "G"),
    (1293, "fatty acids, total polyunsaturated", "G"),
    (1092, "potassium, k", "MG"),
    (1087, "calcium, ca", "MG"),
    (1089, "iron, fe", "MG"),
)

GOLDEN_FOODS = (
    {
        "fdc_id": GOLDEN_WESSON_ID,
        "description": "WESSON Vegetable Oil 1 GAL",
        "brand_owner": "Richardson Oilseed Products (US) Inc.",
        "portion": ("15", "15", "ML", "13.8"),
        "facts": (
            (1008, "130.05"),
            (1004, "14"),
            (1079, "0"),
            (1258, "2"),
            (1292, "8"),
            (1293, "3"),
        ),
    },
    {
        "fdc_id": GOLDEN_SWANSON_ID,
        "description": "SWANSON BROTH BEEF",
        "brand_owner": "CAMPBELL SOUP COMPANY",
        "portion": ("240", "240", "ML", "240"),
        "facts": (
            (1008, "9.6"),
            (1003, "1.99"),
            (1093, "830.4"),
            (1005, "1.01"),
            (2000, "1.01"),
        ),
    },
    {
        "fdc_id": GOLDEN_CAMPBELLS_ID,
        "description": "CAMPBELL'S SLOW KETTLE SOUP",
        "brand_owner": "CAMPBELL SOUP COMPANY",
        "portion": ("440", "440", "G", "440"),
        "facts": (
            (1008, "360.8"),
            (2000, "1.8"),
            (1258, "4.49"),
            (1253, "26.4"),
            (1093, "1597.2"),
            (1092, "286"),
            (1089, "1.06"),
            (1087, "70.4"),
            (1079, "1.76"),
        ),
    },
)

# (restaurant_id, restaurant, food_category, description, item_description,
#  serving_size, unit, servings_per, serving_text, grams_per, kcals, energy,
#  energy_unit)
GOLDEN_MENUSTAT_ROWS = (
    ("11", "Dunkin' Donuts", "Beverages",
     "Hot Coffee, Caramel Mocha, w/ Cream",
     "Hot Coffee, Caramel Mocha, w/ Cream",
     "20", "oz", "", "", "", "", "340", "kcal"),
    ("2", "Taco Bell", "Sandwiches",
     "XXL Quesadilla Burrito w/ Steak",
     "XXL Quesadilla Burrito w/ Steak, Sandwiches",
     "434", "g", "1", "1 Burrito", "434", "", "840", "kcal"),
    ("3", "Dunkin' Donuts", "Beverages",
     "Hot Coffee, Caramel Mocha, w/ Cream",
     "Hot Coffee, Caramel Mocha, w/ Cream",
     "10", "oz", "", "", "", "", "170", "kcal"),
    ("4", "Dunkin' Donuts", "Beverages",
     "Hot Coffee, Caramel Mocha, w/ Skim Milk",
     "Hot Coffee, Caramel Mocha, w/ Skim Milk",
     "", "", "", "", "", "", "", ""),
    ("5", "Wendy's", "Burgers",
     "Double Meat Whiteburger", "Double Meat Whiteburger",
     "461", "g", "", "", "461", "870", "", "kcal"),
    ("6", "Dunkin' Donuts", "Beverages",
     "Hot Coffee, Caramel Mocha, w/ Whipped Cream",
     "Hot Coffee, Caramel Mocha, w/ Whipped Cream",
     "", "", "", "", "", "", "", ""),
    ("8", "Papa John's", "Pizza",
     "Original Fresh Pizza, Thin Crust, Large",
     "Original Fresh Pizza w/ Baby Portobellos",
     "111", "g", "1", "1 Slice, 1/8 Pizza", "111", "", "220", "kcal"),
    ("18", "Taco Bell", "Toppings & Condiments",
     "Border Sauce, Mild", "Border Sauce, Mild, Condiments",
     "7", "g", "", "", "7", "", "0", "kcal"),
)

GOLDEN_MENUSTAT_KCAL_ROWS = 6


def generate_golden_fixture(out_dir) -> dict:
    """Write the hand-transcribed figure fixture; returns its manifest."""
    out_dir = Path(out_dir)
    food_rows = []
    branded_rows = []
    nutrient_rows = []
    portion_rows = []
    fn_id = 0
    for i, food in enumerate(GOLDEN_FOODS, start=1):
        fid = str(food["fdc_id"])
        food_rows.append((fid, "branded_food", food["description"], "1"))
        branded_rows.append((fid, food["brand_owner"]))
        for nid, amount in food["facts"]:
            fn_id += 1
            nutrient_rows.append((str(fn_id), fid, str(nid), amount))
        servings, size, unit, grams = food["portion"]
        portion_rows.append((str(i), fid, servings, size, unit, grams))

    tables = {
        "food.csv": _text_table(
            "food", ("fdc_id", "data_type", "description", "food_category_id"),
            food_rows,
        ),
        "branded_food.csv": _text_table(
            "branded_food", ("fdc_id", "brand_owner"), branded_rows
        ),
        "foundation_food.csv": _text_table(
            "foundation_food", ("fdc_id", "NDB_number"), []
        ),
        "sr_legacy_food.csv": _text_table(
            "sr_legacy_food", ("fdc_id", "NDB_number"), []
        ),
        "food_nutrient.csv": _text_table(
            "food_nutrient", ("id", "fdc_id", "nutrient_id", "amount"),
            nutrient_rows,
        ),
        "food_portion.csv": _text_table(
            "food_portion",
            ("id", "fdc_id", "amount", "serving_size", "serving_size_unit",
             "gram_weight"),
            portion_rows,
        ),
        "nutrient.csv": _text_table(
            "nutrient", ("id", "name", "unit_name"),
            [(str(i), n, u) for i, n, u in GOLDEN_DICTIONARY],
        ),
    }
    for name, table in tables.items():
        _write(out_dir / "usda" / name, emit_csv(table))

    menustat = _text_table("menustat", MENUSTAT_HEADER, GOLDEN_MENUSTAT_ROWS)
    data = emit_csv(menustat).decode("utf-8").replace("\n", "\r\n")
    _write(out_dir / "menustat.csv", data.encode("utf-8"))

    _write(out_dir / "sources_usda.cfg", b"usda_dir = usda\n")
    _write(
        out_dir / "sources_full.cfg",
        b"usda_dir = usda\nmenustat = menustat.csv\n",
    )

    total_facts = sum(len(f["facts"]) for f in GOLDEN_FOODS)
    manifest = {
        "golden": True,
        "foods": [
            {
                "fdc_id": f["fdc_id"],
                "description": f["description"],
                "brand_owner": f["brand_owner"],
                "category": "branded",
            }
            for f in GOLDEN_FOODS
        ],
        "counts": {
            "usda": {
                "foods": len(GOLDEN_FOODS),
                "facts": total_facts,
                "row_layout": total_facts,
                "column_layout": len(GOLDEN_FOODS),
            },
            "full": {
                "foods": len(GOLDEN_FOODS) + len(GOLDEN_MENUSTAT_ROWS),
                "row_layout": total_facts + GOLDEN_MENUSTAT_KCAL_ROWS,
                "column_layout": len(GOLDEN_FOODS) + len(GOLDEN_MENUSTAT_ROWS),
            },
        },
        "menustat": {
            "rows": len(GOLDEN_MENUSTAT_ROWS),
            "kcal_rows": GOLDEN_MENUSTAT_KCAL_ROWS,
        },
    }
    _write(
        out_dir / "manifest.json",
        (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode(),
    )
    return manifest


def directory_digest(root, exclude: tuple[str, ...] = ()) -> str:
    """SHA-256 over sorted (relative path, bytes) pairs under root."""
    root = Path(root)
    digest = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root).as_posix()
        if any(rel.startswith(prefix) for prefix in exclude):
            continue
        digest.update(rel.encode("utf-8"))
        digest.update(b"\0")
        digest.update(path.read_bytes())
        digest.update(b"\0")
    return digest.hexdigest()
