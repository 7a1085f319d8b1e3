"""End-to-end pipeline: ingest -> sanitize -> joins -> layouts -> export.

Any stage failure is re-raised as BuildStageError annotated with the stage
name; I/O causes keep their identity for exit-code mapping.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

from .errors import BuildStageError, FoodbaseError, InvariantViolation
from .export import write_csv
from .ingest import (
    RawTable,
    infer_schema,
    load_rows,
    parse_csv_stream,
    sample_file,
    write_reject_file,
)
from .layout import (
    DEFAULT_NUTRIENT_SET,
    NutrientSet,
    column_layout_table,
    layout_size_report,
    row_layout_table,
    to_column_layout,
    to_row_layout,
)
from .menustat import (
    RESTAURANT_ID_BASE,
    items_table,
    parse_menustat,
    restaurant_items_to_foods,
)
from .model import (
    Category,
    NutrientDictionary,
    NutrientValue,
    Portion,
    assemble_food_items,
    build_category_table,
    build_index,
    canonical_dictionary,
    join_diagnostics,
    lookup_nutrient_id,
)
from .sanitize import SanitizeReport, sanitized_text
from .scrape import (
    scrape_fixture_tree,
    scraped_foods_to_model,
    scraped_table,
)
from .store import FoodStore, save_store

#: First id for foods folded in from scrape fixtures; clears the
#: restaurant-CSV id range.
SCRAPE_ID_BASE = 20_000_000_000

USDA_REQUIRED_FILES = (
    "branded_food.csv",
    "food.csv",
    "food_nutrient.csv",
    "food_portion.csv",
    "foundation_food.csv",
    "nutrient.csv",
    "sr_legacy_food.csv",
)

#: Columns that must load as decimals even when a sample scans all-integer.
_USDA_OVERRIDES = {
    "food_nutrient.csv": {"amount": "decimal"},
    "food_portion.csv": {
        "amount": "decimal",
        "serving_size": "decimal",
        "gram_weight": "decimal",
    },
}


@dataclass
class SourceConfig:
    base_dir: Path = Path(".")
    usda_dir: Path | None = None
    menustat: Path | None = None
    scrape_dir: Path | None = None
    experimental: Path | None = None
    year: int | None = None
    nutrient_set: str | None = None


_CONFIG_KEYS = ("usda_dir", "menustat", "scrape_dir", "experimental",
                "year", "nutrient_set")


def read_source_config(path) -> SourceConfig:
    """Flat key=value source map; paths resolve relative to the file."""
    path = Path(path)
    config = SourceConfig(base_dir=path.parent)
    for raw_line in path.read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvariantViolation(f"bad config line: {raw_line!r}")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise InvariantViolation(f"unknown source key: {key!r}")
        if key == "year":
            config.year = int(value)
        elif key == "nutrient_set":
            config.nutrient_set = value
        else:
            setattr(config, key, path.parent / value)
    return config


@dataclass
class BuildReport:
    sources: dict = field(default_factory=dict)
    table_rows: dict = field(default_factory=dict)
    indexes: list = field(default_factory=list)
    join_diagnostics: dict = field(default_factory=dict)
    sanitize: dict = field(default_factory=dict)
    dropped: dict = field(default_factory=dict)
    layout: dict = field(default_factory=dict)
    store_counts: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "sources": self.sources,
                "table_rows": self.table_rows,
                "indexes": self.indexes,
                "join_diagnostics": self.join_diagnostics,
                "sanitize": self.sanitize,
                "dropped": self.dropped,
                "layout": self.layout,
                "store_counts": self.store_counts,
                "wall_time_s": self.wall_time_s,
            },
            indent=2,
            sort_keys=True,
        )


class _Stage:
    """Context manager annotating failures with the running stage's name."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None or isinstance(exc, BuildStageError):
            return False
        if isinstance(exc, (FoodbaseError, OSError)):
            raise BuildStageError(self.name, exc) from exc
        return False


def _dec(cell) -> Decimal | None:
    if cell is None or cell == "":
        return None
    if isinstance(cell, Decimal):
        return cell
    return Decimal(cell)


def _load_usda_file(
    path: Path,
    *,
    sanitize: bool,
    overrides: dict | None,
    lenient: bool = False,
    reject_path: Path | None = None,
) -> tuple[RawTable, SanitizeReport | None]:
    name = path.name
    rejects: list[tuple[int, str, str]] = []
    if sanitize:
        text, report = sanitized_text(path.read_bytes())
        rows = parse_csv_stream(text)
        header = next(rows, None)
        if header is None:
            raise InvariantViolation(f"{name}: no header row")
        sample = []
        for cells in rows:
            if len(cells) == len(header):
                sample.append(cells)
            if len(sample) >= 200:
                break
        schema = infer_schema(
            sample or [header], header, overrides, table_name=path.stem
        )
        table = load_rows(
            text, schema, source_path=str(path), lenient=lenient,
            rejects=rejects,
        )
    else:
        header, sample = sample_file(path)
        schema = infer_schema(
            sample or [header], header, overrides, table_name=path.stem
        )
        with open(path, "rb") as fh:
            table = load_rows(
                fh, schema, source_path=str(path), lenient=lenient,
                rejects=rejects,
            )
        report = None
    if lenient and rejects and reject_path is not None:
        write_reject_file(rejects, reject_path)
    return table, report


def run_build(
    config: SourceConfig,
    out_dir,
    *,
    layout_mode: str = "both",
    nutrient_set: NutrientSet | None = None,
    sanitize_usda: bool = False,
    lenient: bool = False,
    menustat_id_base: int = RESTAURANT_ID_BASE,
    scrape_id_base: int = SCRAPE_ID_BASE,
    figures: bool = True,
) -> tuple[BuildReport, FoodStore]:
    """Run the full pipeline, write exports under out_dir, return the report
    and the built store.

    Layout of out_dir: tables/ (CSV exports), store/ (the queryable store),
    report/ (build_report.json, report.csv, figures/).
    """
    if layout_mode not in ("row", "column", "both"):
        raise InvariantViolation(f"bad layout mode: {layout_mode!r}")
    started = time.monotonic()
    out_dir = Path(out_dir)
    tables_dir = out_dir / "tables"
    tables_dir.mkdir(parents=True, exist_ok=True)
    report = BuildReport()
    report.sources = {
        "usda_dir": str(config.usda_dir) if config.usda_dir else None,
        "menustat": str(config.menustat) if config.menustat else None,
        "scrape_dir": str(config.scrape_dir) if config.scrape_dir else None,
        "experimental": (
            str(config.experimental) if config.experimental else None
        ),
        "year": config.year,
    }
    if nutrient_set is None:
        if config.nutrient_set:
            nutrient_set = NutrientSet.parse(config.nutrient_set)
        else:
            nutrient_set = DEFAULT_NUTRIENT_SET

    dictionary = None
    store: FoodStore | None = None
    usda_tables: dict[str, RawTable] = {}

    reject_dir = out_dir / "report" / "rejects"
    if config.usda_dir is not None:
        with _Stage("ingest-usda"):
            if lenient:
                reject_dir.mkdir(parents=True, exist_ok=True)
            for name in USDA_REQUIRED_FILES:
                path = config.usda_dir / name
                if not path.exists():
                    raise FileNotFoundError(
                        f"required source file missing: {path}"
                    )
                table, san = _load_usda_file(
                    path,
                    sanitize=sanitize_usda,
                    overrides=_USDA_OVERRIDES.get(name),
                    lenient=lenient,
                    reject_path=reject_dir / f"{path.stem}.rejects.csv",
                )
                usda_tables[name] = table
                report.table_rows[f"usda/{name}"] = table.loaded_row_count
                if san is not None:
                    report.sanitize[name] = json.loads(san.to_json())
            experimental = None
            if config.experimental is not None:
                experimental, _ = _load_usda_file(
                    config.experimental, sanitize=sanitize_usda,
                    overrides=None, lenient=lenient,
                    reject_path=reject_dir / "experimental.rejects.csv",
                )
                report.table_rows["usda/experimental"] = (
                    experimental.loaded_row_count
                )

        with _Stage("dictionary"):
            dictionary = NutrientDictionary.from_table(
                usda_tables["nutrient.csv"]
            )

        with _Stage("index"):
            food = usda_tables["food.csv"]
            nutrients = usda_tables["food_nutrient.csv"]
            portions = usda_tables["food_portion.csv"]
            food_index = build_index(food, "fdc_id")
            nutrient_index = build_index(nutrients, "fdc_id")
            portion_index = build_index(portions, "fdc_id")
            build_index(nutrients, "nutrient_id")
            report.indexes = [
                "food.fdc_id",
                "food_nutrient.fdc_id",
                "food_nutrient.nutrient_id",
                "food_portion.fdc_id",
            ]

        with _Stage("category-join"):
            energy_id = lookup_nutrient_id("Energy", dictionary)
            category_files = {
                Category.BRANDED: usda_tables["branded_food.csv"],
                Category.FOUNDATION: usda_tables["foundation_food.csv"],
                Category.SR_LEGACY: usda_tables["sr_legacy_food.csv"],
                Category.EXPERIMENTAL: experimental,
            }
            joined = {}
            for category, category_file in category_files.items():
                joined[category] = build_category_table(
                    category,
                    food,
                    category_file,
                    nutrients,
                    portions,
                    energy_id,
                    nutrient_index=nutrient_index,
                    portion_index=portion_index,
                    food_index=food_index,
                    dictionary=dictionary,
                )
                report.table_rows[f"joined/{category.value}_food"] = len(
                    joined[category].rows
                )
                report.join_diagnostics[category.value] = join_diagnostics(
                    food,
                    category_file,
                    nutrients,
                    portions,
                    energy_id,
                    nutrient_index=nutrient_index,
                    portion_index=portion_index,
                    food_index=food_index,
                )
                write_csv(
                    joined[category],
                    tables_dir / f"{category.value}_food.csv",
                )

        with _Stage("assemble"):
            foods = assemble_food_items(joined)
            values: dict[int, list[NutrientValue]] = {}
            portion_map: dict[int, list[Portion]] = {}
            unknown_nutrient_facts = 0
            null_amount_facts = 0
            i_nid = nutrients.schema.index_of("nutrient_id")
            i_amount = nutrients.schema.index_of("amount")
            p_schema = portions.schema
            i_p_amount = p_schema.index_of("amount")
            i_p_size = (
                p_schema.index_of("serving_size")
                if p_schema.has_column("serving_size")
                else None
            )
            i_p_unit = (
                p_schema.index_of("serving_size_unit")
                if p_schema.has_column("serving_size_unit")
                else None
            )
            i_p_gram = p_schema.index_of("gram_weight")
            for item in foods:
                fid = item.fdc_id
                for row in nutrient_index.rows(fid):
                    nid = int(row[i_nid])
                    amount = _dec(row[i_amount])
                    if nid not in dictionary:
                        unknown_nutrient_facts += 1
                        continue
                    if amount is None:
                        null_amount_facts += 1
                        continue
                    values.setdefault(fid, []).append(
                        NutrientValue(
                            fid, nid, amount, dictionary.by_id(nid).unit
                        )
                    )
                for row in portion_index.rows(fid):
                    size = (
                        _dec(row[i_p_size]) if i_p_size is not None else None
                    )
                    gram = _dec(row[i_p_gram])
                    if size is None and gram is None:
                        continue
                    unit = row[i_p_unit] if i_p_unit is not None else None
                    portion_map.setdefault(fid, []).append(
                        Portion(
                            food_id=fid,
                            servings=_dec(row[i_p_amount]),
                            serving_size=size,
                            serving_size_unit=str(unit) if unit else None,
                            gram_weight=gram,
                        )
                    )
            report.dropped["facts_unknown_nutrient"] = unknown_nutrient_facts
            report.dropped["facts_null_amount"] = null_amount_facts
            store = FoodStore(dictionary, [], {}, {})
            store.add(foods, values, portion_map)

    if store is None:
        dictionary = canonical_dictionary()
        store = FoodStore(dictionary, [], {}, {})

    if config.menustat is not None:
        with _Stage("menustat"):
            result = parse_menustat(config.menustat, year=config.year)
            report.sanitize["menustat"] = json.loads(result.report.to_json())
            report.table_rows["menustat/items"] = len(result.items)
            write_csv(
                items_table(result.items),
                tables_dir / "restaurant_items.csv",
            )
            m_foods, m_values, m_portions = restaurant_items_to_foods(
                result.items,
                menustat_id_base,
                existing_max_id=store.max_food_id() or None,
            )
            store.add(m_foods, m_values, m_portions)

    if config.scrape_dir is not None:
        with _Stage("scrape"):
            scraped = scrape_fixture_tree(config.scrape_dir)
            report.table_rows["scrape/foods"] = len(scraped)
            write_csv(
                scraped_table(scraped), tables_dir / "scraped_foods.csv"
            )
            s_foods, s_values, skipped = scraped_foods_to_model(
                scraped, store.dictionary, scrape_id_base
            )
            report.dropped["scrape_facts_unknown_nutrient"] = skipped
            store.add(s_foods, s_values, {})

    with _Stage("layout"):
        row_records = to_row_layout(store)
        column_records, dropped_facts = to_column_layout(store, nutrient_set)
        if layout_mode in ("row", "both"):
            write_csv(
                row_layout_table(row_records), tables_dir / "row_layout.csv"
            )
            report.table_rows["layout/row"] = len(row_records)
        if layout_mode in ("column", "both"):
            write_csv(
                column_layout_table(column_records, nutrient_set),
                tables_dir / "column_layout.csv",
            )
            report.table_rows["layout/column"] = len(column_records)
            report.dropped["layout_facts_outside_set"] = dropped_facts
        row_bytes, column_bytes = layout_size_report(
            row_records, column_records, nutrient_set
        )
        report.layout = {
            "mode": layout_mode,
            "nutrient_set": list(nutrient_set.names),
            "row_records": len(row_records),
            "column_records": len(column_records),
            "row_bytes": row_bytes,
            "column_bytes": column_bytes,
        }

    with _Stage("persist-store"):
        save_store(store, out_dir / "store")
        report.store_counts = {
            "foods": len(store),
            "facts": store.fact_count(),
            "portions": sum(len(v) for v in store.portions.values()),
        }

    report.wall_time_s = round(time.monotonic() - started, 3)

    with _Stage("report"):
        from .report import write_report

        write_report(report, out_dir / "report", figures=figures)

    return report, store
