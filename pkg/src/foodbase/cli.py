"""Command-line surface: fixture generation, builds, queries, exports, and
image planning.

Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import build as build_mod
from .errors import BuildStageError, FoodbaseError
from .export import SQL_DIALECTS, write_csv, write_sql
from .fixtures import directory_digest, generate_fixture, generate_golden_fixture
from .images import DEFAULT_MAX_DIM, apply_resize_plan, plan_images, write_manifest
from .ingest import parse_csv_stream
from .layout import NutrientSet
from .model import Category
from .store import (
    NutrientConstraint,
    QueryRequest,
    load_store,
    nutrient_profile,
    search,
    store_tables,
)

USAGE_ERROR = 1
DATA_ERROR = 2
IO_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """argparse's usage failures exit 2 by default; this surface pins 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _constraint(value: str) -> NutrientConstraint:
    parts = value.rsplit(":", 2)
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected NAME:MIN:MAX (empty bound allowed), got {value!r}"
        )
    name, lo, hi = parts
    try:
        return NutrientConstraint(
            name,
            Decimal(lo) if lo else None,
            Decimal(hi) if hi else None,
        )
    except (InvalidOperation, FoodbaseError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> _Parser:
    parser = _Parser(
        prog="foodbase",
        description="Rebuild a queryable food/nutrient database from "
        "CSV dumps, restaurant CSVs, and menu-page fixtures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "gen-fixture", help="write a deterministic fixture directory"
    )
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=1, help="RNG seed")
    p.add_argument("--foods", type=int, default=100,
                   help="number of generated foods")
    p.add_argument("--nutrients", type=int, default=8,
                   help="nutrients per food")
    p.add_argument("--restaurants", type=int, default=5,
                   help="restaurants in the scrape tree")
    p.add_argument("--menustat-rows", type=int, default=60,
                   help="rows in the restaurant CSV")
    p.add_argument("--golden", action="store_true",
                   help="write the hand-transcribed figure fixture instead")
    p.add_argument("--digest", action="store_true",
                   help="print the directory content digest")

    p = sub.add_parser("build", help="run the full pipeline")
    p.add_argument("--sources", required=True,
                   help="flat key=value source config file")
    p.add_argument("--out", required=True, help="build output directory")
    p.add_argument("--layout", choices=("row", "column", "both"),
                   default="both", help="which layouts to materialize")
    p.add_argument("--nutrient-set", default=None,
                   help="comma-separated wide-table nutrient names")
    p.add_argument("--sanitize", action="store_true",
                   help="run source CSVs through the repair pipeline")
    p.add_argument("--sanitize-report", action="store_true",
                   help="print the merged sanitize report as JSON")
    p.add_argument("--lenient", action="store_true",
                   help="route ragged source rows to reject files instead "
                        "of failing the load")
    p.add_argument("--year", type=int, default=None,
                   help="provenance year tag for restaurant items")
    p.add_argument("--no-figures", action="store_true",
                   help="skip report figure rendering")

    p = sub.add_parser("search", help="query the built store")
    p.add_argument("query", help="substring to match in descriptions")
    p.add_argument("--store", required=True, help="build output directory")
    p.add_argument("--category", default=None,
                   choices=[c.value for c in Category])
    p.add_argument("--brand", default=None,
                   help="exact brand owner or restaurant name")
    p.add_argument("--nutrient", action="append", default=[],
                   type=_constraint, metavar="NAME:MIN:MAX",
                   help="nutrient bound; empty MIN or MAX leaves it open")
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("profile", help="nutrient profile of one food")
    p.add_argument("food_id", type=int)
    p.add_argument("--store", required=True, help="build output directory")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("export", help="re-export store tables")
    p.add_argument("--store", required=True, help="build output directory")
    p.add_argument("--format", required=True, choices=("csv", "sql"))
    p.add_argument("--dialect", default="mysql",
                   choices=sorted(SQL_DIALECTS))
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("images", help="image filename planning")
    images_sub = p.add_subparsers(dest="images_command", required=True)
    p = images_sub.add_parser(
        "plan", help="plan filenames and resize targets"
    )
    p.add_argument("--listing", required=True,
                   help="CSV of brand, food, source_file, width, height")
    p.add_argument("--out", required=True, help="manifest CSV to write")
    p.add_argument("--max-dim", type=int, default=DEFAULT_MAX_DIM,
                   help="largest allowed output dimension")
    p.add_argument("--apply", metavar="DEST_DIR", default=None,
                   help="also resize the listed PNGs into DEST_DIR")
    return parser


# --- command bodies -----------------------------------------------------------


def _cmd_gen_fixture(args) -> int:
    if args.golden:
        manifest = generate_golden_fixture(args.out)
    else:
        manifest = generate_fixture(
            args.out,
            seed=args.seed,
            n_foods=args.foods,
            n_nutrients=args.nutrients,
            n_restaurants=args.restaurants,
            menustat_rows=args.menustat_rows,
        )
    counts = manifest["counts"]["usda"]
    print(f"fixture written to {args.out}")
    print(
        f"foods={counts['foods']} facts={counts['facts']} "
        f"manifest={Path(args.out) / 'manifest.json'}"
    )
    if args.digest:
        print(f"digest={directory_digest(args.out)}")
    return 0


def _cmd_build(args) -> int:
    config = build_mod.read_source_config(args.sources)
    if args.year is not None:
        config.year = args.year
    nutrient_set = (
        NutrientSet.parse(args.nutrient_set) if args.nutrient_set else None
    )
    report, store = build_mod.run_build(
        config,
        args.out,
        layout_mode=args.layout,
        nutrient_set=nutrient_set,
        sanitize_usda=args.sanitize,
        lenient=args.lenient,
        figures=not args.no_figures,
    )
    if args.sanitize_report:
        merged = {
            "bytes_replaced": 0,
            "lines_with_trailing_cr": 0,
            "rows_in": 0,
            "rows_out": 0,
        }
        for entry in report.sanitize.values():
            for key in merged:
                merged[key] += entry[key]
        print(json.dumps(merged, sort_keys=True))
    print(f"build complete: {len(store)} foods, "
          f"{store.fact_count()} nutrient facts")
    print(f"layouts: row={report.layout['row_records']} "
          f"column={report.layout['column_records']}")
    print(f"report: {Path(args.out) / 'report' / 'build_report.json'}")
    print(f"wall time: {report.wall_time_s}s")
    return 0


def _cmd_search(args) -> int:
    store = load_store(Path(args.store) / "store")
    request = QueryRequest(
        text_query=args.query,
        category=Category(args.category) if args.category else None,
        brand_or_restaurant=args.brand,
        constraints=tuple(args.nutrient),
        limit=args.limit,
    )
    hits = search(request, store)
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "fdc_id": h.food.fdc_id,
                        "description": h.food.description,
                        "category": h.food.category.value,
                        "brand_owner": h.food.brand_owner,
                        "restaurant": h.food.restaurant,
                        "matched": [
                            [name, str(amount), unit]
                            for name, amount, unit in h.matched
                        ],
                    }
                    for h in hits
                ],
                indent=2,
            )
        )
    else:
        for h in hits:
            who = h.food.brand_owner or h.food.restaurant or ""
            extra = "".join(
                f"  [{name}={amount} {unit}]"
                for name, amount, unit in h.matched
            )
            print(
                f"{h.food.fdc_id}\t{h.food.category.value}\t"
                f"{h.food.description}\t{who}{extra}"
            )
        if not hits:
            print("no matches", file=sys.stderr)
    return 0


def _cmd_profile(args) -> int:
    store = load_store(Path(args.store) / "store")
    rows = nutrient_profile(args.food_id, store)
    if args.json:
        print(
            json.dumps(
                [[name, str(amount), unit] for name, amount, unit in rows],
                indent=2,
            )
        )
    else:
        for name, amount, unit in rows:
            print(f"{name}\t{amount}\t{unit}")
    return 0


def _cmd_export(args) -> int:
    store = load_store(Path(args.store) / "store")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dialect = SQL_DIALECTS[args.dialect]
    for name, table in store_tables(store).items():
        if args.format == "csv":
            path = write_csv(table, out / f"{name}.csv")
        else:
            path = write_sql(table, out / f"{name}.sql", dialect)
        print(f"wrote {path}")
    return 0


def _cmd_images_plan(args) -> int:
    listing_path = Path(args.listing)
    header = None
    listings = []
    sources = []
    with open(listing_path, "rb") as fh:
        for cells in parse_csv_stream(fh):
            if header is None:
                header = {name: i for i, name in enumerate(cells)}
                continue
            listings.append(
                (
                    cells[header["brand"]],
                    cells[header["food"]],
                    int(cells[header["width"]]),
                    int(cells[header["height"]]),
                )
            )
            src = (
                cells[header["source_file"]]
                if "source_file" in header
                else ""
            )
            sources.append(listing_path.parent / src if src else None)
    entries, _ = plan_images(listings, max_dim=args.max_dim)
    write_manifest(entries, args.out)
    print(f"planned {len(entries)} images -> {args.out}")
    if args.apply:
        missing = [e.filename for e, s in zip(entries, sources) if s is None]
        if missing:
            raise FoodbaseError(
                f"cannot apply: listing has no source_file for {missing[0]}"
            )
        written = apply_resize_plan(entries, sources, args.apply)
        print(f"resized {len(written)} images into {args.apply}")
    return 0


_COMMANDS = {
    "gen-fixture": _cmd_gen_fixture,
    "build": _cmd_build,
    "search": _cmd_search,
    "profile": _cmd_profile,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse handles --help (0) and usage errors (1) by exiting
        return int(exc.code or 0)
    if args.command == "images":
        handler = _cmd_images_plan
    else:
        handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except BuildStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_ERROR if isinstance(exc.cause, OSError) else DATA_ERROR
    except FoodbaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
