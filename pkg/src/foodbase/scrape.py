"""Offline menu-site scraping: fixture-page parsers and a rate-limited
fetch planner.

Parsers target the documented fixture dialect (see README): an index page
listing restaurants alphabetically, a menu page per restaurant grouping food
links by category, and a detail page per food carrying the nutrition table.
Everything runs against on-disk HTML; the fetcher seam exists so a live
implementation could be plugged in, but tests stay hermetic.
"""

from __future__ import annotations

import logging
import posixpath
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from html.parser import HTMLParser
from pathlib import Path
from typing import Callable, Iterable

from .errors import InvariantViolation, MalformedAmount, StructureNotFound
from .ingest import Cell, ColumnSpec, RawTable, TableSchema
from .model import (
    Category,
    FoodItem,
    NutrientDictionary,
    NutrientValue,
)

log = logging.getLogger(__name__)

#: Nutrient fields a food detail page may carry.
NUTRIENT_FIELDS = (
    "fat",
    "cholesterol",
    "sodium",
    "carbohydrate",
    "protein",
    "saturated_fat",
    "trans_fat",
    "fiber",
    "sugar",
    "energy",
)

#: Detail-page field -> standard nutrient dictionary id.
FIELD_NUTRIENT_IDS = {
    "energy": 1008,
    "protein": 1003,
    "fat": 1004,
    "carbohydrate": 1005,
    "fiber": 1079,
    "sugar": 2000,
    "sodium": 1093,
    "cholesterol": 1253,
    "saturated_fat": 1258,
    "trans_fat": 1257,
}


# --- minimal element tree ----------------------------------------------------


class _Node:
    __slots__ = ("tag", "attrs", "children", "text_parts")

    def __init__(self, tag: str, attrs: dict[str, str]):
        self.tag = tag
        self.attrs = attrs
        self.children: list[_Node] = []
        self.text_parts: list[str] = []

    def text(self) -> str:
        parts = list(self.text_parts)
        for child in self.children:
            parts.append(child.text())
        return "".join(parts).strip()

    def has_class(self, name: str) -> bool:
        return name in self.attrs.get("class", "").split()

    def find_all(self, tag: str | None = None, class_: str | None = None):
        found: list[_Node] = []
        for child in self.children:
            if (tag is None or child.tag == tag) and (
                class_ is None or child.has_class(class_)
            ):
                found.append(child)
            found.extend(child.find_all(tag, class_))
        return found

    def find(self, tag: str | None = None, class_: str | None = None):
        for node in self.find_all(tag, class_):
            return node
        return None


_VOID_TAGS = {"br", "hr", "img", "input", "meta", "link"}


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = _Node("", {})
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        node = _Node(tag, {k: (v or "") for k, v in attrs})
        self.stack[-1].children.append(node)
        if tag not in _VOID_TAGS:
            self.stack.append(node)

    def handle_endtag(self, tag):
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                break

    def handle_data(self, data):
        self.stack[-1].text_parts.append(data)


def parse_html(html: str) -> _Node:
    builder = _TreeBuilder()
    builder.feed(html)
    builder.close()
    return builder.root


def _links(container: _Node) -> list[tuple[str, str]]:
    return [
        (a.text(), a.attrs.get("href", ""))
        for a in container.find_all("a")
    ]


# --- page parsers -------------------------------------------------------------


def parse_restaurant_index(html: str) -> list[tuple[str, str]]:
    """(name, link) per restaurant, in document order.

    The index is expected alphabetical; a deviation is only warned about,
    since it means the source reorganized rather than broke.
    """
    root = parse_html(html)
    listing = root.find(class_="restaurant-index")
    if listing is None:
        raise StructureNotFound("restaurant index container not found")
    entries = _links(listing)
    names = [name.lower() for name, _ in entries]
    if names != sorted(names):
        log.warning("restaurant index is not alphabetically ordered")
    return entries


def parse_menu_page(html: str) -> list[tuple[str, str]]:
    """(category, food_link) per food item, in document order."""
    root = parse_html(html)
    menu = root.find(class_="menu")
    if menu is None:
        raise StructureNotFound("menu container not found")
    out: list[tuple[str, str]] = []
    for section in menu.find_all(class_="food-category"):
        heading = section.find("h2")
        category = heading.text() if heading is not None else ""
        for _, href in _links(section):
            out.append((category, href))
    return out


@dataclass(frozen=True)
class ScrapedFood:
    restaurant: str
    food_name: str
    nutrients: tuple[tuple[str, tuple[Decimal, str]], ...]

    def __post_init__(self):
        if not self.restaurant or not self.food_name:
            raise InvariantViolation(
                "scraped food needs a restaurant and a food name"
            )

    def nutrient_map(self) -> dict[str, tuple[Decimal, str]]:
        return dict(self.nutrients)


def parse_food_page(html: str) -> ScrapedFood:
    """Extract every nutrient present on a detail page.

    Absent nutrients stay absent (never zero); `N/A` and empty amounts count
    as absent. Unparseable amounts raise MalformedAmount.
    """
    root = parse_html(html)
    detail = root.find(class_="food-detail")
    if detail is None:
        raise StructureNotFound("food detail container not found")
    name_node = detail.find(class_="food-name")
    restaurant_node = detail.find(class_="restaurant-name")
    table = detail.find(class_="nutrition-facts")
    if name_node is None or restaurant_node is None or table is None:
        raise StructureNotFound("food detail page is missing required parts")
    nutrients: list[tuple[str, tuple[Decimal, str]]] = []
    for row in table.find_all("tr"):
        cells = row.find_all("td")
        if len(cells) < 3:
            continue
        label = cells[0].text().strip().lower().replace(" ", "_")
        if label not in NUTRIENT_FIELDS:
            continue
        amount_text = cells[1].text().strip()
        if amount_text in ("", "N/A", "n/a"):
            continue
        try:
            amount = Decimal(amount_text)
        except InvalidOperation:
            raise MalformedAmount(label, amount_text) from None
        if amount < 0:
            raise MalformedAmount(label, amount_text)
        unit = cells[2].text().strip().upper()
        nutrients.append((label, (amount, unit)))
    return ScrapedFood(
        restaurant=restaurant_node.text(),
        food_name=name_node.text(),
        nutrients=tuple(nutrients),
    )


# --- walking a fixture tree ----------------------------------------------------


def file_fetcher(root_dir) -> Callable[[str], str]:
    """The default fetcher: resolve relative urls against an on-disk tree."""
    root = Path(root_dir)

    def fetch(rel_url: str) -> str:
        return (root / rel_url).read_text(encoding="utf-8")

    return fetch


def scrape_tree(fetch: Callable[[str], str]) -> list[ScrapedFood]:
    """Walk index -> menus -> food pages through any fetcher.

    Links are resolved relative to the page that carried them, so the same
    walk works over files or a live transport.
    """
    foods: list[ScrapedFood] = []
    for _, menu_link in parse_restaurant_index(fetch("index.html")):
        base = posixpath.dirname(menu_link)
        for _, food_link in parse_menu_page(fetch(menu_link)):
            foods.append(parse_food_page(fetch(posixpath.join(base, food_link))))
    return foods


def scrape_fixture_tree(root_dir) -> list[ScrapedFood]:
    """Walk an on-disk fixture tree (the hermetic default)."""
    return scrape_tree(file_fetcher(root_dir))


SCRAPED_SCHEMA = TableSchema(
    "scraped_foods",
    (ColumnSpec("restaurant", "text"), ColumnSpec("food_name", "text"))
    + tuple(
        ColumnSpec(f"{fld}_{suffix}", t)
        for fld in NUTRIENT_FIELDS
        for suffix, t in (("amount", "decimal"), ("unit", "unit_code"))
    ),
)


def scraped_table(foods: list[ScrapedFood]) -> RawTable:
    """ScrapedFoods as a flat table with the detail-page field list."""
    rows: list[tuple[Cell, ...]] = []
    for food in foods:
        by_field = food.nutrient_map()
        cells: list[Cell] = [food.restaurant, food.food_name]
        for fld in NUTRIENT_FIELDS:
            entry = by_field.get(fld)
            if entry is None:
                cells += [None, None]
            else:
                cells += [entry[0], entry[1]]
        rows.append(tuple(cells))
    return RawTable(SCRAPED_SCHEMA, rows)


def scraped_foods_to_model(
    foods: list[ScrapedFood],
    dictionary: NutrientDictionary,
    id_base: int,
) -> tuple[list[FoodItem], dict[int, list[NutrientValue]], int]:
    """Fold scraped foods into the model.

    Facts whose nutrient is missing from the dictionary, or whose page unit
    contradicts the dictionary unit, are skipped and counted rather than
    stored wrong.
    """
    items: list[FoodItem] = []
    values: dict[int, list[NutrientValue]] = {}
    skipped = 0
    for offset, food in enumerate(foods):
        fid = id_base + offset
        items.append(
            FoodItem(
                fdc_id=fid,
                description=food.food_name,
                category=Category.RESTAURANT,
                restaurant=food.restaurant,
            )
        )
        for fld, (amount, unit) in food.nutrients:
            nid = FIELD_NUTRIENT_IDS.get(fld)
            if nid is None or nid not in dictionary:
                skipped += 1
                continue
            if unit != dictionary.by_id(nid).unit:
                skipped += 1
                continue
            values.setdefault(fid, []).append(
                NutrientValue(fid, nid, amount, unit)
            )
    return items, values, skipped


# --- fetch planning -------------------------------------------------------------


@dataclass(frozen=True)
class FetchTask:
    url: str
    worker: int
    dispatch_offset: float

    def __post_init__(self):
        if self.dispatch_offset < 0:
            raise InvariantViolation("dispatch_offset must be >= 0")


def schedule_fetches(
    urls: list[str], workers: int = 1, min_delay: float = 1.0
) -> list[FetchTask]:
    """Round-robin urls across workers with per-worker spacing >= min_delay.

    Deterministic given its inputs; every url appears in exactly one task.
    """
    if workers < 1:
        raise InvariantViolation("workers must be >= 1")
    if min_delay < 0:
        raise InvariantViolation("min_delay must be >= 0")
    tasks: list[FetchTask] = []
    for i, url in enumerate(urls):
        worker = i % workers
        slot = i // workers
        tasks.append(FetchTask(url, worker, slot * min_delay))
    return tasks


class VirtualClock:
    """Deterministic clock for driving the executor single-threaded."""

    def __init__(self):
        self._now = 0.0

    def now(self) -> float:
        return self._now

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            self._now += seconds


def run_plan(
    tasks: Iterable[FetchTask],
    fetch: Callable[[str], object] | None = None,
    clock: VirtualClock | None = None,
) -> list[tuple[float, FetchTask]]:
    """Dispatch a plan in offset order, honoring each task's offset on the
    given clock. Returns (dispatch_time, task) per fetch."""
    if clock is None:
        clock = VirtualClock()
    log_entries: list[tuple[float, FetchTask]] = []
    ordered = sorted(tasks, key=lambda t: (t.dispatch_offset, t.worker))
    for task in ordered:
        wait = task.dispatch_offset - clock.now()
        if wait > 0:
            clock.sleep(wait)
        log_entries.append((clock.now(), task))
        if fetch is not None:
            fetch(task.url)
    return log_entries
