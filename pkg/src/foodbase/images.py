"""Image filename normalization, collision handling, and downscale planning.

The naming rule concatenates the brand (or restaurant) and the food name,
keeps only alphanumeric characters, and appends `.png`. Since the rule maps
distinct (brand, food) pairs onto one stem, colliders get `-2`, `-3`, ...
suffixes; hyphens cannot occur in clean stems, so the suffix is unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .errors import EmptyKey, InvariantViolation
from .export import emit_csv
from .ingest import ColumnSpec, RawTable, TableSchema

DEFAULT_MAX_DIM = 512


def image_key(brand: str, food: str) -> str:
    """Brand then food, non-alphanumerics dropped, `.png` appended.

    Unicode letters and digits count as alphanumeric; case is preserved.
    """
    stem = "".join(ch for ch in brand + food if ch.isalnum())
    if not stem:
        raise EmptyKey(brand, food)
    return stem + ".png"


def resize_plan(
    source_w: int, source_h: int, max_dim: int = DEFAULT_MAX_DIM
) -> tuple[int, int]:
    """Target dimensions: cap the larger side at max_dim, scale the other
    proportionally (round half up, floor 1). Never upscales."""
    if source_w <= 0 or source_h <= 0:
        raise InvariantViolation("source dimensions must be positive")
    if max_dim <= 0:
        raise InvariantViolation("max_dim must be positive")
    larger = max(source_w, source_h)
    if larger <= max_dim:
        return source_w, source_h

    def scaled(dim: int) -> int:
        if dim == larger:
            return max_dim
        return max(1, (2 * dim * max_dim + larger) // (2 * larger))

    return scaled(source_w), scaled(source_h)


@dataclass(frozen=True)
class ImagePlanEntry:
    brand_or_restaurant: str
    food_name: str
    filename: str
    source_w: int
    source_h: int
    target_w: int
    target_h: int


def plan_entry(
    brand: str, food: str, source_w: int, source_h: int,
    max_dim: int = DEFAULT_MAX_DIM,
) -> ImagePlanEntry:
    w, h = resize_plan(source_w, source_h, max_dim)
    return ImagePlanEntry(
        brand_or_restaurant=brand,
        food_name=food,
        filename=image_key(brand, food),
        source_w=source_w,
        source_h=source_h,
        target_w=w,
        target_h=h,
    )


def resolve_collisions(
    entries: list[ImagePlanEntry],
) -> tuple[list[ImagePlanEntry], list[tuple[str, str, str]]]:
    """Unique filenames plus the complete (brand, food) -> filename manifest.

    The first occupant keeps the base name; later colliders get -2, -3, ...
    before the extension, in input order.
    """
    counts: dict[str, int] = {}
    resolved: list[ImagePlanEntry] = []
    manifest: list[tuple[str, str, str]] = []
    for entry in entries:
        n = counts.get(entry.filename, 0) + 1
        counts[entry.filename] = n
        if n == 1:
            final = entry.filename
        else:
            stem, dot, ext = entry.filename.rpartition(".")
            final = f"{stem}-{n}{dot}{ext}"
        resolved.append(replace(entry, filename=final))
        manifest.append((entry.brand_or_restaurant, entry.food_name, final))
    return resolved, manifest


def plan_images(
    listings: list[tuple[str, str, int, int]],
    max_dim: int = DEFAULT_MAX_DIM,
) -> tuple[list[ImagePlanEntry], list[tuple[str, str, str]]]:
    """Full plan for (brand, food, width, height) listings: keys, resize
    targets, and collision-free filenames."""
    entries = [
        plan_entry(brand, food, w, h, max_dim)
        for brand, food, w, h in listings
    ]
    return resolve_collisions(entries)


MANIFEST_SCHEMA = TableSchema(
    "image_manifest",
    (
        ColumnSpec("brand_or_restaurant", "text"),
        ColumnSpec("food_name", "text"),
        ColumnSpec("filename", "text"),
        ColumnSpec("source_w", "integer"),
        ColumnSpec("source_h", "integer"),
        ColumnSpec("target_w", "integer"),
        ColumnSpec("target_h", "integer"),
    ),
)


def manifest_table(entries: list[ImagePlanEntry]) -> RawTable:
    rows = [
        (
            e.brand_or_restaurant,
            e.food_name,
            e.filename,
            e.source_w,
            e.source_h,
            e.target_w,
            e.target_h,
        )
        for e in entries
    ]
    return RawTable(MANIFEST_SCHEMA, rows)


def write_manifest(entries: list[ImagePlanEntry], path) -> Path:
    path = Path(path)
    path.write_bytes(emit_csv(manifest_table(entries)))
    return path


def apply_resize_plan(
    entries: list[ImagePlanEntry],
    sources: list[Path],
    out_dir,
) -> list[Path]:
    """Resize fixture PNGs per plan, writing each under its final filename.

    `sources[i]` is the input image for `entries[i]`.
    """
    from PIL import Image  # fixture images only; keep import local

    if len(entries) != len(sources):
        raise InvariantViolation("one source path per plan entry required")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for entry, src in zip(entries, sources):
        dest = out_dir / entry.filename
        with Image.open(src) as img:
            resized = img.resize((entry.target_w, entry.target_h))
            resized.save(dest, format="PNG")
        written.append(dest)
    return written
