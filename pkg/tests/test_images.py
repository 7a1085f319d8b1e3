"""Filename rule, collision suffixing, and downscale planning."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foodbase.errors import EmptyKey
from foodbase.images import (
    DEFAULT_MAX_DIM,
    apply_resize_plan,
    image_key,
    manifest_table,
    plan_entry,
    plan_images,
    resize_plan,
    resolve_collisions,
)


class TestImageKey:
    def test_taco_bell_example(self):
        assert image_key("Taco Bell", "Border Sauce, Mild") == (
            "TacoBellBorderSauceMild.png"
        )

    def test_dunkin_example(self):
        assert image_key("Dunkin' Donuts", "Hot Coffee") == (
            "DunkinDonutsHotCoffee.png"
        )

    def test_empty_key(self):
        with pytest.raises(EmptyKey):
            image_key("---", "***")

    def test_unicode_alphanumerics_survive(self):
        assert image_key("Café", "Crème 1") == "CaféCrème1.png"

    def test_case_is_preserved(self):
        assert image_key("WESSON", "Oil") == "WESSONOil.png"

    alnum = st.text(
        alphabet=st.characters(
            whitelist_categories=("Lu", "Ll", "Nd"), max_codepoint=0x2FF
        ),
        min_size=1,
        max_size=30,
    )

    @given(stem=alnum, data=st.data())
    @settings(max_examples=150, deadline=None)
    def test_idempotent_on_clean_stems(self, stem, data):
        split = data.draw(st.integers(0, len(stem)))
        assert image_key(stem[:split], stem[split:]) == stem + ".png"


class TestResolveCollisions:
    def test_rule_forced_collision_gets_suffix(self):
        entries, manifest = plan_images(
            [("A B", "C", 10, 10), ("A", "BC", 10, 10)]
        )
        assert [e.filename for e in entries] == ["ABC.png", "ABC-2.png"]
        assert manifest == [
            ("A B", "C", "ABC.png"),
            ("A", "BC", "ABC-2.png"),
        ]

    def test_no_collision_is_identity(self):
        listings = [("X", "One", 5, 5), ("Y", "Two", 5, 5)]
        entries, _ = plan_images(listings)
        assert [e.filename for e in entries] == ["XOne.png", "YTwo.png"]

    def test_thousand_random_names_are_unique(self):
        rng = random.Random(13)
        words = ["Taco", "Bell", "Grill", "Hot", "Dog", "Big", "Bite",
                 "Sub", "Way", "Pan", "Cake"]
        listings = [
            (
                " ".join(rng.choices(words, k=2)),
                " ".join(rng.choices(words, k=3)),
                rng.randint(10, 2000),
                rng.randint(10, 2000),
            )
            for _ in range(1000)
        ]
        entries, manifest = plan_images(listings)
        filenames = [e.filename for e in entries]
        assert len(set(filenames)) == 1000
        assert len(manifest) == 1000
        for (brand, food, _, _), (m_brand, m_food, m_file) in zip(
            listings, manifest
        ):
            assert (brand, food) == (m_brand, m_food)
            assert m_file.endswith(".png")

    def test_third_collider_gets_dash_three(self):
        entries, _ = resolve_collisions(
            [
                plan_entry("A", "B", 4, 4),
                plan_entry("AB", "", 4, 4),
                plan_entry("", "AB", 4, 4),
            ]
        )
        assert [e.filename for e in entries] == [
            "AB.png", "AB-2.png", "AB-3.png"
        ]


def oracle_resize(w: int, h: int, max_dim: int) -> tuple[int, int]:
    """Independent rational-arithmetic scaling with round-half-up."""
    if max(w, h) <= max_dim:
        return w, h
    scale = Fraction(max_dim, max(w, h))
    def half_up(x: Fraction) -> int:
        from math import floor
        return max(1, floor(x + Fraction(1, 2)))
    if w >= h:
        return max_dim, half_up(h * scale)
    return half_up(w * scale), max_dim


class TestResizePlan:
    def test_exact_double_scale(self):
        assert resize_plan(800, 600, 400) == (400, 300)

    def test_never_upscales(self):
        assert resize_plan(100, 100, 400) == (100, 100)

    def test_rounding_oracle_fixed_case(self):
        assert resize_plan(1237, 841, 512) == oracle_resize(1237, 841, 512)
        assert resize_plan(1237, 841, 512) == (512, 348)

    def test_rounding_oracle_randomized(self):
        rng = random.Random(17)
        for _ in range(500):
            w = rng.randint(1, 4000)
            h = rng.randint(1, 4000)
            m = rng.randint(1, 1200)
            assert resize_plan(w, h, m) == oracle_resize(w, h, m), (w, h, m)

    def test_no_zero_dimension_and_no_growth(self):
        rng = random.Random(19)
        for _ in range(500):
            w = rng.randint(1, 5000)
            h = rng.randint(1, 5000)
            m = rng.randint(1, 600)
            tw, th = resize_plan(w, h, m)
            assert tw >= 1 and th >= 1
            assert tw <= w and th <= h
            assert max(tw, th) <= max(m, max(w, h) if max(w, h) <= m else m)

    def test_aspect_preserved_within_one_pixel(self):
        # the scaled (non-dominant) dimension sits within one pixel of the
        # exact proportional value
        rng = random.Random(23)
        for _ in range(200):
            w = rng.randint(8, 4000)
            h = rng.randint(8, 4000)
            tw, th = resize_plan(w, h, 512)
            if max(w, h) <= 512:
                assert (tw, th) == (w, h)
            elif w >= h:
                assert tw == 512
                assert abs(Fraction(th) - Fraction(h * 512, w)) <= 1
            else:
                assert th == 512
                assert abs(Fraction(tw) - Fraction(w * 512, h)) <= 1


class TestApplyAndManifest:
    def test_apply_resizes_fixture_pngs(self, tmp_path):
        from PIL import Image

        src = tmp_path / "src.png"
        Image.new("RGB", (800, 600), (10, 20, 30)).save(src)
        entries, _ = plan_images([("Brand", "Food", 800, 600)], max_dim=400)
        written = apply_resize_plan(entries, [src], tmp_path / "out")
        assert written[0].name == "BrandFood.png"
        with Image.open(written[0]) as img:
            assert img.size == (400, 300)

    def test_manifest_table_columns(self):
        entries, _ = plan_images([("B", "F", 1237, 841)])
        table = manifest_table(entries)
        assert table.schema.column_names == (
            "brand_or_restaurant", "food_name", "filename",
            "source_w", "source_h", "target_w", "target_h",
        )
        assert table.rows[0][2] == "BF.png"
        assert table.rows[0][5:] == (512, 348)
        assert DEFAULT_MAX_DIM == 512
