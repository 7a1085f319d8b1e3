"""Search, nutrient profiles, and store persistence."""

from __future__ import annotations

from decimal import Decimal

import pytest

from foodbase.errors import (
    InvariantViolation,
    UnknownFood,
    UnknownNutrient,
)
from foodbase.fixtures import GOLDEN_SWANSON_ID, GOLDEN_WESSON_ID
from foodbase.model import Category
from foodbase.store import (
    NutrientConstraint,
    QueryRequest,
    load_store,
    nutrient_profile,
    search,
)


class TestQueryRequest:
    def test_empty_query_rejected(self):
        with pytest.raises(InvariantViolation):
            QueryRequest(text_query="")

    def test_zero_limit_rejected(self):
        with pytest.raises(InvariantViolation):
            QueryRequest(text_query="x", limit=0)

    def test_min_above_max_rejected(self):
        with pytest.raises(InvariantViolation):
            NutrientConstraint("energy", Decimal(10), Decimal(5))


class TestSearch:
    def test_broth_matches_swanson_not_wesson(self, golden_build):
        _, store, _ = golden_build
        hits = search(QueryRequest(text_query="broth"), store)
        descriptions = [h.food.description for h in hits]
        assert "SWANSON BROTH BEEF" in descriptions
        assert all("WESSON" not in d for d in descriptions)

    def test_no_match_is_empty(self, golden_build):
        _, store, _ = golden_build
        assert search(QueryRequest(text_query="zzzz"), store) == []

    def test_energy_constraint_keeps_swanson_drops_wesson(self, golden_build):
        _, store, _ = golden_build
        request = QueryRequest(
            text_query="e",
            category=Category.BRANDED,
            constraints=(
                NutrientConstraint("energy", None, Decimal(100)),
            ),
            limit=50,
        )
        hits = search(request, store)
        ids = {h.food.fdc_id for h in hits}
        assert GOLDEN_SWANSON_ID in ids
        assert GOLDEN_WESSON_ID not in ids
        swanson = next(h for h in hits if h.food.fdc_id == GOLDEN_SWANSON_ID)
        assert swanson.matched == (("energy", Decimal("9.6"), "KCAL"),)

    def test_unknown_nutrient_constraint(self, golden_build):
        _, store, _ = golden_build
        request = QueryRequest(
            text_query="broth",
            constraints=(NutrientConstraint("unobtainium", None, None),),
        )
        with pytest.raises(UnknownNutrient):
            search(request, store)

    def test_limit_truncates(self, small_build):
        _, store, _, _ = small_build
        few = search(QueryRequest(text_query="a", limit=3), store)
        more = search(QueryRequest(text_query="a", limit=1000), store)
        assert len(few) == 3
        assert few == more[:3]

    def test_order_is_match_position_then_description_then_id(
        self, small_build
    ):
        _, store, _, _ = small_build
        hits = search(QueryRequest(text_query="o", limit=1000), store)
        keys = [
            (
                h.food.description.lower().find("o"),
                h.food.description,
                h.food.fdc_id,
            )
            for h in hits
        ]
        assert keys == sorted(keys)

    def test_results_match_independent_full_scan(self, small_build):
        _, store, _, _ = small_build
        needle = "e"
        cap = Decimal(500)
        request = QueryRequest(
            text_query=needle,
            constraints=(NutrientConstraint("Energy", None, cap),),
            limit=10_000,
        )
        hits = {h.food.fdc_id for h in search(request, store)}
        expected = set()
        for food in store.foods:
            if needle not in food.description.lower():
                continue
            energy = [
                v for v in store.facts(food.fdc_id) if v.nutrient_id == 1008
            ]
            if energy and energy[0].amount <= cap:
                expected.add(food.fdc_id)
        assert hits == expected

    def test_category_and_brand_filters(self, golden_build):
        _, store, _ = golden_build
        request = QueryRequest(
            text_query="o",
            category=Category.RESTAURANT,
            brand_or_restaurant="Taco Bell",
            limit=100,
        )
        hits = search(request, store)
        assert hits
        assert all(h.food.restaurant == "Taco Bell" for h in hits)


class TestNutrientProfile:
    def test_wesson_profile(self, golden_build):
        _, store, _ = golden_build
        rows = nutrient_profile(GOLDEN_WESSON_ID, store)
        assert ("energy", Decimal("130.05"), "KCAL") in rows
        assert ("total lipid (fat)", Decimal("14"), "G") in rows
        names = [name for name, _, _ in rows]
        assert names == sorted(names)

    def test_food_with_no_facts_is_empty(self, golden_build):
        _, store, _ = golden_build
        # menustat rows without an energy value become fact-less foods
        empty = [
            f.fdc_id
            for f in store.foods
            if f.category is Category.RESTAURANT
            and not store.facts(f.fdc_id)
        ]
        assert empty
        assert nutrient_profile(empty[0], store) == []

    def test_unknown_food(self, golden_build):
        _, store, _ = golden_build
        with pytest.raises(UnknownFood):
            nutrient_profile(424242, store)


class TestStorePersistence:
    def test_save_load_round_trip(self, small_build):
        _, store, out, _ = small_build
        loaded = load_store(out / "store")
        assert loaded.foods == store.foods
        assert loaded.nutrient_values == store.nutrient_values
        assert loaded.portions == store.portions
        assert sorted(
            d.nutrient_id for d in loaded.dictionary
        ) == sorted(d.nutrient_id for d in store.dictionary)

    def test_search_agrees_after_reload(self, small_build):
        _, store, out, _ = small_build
        loaded = load_store(out / "store")
        request = QueryRequest(text_query="a", limit=50)
        assert [h.food for h in search(request, loaded)] == [
            h.food for h in search(request, store)
        ]
