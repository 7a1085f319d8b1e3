"""Fixture generator determinism and manifest consistency."""

from __future__ import annotations

import json

import pytest

from foodbase.fixtures import (
    USDA_FILE_NAMES,
    directory_digest,
    generate_fixture,
    generate_golden_fixture,
)
from foodbase.ingest import parse_csv_stream


def data_rows(path):
    with open(path, "rb") as fh:
        return sum(1 for _ in parse_csv_stream(fh)) - 1


class TestGenerateFixture:
    def test_counts_by_construction(self, tmp_path):
        generate_fixture(
            tmp_path, seed=1, n_foods=10, n_nutrients=3,
            with_scrape=False, with_menustat=False, with_images=False,
        )
        assert data_rows(tmp_path / "usda" / "food.csv") == 10
        assert data_rows(tmp_path / "usda" / "food_nutrient.csv") == 30
        assert data_rows(tmp_path / "usda" / "food_portion.csv") == 10

    def test_same_seed_is_byte_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        generate_fixture(a, seed=5, n_foods=20, n_nutrients=4,
                         n_restaurants=3, menustat_rows=15)
        generate_fixture(b, seed=5, n_foods=20, n_nutrients=4,
                         n_restaurants=3, menustat_rows=15)
        assert directory_digest(a) == directory_digest(b)

    def test_different_seeds_differ(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out, seed in ((a, 5), (b, 6)):
            generate_fixture(out, seed=seed, n_foods=20, n_nutrients=4,
                             with_scrape=False, with_images=False)
        assert directory_digest(a) != directory_digest(b)

    def test_nutrient_csv_always_contains_energy_1008(self, tmp_path):
        generate_fixture(
            tmp_path, seed=2, n_foods=2, n_nutrients=1,
            with_scrape=False, with_menustat=False, with_images=False,
        )
        content = (tmp_path / "usda" / "nutrient.csv").read_text()
        assert "1008,Energy,KCAL" in content

    def test_all_table_one_files_present(self, small_fixture):
        path, _ = small_fixture
        for name in USDA_FILE_NAMES:
            assert (path / "usda" / name).exists(), name

    def test_manifest_file_matches_returned_manifest(self, small_fixture):
        path, manifest = small_fixture
        on_disk = json.loads((path / "manifest.json").read_text())
        assert on_disk == json.loads(json.dumps(manifest, sort_keys=True))

    def test_manifest_facts_align_with_food_nutrient_rows(self, small_fixture):
        path, manifest = small_fixture
        total = sum(len(v) for v in manifest["usda"]["facts"].values())
        assert total == manifest["counts"]["usda"]["facts"]
        assert data_rows(path / "usda" / "food_nutrient.csv") == total

    def test_big_id_food_is_planted(self, small_fixture):
        _, manifest = small_fixture
        ids = [f["fdc_id"] for f in manifest["usda"]["foods"]]
        assert 3_000_000_000 in ids

    def test_menustat_is_crlf_with_dirty_bytes(self, small_fixture):
        path, manifest = small_fixture
        raw = (path / "menustat.csv").read_bytes()
        assert raw.count(b"\r\n") == raw.count(b"\n")
        assert raw.count(b"\x93") == manifest["menustat"]["dirty_rows"]

    def test_bad_params_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            generate_fixture(tmp_path, n_foods=0)


class TestGoldenFixture:
    def test_regeneration_is_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        generate_golden_fixture(a)
        generate_golden_fixture(b)
        assert directory_digest(a) == directory_digest(b)

    def test_golden_values_on_disk(self, golden_dir):
        nutrients = (golden_dir / "usda" / "food_nutrient.csv").read_text()
        assert "130.05" in nutrients
        assert "9.6" in nutrients
        menustat = (golden_dir / "menustat.csv").read_bytes()
        assert b"XXL Quesadilla Burrito w/ Steak" in menustat
        assert b"840" in menustat
