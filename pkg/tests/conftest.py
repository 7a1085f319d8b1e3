"""Session fixtures: generated fixture trees and built stores."""

from __future__ import annotations

import pytest

from foodbase.build import read_source_config, run_build
from foodbase.fixtures import generate_fixture, generate_golden_fixture


@pytest.fixture(scope="session")
def golden_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("golden")
    generate_golden_fixture(out)
    return out


@pytest.fixture(scope="session")
def golden_build(golden_dir, tmp_path_factory):
    """(report, store, out_dir) for a full golden build (USDA + menustat)."""
    out = tmp_path_factory.mktemp("golden-build")
    config = read_source_config(golden_dir / "sources_full.cfg")
    report, store = run_build(config, out, figures=False)
    return report, store, out


@pytest.fixture(scope="session")
def small_fixture(tmp_path_factory):
    """(path, manifest) for a small generated fixture with all source types."""
    out = tmp_path_factory.mktemp("small-fixture")
    manifest = generate_fixture(
        out, seed=7, n_foods=40, n_nutrients=5, n_restaurants=3,
        menustat_rows=25,
    )
    return out, manifest


@pytest.fixture(scope="session")
def small_build(small_fixture, tmp_path_factory):
    path, manifest = small_fixture
    out = tmp_path_factory.mktemp("small-build")
    config = read_source_config(path / "sources_full.cfg")
    report, store = run_build(config, out, figures=False)
    return report, store, out, manifest
