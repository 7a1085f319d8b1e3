"""foodbase: rebuild a queryable food/nutrient database from CSV dumps,
restaurant CSVs, and scraped menu-page fixtures."""

__version__ = "0.1.0"
