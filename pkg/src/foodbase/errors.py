"""Exception hierarchy shared across the pipeline.

Everything raised on bad *data* derives from FoodbaseError (CLI exit code 2).
Plain I/O failures are left as OSError (CLI exit code 3).
"""

from __future__ import annotations


class FoodbaseError(Exception):
    """Base class for all data-level pipeline errors."""


class InvariantViolation(FoodbaseError):
    """A domain type was constructed in a state its invariants forbid."""


# --- ingest ---------------------------------------------------------------

class CsvParseError(FoodbaseError):
    pass


class UnbalancedQuote(CsvParseError):
    def __init__(self, line_no: int):
        self.line_no = line_no
        super().__init__(f"unterminated quoted field opened on line {line_no}")


class RaggedRow(CsvParseError):
    def __init__(self, line_no: int, expected: int, got: int):
        self.line_no = line_no
        self.expected = expected
        self.got = got
        super().__init__(
            f"line {line_no}: expected {expected} cells, got {got}"
        )


class EmptySample(FoodbaseError):
    def __init__(self):
        super().__init__("cannot infer a schema from an empty sample")


class EmptySchema(InvariantViolation):
    def __init__(self, table_name: str = ""):
        self.table_name = table_name
        super().__init__(f"schema {table_name!r} has no columns")


class TypeCoercionFailure(FoodbaseError):
    def __init__(self, line_no: int, column: str, value: str = ""):
        self.line_no = line_no
        self.column = column
        self.value = value
        super().__init__(
            f"line {line_no}, column {column!r}: cannot coerce {value!r}"
        )


# --- model ----------------------------------------------------------------

class UnknownNutrient(FoodbaseError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown nutrient: {name!r}")


class NoSuchColumn(FoodbaseError):
    def __init__(self, table_name: str, column: str):
        self.table_name = table_name
        self.column = column
        super().__init__(f"table {table_name!r} has no column {column!r}")


class MissingIndex(FoodbaseError):
    def __init__(self, table_name: str, column: str):
        self.table_name = table_name
        self.column = column
        super().__init__(
            f"operation requires an index on {table_name!r}.{column}"
        )


class DuplicateFoodId(FoodbaseError):
    def __init__(self, fdc_id: int, category: str):
        self.fdc_id = fdc_id
        self.category = category
        super().__init__(
            f"fdc_id {fdc_id} appears with conflicting metadata in "
            f"category {category!r}"
        )


class UnknownFood(FoodbaseError):
    def __init__(self, food_id: int):
        self.food_id = food_id
        super().__init__(f"no food with id {food_id}")


# --- menustat --------------------------------------------------------------

class IdRangeCollision(FoodbaseError):
    def __init__(self, id_base: int, existing_max_id: int):
        self.id_base = id_base
        self.existing_max_id = existing_max_id
        super().__init__(
            f"id base {id_base} does not clear the existing max id "
            f"{existing_max_id}"
        )


# --- layout ---------------------------------------------------------------

class EmptyNutrientSet(FoodbaseError):
    def __init__(self):
        super().__init__("nutrient set for the wide layout is empty")


# --- scrape ---------------------------------------------------------------

class StructureNotFound(FoodbaseError):
    """The expected container is absent from a page (layout drift)."""


class MalformedAmount(FoodbaseError):
    def __init__(self, field: str, value: str = ""):
        self.field = field
        self.value = value
        super().__init__(f"nutrient {field!r}: unparseable amount {value!r}")


# --- images ---------------------------------------------------------------

class EmptyKey(FoodbaseError):
    def __init__(self, brand: str, food: str):
        self.brand = brand
        self.food = food
        super().__init__(
            f"({brand!r}, {food!r}) contains no alphanumeric characters"
        )


# --- export ---------------------------------------------------------------

class UnmappableType(FoodbaseError):
    def __init__(self, semantic_type: str, dialect: str):
        self.semantic_type = semantic_type
        self.dialect = dialect
        super().__init__(
            f"dialect {dialect!r} has no type name for {semantic_type!r}"
        )


# --- build ----------------------------------------------------------------

class BuildStageError(FoodbaseError):
    """Any stage failure, annotated with the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r}: {cause}")
        self.__cause__ = cause
