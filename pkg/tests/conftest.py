import pytest

from assistkit.corpus import read_corpus_text
from assistkit.minilang import parse_program
from assistkit.sqlschema import load_schema

BOOKS_SCHEMA_TEXT = "TABLE BOOKS (author STRING, price NUMERIC);"


@pytest.fixture(scope="session")
def books_schema():
    return load_schema(BOOKS_SCHEMA_TEXT)


@pytest.fixture(scope="session")
def bookstore_source():
    return read_corpus_text("bookstore_mini.qs")


@pytest.fixture(scope="session")
def bookstore_program(bookstore_source):
    return parse_program(bookstore_source, "bookstore_mini.qs")


@pytest.fixture(scope="session")
def conflict_source():
    return read_corpus_text("conflict_param.qs")


@pytest.fixture(scope="session")
def conflict_program(conflict_source):
    return parse_program(conflict_source, "conflict_param.qs")


@pytest.fixture(scope="session")
def loop_iter_program():
    return parse_program(read_corpus_text("loop_iter.qs"), "loop_iter.qs")
