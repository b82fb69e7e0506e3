"""Bundled desk-scale corpus: vulnerable QScript programs, their schemas,
and labelled ATTACK/LEGIT input suites for the differential evaluation.

EVAL_CORPUS lists the programs the evaluation quality gates run over; the
remaining entries (direct execution of a whole input, the string/numeric
type conflict, the multi-iteration loop) exist for analysis-level tests and
demos rather than differential evaluation.
"""

from __future__ import annotations

from importlib.resources import files


def corpus_path(name: str):
    """Filesystem path of a bundled corpus file."""
    return files(__package__).joinpath(name)


def read_corpus_text(name: str) -> str:
    return corpus_path(name).read_text(encoding="utf-8")


# (program, schema, suite) triples driving the attack-neutralization gates.
EVAL_CORPUS: tuple[tuple[str, str, str], ...] = (
    ("bookstore_mini.qs", "books.schema", "bookstore_mini.suite"),
    ("login_string.qs", "users.schema", "login_string.suite"),
    ("product_numeric.qs", "products.schema", "product_numeric.suite"),
    ("search_multi.qs", "books.schema", "search_multi.suite"),
    ("loop_append.qs", "books.schema", "loop_append.suite"),
    ("update_profile.qs", "users.schema", "update_profile.suite"),
    ("insert_review.qs", "reviews.schema", "insert_review.suite"),
    ("delete_account.qs", "users.schema", "delete_account.suite"),
)

# Analysis-only examples.
EXTRA_PROGRAMS: tuple[tuple[str, str], ...] = (
    ("direct_exec.qs", "books.schema"),
    ("conflict_param.qs", "books.schema"),
    ("loop_iter.qs", "books.schema"),
)
