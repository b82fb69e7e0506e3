"""Differential evaluation: run original and instrumented programs over
labelled input vectors and classify the outcomes.

Suite files are line-oriented: `ATTACK` or `LEGIT`, whitespace, then a
URL-style `k=v&k=v` vector with percent-encoding. `#` lines and blank lines
are skipped. A difference between the original and instrumented query logs
on an ATTACK input means the attack was stopped; identical logs on a LEGIT
input mean no false positive.

Byte comparison alone over-reports legitimate modifications (escaping
O'Brien changes bytes but not meaning), so results also carry a structural
view: a logged query is structurally clean when it parses under the SQL
subset and its token shape matches a Valid abstract query of the program,
i.e. input-derived text stayed confined to single literal/numeral tokens.
"""

from __future__ import annotations

import urllib.parse
from dataclasses import dataclass, field

from .minilang.nodes import Program
from .pipeline import Analysis, analyze_program, instrument_from_analysis
from .qfs import COVERING, DEFAULT_CAP
from .runtime import QueryLog, RunError, run_program
from .sqlschema import Schema, concrete_shape, query_shape

ATTACK = "ATTACK"
LEGIT = "LEGIT"

ATTACK_NEUTRALIZED = "attack-neutralized"
ATTACK_UNCHANGED = "attack-unchanged"
LEGIT_UNCHANGED = "legit-unchanged"
LEGIT_MODIFIED = "legit-modified"

CLASSIFICATIONS = (
    ATTACK_NEUTRALIZED, ATTACK_UNCHANGED, LEGIT_UNCHANGED, LEGIT_MODIFIED,
)


class SuiteError(Exception):
    pass


@dataclass(frozen=True)
class TestInput:
    input_id: str
    label: str  # ATTACK | LEGIT
    params: dict[str, str]


def parse_suite(text: str) -> list[TestInput]:
    inputs: list[TestInput] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        label = parts[0].upper()
        if label not in (ATTACK, LEGIT):
            raise SuiteError(
                f"suite line {lineno}: label must be ATTACK or LEGIT, got {parts[0]!r}"
            )
        params: dict[str, str] = {}
        if len(parts) == 2 and parts[1]:
            try:
                pairs = urllib.parse.parse_qsl(
                    parts[1], keep_blank_values=True, strict_parsing=True
                )
            except ValueError as exc:
                raise SuiteError(f"suite line {lineno}: bad input vector: {exc}")
            params = dict(pairs)
        inputs.append(TestInput(f"{lineno:04d}", label, params))
    return inputs


def load_suite_file(path) -> list[TestInput]:
    with open(path, encoding="utf-8") as fh:
        return parse_suite(fh.read())


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass
class InputResult:
    input: TestInput
    classification: str | None  # None when a run error occurred
    byte_equal: bool = False
    instrumented_clean: bool = False
    harmless: bool | None = None  # attack-unchanged only: attack never bit
    successful_attack: bool = False
    structurally_modified: bool = False  # LEGIT only, under structural diff
    original_queries: list[str] = field(default_factory=list)
    instrumented_queries: list[str] = field(default_factory=list)
    error: str | None = None


@dataclass
class EvalResult:
    program_id: str
    results: list[InputResult]
    counts: dict[str, int]
    attacks: int
    legits: int
    successful_attacks: int  # false negatives
    legit_modified_byte: int  # false positives under byte diff
    legit_modified_structural: int  # false positives under structural diff
    errors: list[tuple[str, str]]
    analysis: Analysis
    instrumented: Program
    original_log: QueryLog
    instrumented_log: QueryLog


def template_shapes(analysis: Analysis, schema: Schema) -> set[tuple[str, ...]]:
    """Token shapes of every Valid abstract query across all execution points."""
    shapes: set[tuple[str, ...]] = set()
    for point in analysis.points:
        for query, outcome in zip(point.queries, point.outcomes):
            if outcome.is_valid:
                shape = query_shape(query, schema)
                if shape is not None:
                    shapes.add(shape)
    return shapes


def _clean(queries: list[str], schema: Schema, templates: set) -> bool:
    return all(concrete_shape(q, schema) in templates for q in queries)


def evaluate_program(program: Program, schema: Schema, suite: list[TestInput], *,
                     program_id: str = "<program>", mode: str = COVERING,
                     cap: int = DEFAULT_CAP, conflict_policy: str = "numeric",
                     unresolvable_policy: str = "string",
                     step_budget: int | None = None) -> EvalResult:
    """Instrument the program, run both versions on every input, and diff.

    The default conflict policy here is numeric (the safe-for-both coercion):
    an evaluation wants instrumented code to exist even for conflicted
    placeholders. Interpreter failures are captured per input.
    """
    analysis = analyze_program(
        program, schema, mode=mode, cap=cap,
        conflict_policy=conflict_policy, unresolvable_policy=unresolvable_policy,
    )
    instrumented = instrument_from_analysis(analysis)
    templates = template_shapes(analysis, schema)

    results: list[InputResult] = []
    errors: list[tuple[str, str]] = []
    original_log = QueryLog()
    instrumented_log = QueryLog()

    for case in suite:
        result = InputResult(input=case, classification=None)
        try:
            orig = run_program(program, case.params, program_id=program_id,
                               input_id=case.input_id, step_budget=step_budget)
            inst = run_program(instrumented, case.params, program_id=program_id,
                               input_id=case.input_id, step_budget=step_budget)
        except RunError as exc:
            result.error = str(exc)
            errors.append((case.input_id, str(exc)))
            results.append(result)
            continue
        original_log.entries.extend(orig.entries)
        instrumented_log.entries.extend(inst.entries)
        result.original_queries = orig.queries()
        result.instrumented_queries = inst.queries()
        result.byte_equal = result.original_queries == result.instrumented_queries
        result.instrumented_clean = _clean(
            result.instrumented_queries, schema, templates
        )
        if case.label == ATTACK:
            result.classification = (
                ATTACK_UNCHANGED if result.byte_equal else ATTACK_NEUTRALIZED
            )
            # an unchanged "attack" is harmless when the query it produced
            # kept the injected text inside one token anyway
            if result.byte_equal:
                result.harmless = result.instrumented_clean
            result.successful_attack = not result.instrumented_clean
        else:
            result.classification = (
                LEGIT_UNCHANGED if result.byte_equal else LEGIT_MODIFIED
            )
            result.structurally_modified = (
                not result.byte_equal and not result.instrumented_clean
            )
        results.append(result)

    counts = {c: 0 for c in CLASSIFICATIONS}
    for result in results:
        if result.classification is not None:
            counts[result.classification] += 1

    return EvalResult(
        program_id=program_id,
        results=results,
        counts=counts,
        attacks=sum(1 for c in suite if c.label == ATTACK),
        legits=sum(1 for c in suite if c.label == LEGIT),
        successful_attacks=sum(1 for r in results if r.successful_attack),
        legit_modified_byte=counts[LEGIT_MODIFIED],
        legit_modified_structural=sum(1 for r in results if r.structurally_modified),
        errors=errors,
        analysis=analysis,
        instrumented=instrumented,
        original_log=original_log,
        instrumented_log=instrumented_log,
    )


def eval_report_dict(result: EvalResult) -> dict:
    """JSON-ready evaluation summary."""
    return {
        "program": result.program_id,
        "inputs": len(result.results),
        "attacks": result.attacks,
        "legits": result.legits,
        "counts": dict(sorted(result.counts.items())),
        "successful_attacks": result.successful_attacks,
        "false_positives_byte_diff": result.legit_modified_byte,
        "false_positives_structural_diff": result.legit_modified_structural,
        "errors": [{"input": i, "message": m} for i, m in result.errors],
        "results": [
            {
                "input": r.input.input_id,
                "label": r.input.label,
                "classification": r.classification,
                "byte_equal": r.byte_equal,
                "instrumented_clean": r.instrumented_clean,
                "harmless": r.harmless,
                "successful_attack": r.successful_attack,
                "structurally_modified": r.structurally_modified,
                "error": r.error,
            }
            for r in result.results
        ],
    }
