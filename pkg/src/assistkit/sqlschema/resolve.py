"""Choose a sanitizer kind for each placeholder from its parse bindings.

String-domain bindings demand the string sanitizer, numeric-domain bindings
the numeric one. A placeholder whose valid bindings disagree is a Conflict
(the caller's policy decides between numeric coercion and an error); one that
appears only in invalid queries is Unresolvable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..minilang.nodes import NUMERIC_SANITIZER, STRING_SANITIZER
from .queryparse import ParseOutcome, Valid
from .schema import DOMAIN_NUMERIC

_DOMAIN_TO_SANITIZER = {
    "string": STRING_SANITIZER,
    DOMAIN_NUMERIC: NUMERIC_SANITIZER,
}


@dataclass(frozen=True)
class Resolved:
    kind: str


@dataclass(frozen=True)
class Conflicted:
    kinds: tuple[str, ...]  # at least two, sorted


@dataclass(frozen=True)
class Unresolvable:
    reason: str


@dataclass(frozen=True)
class PlaceholderResolution:
    placeholder: int
    status: Resolved | Conflicted | Unresolvable


def resolve_placeholders(outcomes: Iterable[ParseOutcome]) -> list[PlaceholderResolution]:
    """Resolve every placeholder appearing in the given outcomes, ordered by
    placeholder node id. Conflicts and unresolvables are data, not errors;
    policy is applied later by the planner."""
    placeholders: set[int] = set()
    kinds: dict[int, set[str]] = {}
    for outcome in outcomes:
        for ph in outcome.query.placeholders():
            placeholders.add(ph.node)
        if isinstance(outcome.status, Valid):
            for binding in outcome.status.bindings:
                kinds.setdefault(binding.placeholder, set()).add(
                    _DOMAIN_TO_SANITIZER[binding.domain.kind]
                )

    resolutions: list[PlaceholderResolution] = []
    for node in sorted(placeholders):
        found = kinds.get(node)
        if not found:
            status = Unresolvable("appears only in syntactically invalid queries")
        elif len(found) == 1:
            status = Resolved(next(iter(found)))
        else:
            status = Conflicted(tuple(sorted(found)))
        resolutions.append(PlaceholderResolution(node, status))
    return resolutions
