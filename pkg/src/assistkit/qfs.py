"""Query fragment sets: the possible abstract queries at each graph node.

An abstract query is a sequence of string literals and placeholders, where a
placeholder stands for an external-input node in the flow graph. The fragment
set of a node is defined recursively:

  * init_literal  -> the literal itself
  * init_any      -> a placeholder referencing that node
  * assign        -> union over predecessors
  * concat        -> left set x right set, combined pairwise

Two concat modes exist. "exact" forms the full cross product and refuses to
exceed the cap. "covering" pairs left[i] with right[i mod len(right)] over the
longer side's indices, so every fragment from both sides appears in at least
one result while the output stays linear in the operand sizes.

Nodes already being computed (cycles through loop bodies) contribute whatever
has been memoized so far -- nothing, on first contact -- so results reflect
single loop iterations. Every node's set is computed at most once per call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .flowgraph import ASSIGN, CONCAT, INIT_ANY, INIT_LITERAL, FlowGraph

DEFAULT_CAP = 4096

EXACT = "exact"
COVERING = "covering"


class CrossProductOverflowError(Exception):
    """Exact-mode concatenation would exceed the fragment cap."""

    def __init__(self, node: int, left_size: int, right_size: int, cap: int):
        super().__init__(
            f"cross-product overflow at concat node n{node}: "
            f"{left_size} x {right_size} fragments exceeds cap {cap}; "
            "retry in covering mode"
        )
        self.node = node
        self.left_size = left_size
        self.right_size = right_size
        self.cap = cap


# ---------------------------------------------------------------------------
# Segments and abstract queries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Placeholder:
    node: int
    display: str | None = field(compare=False, default=None)


Segment = Literal | Placeholder


@dataclass(frozen=True)
class AbstractQuery:
    segments: tuple[Segment, ...]

    def placeholders(self) -> list[Placeholder]:
        return [s for s in self.segments if isinstance(s, Placeholder)]

    def render(self) -> str:
        parts = []
        for seg in self.segments:
            if isinstance(seg, Literal):
                parts.append(seg.text)
            else:
                name = seg.display if seg.display is not None else f"#{seg.node}"
                parts.append(f"«{name}»")
        return "".join(parts)


def normalize(segments) -> AbstractQuery:
    """Normal form: adjacent literals merged, empty literals dropped."""
    out: list[Segment] = []
    for seg in segments:
        if isinstance(seg, Literal):
            if not seg.text:
                continue
            if out and isinstance(out[-1], Literal):
                out[-1] = Literal(out[-1].text + seg.text)
                continue
        out.append(seg)
    return AbstractQuery(tuple(out))


def concat_queries(left: AbstractQuery, right: AbstractQuery) -> AbstractQuery:
    return normalize(left.segments + right.segments)


def _canon_key(query: AbstractQuery):
    return tuple(
        (0, seg.text) if isinstance(seg, Literal) else (1, seg.node)
        for seg in query.segments
    )


def _ordered_unique(queries) -> tuple[AbstractQuery, ...]:
    seen = set()
    unique = []
    for q in queries:
        key = _canon_key(q)
        if key not in seen:
            seen.add(key)
            unique.append(q)
    unique.sort(key=_canon_key)
    return tuple(unique)


@dataclass(frozen=True)
class QueryFragmentSet:
    fragments: tuple[AbstractQuery, ...]
    truncated: bool = False


_EMPTY = QueryFragmentSet((), False)


# ---------------------------------------------------------------------------
# The recursion, run iteratively so deep or large graphs cannot blow the
# Python stack (termination is tested on cyclic graphs with 10k nodes).
# ---------------------------------------------------------------------------

def find_query_fragments(graph: FlowGraph, node: int, mode: str = COVERING,
                         cap: int = DEFAULT_CAP,
                         _memo: dict[int, QueryFragmentSet] | None = None
                         ) -> QueryFragmentSet:
    """Compute the query fragment set of a flow-graph node.

    Raises CrossProductOverflowError in exact mode when a concatenation's
    full cross product would exceed `cap`.
    """
    if node not in graph.nodes:
        raise KeyError(f"no such flow node: {node}")
    if mode not in (EXACT, COVERING):
        raise ValueError(f"mode must be 'exact' or 'covering', got {mode!r}")
    if cap < 1:
        raise ValueError("cap must be >= 1")

    memo = _memo if _memo is not None else {}
    in_progress: set[int] = set()
    stack: list[tuple[int, bool]] = [(node, False)]
    while stack:
        nid, expanded = stack.pop()
        if expanded:
            memo[nid] = _combine(graph, nid, mode, cap, memo)
            in_progress.discard(nid)
            continue
        if nid in memo or nid in in_progress:
            continue
        in_progress.add(nid)
        stack.append((nid, True))
        for pred in reversed(graph.nodes[nid].preds):
            stack.append((pred, False))
    return memo[node]


def _combine(graph: FlowGraph, nid: int, mode: str, cap: int,
             memo: dict[int, QueryFragmentSet]) -> QueryFragmentSet:
    fnode = graph.nodes[nid]
    if fnode.kind == INIT_LITERAL:
        return QueryFragmentSet((normalize([Literal(fnode.text or "")]),), False)
    if fnode.kind == INIT_ANY:
        return QueryFragmentSet((AbstractQuery((Placeholder(nid),)),), False)
    if fnode.kind == ASSIGN:
        collected: list[AbstractQuery] = []
        truncated = False
        for pred in fnode.preds:
            pred_set = memo.get(pred, _EMPTY)  # still-in-progress preds: cycle cut
            collected.extend(pred_set.fragments)
            truncated = truncated or pred_set.truncated
        return QueryFragmentSet(_ordered_unique(collected), truncated)
    if fnode.kind == CONCAT:
        left_id, right_id = fnode.preds
        left = memo.get(left_id, _EMPTY)
        right = memo.get(right_id, _EMPTY)
        truncated = left.truncated or right.truncated
        nl, nr = len(left.fragments), len(right.fragments)
        if nl == 0 or nr == 0:
            return QueryFragmentSet((), truncated)
        if mode == EXACT:
            if nl * nr > cap:
                raise CrossProductOverflowError(nid, nl, nr, cap)
            combined = [
                concat_queries(lq, rq)
                for lq in left.fragments
                for rq in right.fragments
            ]
        else:
            width = max(nl, nr)
            combined = [
                concat_queries(left.fragments[i % nl], right.fragments[i % nr])
                for i in range(width)
            ]
            truncated = truncated or nl * nr > width
        return QueryFragmentSet(_ordered_unique(combined), truncated)
    raise AssertionError(f"unknown node kind {fnode.kind!r}")


# ---------------------------------------------------------------------------
# Execution-point queries with stable display names
# ---------------------------------------------------------------------------

def abstract_queries_at(graph: FlowGraph, exec_point: int, mode: str = COVERING,
                        cap: int = DEFAULT_CAP) -> list[AbstractQuery]:
    """The abstract queries reaching an execution point, deterministically
    ordered, with placeholder display names (r1, r2, ...) assigned in order
    of first appearance."""
    if exec_point not in {ep.node for ep in graph.exec_points}:
        raise KeyError(f"node {exec_point} is not an execution point")
    qfs = find_query_fragments(graph, exec_point, mode=mode, cap=cap)

    names: dict[int, str] = {}
    for query in qfs.fragments:
        for ph in query.placeholders():
            if ph.node not in names:
                names[ph.node] = f"r{len(names) + 1}"

    named = [
        AbstractQuery(tuple(
            Placeholder(seg.node, display=names[seg.node])
            if isinstance(seg, Placeholder) else seg
            for seg in query.segments
        ))
        for query in qfs.fragments
    ]
    named.sort(key=lambda q: q.render())
    return named


def display_names(queries) -> dict[int, str]:
    """Placeholder node id -> display name, collected from named queries."""
    names: dict[int, str] = {}
    for query in queries:
        for ph in query.placeholders():
            if ph.display is not None:
                names.setdefault(ph.node, ph.display)
    return names
