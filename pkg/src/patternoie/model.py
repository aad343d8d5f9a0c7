"""Core domain types: tag schemes, parsed sentences, extraction patterns, triples.

Everything here is an immutable value object; instances can be shared across
threads and worker processes without synchronization.  Tag inventories are
plain data (:class:`TagScheme`) so the same code runs under any parser's
POS/dependency tag set.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping

ARG1 = "ARG1"
REL = "REL"
ARG2 = "ARG2"
SLOT_ROLES = (ARG1, REL, ARG2)

# Inventories of the LTP-style Chinese pipeline, shipped as the default
# scheme: 29 POS tags and 14 dependency relations rooted at HED.  Some tag
# tables additionally list WP (punctuation attachment); it is offered as an
# optional 15th label because corpora with tokenized punctuation need it.
LTP_POS_TAGS = (
    "a", "b", "c", "d", "e", "g", "h", "i", "j", "k",
    "m", "n", "nd", "nh", "ni", "nl", "ns", "nt", "nz", "o",
    "p", "q", "r", "u", "v", "wp", "ws", "x", "z",
)
LTP_DEP_LABELS = (
    "SBV", "VOB", "IOB", "FOB", "DBL", "ATT", "ADV",
    "CMP", "COO", "POB", "LAD", "RAD", "IS", "HED",
)
PUNCT_DEP_LABEL = "WP"
PUNCT_POS = "wp"


class SchemeError(ValueError):
    """A tag, label, or scheme definition is invalid."""


class PatternError(ValueError):
    """A Pattern violates its structural invariants."""


def strip_ws(s: str) -> str:
    """Remove all whitespace characters (the normalization used everywhere)."""
    return "".join(s.split())


@dataclass(frozen=True)
class TagScheme:
    """The configurable inventories of POS tags and dependency labels.

    Indices into ``pos_tags`` / ``dep_labels`` are stable for the lifetime
    of a library file and define the axes of the prefilter signatures.
    """

    pos_tags: tuple[str, ...]
    dep_labels: tuple[str, ...]
    root_label: str = "HED"

    def __post_init__(self) -> None:
        if not self.pos_tags or not self.dep_labels:
            raise SchemeError("pos_tags and dep_labels must be non-empty")
        if len(set(self.pos_tags)) != len(self.pos_tags):
            raise SchemeError("duplicate POS tags in scheme")
        if len(set(self.dep_labels)) != len(self.dep_labels):
            raise SchemeError("duplicate dependency labels in scheme")
        if self.root_label not in self.dep_labels:
            raise SchemeError(f"root label {self.root_label!r} not in dep_labels")
        object.__setattr__(self, "pos_tags", tuple(self.pos_tags))
        object.__setattr__(self, "dep_labels", tuple(self.dep_labels))

    @cached_property
    def pos_index(self) -> Mapping[str, int]:
        return {t: i for i, t in enumerate(self.pos_tags)}

    @cached_property
    def dep_index(self) -> Mapping[str, int]:
        return {t: i for i, t in enumerate(self.dep_labels)}

    def to_dict(self) -> dict:
        return {
            "pos_tags": list(self.pos_tags),
            "dep_labels": list(self.dep_labels),
            "root_label": self.root_label,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TagScheme":
        try:
            return cls(
                pos_tags=tuple(d["pos_tags"]),
                dep_labels=tuple(d["dep_labels"]),
                root_label=str(d["root_label"]),
            )
        except KeyError as e:
            raise SchemeError(f"scheme definition missing field {e}") from None


def default_scheme(include_punct_label: bool = False) -> TagScheme:
    """The shipped LTP-style scheme: 29 POS tags, 14 dependency labels.

    ``include_punct_label=True`` adds WP for corpora whose punctuation
    tokens are attached explicitly.
    """
    deps = LTP_DEP_LABELS + ((PUNCT_DEP_LABEL,) if include_punct_label else ())
    return TagScheme(pos_tags=LTP_POS_TAGS, dep_labels=deps, root_label="HED")


@dataclass(frozen=True)
class Token:
    """One parsed token: 1-based index, surface form, POS, head (0 = root), dep."""

    index: int
    form: str
    pos: str
    head: int
    dep: str


@dataclass(frozen=True)
class ParsedSentence:
    """A dependency-parsed sentence; head links must form a rooted tree."""

    sent_id: str
    text: str
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> Token:
        """Token by its 1-based index."""
        return self.tokens[index - 1]

    @cached_property
    def root_index(self) -> int:
        for t in self.tokens:
            if t.head == 0:
                return t.index
        raise ValueError(f"sentence {self.sent_id}: no root token")

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """children[h] = indices of tokens headed by h; children[0] = root(s)."""
        kids: list[list[int]] = [[] for _ in range(len(self.tokens) + 1)]
        for t in self.tokens:
            if 0 <= t.head <= len(self.tokens):
                kids[t.head].append(t.index)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        """depths[i-1] = distance of token i from the root (root = 0)."""
        n = len(self.tokens)
        depth = [-1] * (n + 1)
        stack = [(r, 0) for r in self.children[0]]
        while stack:
            i, d = stack.pop()
            depth[i] = d
            for c in self.children[i]:
                stack.append((c, d + 1))
        if any(d < 0 for d in depth[1:]):
            raise ValueError(f"sentence {self.sent_id}: head links do not form a tree")
        return tuple(depth[1:])

    def depth(self, index: int) -> int:
        return self.depths[index - 1]

    def subtree(self, index: int) -> tuple[int, ...]:
        """All token indices in the dependency subtree of ``index``, sorted."""
        out = []
        stack = [index]
        while stack:
            i = stack.pop()
            out.append(i)
            stack.extend(self.children[i])
        return tuple(sorted(out))


def align_forms_to_text(text: str, forms: Iterable[str]) -> list[tuple[int, int]]:
    """Greedy left-to-right character offsets of forms in text.

    Whitespace between forms is skipped; forms themselves must occur
    verbatim.  Raises ValueError naming the first token that fails.
    """
    spans = []
    pos = 0
    for i, form in enumerate(forms, start=1):
        while pos < len(text) and text[pos].isspace():
            pos += 1
        end = pos + len(form)
        if not form or text[pos:end] != form:
            raise ValueError(f"token {i}: form {form!r} not found in text at offset {pos}")
        spans.append((pos, end))
        pos = end
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos != len(text):
        raise ValueError(f"text has unaligned trailing content at offset {pos}")
    return spans


def validate_sentence(s: ParsedSentence, scheme: TagScheme) -> list[str]:
    """All invariant violations of ``s`` under ``scheme``; empty list = valid.

    Violations are data, not failures: each entry names the offending
    token index and the rule it breaks.
    """
    problems: list[str] = []
    n = len(s.tokens)
    if n == 0:
        return ["sentence has no tokens"]

    for i, tok in enumerate(s.tokens, start=1):
        if tok.index != i:
            problems.append(f"token {i}: index field is {tok.index}, expected {i}")
    heads_ok = True
    for tok in s.tokens:
        if tok.pos not in scheme.pos_index:
            problems.append(f"token {tok.index}: pos {tok.pos!r} not in scheme")
        if tok.dep not in scheme.dep_index:
            problems.append(f"token {tok.index}: dep {tok.dep!r} not in scheme")
        if not (0 <= tok.head <= n):
            problems.append(f"token {tok.index}: head {tok.head} out of range 0..{n}")
            heads_ok = False
        elif tok.head == tok.index:
            problems.append(f"token {tok.index}: head points at itself")
            heads_ok = False

    roots = [t.index for t in s.tokens if t.head == 0]
    if not roots:
        problems.append("no root token (head=0)")
    elif len(roots) > 1:
        problems.append("multiple roots at " + ",".join(str(r) for r in roots))
    else:
        root = s.tokens[roots[0] - 1]
        if root.dep != scheme.root_label:
            problems.append(
                f"token {root.index}: root dep {root.dep!r} is not {scheme.root_label!r}"
            )

    if heads_ok:
        reached = set()
        stack = list(roots)
        kids: dict[int, list[int]] = {}
        for t in s.tokens:
            kids.setdefault(t.head, []).append(t.index)
        while stack:
            i = stack.pop()
            if i in reached:
                continue
            reached.add(i)
            stack.extend(kids.get(i, []))
        unreachable = sorted(set(range(1, n + 1)) - reached)
        flagged: set[int] = set()
        for u in unreachable:
            if u in flagged:
                continue
            # walk head pointers until a repeat: that loop is the cycle
            trail: list[int] = []
            seen_at: dict[int, int] = {}
            cur = u
            while cur not in seen_at and cur not in flagged and cur != 0:
                seen_at[cur] = len(trail)
                trail.append(cur)
                cur = s.tokens[cur - 1].head
            if cur in seen_at:
                cycle = sorted(trail[seen_at[cur]:])
                flagged.update(trail)
                problems.append("head cycle at tokens " + ",".join(str(c) for c in cycle))
            else:
                flagged.update(trail)

    try:
        align_forms_to_text(s.text, (t.form for t in s.tokens))
    except ValueError as e:
        problems.append(str(e))
    return problems


@dataclass(frozen=True)
class PatternNode:
    """Pattern node: POS label plus an optional exact-word constraint."""

    node_id: int
    pos: str
    lexical_anchor: str | None = None


@dataclass(frozen=True)
class PatternEdge:
    """Directed dependency edge between two pattern nodes."""

    head_node: int
    dependent_node: int
    dep: str


@dataclass(frozen=True)
class Pattern:
    """A small labeled dependency tree with a slot map onto triple roles."""

    pattern_id: str
    nodes: tuple[PatternNode, ...]
    edges: tuple[PatternEdge, ...]
    slot_map: Mapping[int, str]
    provenance: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "slot_map", dict(self.slot_map))
        object.__setattr__(self, "provenance", tuple(self.provenance))

    @cached_property
    def node_by_id(self) -> Mapping[int, PatternNode]:
        return {n.node_id: n for n in self.nodes}

    @cached_property
    def root_id(self) -> int:
        incoming = {e.dependent_node for e in self.edges}
        roots = [n.node_id for n in self.nodes if n.node_id not in incoming]
        if len(roots) != 1:
            raise PatternError(f"pattern {self.pattern_id}: expected one root, found {roots}")
        return roots[0]


def validate_pattern(p: Pattern, scheme: TagScheme | None = None) -> list[str]:
    """Structural invariant violations of a Pattern; empty list = valid."""
    problems: list[str] = []
    ids = [n.node_id for n in p.nodes]
    if not ids:
        return ["pattern has no nodes"]
    if len(set(ids)) != len(ids):
        problems.append("duplicate node ids")
    known = set(ids)

    incoming: dict[int, int] = {}
    for e in p.edges:
        if e.head_node not in known or e.dependent_node not in known:
            problems.append(f"edge {e.head_node}->{e.dependent_node} references unknown node")
            continue
        if e.head_node == e.dependent_node:
            problems.append(f"self-loop at node {e.head_node}")
            continue
        incoming[e.dependent_node] = incoming.get(e.dependent_node, 0) + 1
    for nid, cnt in incoming.items():
        if cnt > 1:
            problems.append(f"node {nid} has {cnt} incoming edges")
    roots = [i for i in ids if i not in incoming]
    if len(roots) != 1:
        problems.append(f"expected exactly one root node, found {sorted(roots)}")
    elif not problems:
        reached = {roots[0]}
        frontier = [roots[0]]
        kids: dict[int, list[int]] = {}
        for e in p.edges:
            kids.setdefault(e.head_node, []).append(e.dependent_node)
        while frontier:
            cur = frontier.pop()
            for c in kids.get(cur, []):
                if c not in reached:
                    reached.add(c)
                    frontier.append(c)
        if reached != known:
            problems.append(f"nodes not reachable from root: {sorted(known - reached)}")

    for n in p.nodes:
        if n.lexical_anchor is not None and n.lexical_anchor == "":
            problems.append(f"node {n.node_id}: empty lexical anchor")
        if scheme is not None and n.pos not in scheme.pos_index:
            problems.append(f"node {n.node_id}: pos {n.pos!r} not in scheme")
    if scheme is not None:
        for e in p.edges:
            if e.dep not in scheme.dep_index:
                problems.append(f"edge {e.head_node}->{e.dependent_node}: dep {e.dep!r} not in scheme")

    for nid, role in p.slot_map.items():
        if nid not in known:
            problems.append(f"slot map references unknown node {nid}")
        if role not in SLOT_ROLES:
            problems.append(f"slot role {role!r} is not one of {SLOT_ROLES}")
    assigned = set(p.slot_map.values())
    missing = [r for r in SLOT_ROLES if r not in assigned]
    if missing:
        problems.append(f"slot roles not assigned: {missing}")
    return problems


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch in "\\|(),>":
            out.append("\\")
        out.append(ch)
    return "".join(out)


def _canonical(p: Pattern) -> tuple[str, dict[int, tuple[tuple[str, int], ...]]]:
    """Canonical key string plus the canonical child order per node."""
    problems = validate_pattern(p)
    if problems:
        raise PatternError(f"pattern {p.pattern_id}: " + "; ".join(problems))
    kids: dict[int, list[tuple[str, int]]] = {}
    for e in p.edges:
        kids.setdefault(e.head_node, []).append((e.dep, e.dependent_node))
    order: dict[int, tuple[tuple[str, int], ...]] = {}

    def render(nid: int) -> str:
        node = p.node_by_id[nid]
        entries = []
        for dep, cid in kids.get(nid, []):
            child = p.node_by_id[cid]
            entries.append((
                dep,
                child.pos,
                child.lexical_anchor or "",
                p.slot_map.get(cid, ""),
                render(cid),
                cid,
            ))
        entries.sort(key=lambda e: e[:5])
        order[nid] = tuple((e[0], e[5]) for e in entries)
        body = ",".join(_escape(e[0]) + ">" + e[4] for e in entries)
        return (
            _escape(node.pos)
            + "|" + _escape(node.lexical_anchor or "")
            + "|" + p.slot_map.get(nid, "")
            + "(" + body + ")"
        )

    key = render(p.root_id)
    return key, order


def canonical_key(p: Pattern) -> str:
    """Deterministic key equal for exactly the label-isomorphic patterns.

    Children are sorted recursively by (dep, pos, lexical anchor, slot
    role, subtree key), so the key is invariant under any permutation of
    the node/edge lists.  Raises PatternError on invalid patterns.
    """
    key, _ = _canonical(p)
    return key


def canonical_child_order(p: Pattern) -> dict[int, tuple[tuple[str, int], ...]]:
    """Per-node (dep, child_id) lists in canonical order (see canonical_key)."""
    _, order = _canonical(p)
    return order


def pattern_id_for_key(key: str) -> str:
    """Stable short id derived from a canonical key."""
    return "p" + hashlib.sha1(key.encode("utf-8")).hexdigest()[:12]


def with_pattern_id(p: Pattern) -> Pattern:
    """Copy of ``p`` whose id is the canonical hash id."""
    return replace(p, pattern_id=pattern_id_for_key(canonical_key(p)))


@dataclass(frozen=True)
class Triple:
    """An extracted or annotated fact (arg1, rel, arg2).

    ``spans`` maps slot role -> token indices (surface order) when the
    triple was produced from a known sentence; slot strings then equal the
    concatenation of the span tokens' forms.
    """

    arg1: str
    rel: str
    arg2: str
    spans: Mapping[str, tuple[int, ...]] | None = None
    source_pattern: str | None = None

    def __post_init__(self) -> None:
        if self.spans is not None:
            object.__setattr__(
                self, "spans", {r: tuple(v) for r, v in self.spans.items()}
            )

    def slots(self) -> tuple[str, str, str]:
        return (self.arg1, self.rel, self.arg2)

    def normalized(self) -> tuple[str, str, str]:
        """Whitespace-stripped slot strings (the dedup/eval identity)."""
        return (strip_ws(self.arg1), strip_ws(self.rel), strip_ws(self.arg2))
