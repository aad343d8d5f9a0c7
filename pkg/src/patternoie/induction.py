"""Automatic pattern acquisition from annotated samples.

One pattern is induced per (sentence, gold triple) pair: the gold slot
strings are aligned to token spans, each span is anchored at its
dependency head, and the minimal connected subgraph of the three heads
becomes the pattern.  Prepositions around POB edges keep their surface
form as lexical anchors; everything else is delexicalized.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .ingest import AnnotatedSample
from .model import (
    ARG1,
    ARG2,
    REL,
    SLOT_ROLES,
    ParsedSentence,
    Pattern,
    PatternEdge,
    PatternNode,
    TagScheme,
    Triple,
    canonical_key,
    pattern_id_for_key,
    strip_ws,
)

log = logging.getLogger(__name__)

ANCHOR_POLICIES = ("pob-only", "none", "all-closed-class")


class InductionError(ValueError):
    """A sample that cannot be turned into a pattern."""


class AlignmentError(InductionError):
    """A gold slot string has no contiguous token span in the sentence."""

    def __init__(self, role: str, slot_text: str):
        super().__init__(f"slot {role} text {slot_text!r} is not alignable")
        self.role = role


class DegenerateError(InductionError):
    """Two slots resolve to the same head token; no pattern form exists."""


@dataclass(frozen=True)
class InductionConfig:
    """Knobs for pattern acquisition.

    ``anchors`` selects the lexical-anchoring policy: "pob-only" keeps
    surface forms on tokens involved in POB dependencies (the default),
    "none" fully delexicalizes, "all-closed-class" anchors every
    closed-class token in the pattern.
    """

    anchors: str = "pob-only"
    pob_label: str = "POB"
    preposition_pos: str = "p"
    closed_class_pos: tuple[str, ...] = ("p", "c", "u")

    def __post_init__(self) -> None:
        if self.anchors not in ANCHOR_POLICIES:
            raise ValueError(f"anchors must be one of {ANCHOR_POLICIES}")


@dataclass(frozen=True)
class PatternLibrary:
    """Deduplicated patterns with support counts and acquisition stats.

    A "sample" in the stats is one (sentence, gold triple) pair, so the
    supports sum to ``samples_seen - samples_failed``.
    """

    scheme: TagScheme
    patterns: tuple[Pattern, ...]
    counts: Mapping[str, int]
    stats: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "patterns", tuple(self.patterns))
        object.__setattr__(self, "counts", dict(self.counts))
        object.__setattr__(self, "stats", dict(self.stats))

    def __len__(self) -> int:
        return len(self.patterns)


def align_slot(s: ParsedSentence, slot_text: str) -> list[tuple[int, int]]:
    """All contiguous token spans whose forms concatenate to ``slot_text``.

    Comparison ignores whitespace on both sides.  Spans are (first, last)
    1-based inclusive token indices, ordered left to right.
    """
    target = strip_ws(slot_text)
    if not target:
        return []
    forms = [strip_ws(t.form) for t in s.tokens]
    spans: list[tuple[int, int]] = []
    n = len(forms)
    for i in range(n):
        acc = ""
        for j in range(i, n):
            acc += forms[j]
            if len(acc) >= len(target):
                if acc == target:
                    spans.append((i + 1, j + 1))
                break
            if not target.startswith(acc):
                break
    return spans


def slot_head(s: ParsedSentence, span: tuple[int, int]) -> int:
    """The token of ``span`` that is governed from outside the span.

    If several tokens point outside, the one closest to the root wins
    (minimum depth, then leftmost).
    """
    first, last = span
    inside = set(range(first, last + 1))
    external = [i for i in inside if s.token(i).head not in inside]
    if not external:
        raise ValueError(f"span {span} has no external-headed token")
    return min(external, key=lambda i: (s.depth(i), i))


def _path_to_root(s: ParsedSentence, index: int) -> list[int]:
    path = [index]
    cur = index
    while s.token(cur).head != 0:
        cur = s.token(cur).head
        path.append(cur)
    return path


def induce_pattern(
    sentence: ParsedSentence,
    gold: Triple,
    scheme: TagScheme,
    config: InductionConfig | None = None,
    sample_id: str | None = None,
) -> Pattern:
    """Build the extraction pattern encoded by one annotated triple.

    Raises AlignmentError when a slot cannot be located in the sentence
    and DegenerateError when two slots share a head token.
    """
    config = config or InductionConfig()
    spans: dict[str, tuple[int, int]] = {}
    for role, text in zip(SLOT_ROLES, (gold.arg1, gold.rel, gold.arg2)):
        candidates = align_slot(sentence, text)
        if not candidates:
            raise AlignmentError(role, text)
        spans[role] = candidates[0]

    heads = {role: slot_head(sentence, spans[role]) for role in SLOT_ROLES}
    if len(set(heads.values())) < len(SLOT_ROLES):
        shared = sorted(h for h in set(heads.values())
                        if sum(1 for v in heads.values() if v == h) > 1)
        raise DegenerateError(f"slots share head token(s) {shared}")

    # Minimal connected subgraph: union of root-ward paths cut at the
    # deepest node common to all three.
    paths = {role: _path_to_root(sentence, heads[role]) for role in SLOT_ROLES}
    common = set(paths[ARG1]) & set(paths[REL]) & set(paths[ARG2])
    lca = max(common, key=sentence.depth)
    members: set[int] = set()
    for path in paths.values():
        for tok in path:
            members.add(tok)
            if tok == lca:
                break

    edges = tuple(
        PatternEdge(head_node=sentence.token(i).head, dep=sentence.token(i).dep, dependent_node=i)
        for i in sorted(members)
        if i != lca
    )
    head_tokens = set(heads.values())
    anchored = _anchored_tokens(sentence, members, head_tokens, edges, config)
    nodes = tuple(
        PatternNode(
            node_id=i,
            pos=sentence.token(i).pos,
            lexical_anchor=sentence.token(i).form if i in anchored else None,
        )
        for i in sorted(members)
    )
    slot_map = {heads[role]: role for role in SLOT_ROLES}
    provenance = (sample_id,) if sample_id else (sentence.sent_id,)
    pattern = Pattern(pattern_id="", nodes=nodes, edges=edges,
                      slot_map=slot_map, provenance=provenance)
    return replace(pattern, pattern_id=pattern_id_for_key(canonical_key(pattern)))


def _anchored_tokens(
    sentence: ParsedSentence,
    members: set[int],
    head_tokens: set[int],
    edges: tuple[PatternEdge, ...],
    config: InductionConfig,
) -> set[int]:
    if config.anchors == "none":
        return set()
    if config.anchors == "all-closed-class":
        return {i for i in members if sentence.token(i).pos in config.closed_class_pos}
    # pob-only: heads of in-pattern POB edges, plus prepositional connectors
    anchored = {e.head_node for e in edges if e.dep == config.pob_label}
    anchored.update(
        i for i in members
        if i not in head_tokens and sentence.token(i).pos == config.preposition_pos
    )
    return anchored


def build_library(
    samples: Iterable[AnnotatedSample],
    scheme: TagScheme,
    config: InductionConfig | None = None,
) -> PatternLibrary:
    """Induce from every (sentence, triple) pair and merge by canonical key.

    Per-sample failures are tallied, never fatal.  Output order is
    deterministic: descending support, then canonical key.
    """
    config = config or InductionConfig()
    merged: dict[str, tuple[Pattern, int, list[str]]] = {}
    seen = 0
    failed = 0
    for sample in samples:
        for k, gold in enumerate(sample.gold_triples):
            seen += 1
            sid = f"{sample.sent_id}#{k}"
            try:
                pattern = induce_pattern(sample.sentence, gold, scheme, config, sample_id=sid)
            except InductionError as e:
                failed += 1
                log.debug("sample %s not converted: %s", sid, e)
                continue
            key = canonical_key(pattern)
            if key in merged:
                prev, support, prov = merged[key]
                prov.append(sid)
                merged[key] = (prev, support + 1, prov)
            else:
                merged[key] = (pattern, 1, [sid])

    ordered = sorted(merged.items(), key=lambda kv: (-kv[1][1], kv[0]))
    patterns = tuple(
        replace(pat, pattern_id=pattern_id_for_key(key), provenance=tuple(sorted(prov)))
        for key, (pat, _, prov) in ordered
    )
    counts = {key: support for key, (_, support, _) in ordered}
    stats = {
        "samples_seen": seen,
        "samples_failed": failed,
        "distinct_patterns": len(patterns),
    }
    return PatternLibrary(scheme=scheme, patterns=patterns, counts=counts, stats=stats)
