"""Exact matching of patterns against sentence dependency trees.

A pattern embeds into a sentence when its nodes map injectively onto
tokens preserving POS labels, lexical anchors, and labeled head
dependencies.  Enumeration is deterministic: candidate roots in token
order, children in canonical child order.  Slot filling harvests the full
dependency subtree of each slot-head token, minus the subtrees of tokens
mapped by other pattern nodes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .model import (
    ARG1,
    ARG2,
    PUNCT_POS,
    REL,
    ParsedSentence,
    Pattern,
    SchemeError,
    Triple,
    canonical_child_order,
)
from .postprocess import PostprocessConfig, default_config, postprocess_triple
from .prefilter import (
    LiteralTensor,
    PatternTensor,
    encode_sentence,
    encode_sentence_literal,
    filter_candidates,
    filter_candidates_literal,
)

log = logging.getLogger(__name__)

FILTER_MODES = ("auto", "dense", "paper-literal")


@dataclass(frozen=True)
class Embedding:
    """An injective pattern-node -> token-index map, sorted by node id."""

    mapping: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)

    def token_for(self, node_id: int) -> int:
        return self.as_dict()[node_id]


class _CompiledPattern:
    """Preorder matching plan for one pattern."""

    __slots__ = ("pattern", "root_id", "root_pos", "root_anchor", "steps", "n_nodes")

    def __init__(self, p: Pattern):
        self.pattern = p
        order = canonical_child_order(p)
        self.root_id = p.root_id
        root = p.node_by_id[self.root_id]
        self.root_pos = root.pos
        self.root_anchor = root.lexical_anchor
        # (node_id, parent_node_id, dep, pos, anchor) in DFS preorder,
        # children visited in canonical child order
        steps: list[tuple[int, int, str, str, str | None]] = []

        def walk(nid: int) -> None:
            for dep, cid in order.get(nid, ()):
                child = p.node_by_id[cid]
                steps.append((cid, nid, dep, child.pos, child.lexical_anchor))
                walk(cid)

        walk(self.root_id)
        self.steps = steps
        self.n_nodes = len(p.nodes)


class _SentenceIndex:
    """Per-sentence lookup structures shared across pattern matches."""

    __slots__ = ("sentence", "pos", "form", "dep", "children", "_subtrees")

    def __init__(self, s: ParsedSentence):
        self.sentence = s
        self.pos = [""] + [t.pos for t in s.tokens]
        self.form = [""] + [t.form for t in s.tokens]
        self.dep = [""] + [t.dep for t in s.tokens]
        self.children = s.children
        self._subtrees: dict[int, frozenset[int]] = {}

    def subtree(self, i: int) -> frozenset[int]:
        cached = self._subtrees.get(i)
        if cached is None:
            cached = frozenset(self.sentence.subtree(i))
            self._subtrees[i] = cached
        return cached


def compile_pattern(p: Pattern) -> _CompiledPattern:
    return _CompiledPattern(p)


def index_sentence(s: ParsedSentence) -> _SentenceIndex:
    return _SentenceIndex(s)


def _match_compiled(cp: _CompiledPattern, idx: _SentenceIndex) -> list[dict[int, int]]:
    out: list[dict[int, int]] = []
    steps = cp.steps
    n_steps = len(steps)
    pos = idx.pos
    form = idx.form
    dep = idx.dep
    children = idx.children
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def extend(k: int) -> None:
        if k == n_steps:
            out.append(dict(assignment))
            return
        nid, parent, want_dep, want_pos, want_anchor = steps[k]
        parent_tok = assignment[parent]
        for c in children[parent_tok]:
            if c in used:
                continue
            if dep[c] != want_dep or pos[c] != want_pos:
                continue
            if want_anchor is not None and form[c] != want_anchor:
                continue
            assignment[nid] = c
            used.add(c)
            extend(k + 1)
            used.discard(c)
            del assignment[nid]

    for t in idx.sentence.tokens:
        if t.pos != cp.root_pos:
            continue
        if cp.root_anchor is not None and t.form != cp.root_anchor:
            continue
        assignment[cp.root_id] = t.index
        used.add(t.index)
        extend(0)
        used.discard(t.index)
        del assignment[cp.root_id]
    return out


def match_pattern(p: Pattern, s: ParsedSentence) -> list[Embedding]:
    """All embeddings of ``p`` in ``s``, deterministically ordered."""
    found = _match_compiled(compile_pattern(p), index_sentence(s))
    return [Embedding(mapping=tuple(sorted(m.items()))) for m in found]


def fill_slots(
    e: Embedding,
    p: Pattern,
    s: ParsedSentence,
    punct_pos: str = PUNCT_POS,
    _idx: _SentenceIndex | None = None,
) -> Triple | None:
    """Render a triple from an embedding, or None if a slot comes up empty.

    Each slot takes the union of its mapped tokens' full subtrees minus
    the subtrees of tokens mapped by pattern nodes not carrying that role;
    punctuation tokens are dropped from the rendered strings.
    """
    idx = _idx or index_sentence(s)
    mapping = e.as_dict()
    role_of = {nid: p.slot_map.get(nid) for nid in mapping}

    spans: dict[str, tuple[int, ...]] = {}
    parts: dict[str, str] = {}
    for role in (ARG1, REL, ARG2):
        members: set[int] = set()
        for nid, tok in mapping.items():
            if role_of[nid] == role:
                members.update(idx.subtree(tok))
        for nid, tok in mapping.items():
            if role_of[nid] != role and tok in members:
                members -= idx.subtree(tok)
        span = tuple(i for i in sorted(members) if idx.pos[i] != punct_pos)
        if not span:
            return None
        spans[role] = span
        parts[role] = "".join(idx.form[i] for i in span)
    return Triple(
        arg1=parts[ARG1],
        rel=parts[REL],
        arg2=parts[ARG2],
        spans=spans,
        source_pattern=p.pattern_id,
    )


@dataclass(frozen=True)
class ExtractOptions:
    """Pipeline switches for extraction."""

    postprocess: bool = True
    prefilter: bool = True
    filter_mode: str = "auto"  # auto | dense | paper-literal
    punct_pos: str = PUNCT_POS
    postprocess_config: PostprocessConfig | None = None

    def __post_init__(self) -> None:
        if self.filter_mode not in FILTER_MODES:
            raise ValueError(f"filter_mode must be one of {FILTER_MODES}")


@dataclass
class ExtractResult:
    triples: list[Triple]
    survivors: int
    dropped_empty: int = 0


class Extractor:
    """Reusable extraction pipeline bound to one pattern library.

    The compiled patterns and the pattern tensor are immutable after
    construction; one Extractor may serve many sentences (and threads).
    """

    def __init__(self, library, options: ExtractOptions | None = None):
        self.library = library
        self.options = options or ExtractOptions()
        self.scheme = library.scheme
        self._compiled = [compile_pattern(p) for p in library.patterns]
        self._tensor: PatternTensor | None = None
        self._literal: LiteralTensor | None = None
        if self.options.prefilter:
            if self.options.filter_mode == "paper-literal":
                self._literal = LiteralTensor(library.patterns, self.scheme)
            else:
                self._tensor = PatternTensor(library.patterns, self.scheme)
        self._post_cfg = self.options.postprocess_config or default_config()

    def survivors(self, s: ParsedSentence) -> list[int]:
        if not self.options.prefilter:
            return list(range(len(self._compiled)))
        if self._literal is not None:
            return filter_candidates_literal(
                encode_sentence_literal(s, self.scheme), self._literal
            )
        assert self._tensor is not None
        return filter_candidates(
            encode_sentence(s, self.scheme), self._tensor, mode=self.options.filter_mode
        )

    def run(self, s: ParsedSentence) -> ExtractResult:
        idx = index_sentence(s)
        survivors = self.survivors(s)
        triples: list[Triple] = []
        seen: set[tuple[str, str, str]] = set()
        dropped = 0
        for i in survivors:
            cp = self._compiled[i]
            for assignment in _match_compiled(cp, idx):
                emb = Embedding(mapping=tuple(sorted(assignment.items())))
                triple = fill_slots(emb, cp.pattern, s, self.options.punct_pos, _idx=idx)
                if triple is None:
                    dropped += 1
                    continue
                if self.options.postprocess:
                    triple = postprocess_triple(s, triple, self._post_cfg, self.options.punct_pos)
                key = triple.normalized()
                if key in seen:
                    continue
                seen.add(key)
                triples.append(triple)
        return ExtractResult(triples=triples, survivors=len(survivors), dropped_empty=dropped)

    def extract(self, s: ParsedSentence) -> list[Triple]:
        return self.run(s).triples


def extract(s: ParsedSentence, library, options: ExtractOptions | None = None) -> list[Triple]:
    """One-shot extraction; build an :class:`Extractor` for corpus runs."""
    return Extractor(library, options).extract(s)
