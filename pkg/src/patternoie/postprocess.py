"""Triple expansion: recover argument modifiers/quantifiers and attach
negation adverbials to relations.

Growth is restricted to dependency-connected, surface-contiguous tokens so
expansion never drags in unrelated material.  All operations are idempotent
and never remove tokens.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .model import ARG1, ARG2, PUNCT_POS, REL, ParsedSentence, Triple

log = logging.getLogger(__name__)


def load_negation_lexicon(path: str | Path) -> frozenset[str]:
    """Negation surface forms, one per line; blank lines and # comments skipped."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip()
            if word and not word.startswith("#"):
                words.add(word)
    return frozenset(words)


def _default_negation_words() -> frozenset[str]:
    text = resources.files("patternoie").joinpath("data/negation_words.txt").read_text("utf-8")
    return frozenset(w for w in (line.strip() for line in text.splitlines())
                     if w and not w.startswith("#"))


@dataclass(frozen=True)
class PostprocessConfig:
    """Label sets driving expansion; defaults match the LTP-style scheme."""

    negation_words: frozenset[str]
    attr_deps: tuple[str, ...] = ("ATT", "RAD")
    quant_pos: tuple[str, ...] = ("m", "q")
    adverbial_dep: str = "ADV"


def default_config() -> PostprocessConfig:
    return PostprocessConfig(negation_words=_default_negation_words())


def expand_argument(
    s: ParsedSentence,
    span: tuple[int, ...],
    head: int,
    config: PostprocessConfig | None = None,
    blocked: frozenset[int] = frozenset(),
) -> tuple[int, ...]:
    """Grow an argument span over attribute/quantifier dependents.

    Adjoins dependents of in-span tokens whose dep is an attribute /
    right-attachment or whose POS is numeral/quantifier, one surface-
    adjacent token at a time; tokens in ``blocked`` (other slots) are
    never absorbed.  Never removes tokens.
    """
    config = config or default_config()
    assert head in span
    cur = set(span)
    changed = True
    while changed:
        changed = False
        lo, hi = min(cur), max(cur)
        for cand in (lo - 1, hi + 1):
            if cand < 1 or cand > len(s.tokens) or cand in blocked:
                continue
            tok = s.token(cand)
            if tok.head not in cur:
                continue
            if tok.dep in config.attr_deps or tok.pos in config.quant_pos:
                cur.add(cand)
                changed = True
                break
    return tuple(sorted(cur))


def attach_negation(
    s: ParsedSentence,
    rel_span: tuple[int, ...],
    rel_head: int,
    config: PostprocessConfig | None = None,
    blocked: frozenset[int] = frozenset(),
) -> tuple[int, ...]:
    """Prepend negation adverbials of the relation head, transitively leftward."""
    config = config or default_config()
    cur = set(rel_span)
    while True:
        cand = min(cur) - 1
        if cand < 1 or cand in blocked:
            break
        tok = s.token(cand)
        if (
            tok.head == rel_head
            and tok.dep == config.adverbial_dep
            and tok.form in config.negation_words
        ):
            cur.add(cand)
            continue
        break
    return tuple(sorted(cur))


def _contiguous(span: tuple[int, ...]) -> bool:
    return bool(span) and span[-1] - span[0] + 1 == len(span)


def _render(s: ParsedSentence, span: tuple[int, ...], punct_pos: str) -> tuple[tuple[int, ...], str]:
    kept = tuple(i for i in span if s.token(i).pos != punct_pos)
    return kept, "".join(s.token(i).form for i in kept)


def _span_head(s: ParsedSentence, span: tuple[int, ...]) -> int:
    inside = set(span)
    external = [i for i in span if s.token(i).head not in inside]
    if not external:
        return span[0]
    return min(external, key=lambda i: (s.depth(i), i))


def postprocess_triple(
    s: ParsedSentence,
    t: Triple,
    config: PostprocessConfig | None = None,
    punct_pos: str = PUNCT_POS,
) -> Triple:
    """Expand both arguments and the relation span of one extracted triple.

    Idempotent; a triple without recorded spans (externally loaded) is
    returned unchanged with a warning.  Slots never absorb each other's
    tokens, so expanded spans stay mutually disjoint.
    """
    config = config or default_config()
    if not t.spans or any(role not in t.spans for role in (ARG1, REL, ARG2)):
        log.warning("triple (%s, %s, %s) has no spans; skipping post-processing",
                    t.arg1, t.rel, t.arg2)
        return t

    spans = {role: tuple(t.spans[role]) for role in (ARG1, REL, ARG2)}
    new_spans: dict[str, tuple[int, ...]] = {}
    for role in (ARG1, REL, ARG2):
        span = spans[role]
        blocked = frozenset(i for r, sp in spans.items() if r != role for i in sp)
        if not _contiguous(span):
            log.debug("sentence %s: %s span %s not contiguous; left as is",
                      s.sent_id, role, span)
            new_spans[role] = span
            continue
        head = _span_head(s, span)
        if role == REL:
            new_spans[role] = attach_negation(s, span, head, config, blocked)
        else:
            new_spans[role] = expand_argument(s, span, head, config, blocked)

    rendered = {role: _render(s, span, punct_pos) for role, span in new_spans.items()}
    return replace(
        t,
        arg1=rendered[ARG1][1],
        rel=rendered[REL][1],
        arg2=rendered[ARG2][1],
        spans={role: rendered[role][0] for role in (ARG1, REL, ARG2)},
    )
