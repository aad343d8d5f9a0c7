"""Batched candidate prefilter over dependency-edge count signatures.

Patterns and sentences are encoded as occurrence counts bucketed by
(head POS, dependency label, dependent POS).  A pattern can only match a
sentence if the sentence's count in every bucket is at least the
pattern's, so subtracting the stacked pattern tensor from the broadcast
sentence signature and discarding patterns with a negative residual is a
sound necessary-condition filter (no false negatives; false survivals are
resolved by the exact matcher).

Counts deviate from the literal code-valued POSxPOS encoding, which is
unsound under subtraction; that encoding is kept as the "literal" mode
for comparison runs only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ParsedSentence, Pattern, SchemeError, TagScheme

COUNT_CAP = 255  # saturating uint8; unreachable for sentence-scale trees


@dataclass(frozen=True)
class SignatureMatrix:
    """Edge counts indexed by (head POS, dep label, dependent POS)."""

    scheme: TagScheme
    counts: np.ndarray  # shape (n_pos, n_dep, n_pos), uint8

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def flat(self) -> np.ndarray:
        return self.counts.reshape(-1)


def _empty_counts(scheme: TagScheme) -> np.ndarray:
    n_pos = len(scheme.pos_tags)
    n_dep = len(scheme.dep_labels)
    return np.zeros((n_pos, n_dep, n_pos), dtype=np.uint8)


def _bump(counts: np.ndarray, hp: int, dp: int, tp: int) -> None:
    if counts[hp, dp, tp] < COUNT_CAP:
        counts[hp, dp, tp] += 1


def encode_pattern(p: Pattern, scheme: TagScheme) -> SignatureMatrix:
    """Count signature of a pattern's edges; lexical anchors are not encoded."""
    counts = _empty_counts(scheme)
    nodes = p.node_by_id
    for e in p.edges:
        try:
            hp = scheme.pos_index[nodes[e.head_node].pos]
            tp = scheme.pos_index[nodes[e.dependent_node].pos]
        except KeyError as bad:
            raise SchemeError(f"pattern {p.pattern_id}: pos {bad} not in scheme") from None
        try:
            dp = scheme.dep_index[e.dep]
        except KeyError:
            raise SchemeError(f"pattern {p.pattern_id}: dep {e.dep!r} not in scheme") from None
        _bump(counts, hp, dp, tp)
    return SignatureMatrix(scheme=scheme, counts=counts)


def encode_sentence(s: ParsedSentence, scheme: TagScheme) -> SignatureMatrix:
    """Count signature over all dependency edges; the root edge is excluded."""
    counts = _empty_counts(scheme)
    for t in s.tokens:
        if t.head == 0:
            continue
        head = s.token(t.head)
        try:
            hp = scheme.pos_index[head.pos]
            tp = scheme.pos_index[t.pos]
        except KeyError as bad:
            raise SchemeError(f"sentence {s.sent_id}: pos {bad} not in scheme") from None
        try:
            dp = scheme.dep_index[t.dep]
        except KeyError:
            raise SchemeError(f"sentence {s.sent_id}: dep {t.dep!r} not in scheme") from None
        _bump(counts, hp, dp, tp)
    return SignatureMatrix(scheme=scheme, counts=counts)


class PatternTensor:
    """The stacked signatures of a pattern list, ready for batch filtering.

    Nonzero cells are stored sparsely (patterns have a handful of edges);
    a dense matrix over the active cell columns is materialized on demand
    for the broadcast-subtraction kernel.
    """

    def __init__(self, patterns: Sequence[Pattern], scheme: TagScheme):
        self.scheme = scheme
        self.pattern_ids = tuple(p.pattern_id for p in patterns)
        self.n_patterns = len(patterns)
        n_pos = len(scheme.pos_tags)
        n_dep = len(scheme.dep_labels)
        self.n_cells = n_pos * n_pos * n_dep
        self._shape = (n_pos, n_dep, n_pos)

        rows: list[int] = []
        cells: list[int] = []
        vals: list[int] = []
        for i, p in enumerate(patterns):
            sig = encode_pattern(p, scheme)
            nz = np.flatnonzero(sig.counts)
            rows.extend([i] * len(nz))
            cells.extend(nz.tolist())
            vals.extend(sig.counts.reshape(-1)[nz].tolist())
        self._rows = np.asarray(rows, dtype=np.int64)
        self._cells = np.asarray(cells, dtype=np.int64)
        self._vals = np.asarray(vals, dtype=np.int16)
        self._active: np.ndarray | None = None
        self._dense: np.ndarray | None = None

    def signature(self, i: int) -> np.ndarray:
        """Reconstructed signature of pattern ``i`` (equals encode_pattern)."""
        out = np.zeros(self.n_cells, dtype=np.uint8)
        mask = self._rows == i
        out[self._cells[mask]] = self._vals[mask].astype(np.uint8)
        return out.reshape(self._shape)

    def stacked(self) -> np.ndarray:
        """Full (n_patterns, n_pos, n_dep, n_pos) stack; for small tensors."""
        out = np.zeros((self.n_patterns, self.n_cells), dtype=np.uint8)
        out[self._rows, self._cells] = self._vals.astype(np.uint8)
        return out.reshape((self.n_patterns,) + self._shape)

    def _dense_active(self) -> tuple[np.ndarray, np.ndarray]:
        if self._active is None:
            self._active = np.unique(self._cells)
            dense = np.zeros((self.n_patterns, len(self._active)), dtype=np.int16)
            cols = np.searchsorted(self._active, self._cells)
            dense[self._rows, cols] = self._vals
            self._dense = dense
        return self._active, self._dense


def build_tensor(library) -> PatternTensor:
    """PatternTensor for a PatternLibrary, preserving library order."""
    return PatternTensor(library.patterns, library.scheme)


def filter_candidates(
    sentence_sig: SignatureMatrix,
    tensor: PatternTensor,
    mode: str = "auto",
) -> list[int]:
    """Indices of patterns whose signature the sentence dominates cellwise.

    Equivalent to the per-pattern loop "survive iff elementwise
    sentence >= pattern"; computed batched over the whole tensor.  ``mode``
    "dense" forces the broadcast-subtraction kernel, "auto" uses the sparse
    kernel (same result, less memory traffic).
    """
    if sentence_sig.scheme != tensor.scheme:
        raise SchemeError("sentence and pattern tensor use different tag schemes")
    if tensor.n_patterns == 0:
        return []
    flat = sentence_sig.flat().astype(np.int16)
    if mode == "dense":
        active, dense = tensor._dense_active()
        residual = flat[active][None, :] - dense
        ok = (residual >= 0).all(axis=1)
        return np.flatnonzero(ok).tolist()
    if mode != "auto":
        raise ValueError(f"unknown filter mode {mode!r}")
    if len(tensor._cells) == 0:
        return list(range(tensor.n_patterns))
    bad = tensor._vals > flat[tensor._cells]
    if not bad.any():
        return list(range(tensor.n_patterns))
    violations = np.bincount(tensor._rows[bad], minlength=tensor.n_patterns)
    return np.flatnonzero(violations == 0).tolist()


# ---------------------------------------------------------------------------
# literal mode: the code-valued POSxPOS encoding, for comparison runs only
# ---------------------------------------------------------------------------

def encode_pattern_literal(p: Pattern, scheme: TagScheme) -> np.ndarray:
    """POSxPOS matrix whose cells hold a dependency code (0 = none).

    A cell holds the code of the last edge written into it, so two edges
    sharing a POS pair clobber each other; this encoding can produce false
    negatives under subtraction and exists only for measurement.
    """
    n_pos = len(scheme.pos_tags)
    mat = np.zeros((n_pos, n_pos), dtype=np.int16)
    nodes = p.node_by_id
    for e in p.edges:
        hp = scheme.pos_index[nodes[e.head_node].pos]
        tp = scheme.pos_index[nodes[e.dependent_node].pos]
        mat[hp, tp] = scheme.dep_index[e.dep] + 1
    return mat


def encode_sentence_literal(s: ParsedSentence, scheme: TagScheme) -> np.ndarray:
    n_pos = len(scheme.pos_tags)
    mat = np.zeros((n_pos, n_pos), dtype=np.int16)
    for t in s.tokens:
        if t.head == 0:
            continue
        hp = scheme.pos_index[s.token(t.head).pos]
        tp = scheme.pos_index[t.pos]
        mat[hp, tp] = scheme.dep_index[t.dep] + 1
    return mat


class LiteralTensor:
    """Stack of literal pattern matrices."""

    def __init__(self, patterns: Sequence[Pattern], scheme: TagScheme):
        self.scheme = scheme
        self.n_patterns = len(patterns)
        n_pos = len(scheme.pos_tags)
        self.stack = np.zeros((self.n_patterns, n_pos * n_pos), dtype=np.int16)
        for i, p in enumerate(patterns):
            self.stack[i] = encode_pattern_literal(p, scheme).reshape(-1)


def filter_candidates_literal(sentence_mat: np.ndarray, tensor: LiteralTensor) -> list[int]:
    """Literal-mode survivors: no negative cell after subtraction."""
    if tensor.n_patterns == 0:
        return []
    residual = sentence_mat.reshape(-1)[None, :].astype(np.int16) - tensor.stack
    ok = (residual >= 0).all(axis=1)
    return np.flatnonzero(ok).tolist()
