"""Extraction scoring: character-overlap pair scores, greedy corpus
aggregation, and fact-synset precision/recall.

Character overlap is multiset intersection after whitespace stripping
(an LCS variant is available for sensitivity runs).  Corpus precision is
the summed matched-overlap over the summed extraction length; recall is
the same numerator over the summed gold length.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .ingest import SynsetGold
from .model import Triple, strip_ws

OVERLAP_MODES = ("multiset", "lcs")
MATCHING_MODES = ("greedy", "best-per-triple")


@dataclass(frozen=True)
class PairScore:
    """Scores of one (extraction, gold) triple pair."""

    precision: float
    recall: float
    f1: float
    overlaps: tuple[int, int, int]  # common chars per slot (arg1, rel, arg2)


@dataclass(frozen=True)
class CorpusScore:
    """Aggregate scores plus the raw numerators/denominators behind them."""

    precision: float
    recall: float
    f1: float
    precision_num: float
    precision_den: float
    recall_num: float
    recall_den: float

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "precision_num": self.precision_num,
            "precision_den": self.precision_den,
            "recall_num": self.recall_num,
            "recall_den": self.recall_den,
        }


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both components vanish."""
    if precision + recall <= 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _lcs_len(a: str, b: str) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for ch_a in a:
        cur = [0] * (len(b) + 1)
        for j, ch_b in enumerate(b, start=1):
            if ch_a == ch_b:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def char_overlap(a: str, b: str, mode: str = "multiset") -> int:
    """Number of common characters between two strings (whitespace ignored).

    "multiset" counts each character min(count_a, count_b) times; "lcs"
    uses longest-common-subsequence length instead.
    """
    a = strip_ws(a)
    b = strip_ws(b)
    if mode == "multiset":
        return sum((Counter(a) & Counter(b)).values())
    if mode == "lcs":
        return _lcs_len(a, b)
    raise ValueError(f"unknown overlap mode {mode!r}")


def triple_chars(t: Triple) -> int:
    """Total characters across all three slots, whitespace stripped."""
    return sum(len(strip_ws(slot)) for slot in t.slots())


def pair_scores(e: Triple, g: Triple, mode: str = "multiset") -> PairScore:
    """Per-pair precision/recall/F1 from slotwise character overlap."""
    overlaps = tuple(
        char_overlap(se, sg, mode) for se, sg in zip(e.slots(), g.slots())
    )
    common = sum(overlaps)
    e_len = triple_chars(e)
    g_len = triple_chars(g)
    precision = common / e_len if e_len else 0.0
    recall = common / g_len if g_len else 0.0
    return PairScore(
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        overlaps=overlaps,  # type: ignore[arg-type]
    )


def greedy_match(
    E_i: Sequence[Triple],
    G_i: Sequence[Triple],
    mode: str = "multiset",
) -> list[tuple[int, int, PairScore]]:
    """One-to-one greedy pairing by descending pair F1.

    Ties break on lower extraction index, then lower gold index; pairing
    stops when the best remaining F1 is 0 or one side is exhausted.
    """
    scored = []
    for ei, e in enumerate(E_i):
        for gi, g in enumerate(G_i):
            ps = pair_scores(e, g, mode)
            if ps.f1 > 0.0:
                scored.append((-ps.f1, ei, gi, ps))
    scored.sort(key=lambda item: item[:3])
    used_e: set[int] = set()
    used_g: set[int] = set()
    matches: list[tuple[int, int, PairScore]] = []
    for _, ei, gi, ps in scored:
        if ei in used_e or gi in used_g:
            continue
        used_e.add(ei)
        used_g.add(gi)
        matches.append((ei, gi, ps))
    return matches


def _sentence_tallies(
    E_i: Sequence[Triple],
    G_i: Sequence[Triple],
    mode: str,
    matching: str,
) -> tuple[float, float, float, float]:
    """(cw_extracted, extracted_chars, cw_gold, gold_chars) for one sentence."""
    e_len = sum(triple_chars(e) for e in E_i)
    g_len = sum(triple_chars(g) for g in G_i)
    if matching == "greedy":
        matches = greedy_match(E_i, G_i, mode)
        common = sum(sum(ps.overlaps) for _, _, ps in matches)
        return common, e_len, common, g_len
    if matching == "best-per-triple":
        cw_e = sum(
            max((sum(pair_scores(e, g, mode).overlaps) for g in G_i), default=0)
            for e in E_i
        )
        cw_g = sum(
            max((sum(pair_scores(e, g, mode).overlaps) for e in E_i), default=0)
            for g in G_i
        )
        return cw_e, e_len, cw_g, g_len
    raise ValueError(f"unknown matching mode {matching!r}")


def corpus_scores(
    extractions: Mapping[str, Sequence[Triple]],
    gold: Mapping[str, Sequence[Triple]],
    mode: str = "multiset",
    matching: str = "greedy",
) -> CorpusScore:
    """Aggregate character-overlap scores over a corpus.

    Sentence ids are matched across the two maps; a missing side counts
    as an empty list.
    """
    ids = list(dict.fromkeys(list(gold.keys()) + list(extractions.keys())))
    cw_e = e_len = cw_g = g_len = 0.0
    for sid in ids:
        s_cw_e, s_e_len, s_cw_g, s_g_len = _sentence_tallies(
            list(extractions.get(sid, ())), list(gold.get(sid, ())), mode, matching
        )
        cw_e += s_cw_e
        e_len += s_e_len
        cw_g += s_cw_g
        g_len += s_g_len
    precision = cw_e / e_len if e_len else 0.0
    recall = cw_g / g_len if g_len else 0.0
    return CorpusScore(
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        precision_num=cw_e,
        precision_den=e_len,
        recall_num=cw_g,
        recall_den=g_len,
    )


def sentence_breakdown(
    extractions: Mapping[str, Sequence[Triple]],
    gold: Mapping[str, Sequence[Triple]],
    mode: str = "multiset",
    matching: str = "greedy",
) -> list[dict]:
    """Per-sentence numerators/denominators (the optional report detail)."""
    ids = list(dict.fromkeys(list(gold.keys()) + list(extractions.keys())))
    out = []
    for sid in ids:
        cw_e, e_len, cw_g, g_len = _sentence_tallies(
            list(extractions.get(sid, ())), list(gold.get(sid, ())), mode, matching
        )
        out.append({
            "sent_id": sid,
            "precision_num": cw_e,
            "precision_den": e_len,
            "recall_num": cw_g,
            "recall_den": g_len,
        })
    return out


def synset_scores(
    predictions: Mapping[str, Sequence[Triple]],
    gold: Iterable[SynsetGold],
) -> CorpusScore:
    """Fact-synset scoring: a prediction is correct iff it exactly equals
    (whitespace-stripped) some triple of some synset of its sentence;
    recall is the fraction of synsets hit at least once.
    """
    gold_list = list(gold)
    lookup: dict[str, dict[tuple[str, str, str], int]] = {}
    n_synsets = 0
    for sg in gold_list:
        table: dict[tuple[str, str, str], int] = {}
        for k, group in enumerate(sg.synsets):
            n_synsets += 1
            for t in group:
                table[t.normalized()] = k
        lookup[sg.sent_id] = table

    n_predictions = 0
    n_correct = 0
    covered: set[tuple[str, int]] = set()
    for sid, triples in predictions.items():
        table = lookup.get(sid, {})
        for t in triples:
            n_predictions += 1
            hit = table.get(t.normalized())
            if hit is not None:
                n_correct += 1
                covered.add((sid, hit))

    precision = n_correct / n_predictions if n_predictions else 0.0
    recall = len(covered) / n_synsets if n_synsets else 0.0
    return CorpusScore(
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        precision_num=n_correct,
        precision_den=n_predictions,
        recall_num=len(covered),
        recall_den=n_synsets,
    )
