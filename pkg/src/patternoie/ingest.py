"""Readers and writers for every on-disk artifact.

Formats (all UTF-8):

* parse file      -- CoNLL-U-like blocks: ``# sent_id = ...`` / ``# text = ...``
                     comments, then one token per line.  10-column lines use
                     the ID/FORM/UPOS/HEAD/DEPREL positions; 5-column lines
                     are the compact ID FORM POS HEAD DEPREL layout.  Extra
                     columns and unknown comments are ignored.
* annotations     -- JSON lines {sent_id, text, triples: [{arg1, rel, arg2}]}
* pattern library -- JSON lines; header {format_version, tag_scheme, stats},
                     then one record per pattern.
* synset gold     -- JSON lines {sent_id, synsets: [[{arg1, rel, arg2}, ...]]}
* extractions     -- JSON lines {sent_id, triples: [{arg1, rel, arg2,
                     source_pattern}]}

Every reader/writer pair round-trips exactly; readers raise
:class:`IngestError` with file/line locations instead of crashing.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .model import (
    ParsedSentence,
    Pattern,
    PatternEdge,
    PatternNode,
    SchemeError,
    TagScheme,
    Token,
    Triple,
    canonical_key,
    default_scheme,
    strip_ws,
    validate_sentence,
)

log = logging.getLogger(__name__)

LIBRARY_FORMAT_VERSION = 1


class IngestError(ValueError):
    """Malformed input data, located by file and (when known) line."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = str(path)
            if line is not None:
                loc += f":{line}"
            loc += ": "
        super().__init__(loc + message)
        self.path = str(path) if path is not None else None
        self.line = line


@dataclass(frozen=True)
class AnnotatedSample:
    """A parsed sentence joined with its gold triples."""

    sent_id: str
    sentence: ParsedSentence
    gold_triples: tuple[Triple, ...]


@dataclass(frozen=True)
class SynsetGold:
    """Per-sentence fact synsets: clusters of triples denoting one fact."""

    sent_id: str
    synsets: tuple[tuple[Triple, ...], ...]


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# parse files
# ---------------------------------------------------------------------------

def iter_parses(path: str | Path, scheme: TagScheme | None = None) -> Iterator[ParsedSentence]:
    """Stream validated sentences from a parse file, preserving file order."""
    scheme = scheme or default_scheme()
    path = Path(path)
    sent_id: str | None = None
    text: str | None = None
    rows: list[tuple[int, Token]] = []
    first_line = 0

    def finish() -> ParsedSentence | None:
        nonlocal sent_id, text, rows, first_line
        if not rows and sent_id is None and text is None:
            first_line = 0  # a bare comment block (e.g. provenance header)
            return None
        if not rows:
            raise IngestError("sentence block has comments but no tokens", path, first_line)
        sid = sent_id if sent_id is not None else f"{path.name}:{first_line}"
        stext = text if text is not None else "".join(t.form for _, t in rows)
        sentence = ParsedSentence(sent_id=sid, text=stext, tokens=tuple(t for _, t in rows))
        problems = validate_sentence(sentence, scheme)
        if problems:
            raise IngestError(
                f"sentence {sid!r} invalid: " + "; ".join(problems), path, first_line
            )
        sent_id = None
        text = None
        rows = []
        first_line = 0
        return sentence

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                done = finish()
                if done is not None:
                    yield done
                continue
            if line.startswith("#"):
                if not rows:
                    if first_line == 0:
                        first_line = lineno
                    body = line[1:].strip()
                    if body.startswith("sent_id"):
                        _, _, value = body.partition("=")
                        sent_id = value.strip()
                    elif body.startswith("text"):
                        _, _, value = body.partition("=")
                        value = value.lstrip(" ")
                        text = value
                continue
            cols = line.split("\t")
            if len(cols) >= 8:
                id_s, form, pos, head_s, dep = cols[0], cols[1], cols[3], cols[6], cols[7]
            elif len(cols) == 5:
                id_s, form, pos, head_s, dep = cols
            else:
                raise IngestError(f"expected 5 or >=8 tab-separated columns, got {len(cols)}", path, lineno)
            try:
                idx = int(id_s)
            except ValueError:
                raise IngestError(f"non-integer token id {id_s!r}", path, lineno) from None
            try:
                head = int(head_s)
            except ValueError:
                raise IngestError(f"non-integer head {head_s!r}", path, lineno) from None
            if not rows and first_line == 0:
                first_line = lineno
            if idx != len(rows) + 1:
                raise IngestError(f"token id {idx} out of sequence (expected {len(rows) + 1})", path, lineno)
            rows.append((lineno, Token(index=idx, form=form, pos=pos, head=head, dep=dep)))
        done = finish()
        if done is not None:
            yield done


def read_parses(path: str | Path, scheme: TagScheme | None = None) -> list[ParsedSentence]:
    """All sentences of a parse file (see :func:`iter_parses`)."""
    return list(iter_parses(path, scheme))


def write_parses(path: str | Path, sentences: Iterable[ParsedSentence]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(f"# sent_id = {s.sent_id}\n")
            fh.write(f"# text = {s.text}\n")
            for t in s.tokens:
                fh.write(
                    f"{t.index}\t{t.form}\t_\t{t.pos}\t_\t_\t{t.head}\t{t.dep}\t_\t_\n"
                )
            fh.write("\n")


# ---------------------------------------------------------------------------
# annotations
# ---------------------------------------------------------------------------

def _triple_from_record(rec: Mapping, path: Path, lineno: int, with_source: bool = False) -> Triple:
    try:
        arg1, rel, arg2 = rec["arg1"], rec["rel"], rec["arg2"]
    except (KeyError, TypeError):
        raise IngestError("triple record needs arg1/rel/arg2", path, lineno) from None
    source = rec.get("source_pattern") if with_source else None
    return Triple(arg1=str(arg1), rel=str(rel), arg2=str(arg2), source_pattern=source)


def _iter_json_lines(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise IngestError(f"bad JSON: {e.msg}", path, lineno) from None
            if not isinstance(rec, dict):
                raise IngestError("record is not a JSON object", path, lineno)
            yield lineno, rec


def read_annotations(path: str | Path, parses: Iterable[ParsedSentence]) -> list[AnnotatedSample]:
    """Join annotation records with parsed sentences by sent_id.

    Duplicate sent_ids are merged; identical duplicate triples are dropped
    (with a warning count).  An annotation whose sent_id has no parse is an
    error.
    """
    path = Path(path)
    by_id = {s.sent_id: s for s in parses}
    merged: dict[str, list[Triple]] = {}
    order: list[str] = []
    dropped = 0
    for lineno, rec in _iter_json_lines(path):
        sid = rec.get("sent_id")
        if not isinstance(sid, str) or not sid:
            raise IngestError("missing sent_id", path, lineno)
        if sid not in by_id:
            raise IngestError(f"annotation references unknown sent_id {sid!r}", path, lineno)
        triples_raw = rec.get("triples")
        if not isinstance(triples_raw, list) or not triples_raw:
            raise IngestError(f"sentence {sid!r}: gold triples must be non-empty", path, lineno)
        triples = [_triple_from_record(t, path, lineno) for t in triples_raw]
        for t in triples:
            if any(not strip_ws(slot) for slot in t.slots()):
                raise IngestError(f"sentence {sid!r}: empty gold slot", path, lineno)
        if sid not in merged:
            merged[sid] = []
            order.append(sid)
        seen = {t.normalized() for t in merged[sid]}
        for t in triples:
            if t.normalized() in seen:
                dropped += 1
                continue
            seen.add(t.normalized())
            merged[sid].append(t)
    if dropped:
        log.warning("%s: dropped %d duplicate gold triples", path, dropped)
    return [
        AnnotatedSample(sent_id=sid, sentence=by_id[sid], gold_triples=tuple(merged[sid]))
        for sid in order
    ]


def read_gold_triples(path: str | Path) -> dict[str, list[Triple]]:
    """Gold triples keyed by sent_id (annotation format, parses not needed)."""
    path = Path(path)
    out: dict[str, list[Triple]] = {}
    for lineno, rec in _iter_json_lines(path):
        sid = rec.get("sent_id")
        if not isinstance(sid, str) or not sid:
            raise IngestError("missing sent_id", path, lineno)
        triples_raw = rec.get("triples")
        if not isinstance(triples_raw, list):
            raise IngestError(f"sentence {sid!r}: missing triples list", path, lineno)
        bucket = out.setdefault(sid, [])
        seen = {t.normalized() for t in bucket}
        for t in (_triple_from_record(t, path, lineno) for t in triples_raw):
            if t.normalized() not in seen:
                seen.add(t.normalized())
                bucket.append(t)
    return out


# ---------------------------------------------------------------------------
# pattern libraries
# ---------------------------------------------------------------------------

def write_pattern_library(path: str | Path, library) -> None:
    """Serialize a PatternLibrary deterministically (byte-stable round-trip)."""
    from .induction import PatternLibrary  # local import to avoid a cycle

    assert isinstance(library, PatternLibrary)
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format_version": LIBRARY_FORMAT_VERSION,
            "tag_scheme": library.scheme.to_dict(),
            "stats": dict(sorted(library.stats.items())),
        }
        fh.write(_dumps(header) + "\n")
        for p in library.patterns:
            key = canonical_key(p)
            rec = {
                "pattern_id": p.pattern_id,
                "canonical_key": key,
                "nodes": [[n.node_id, n.pos, n.lexical_anchor] for n in p.nodes],
                "edges": [[e.head_node, e.dep, e.dependent_node] for e in p.edges],
                "slot_map": {str(k): v for k, v in sorted(p.slot_map.items())},
                "support": library.counts[key],
                "provenance": list(p.provenance),
            }
            fh.write(_dumps(rec) + "\n")


def read_pattern_library(path: str | Path):
    """Read a pattern library; verifies version and per-record integrity."""
    from .induction import PatternLibrary

    path = Path(path)
    lines = _iter_json_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise IngestError("empty library file", path) from None
    version = header.get("format_version")
    if version != LIBRARY_FORMAT_VERSION:
        raise IngestError(
            f"unsupported format_version {version!r} (expected {LIBRARY_FORMAT_VERSION})",
            path, lineno,
        )
    try:
        scheme = TagScheme.from_dict(header["tag_scheme"])
    except (KeyError, SchemeError) as e:
        raise IngestError(f"bad tag_scheme header: {e}", path, lineno) from None
    stats_raw = header.get("stats", {})
    stats = {str(k): int(v) for k, v in stats_raw.items()}

    patterns: list[Pattern] = []
    counts: dict[str, int] = {}
    for lineno, rec in lines:
        pid = str(rec.get("pattern_id", f"<line {lineno}>"))
        try:
            nodes = tuple(
                PatternNode(node_id=int(n[0]), pos=str(n[1]),
                            lexical_anchor=None if n[2] is None else str(n[2]))
                for n in rec["nodes"]
            )
            edges = tuple(
                PatternEdge(head_node=int(e[0]), dep=str(e[1]), dependent_node=int(e[2]))
                for e in rec["edges"]
            )
            slot_map = {int(k): str(v) for k, v in rec["slot_map"].items()}
            support = int(rec["support"])
            provenance = tuple(str(x) for x in rec.get("provenance", []))
            stored_key = rec["canonical_key"]
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise IngestError(f"corrupted record for pattern {pid}: {e}", path, lineno) from None
        pattern = Pattern(pattern_id=pid, nodes=nodes, edges=edges,
                          slot_map=slot_map, provenance=provenance)
        try:
            key = canonical_key(pattern)
        except Exception as e:
            raise IngestError(f"corrupted record for pattern {pid}: {e}", path, lineno) from None
        if key != stored_key:
            raise IngestError(
                f"corrupted record for pattern {pid}: canonical_key mismatch", path, lineno
            )
        if key in counts:
            raise IngestError(f"duplicate pattern {pid} (same canonical key)", path, lineno)
        if support < 1:
            raise IngestError(f"corrupted record for pattern {pid}: support < 1", path, lineno)
        patterns.append(pattern)
        counts[key] = support
    return PatternLibrary(scheme=scheme, patterns=tuple(patterns), counts=counts, stats=stats)


# ---------------------------------------------------------------------------
# synset gold and extraction output
# ---------------------------------------------------------------------------

def read_synset_gold(path: str | Path) -> list[SynsetGold]:
    path = Path(path)
    out: list[SynsetGold] = []
    seen_ids: set[str] = set()
    for lineno, rec in _iter_json_lines(path):
        sid = rec.get("sent_id")
        if not isinstance(sid, str) or not sid:
            raise IngestError("missing sent_id", path, lineno)
        if sid in seen_ids:
            raise IngestError(f"duplicate sent_id {sid!r}", path, lineno)
        seen_ids.add(sid)
        synsets_raw = rec.get("synsets")
        if not isinstance(synsets_raw, list):
            raise IngestError(f"sentence {sid!r}: missing synsets list", path, lineno)
        synsets: list[tuple[Triple, ...]] = []
        used: set[tuple[str, str, str]] = set()
        for group in synsets_raw:
            if not isinstance(group, list) or not group:
                raise IngestError(f"sentence {sid!r}: empty synset", path, lineno)
            triples = tuple(_triple_from_record(t, path, lineno) for t in group)
            for t in triples:
                if t.normalized() in used:
                    raise IngestError(
                        f"sentence {sid!r}: triple appears in two synsets", path, lineno
                    )
                used.add(t.normalized())
            synsets.append(triples)
        out.append(SynsetGold(sent_id=sid, synsets=tuple(synsets)))
    return out


def read_extractions(path: str | Path) -> dict[str, list[Triple]]:
    path = Path(path)
    out: dict[str, list[Triple]] = {}
    for lineno, rec in _iter_json_lines(path):
        sid = rec.get("sent_id")
        if not isinstance(sid, str) or not sid:
            raise IngestError("missing sent_id", path, lineno)
        if sid in out:
            raise IngestError(f"duplicate sent_id {sid!r}", path, lineno)
        triples_raw = rec.get("triples")
        if not isinstance(triples_raw, list):
            raise IngestError(f"sentence {sid!r}: missing triples list", path, lineno)
        out[sid] = [_triple_from_record(t, path, lineno, with_source=True) for t in triples_raw]
    return out


def write_extractions(path: str | Path, by_sentence: Mapping[str, Iterable[Triple]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sid, triples in by_sentence.items():
            fh.write(extraction_line(sid, triples) + "\n")


def extraction_line(sent_id: str, triples: Iterable[Triple]) -> str:
    """One serialized extraction record (used by streaming writers)."""
    rec = {
        "sent_id": sent_id,
        "triples": [
            {"arg1": t.arg1, "rel": t.rel, "arg2": t.arg2, "source_pattern": t.source_pattern}
            for t in triples
        ],
    }
    return _dumps(rec)


# ---------------------------------------------------------------------------
# tag scheme files
# ---------------------------------------------------------------------------

def read_scheme(path: str | Path) -> TagScheme:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as e:
            raise IngestError(f"bad JSON: {e.msg}", path) from None
    try:
        return TagScheme.from_dict(d)
    except Exception as e:
        raise IngestError(f"bad scheme file: {e}", path) from None


def write_scheme(path: str | Path, scheme: TagScheme) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scheme.to_dict(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
