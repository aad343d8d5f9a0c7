"""Command-line pipeline: validate, induce, extract, eval, bench.

Logs go to standard error; data goes to files.  Exit codes: 0 success,
1 I/O or format error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import multiprocessing
import os
import sys
import time
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .evaluation import corpus_scores, sentence_breakdown, synset_scores
from .induction import ANCHOR_POLICIES, InductionConfig, PatternLibrary, build_library
from .ingest import (
    IngestError,
    extraction_line,
    iter_parses,
    read_annotations,
    read_extractions,
    read_gold_triples,
    read_parses,
    read_pattern_library,
    read_scheme,
    read_synset_gold,
    write_pattern_library,
)
from .matcher import ExtractOptions, Extractor, compile_pattern, _match_compiled, index_sentence
from .model import ParsedSentence, TagScheme, default_scheme, validate_sentence
from .postprocess import default_config, load_negation_lexicon

log = logging.getLogger("patternoie")

NOMINAL_POS = ("n", "nd", "nh", "ni", "nl", "ns", "nt", "nz")


def _load_scheme(path: str | None) -> TagScheme:
    return read_scheme(path) if path else default_scheme()


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    scheme = _load_scheme(args.scheme)
    count = 0
    for sentence in iter_parses(args.parses, scheme):
        # iter_parses already rejects invalid sentences; re-check defensively
        problems = validate_sentence(sentence, scheme)
        if problems:
            raise IngestError("; ".join(problems), args.parses)
        count += 1
    log.info("validated %d sentences, 0 violations", count)
    print(f"sentences: {count}")
    print("violations: 0")
    return 0


# ---------------------------------------------------------------------------
# induce
# ---------------------------------------------------------------------------

def _structure_bucket(pattern, scheme: TagScheme) -> str:
    """Rough structure class of a pattern, for reporting only."""
    deps = {e.dep for e in pattern.edges}
    if "POB" in deps:
        return "pob"
    if "COO" in deps:
        return "svocoo"
    rel_nodes = [n for n in pattern.nodes if pattern.slot_map.get(n.node_id) == "REL"]
    if rel_nodes and all(n.pos in NOMINAL_POS for n in rel_nodes):
        return "nominal"
    return "svo"


def cmd_induce(args: argparse.Namespace) -> int:
    scheme = _load_scheme(args.scheme)
    parses = read_parses(args.parses, scheme)
    samples = read_annotations(args.annotations, parses)
    config = InductionConfig(anchors=args.anchors)
    library = build_library(samples, scheme, config)
    write_pattern_library(args.out, library)

    buckets: dict[str, int] = {}
    for p, key in zip(library.patterns, library.counts):
        bucket = _structure_bucket(p, scheme)
        buckets[bucket] = buckets.get(bucket, 0) + library.counts[key]
    stats = dict(library.stats)
    log.info("induced library: %s", stats)
    print(f"sentences: {len(samples)}")
    for k in ("samples_seen", "samples_failed", "distinct_patterns"):
        print(f"{k}: {stats[k]}")
    for bucket in sorted(buckets):
        print(f"triples[{bucket}]: {buckets[bucket]}")
    return 0


# ---------------------------------------------------------------------------
# extract
# ---------------------------------------------------------------------------

_WORKER_EXTRACTOR: Extractor | None = None


def _init_worker(library: PatternLibrary, options: ExtractOptions) -> None:
    global _WORKER_EXTRACTOR
    _WORKER_EXTRACTOR = Extractor(library, options)


def _extract_one(sentence: ParsedSentence) -> tuple[str, str, int, int]:
    assert _WORKER_EXTRACTOR is not None
    result = _WORKER_EXTRACTOR.run(sentence)
    return (
        sentence.sent_id,
        extraction_line(sentence.sent_id, result.triples),
        result.survivors,
        len(result.triples),
    )


def cmd_extract(args: argparse.Namespace) -> int:
    library = read_pattern_library(args.patterns)
    if args.paper_literal_filter:
        filter_mode = "paper-literal"
    else:
        filter_mode = args.filter_mode
    options = ExtractOptions(
        postprocess=not args.no_postprocess,
        prefilter=not args.no_prefilter,
        filter_mode=filter_mode,
        postprocess_config=(
            None if args.negation_lexicon is None
            else default_config().__class__(
                negation_words=load_negation_lexicon(args.negation_lexicon)
            )
        ),
    )
    workers = args.workers if args.workers is not None else os.cpu_count() or 1
    start = time.perf_counter()
    n_sentences = 0
    n_triples = 0
    survivor_total = 0

    sentences = iter_parses(args.parses, library.scheme)
    with open(args.out, "w", encoding="utf-8") as out:
        if workers > 1:
            ctx = multiprocessing.get_context()
            with ctx.Pool(workers, initializer=_init_worker, initargs=(library, options)) as pool:
                for _, line, survivors, count in pool.imap(_extract_one, sentences, chunksize=8):
                    out.write(line + "\n")
                    n_sentences += 1
                    n_triples += count
                    survivor_total += survivors
        else:
            _init_worker(library, options)
            for sentence in sentences:
                _, line, survivors, count = _extract_one(sentence)
                out.write(line + "\n")
                n_sentences += 1
                n_triples += count
                survivor_total += survivors
    elapsed = time.perf_counter() - start
    mean_surv = survivor_total / n_sentences if n_sentences else 0.0
    print(f"sentences: {n_sentences}")
    print(f"triples: {n_triples}")
    print(f"mean_survivors: {mean_surv:.2f}")
    print(f"wall_time_s: {elapsed:.3f}")
    return 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _print_score(score, args: argparse.Namespace, extra: dict | None = None) -> None:
    if args.json:
        payload = score.to_dict()
        if extra:
            payload.update(extra)
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    else:
        print(f"precision: {score.precision:.4f} ({score.precision_num:g}/{score.precision_den:g})")
        print(f"recall: {score.recall:.4f} ({score.recall_num:g}/{score.recall_den:g})")
        print(f"f1: {score.f1:.4f}")
        if extra and "per_sentence" in extra:
            for row in extra["per_sentence"]:
                print(
                    f"  {row['sent_id']}: cw={row['precision_num']:g}"
                    f" |e|={row['precision_den']:g} |g|={row['recall_den']:g}"
                )


def cmd_eval_overlap(args: argparse.Namespace) -> int:
    gold = read_gold_triples(args.gold)
    pred = read_extractions(args.pred)
    mode = "lcs" if args.lcs else "multiset"
    score = corpus_scores(pred, gold, mode=mode, matching=args.matching)
    extra = None
    if args.per_sentence:
        extra = {"per_sentence": sentence_breakdown(pred, gold, mode=mode, matching=args.matching)}
    _print_score(score, args, extra)
    return 0


def cmd_eval_synset(args: argparse.Namespace) -> int:
    gold = read_synset_gold(args.gold)
    pred = read_extractions(args.pred)
    score = synset_scores(pred, gold)
    _print_score(score, args)
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def bench_filter(
    library: PatternLibrary,
    sentences: Sequence[ParsedSentence],
    repeat: int = 1,
    options: ExtractOptions | None = None,
) -> dict:
    """Measure (prefilter + match survivors) against (match everything).

    Returns throughput, mean survivor fraction, and the wall-clock
    speedup; counts are deterministic, timings obviously are not.
    """
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    options = options or ExtractOptions(postprocess=False)
    extractor = Extractor(library, options)
    compiled = [compile_pattern(p) for p in library.patterns]
    indexes = [index_sentence(s) for s in sentences]
    n_patterns = len(compiled)

    best_filtered = float("inf")
    best_all = float("inf")
    survivor_fractions: list[float] = []
    for _ in range(repeat):
        survivor_fractions.clear()
        t0 = time.perf_counter()
        for s, idx in zip(sentences, indexes):
            survivors = extractor.survivors(s)
            survivor_fractions.append(len(survivors) / n_patterns if n_patterns else 0.0)
            for i in survivors:
                _match_compiled(compiled[i], idx)
        best_filtered = min(best_filtered, time.perf_counter() - t0)

        t0 = time.perf_counter()
        for s, idx in zip(sentences, indexes):
            for cp in compiled:
                _match_compiled(cp, idx)
        best_all = min(best_all, time.perf_counter() - t0)

    mean_fraction = sum(survivor_fractions) / len(survivor_fractions) if survivor_fractions else 0.0
    return {
        "patterns": n_patterns,
        "sentences": len(sentences),
        "filtered_time_s": best_filtered,
        "match_all_time_s": best_all,
        "speedup": best_all / best_filtered if best_filtered > 0 else float("inf"),
        "mean_survivor_fraction": mean_fraction,
        "sentences_per_s": len(sentences) / best_filtered if best_filtered > 0 else float("inf"),
    }


def cmd_bench_filter(args: argparse.Namespace) -> int:
    library = read_pattern_library(args.patterns)
    sentences = read_parses(args.parses, library.scheme)
    report = bench_filter(library, sentences, repeat=args.repeat)
    for key in (
        "patterns", "sentences", "filtered_time_s", "match_all_time_s",
        "speedup", "mean_survivor_fraction", "sentences_per_s",
    ):
        value = report[key]
        print(f"{key}: {value:.4f}" if isinstance(value, float) else f"{key}: {value}")
    return 0


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patternoie",
        description="Pattern-based open information extraction over dependency parses.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a parse file against its scheme")
    p_validate.add_argument("--parses", required=True)
    p_validate.add_argument("--scheme", default=None, help="tag scheme JSON file")
    p_validate.set_defaults(func=cmd_validate)

    p_induce = sub.add_parser("induce", help="build a pattern library from annotations")
    p_induce.add_argument("--parses", required=True)
    p_induce.add_argument("--annotations", required=True)
    p_induce.add_argument("--out", required=True)
    p_induce.add_argument("--scheme", default=None)
    p_induce.add_argument("--anchors", choices=ANCHOR_POLICIES, default="pob-only")
    p_induce.set_defaults(func=cmd_induce)

    p_extract = sub.add_parser("extract", help="extract triples with a pattern library")
    p_extract.add_argument("--patterns", required=True)
    p_extract.add_argument("--parses", required=True)
    p_extract.add_argument("--out", required=True)
    p_extract.add_argument("--no-postprocess", action="store_true")
    p_extract.add_argument("--no-prefilter", action="store_true")
    p_extract.add_argument("--paper-literal-filter", action="store_true",
                           help="code-valued POSxPOS filter (comparison runs; may drop matches)")
    p_extract.add_argument("--filter-mode", choices=("auto", "dense"), default="auto")
    p_extract.add_argument("--negation-lexicon", default=None)
    p_extract.add_argument("--workers", type=int, default=None)
    p_extract.set_defaults(func=cmd_extract)

    p_eval = sub.add_parser("eval", help="score extraction output")
    eval_sub = p_eval.add_subparsers(dest="metric", required=True)
    p_overlap = eval_sub.add_parser("overlap", help="character-overlap scores")
    p_overlap.add_argument("--gold", required=True)
    p_overlap.add_argument("--pred", required=True)
    p_overlap.add_argument("--json", action="store_true")
    p_overlap.add_argument("--lcs", action="store_true", help="LCS overlap instead of multiset")
    p_overlap.add_argument("--matching", choices=("greedy", "best-per-triple"), default="greedy")
    p_overlap.add_argument("--per-sentence", action="store_true")
    p_overlap.set_defaults(func=cmd_eval_overlap)
    p_synset = eval_sub.add_parser("synset", help="fact-synset scores")
    p_synset.add_argument("--gold", required=True)
    p_synset.add_argument("--pred", required=True)
    p_synset.add_argument("--json", action="store_true")
    p_synset.set_defaults(func=cmd_eval_synset)

    p_bench = sub.add_parser("bench", help="performance measurements")
    bench_sub = p_bench.add_subparsers(dest="target", required=True)
    p_bf = bench_sub.add_parser("filter", help="prefilter throughput and speedup")
    p_bf.add_argument("--patterns", required=True)
    p_bf.add_argument("--parses", required=True)
    p_bf.add_argument("--repeat", type=int, default=1)
    p_bf.set_defaults(func=cmd_bench_filter)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "repeat", None) is not None and args.repeat < 1:
        parser.error("--repeat must be >= 1")
    try:
        return args.func(args)
    except (IngestError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
