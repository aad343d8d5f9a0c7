import logging
import random

import pytest

from patternoie.matcher import ExtractOptions, Extractor
from patternoie.model import ARG1, ARG2, REL, Triple
from patternoie.postprocess import (
    attach_negation,
    default_config,
    expand_argument,
    load_negation_lexicon,
    postprocess_triple,
)

from conftest import make_sentence


@pytest.fixture(scope="module")
def cfg():
    return default_config()


def quant_sentence():
    # 三/m -> 个/q -> 学生/n (root)
    return make_sentence("q", [
        ("三", "m", 2, "ATT"),
        ("个", "q", 3, "ATT"),
        ("学生", "n", 0, "HED"),
    ])


def neg_sentence():
    return make_sentence("neg", [
        ("他", "r", 3, "SBV"),
        ("不", "d", 3, "ADV"),
        ("喜欢", "v", 0, "HED"),
        ("音乐", "n", 3, "VOB"),
    ])


class TestExpandArgument:
    def test_fixed_point(self, svo_sentence, cfg):
        assert expand_argument(svo_sentence, (1,), 1, cfg) == (1,)

    def test_quantifier_chain(self, cfg):
        s = quant_sentence()
        assert expand_argument(s, (3,), 3, cfg) == (1, 2, 3)

    def test_contiguity_guard(self, cfg):
        # the ATT modifier at 1 depends on 4, but token 3 blocks adjacency
        s = make_sentence("gap", [
            ("新", "a", 4, "ATT"),
            ("发布", "v", 0, "HED"),
            ("一个", "m", 2, "ADV"),
            ("产品", "n", 2, "VOB"),
        ])
        assert expand_argument(s, (4,), 4, cfg) == (4,)

    def test_never_removes(self, cfg):
        s = quant_sentence()
        grown = expand_argument(s, (2, 3), 3, cfg)
        assert set(grown) >= {2, 3}

    def test_blocked_tokens_not_absorbed(self, cfg):
        s = quant_sentence()
        assert expand_argument(s, (3,), 3, cfg, blocked=frozenset({2})) == (3,)


class TestAttachNegation:
    def test_single_negation(self, cfg):
        s = neg_sentence()
        assert attach_negation(s, (3,), 3, cfg) == (2, 3)

    def test_no_adverbial(self, svo_sentence, cfg):
        assert attach_negation(svo_sentence, (2,), 2, cfg) == (2,)

    def test_lexicon_miss(self, cfg):
        s = make_sentence("hen", [
            ("他", "r", 3, "SBV"),
            ("很", "d", 3, "ADV"),
            ("喜欢", "v", 0, "HED"),
            ("音乐", "n", 3, "VOB"),
        ])
        assert attach_negation(s, (3,), 3, cfg) == (3,)

    def test_transitive_chain(self, cfg):
        s = make_sentence("dbl", [
            ("他", "r", 4, "SBV"),
            ("不", "d", 4, "ADV"),
            ("能", "d", 4, "ADV"),
            ("去", "v", 0, "HED"),
        ])
        # 能 is absorbed only if in the lexicon; "不能" is, "能" alone is not,
        # so the chain stops at token 3
        assert attach_negation(s, (4,), 4, cfg) == (4,)
        # but a double negation of lexicon words walks leftward
        s2 = make_sentence("dbl2", [
            ("他", "r", 4, "SBV"),
            ("没有", "d", 4, "ADV"),
            ("不", "d", 4, "ADV"),
            ("去", "v", 0, "HED"),
        ])
        assert attach_negation(s2, (4,), 4, cfg) == (2, 3, 4)


class TestPostprocessTriple:
    def test_negation_composed(self, cfg):
        s = neg_sentence()
        t = Triple("他", "喜欢", "音乐",
                   spans={ARG1: (1,), REL: (3,), ARG2: (4,)}, source_pattern="p")
        out = postprocess_triple(s, t, cfg)
        assert out.slots() == ("他", "不喜欢", "音乐")
        assert out.spans[REL] == (2, 3)
        assert out.source_pattern == "p"

    def test_idempotent(self, cfg):
        s = neg_sentence()
        t = Triple("他", "喜欢", "音乐",
                   spans={ARG1: (1,), REL: (3,), ARG2: (4,)})
        once = postprocess_triple(s, t, cfg)
        twice = postprocess_triple(s, once, cfg)
        assert once == twice

    def test_no_spans_warns_and_returns_unchanged(self, cfg, caplog):
        s = neg_sentence()
        t = Triple("他", "喜欢", "音乐")
        with caplog.at_level(logging.WARNING):
            out = postprocess_triple(s, t, cfg)
        assert out == t
        assert any("no spans" in r.message for r in caplog.records)

    def test_monotone_growth(self, cfg, training_samples, training_library):
        # post-processed slot strings contain the raw ones contiguously
        raw = Extractor(training_library, ExtractOptions(postprocess=False))
        rng = random.Random(3)
        sentences = [s.sentence for s in rng.sample(list(training_samples), 60)]
        for s in sentences:
            for t in raw.extract(s):
                out = postprocess_triple(s, t, cfg)
                assert t.arg1 in out.arg1
                assert t.rel in out.rel
                assert t.arg2 in out.arg2

    def test_spans_stay_disjoint_and_contiguous(self, cfg, training_samples,
                                                training_library):
        # contiguous inputs stay contiguous; non-contiguous ones (cross-role
        # subtraction holes) pass through untouched; slots never overlap
        raw = Extractor(training_library, ExtractOptions(postprocess=False))
        rng = random.Random(5)
        sentences = [s.sentence for s in rng.sample(list(training_samples), 60)]
        for s in sentences:
            for t in raw.extract(s):
                out = postprocess_triple(s, t, cfg)
                seen: set[int] = set()
                for role in (ARG1, REL, ARG2):
                    before = t.spans[role]
                    span = out.spans[role]
                    assert not (set(span) & seen)
                    seen.update(span)
                    if before[-1] - before[0] + 1 == len(before):
                        assert span[-1] - span[0] + 1 == len(span)
                    else:
                        assert span == before


class TestLexiconFile:
    def test_load(self, tmp_path):
        path = tmp_path / "neg.txt"
        path.write_text("# comment\n不\n没\n\n", encoding="utf-8")
        assert load_negation_lexicon(path) == frozenset({"不", "没"})

    def test_default_contains_bu(self, cfg):
        assert "不" in cfg.negation_words
        assert "非" in cfg.negation_words
