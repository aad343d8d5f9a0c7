import pytest

from patternoie.induction import (
    AlignmentError,
    DegenerateError,
    InductionConfig,
    align_slot,
    build_library,
    induce_pattern,
    slot_head,
)
from patternoie.ingest import AnnotatedSample, write_pattern_library
from patternoie.matcher import ExtractOptions, Extractor, match_pattern
from patternoie.model import ARG1, ARG2, REL, Triple, canonical_key

from conftest import make_sentence


class TestAlignSlot:
    def test_single_token(self, svo_sentence):
        assert align_slot(svo_sentence, "音乐") == [(3, 3)]

    def test_non_contiguous(self, svo_sentence):
        assert align_slot(svo_sentence, "小明音乐") == []

    def test_multi_token(self, svo_sentence):
        assert align_slot(svo_sentence, "喜欢音乐") == [(2, 3)]

    def test_repeated_form(self):
        s = make_sentence("rep", [
            ("音乐", "n", 2, "SBV"),
            ("compare", "v", 0, "HED"),
            ("音乐", "n", 2, "VOB"),
        ])
        assert align_slot(s, "音乐") == [(1, 1), (3, 3)]

    def test_whitespace_insensitive(self, svo_sentence):
        assert align_slot(svo_sentence, " 喜欢  音乐 ") == [(2, 3)]

    def test_empty_text(self, svo_sentence):
        assert align_slot(svo_sentence, "  ") == []


class TestSlotHead:
    def test_single_token(self, svo_sentence):
        assert slot_head(svo_sentence, (3, 3)) == 3

    def test_one_external(self):
        # token 1 heads into the span, token 2 points outside it
        s = make_sentence("e1", [
            ("a", "n", 2, "ATT"),
            ("b", "n", 3, "SBV"),
            ("c", "v", 0, "HED"),
        ])
        assert slot_head(s, (1, 2)) == 2

    def test_depth_rule(self):
        # both tokens 1,2 point outside [1,2]; token 2 is shallower
        s = make_sentence("e2", [
            ("a", "n", 4, "ATT"),
            ("b", "n", 3, "SBV"),
            ("c", "v", 0, "HED"),
            ("d", "n", 3, "VOB"),
        ])
        # depths: 3 -> 0, 2 -> 1, 4 -> 1, 1 -> 2
        assert slot_head(s, (1, 2)) == 2


class TestInducePattern:
    def test_svo_by_hand(self, svo_sentence, scheme):
        # steps (a)-(f) run by hand: spans (1,1),(2,2),(3,3); heads 1,2,3;
        # subgraph {1,2,3}; no POB edges so no anchors
        p = induce_pattern(svo_sentence, Triple("小明", "喜欢", "音乐"), scheme)
        assert len(p.nodes) == 3
        assert p.slot_map == {1: ARG1, 2: REL, 3: ARG2}
        assert {(e.head_node, e.dep, e.dependent_node) for e in p.edges} == {
            (2, "SBV", 1), (2, "VOB", 3)}
        assert all(n.lexical_anchor is None for n in p.nodes)
        assert canonical_key(p) == "v||REL(SBV>nh||ARG1(),VOB>n||ARG2())"

    def test_pob_anchor(self, scheme):
        s = make_sentence("pob", [
            ("公司", "n", 4, "SBV"),
            ("由", "p", 4, "ADV"),
            ("张伟", "nh", 2, "POB"),
            ("创立", "v", 0, "HED"),
        ])
        p = induce_pattern(s, Triple("公司", "创立", "张伟"), scheme)
        anchors = {n.node_id: n.lexical_anchor for n in p.nodes if n.lexical_anchor}
        assert anchors == {2: "由"}
        # the preposition is a connector: present but roleless
        assert 2 not in p.slot_map
        assert len(p.nodes) == 4

    def test_unalignable_slot(self, svo_sentence, scheme):
        with pytest.raises(AlignmentError) as e:
            induce_pattern(svo_sentence, Triple("别人", "喜欢", "音乐"), scheme)
        assert e.value.role == ARG1

    def test_degenerate(self, svo_sentence, scheme):
        with pytest.raises(DegenerateError):
            induce_pattern(svo_sentence, Triple("小明", "喜欢", "喜欢音乐"), scheme)

    def test_leftmost_span_tiebreak(self, scheme):
        # arg1 "报告" occurs at tokens 1 and 4; leftmost wins
        s = make_sentence("rep", [
            ("报告", "n", 2, "SBV"),
            ("引用", "v", 0, "HED"),
            ("旧", "a", 4, "ATT"),
            ("报告", "n", 2, "VOB"),
        ])
        p = induce_pattern(s, Triple("报告", "引用", "旧报告"), scheme)
        assert p.slot_map == {1: ARG1, 2: REL, 4: ARG2}

    def test_repeated_form_both_args_degenerates(self, scheme):
        # leftmost alignment sends both args to token 1 -> shared head
        s = make_sentence("rep2", [
            ("音乐", "n", 2, "SBV"),
            ("胜过", "v", 0, "HED"),
            ("音乐", "n", 2, "VOB"),
        ])
        with pytest.raises(DegenerateError):
            induce_pattern(s, Triple("音乐", "胜过", "音乐"), scheme)

    def test_anchor_policy_none(self, scheme):
        s = make_sentence("pob", [
            ("公司", "n", 4, "SBV"),
            ("由", "p", 4, "ADV"),
            ("张伟", "nh", 2, "POB"),
            ("创立", "v", 0, "HED"),
        ])
        p = induce_pattern(s, Triple("公司", "创立", "张伟"), scheme,
                           InductionConfig(anchors="none"))
        assert all(n.lexical_anchor is None for n in p.nodes)

    def test_anchor_policy_closed_class(self, scheme):
        # the preposition is a slot head here (no POB edge in the pattern):
        # pob-only leaves it bare, all-closed-class anchors it
        s = make_sentence("cc", [
            ("他", "r", 4, "SBV"),
            ("在", "p", 4, "ADV"),
            ("北京", "ns", 2, "POB"),
            ("工作", "v", 0, "HED"),
        ])
        gold = Triple("他", "在北京", "工作")
        bare = induce_pattern(s, gold, scheme)
        assert all(n.lexical_anchor is None for n in bare.nodes)
        anchored = induce_pattern(s, gold, scheme,
                                  InductionConfig(anchors="all-closed-class"))
        assert {n.node_id for n in anchored.nodes if n.lexical_anchor} == {2}


class TestBuildLibrary:
    def test_isomorphic_merge(self, scheme):
        s1 = make_sentence("a", [
            ("小明", "nh", 2, "SBV"), ("喜欢", "v", 0, "HED"), ("音乐", "n", 2, "VOB")])
        s2 = make_sentence("b", [
            ("李华", "nh", 2, "SBV"), ("讨厌", "v", 0, "HED"), ("数学", "n", 2, "VOB")])
        samples = [
            AnnotatedSample("a", s1, (Triple("小明", "喜欢", "音乐"),)),
            AnnotatedSample("b", s2, (Triple("李华", "讨厌", "数学"),)),
        ]
        lib = build_library(samples, scheme)
        assert len(lib.patterns) == 1
        assert list(lib.counts.values()) == [2]
        assert lib.patterns[0].provenance == ("a#0", "b#0")

    def test_empty(self, scheme):
        lib = build_library([], scheme)
        assert len(lib.patterns) == 0
        assert lib.stats == {"samples_seen": 0, "samples_failed": 0,
                             "distinct_patterns": 0}

    def test_hand_counted_mixed_set(self, svo_sentence, scheme):
        # 5 annotated pairs: two isomorphic SVO, one POB, one unalignable,
        # one degenerate -> 2 distinct patterns, 2 failures
        pob = make_sentence("pob", [
            ("公司", "n", 4, "SBV"),
            ("由", "p", 4, "ADV"),
            ("张伟", "nh", 2, "POB"),
            ("创立", "v", 0, "HED"),
        ])
        other = make_sentence("oth", [
            ("李华", "nh", 2, "SBV"), ("讨厌", "v", 0, "HED"), ("数学", "n", 2, "VOB")])
        samples = [
            AnnotatedSample("svo1", svo_sentence, (
                Triple("小明", "喜欢", "音乐"),
                Triple("别人", "喜欢", "音乐"),        # unalignable
                Triple("小明", "喜欢", "喜欢音乐"),    # degenerate
            )),
            AnnotatedSample("oth", other, (Triple("李华", "讨厌", "数学"),)),
            AnnotatedSample("pob", pob, (Triple("公司", "创立", "张伟"),)),
        ]
        lib = build_library(samples, scheme)
        assert lib.stats == {"samples_seen": 5, "samples_failed": 2,
                             "distinct_patterns": 2}
        assert sum(lib.counts.values()) == 3

    def test_supports_sum_invariant(self, training_library):
        stats = training_library.stats
        assert sum(training_library.counts.values()) == (
            stats["samples_seen"] - stats["samples_failed"])

    def test_deterministic_output(self, tmp_path, training_samples, fixture_scheme):
        lib1 = build_library(training_samples, fixture_scheme)
        lib2 = build_library(list(training_samples), fixture_scheme)
        f1, f2 = tmp_path / "l1", tmp_path / "l2"
        write_pattern_library(f1, lib1)
        write_pattern_library(f2, lib2)
        assert f1.read_bytes() == f2.read_bytes()

    def test_monotonicity(self, training_samples, fixture_scheme):
        half = build_library(training_samples[:100], fixture_scheme)
        full = build_library(training_samples, fixture_scheme)
        for key, support in half.counts.items():
            assert key in full.counts
            assert full.counts[key] >= support

    def test_node_count_bounded_and_tree(self, training_samples, fixture_scheme):
        from patternoie.model import validate_pattern

        lib = build_library(training_samples, fixture_scheme)
        by_id = {s.sent_id: s.sentence for s in training_samples}
        for p in lib.patterns:
            sid = p.provenance[0].rsplit("#", 1)[0]
            assert len(p.nodes) <= len(by_id[sid].tokens)
            assert validate_pattern(p, fixture_scheme) == []


class TestRoundTripInvariant:
    def test_slot_heads_recovered(self, training_samples, fixture_scheme):
        # every successfully induced sample: matching its own pattern on the
        # same sentence recovers the gold slot heads (no post-processing)
        from patternoie.induction import InductionError, PatternLibrary

        checked = 0
        for sample in training_samples:
            for gold in sample.gold_triples:
                try:
                    pattern = induce_pattern(sample.sentence, gold, fixture_scheme)
                except InductionError:
                    continue
                expected = {
                    role: slot_head(sample.sentence, align_slot(sample.sentence, text)[0])
                    for role, text in zip((ARG1, REL, ARG2), gold.slots())
                }
                found = False
                for emb in match_pattern(pattern, sample.sentence):
                    mapping = emb.as_dict()
                    heads = {role: mapping[nid] for nid, role in pattern.slot_map.items()}
                    if heads == expected:
                        found = True
                        break
                assert found, f"{sample.sent_id}: slot heads not recovered"
                checked += 1
        assert checked >= 200
