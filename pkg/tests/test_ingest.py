import random

import pytest

from patternoie.induction import build_library
from patternoie.ingest import (
    IngestError,
    read_annotations,
    read_extractions,
    read_parses,
    read_pattern_library,
    read_scheme,
    read_synset_gold,
    write_extractions,
    write_parses,
    write_pattern_library,
    write_scheme,
)
from patternoie.ingest import AnnotatedSample
from patternoie.model import Triple, default_scheme

from conftest import make_sentence
from corpusgen import random_sentence

SVO_BLOCK = """\
# sent_id = fix1
# text = 小明喜欢音乐
1\t小明\t_\tnh\t_\t_\t2\tSBV\t_\t_
2\t喜欢\t_\tv\t_\t_\t0\tHED\t_\t_
3\t音乐\t_\tn\t_\t_\t2\tVOB\t_\t_
"""


class TestReadParses:
    def test_fixture_block(self, tmp_path, scheme):
        path = tmp_path / "p.conllu"
        path.write_text(SVO_BLOCK, encoding="utf-8")
        sentences = read_parses(path, scheme)
        assert len(sentences) == 1
        s = sentences[0]
        assert s.sent_id == "fix1"
        assert s.text == "小明喜欢音乐"
        assert len(s.tokens) == 3
        assert s.tokens[0].form == "小明" and s.tokens[0].pos == "nh"
        assert s.tokens[1].head == 0 and s.tokens[1].dep == "HED"
        assert s.tokens[2].head == 2 and s.tokens[2].dep == "VOB"

    def test_empty_file(self, tmp_path, scheme):
        path = tmp_path / "e.conllu"
        path.write_text("", encoding="utf-8")
        assert read_parses(path, scheme) == []

    def test_non_integer_head(self, tmp_path, scheme):
        path = tmp_path / "bad.conllu"
        path.write_text("1\ta\t_\tn\t_\t_\tx\tHED\t_\t_\n", encoding="utf-8")
        with pytest.raises(IngestError) as e:
            read_parses(path, scheme)
        assert e.value.line == 1
        assert "non-integer head" in str(e.value)

    def test_unknown_tag_named(self, tmp_path, scheme):
        path = tmp_path / "tag.conllu"
        path.write_text("1\ta\t_\tXX\t_\t_\t0\tHED\t_\t_\n", encoding="utf-8")
        with pytest.raises(IngestError, match="pos 'XX' not in scheme"):
            read_parses(path, scheme)

    def test_tree_violation_cites_validation(self, tmp_path, scheme):
        block = "1\ta\t_\tn\t_\t_\t0\tHED\t_\t_\n2\tb\t_\tn\t_\t_\t0\tHED\t_\t_\n"
        path = tmp_path / "tree.conllu"
        path.write_text(block, encoding="utf-8")
        with pytest.raises(IngestError, match="multiple roots at 1,2"):
            read_parses(path, scheme)

    def test_bad_column_count(self, tmp_path, scheme):
        path = tmp_path / "col.conllu"
        path.write_text("1\ta\tn\n", encoding="utf-8")
        with pytest.raises(IngestError, match="columns"):
            read_parses(path, scheme)

    def test_compact_five_columns(self, tmp_path, scheme):
        path = tmp_path / "c5.conllu"
        path.write_text("1\t小明\tnh\t2\tSBV\n2\t喜欢\tv\t0\tHED\n", encoding="utf-8")
        (s,) = read_parses(path, scheme)
        assert [t.pos for t in s.tokens] == ["nh", "v"]

    def test_synthesized_sent_id(self, tmp_path, scheme):
        path = tmp_path / "anon.conllu"
        path.write_text("1\ta\t_\tn\t_\t_\t0\tHED\t_\t_\n", encoding="utf-8")
        (s,) = read_parses(path, scheme)
        assert s.sent_id == "anon.conllu:1"

    def test_provenance_header_ignored(self, tmp_path, scheme):
        content = "# backend = naive 0.1.0\n\n" + SVO_BLOCK + "\n1\ta\t_\tn\t_\t_\t0\tHED\t_\t_\n"
        path = tmp_path / "hdr.conllu"
        path.write_text(content, encoding="utf-8")
        sentences = read_parses(path, scheme)
        assert [s.sent_id for s in sentences] == ["fix1", "hdr.conllu:9"]

    def test_keeps_file_order(self, tmp_path, scheme):
        blocks = []
        for i in range(5):
            blocks.append(f"# sent_id = o{i}\n1\ta\t_\tn\t_\t_\t0\tHED\t_\t_\n")
        path = tmp_path / "order.conllu"
        path.write_text("\n".join(blocks), encoding="utf-8")
        assert [s.sent_id for s in read_parses(path, scheme)] == [f"o{i}" for i in range(5)]

    def test_round_trip_random(self, tmp_path, scheme):
        rng = random.Random(3)
        sentences = [random_sentence(rng) for _ in range(30)]
        path = tmp_path / "rt.conllu"
        write_parses(path, sentences)
        back = read_parses(path, scheme)
        assert back == sentences


class TestAnnotations:
    def test_join(self, tmp_path, svo_sentence):
        path = tmp_path / "a.jsonl"
        path.write_text(
            '{"sent_id": "svo1", "text": "小明喜欢音乐", '
            '"triples": [{"arg1": "小明", "rel": "喜欢", "arg2": "音乐"}]}\n',
            encoding="utf-8",
        )
        samples = read_annotations(path, [svo_sentence])
        assert len(samples) == 1
        assert samples[0].gold_triples == (Triple("小明", "喜欢", "音乐"),)

    def test_unknown_sent_id(self, tmp_path, svo_sentence):
        path = tmp_path / "a.jsonl"
        path.write_text('{"sent_id": "nope", "triples": [{"arg1":"a","rel":"b","arg2":"c"}]}\n',
                        encoding="utf-8")
        with pytest.raises(IngestError, match="nope"):
            read_annotations(path, [svo_sentence])

    def test_duplicate_sent_id_merged(self, tmp_path, svo_sentence):
        rec1 = '{"sent_id": "svo1", "triples": [{"arg1":"小明","rel":"喜欢","arg2":"音乐"}]}'
        rec2 = ('{"sent_id": "svo1", "triples": [{"arg1":"小明","rel":"喜欢","arg2":"音乐"},'
                '{"arg1":"小明","rel":"讨厌","arg2":"数学"}]}')
        path = tmp_path / "a.jsonl"
        path.write_text(rec1 + "\n" + rec2 + "\n", encoding="utf-8")
        samples = read_annotations(path, [svo_sentence])
        assert len(samples) == 1
        assert len(samples[0].gold_triples) == 2

    def test_empty_slot_rejected(self, tmp_path, svo_sentence):
        path = tmp_path / "a.jsonl"
        path.write_text('{"sent_id": "svo1", "triples": [{"arg1":" ","rel":"喜欢","arg2":"音乐"}]}\n',
                        encoding="utf-8")
        with pytest.raises(IngestError, match="empty gold slot"):
            read_annotations(path, [svo_sentence])

    def test_empty_triples_rejected(self, tmp_path, svo_sentence):
        path = tmp_path / "a.jsonl"
        path.write_text('{"sent_id": "svo1", "triples": []}\n', encoding="utf-8")
        with pytest.raises(IngestError, match="non-empty"):
            read_annotations(path, [svo_sentence])


class TestPatternLibrary:
    def _small_library(self, svo_sentence, scheme):
        pob = make_sentence("pob1", [
            ("公司", "n", 4, "SBV"),
            ("由", "p", 4, "ADV"),
            ("张伟", "nh", 2, "POB"),
            ("创立", "v", 0, "HED"),
        ])
        samples = [
            AnnotatedSample("svo1", svo_sentence, (Triple("小明", "喜欢", "音乐"),)),
            AnnotatedSample("pob1", pob, (Triple("公司", "创立", "张伟"),)),
        ]
        return build_library(samples, scheme)

    def test_round_trip_byte_identical(self, tmp_path, svo_sentence, scheme):
        lib = self._small_library(svo_sentence, scheme)
        p1 = tmp_path / "lib1.jsonl"
        p2 = tmp_path / "lib2.jsonl"
        write_pattern_library(p1, lib)
        lib2 = read_pattern_library(p1)
        write_pattern_library(p2, lib2)
        assert p1.read_bytes() == p2.read_bytes()
        assert lib2.scheme == lib.scheme
        assert lib2.counts == lib.counts
        assert lib2.stats == lib.stats
        assert lib2.patterns == lib.patterns

    def test_anchor_preserved(self, tmp_path, svo_sentence, scheme):
        lib = self._small_library(svo_sentence, scheme)
        anchors = [n.lexical_anchor for p in lib.patterns for n in p.nodes
                   if n.lexical_anchor]
        assert anchors == ["由"]
        path = tmp_path / "lib.jsonl"
        write_pattern_library(path, lib)
        lib2 = read_pattern_library(path)
        anchors2 = [n.lexical_anchor for p in lib2.patterns for n in p.nodes
                    if n.lexical_anchor]
        assert anchors2 == ["由"]

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "v.jsonl"
        path.write_text('{"format_version": 999, "tag_scheme": {}, "stats": {}}\n',
                        encoding="utf-8")
        with pytest.raises(IngestError, match="format_version 999"):
            read_pattern_library(path)

    def test_corrupted_record_names_pattern(self, tmp_path, svo_sentence, scheme):
        lib = self._small_library(svo_sentence, scheme)
        path = tmp_path / "lib.jsonl"
        write_pattern_library(path, lib)
        lines = path.read_text(encoding="utf-8").splitlines()
        lines[1] = lines[1].replace('"SBV"', '"VOB"', 1)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(IngestError, match="corrupted record for pattern"):
            read_pattern_library(path)


class TestSynsetGold:
    def test_counts(self, tmp_path):
        content = (
            '{"sent_id": "s1", "synsets": [[{"arg1":"a","rel":"r","arg2":"b"}],'
            '[{"arg1":"c","rel":"r","arg2":"d"},{"arg1":"c","rel":"r2","arg2":"d"}]]}\n'
            '{"sent_id": "s2", "synsets": [[{"arg1":"e","rel":"r","arg2":"f"}]]}\n'
        )
        path = tmp_path / "g.jsonl"
        path.write_text(content, encoding="utf-8")
        gold = read_synset_gold(path)
        assert len(gold) == 2
        assert sum(len(g.synsets) for g in gold) == 3

    def test_duplicate_sent_id(self, tmp_path):
        rec = '{"sent_id": "s1", "synsets": [[{"arg1":"a","rel":"r","arg2":"b"}]]}\n'
        path = tmp_path / "g.jsonl"
        path.write_text(rec + rec, encoding="utf-8")
        with pytest.raises(IngestError, match="duplicate sent_id"):
            read_synset_gold(path)

    def test_overlapping_synsets(self, tmp_path):
        path = tmp_path / "g.jsonl"
        path.write_text(
            '{"sent_id": "s1", "synsets": [[{"arg1":"a","rel":"r","arg2":"b"}],'
            '[{"arg1":"a","rel":"r","arg2":"b"}]]}\n',
            encoding="utf-8",
        )
        with pytest.raises(IngestError, match="two synsets"):
            read_synset_gold(path)


class TestExtractions:
    def test_round_trip_preserves_whitespace(self, tmp_path):
        data = {"s1": [Triple("a b", " r ", "c", source_pattern="p1")], "s2": []}
        path = tmp_path / "x.jsonl"
        write_extractions(path, data)
        back = read_extractions(path)
        assert back["s1"][0].arg1 == "a b"
        assert back["s1"][0].rel == " r "
        assert back["s1"][0].source_pattern == "p1"
        assert back["s2"] == []

    def test_empty_file(self, tmp_path):
        path = tmp_path / "x.jsonl"
        path.write_text("", encoding="utf-8")
        assert read_extractions(path) == {}

    def test_duplicate_rejected(self, tmp_path):
        rec = '{"sent_id": "s1", "triples": []}\n'
        path = tmp_path / "x.jsonl"
        path.write_text(rec + rec, encoding="utf-8")
        with pytest.raises(IngestError, match="duplicate sent_id"):
            read_extractions(path)

    def test_random_round_trip(self, tmp_path):
        rng = random.Random(9)
        data = {}
        for i in range(20):
            triples = [
                Triple(f"a{rng.randrange(100)}", f"r{rng.randrange(100)}",
                       f"b{rng.randrange(100)}", source_pattern=f"p{i}")
                for _ in range(rng.randrange(4))
            ]
            data[f"s{i}"] = triples
        path = tmp_path / "x.jsonl"
        write_extractions(path, data)
        back = read_extractions(path)
        assert back == data


class TestSchemeFile:
    def test_round_trip(self, tmp_path):
        s = default_scheme(include_punct_label=True)
        path = tmp_path / "scheme.json"
        write_scheme(path, s)
        assert read_scheme(path) == s

    def test_bad_file(self, tmp_path):
        path = tmp_path / "scheme.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(IngestError):
            read_scheme(path)
