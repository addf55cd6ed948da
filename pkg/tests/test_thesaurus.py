import io
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from helpers import make_wordnet
from wikithes.assignments import MCAT, VSM, SenseAssignment, read_assignments, write_assignments
from wikithes.thesaurus import (
    MONOSEMOUS,
    UNMATCHED,
    LangEntry,
    ThesaurusEntry,
    assign_target_senses,
    build_thesaurus,
    combine_assignments,
    entry_id,
    extract_definition,
    read_thesaurus,
    split_sentences,
    write_thesaurus,
)
from wikithes.tuple_extractor import TranslationTuple, build_tuples
from wikithes.wiki_ingest import Article

VSM2 = SenseAssignment("Bank", "bank", 200, VSM, 0.4, 0.1)
MCAT1 = SenseAssignment("Bank", "bank", 100, MCAT, 2.0, 0.0, ("pass1",))


def test_combiner_table():
    assert combine_assignments(VSM2, MCAT1) is MCAT1
    assert combine_assignments(VSM2, None) is VSM2
    assert combine_assignments(None, MCAT1) is MCAT1
    with pytest.raises(ValueError):
        combine_assignments(None, None)


def _entry(n, es, ja="x", en=None, offset=None, en_sense=0):
    return ThesaurusEntry(entry_id(n), "n", LangEntry(en or f"E{n}", en_sense), LangEntry(es), LangEntry(ja),
                          offset, MONOSEMOUS if offset else UNMATCHED)


def test_spanish_lemma_numbered_in_entry_order():
    entries = [_entry(3, "banco"), _entry(1, "banco"), _entry(2, "orilla"), _entry(4, "banco")]
    assign_target_senses(entries)
    by_id = {e.entry_id: e for e in entries}
    assert [by_id[entry_id(n)].es.sense_number for n in (1, 3, 4)] == [1, 2, 3]
    assert by_id[entry_id(2)].es.sense_number == 1
    assert by_id[entry_id(2)].ja.sense_number == 2


def test_english_rank_is_kept():
    entries = [_entry(1, "a", en="Bank", offset=300, en_sense=3), _entry(2, "b", en="Bank")]
    assign_target_senses(entries)
    assert entries[0].en.sense_number == 3
    assert entries[1].en.sense_number == 1


def test_entry_id_format():
    assert entry_id(1) == "T0000001"
    assert entry_id(1234567) == "T1234567"


def test_split_sentences():
    assert split_sentences("One. Two! Three?\nFour") == ["One.", "Two!", "Three?", "Four"]
    assert split_sentences("鳥である。飛ぶ。") == ["鳥である。", "飛ぶ。"]
    assert split_sentences("e.g.x stays") == ["e.g.x stays"]
    assert split_sentences("") == []


def test_extract_definition_english_bird():
    art = Article(1, "Bird", "en", "{{Infobox}}\n'''Birds''' (''Aves'') are a group of warm-blooded vertebrates. "
                                   "They fly.\n== Anatomy ==\nWings.")
    assert extract_definition(art, "en") == "Birds are a group of warm-blooded vertebrates."


def test_extract_definition_picks_first_match_not_first_sentence():
    art = Article(1, "Ave", "es", "Las aves vuelan. El ave es un animal con plumas. La ave es una cosa.")
    assert extract_definition(art, "es") == "El ave es un animal con plumas."
    jp = Article(2, "鳥類", "ja", "概要。'''鳥類'''（ちょうるい）は、脊椎動物の一群である。")
    assert extract_definition(jp, "ja") == "鳥類は、脊椎動物の一群である。"


def test_extract_definition_fallback_and_empty():
    art = Article(1, "Mouse", "en", "In computing, a mouse moves a cursor. It has buttons.")
    assert extract_definition(art, "en") == "In computing, a mouse moves a cursor."
    assert extract_definition(Article(1, "X", "en", ""), "en") is None
    assert extract_definition(None, "en") is None
    assert extract_definition(Article(1, "X", "en", "== Only heading ==\nbody"), "en") is None


def test_extract_definition_qualified_title():
    art = Article(1, "Java (island)", "en", "Java is an island of Indonesia.")
    assert extract_definition(art, "en") == "Java is an island of Indonesia."


BUILD_WN = [
    (100, ["bank"], [], "money"),
    (200, ["bank"], [], "river side"),
    (300, ["penguin"], [], "bird"),
]


def test_build_thesaurus_methods():
    wn = make_wordnet(BUILD_WN)
    tuples = [TranslationTuple("Penguin", "Pingüino", "ペンギン", 3),
              TranslationTuple("Bank", "Banco", "銀行", 1),
              TranslationTuple("Dominican Republic", "República Dominicana", "ドミニカ共和国", 2)]
    vsm = {"Bank": SenseAssignment("Bank", "bank", 200, VSM, 0.5, 0.2)}
    mcat = {"Bank": SenseAssignment("Bank", "bank", 100, MCAT, 1.0, 0.0)}
    entries = build_thesaurus(tuples, wn, vsm, mcat)
    assert [(e.entry_id, e.en.lemma, e.method, e.synset_offset, e.en.sense_number) for e in entries] == [
        ("T0000001", "Bank", MCAT, 100, 1),
        ("T0000002", "Dominican Republic", UNMATCHED, None, 1),
        ("T0000003", "Penguin", MONOSEMOUS, 300, 1),
    ]
    assert len(entries) == len(tuples)
    entries = build_thesaurus(tuples, wn, vsm, {})
    assert (entries[0].method, entries[0].synset_offset, entries[0].en.sense_number) == (VSM, 200, 2)
    with pytest.raises(ValueError, match="Bank"):
        build_thesaurus(tuples, wn, {}, {})


def test_thesaurus_tsv_and_jsonl_round_trip():
    entries = [_entry(1, "ba\tnco", ja="line\nbreak\\"), _entry(2, "orilla", offset=42, en_sense=1)]
    entries[0].es.definition = "tab\there"
    assign_target_senses(entries)
    for fmt in ("tsv", "jsonl"):
        buf = io.StringIO()
        write_thesaurus(entries, buf, fmt)
        if fmt == "tsv":
            assert all(line.count("\t") == 12 for line in buf.getvalue().splitlines())
        buf.seek(0)
        assert read_thesaurus(buf, fmt) == entries
    with pytest.raises(ValueError):
        write_thesaurus(entries, io.StringIO(), "xml")


def test_assignments_round_trip():
    rows = [MCAT1, VSM2, SenseAssignment("Crane", "crane", 5, VSM, 0.0, 0.0, ("degenerate",))]
    buf = io.StringIO()
    write_assignments(rows, buf)
    buf.seek(0)
    back = read_assignments(buf)
    assert {(a.en_title, a.method, a.synset_offset, a.flags) for a in back} == {
        (a.en_title, a.method, a.synset_offset, a.flags) for a in rows}


def _scan_unique(entries):
    ids = Counter(e.entry_id for e in entries)
    keys = Counter((code, e.lang(code).lemma, e.lang(code).sense_number) for e in entries for code in ("en", "es", "ja"))
    return max(ids.values(), default=1) == 1 and max(keys.values(), default=1) == 1


@settings(max_examples=100)
@given(st.lists(st.tuples(st.sampled_from(["banco", "orilla", "ribera"]), st.sampled_from(["銀行", "岸"])),
                min_size=1, max_size=12))
def test_target_numbering_properties(pairs):
    entries = [_entry(n, es, ja) for n, (es, ja) in enumerate(pairs, 1)]
    assign_target_senses(entries)
    assert _scan_unique(entries)
    for code in ("es", "ja"):
        for lemma in {e.lang(code).lemma for e in entries}:
            assert [e.lang(code).sense_number for e in entries if e.lang(code).lemma == lemma] == list(
                range(1, 1 + sum(1 for e in entries if e.lang(code).lemma == lemma)))


def test_fixture_build_invariants(fixture_wn, fixture_stores):
    tuples = build_tuples(fixture_stores["en"], fixture_stores["es"], fixture_stores["ja"])
    vsm = {"Bank": SenseAssignment("Bank", "bank", fixture_wn.senses_of("bank")[0].offset, VSM, 0.5, 0.1)}
    entries = build_thesaurus(tuples, fixture_wn, vsm,
                              {t: SenseAssignment(t, t.lower(), fixture_wn.senses_of(t)[0].offset, MCAT, 1, 0)
                               for t in ("Crane", "Java", "Mouse")},
                              fixture_stores)
    assert _scan_unique(entries)
    assert [(e.en.lemma, e.es.lemma, e.ja.lemma) for e in entries] == [
        (t.en_title, t.es_title, t.ja_title) for t in sorted(tuples)]
    for e in entries:
        assert (e.synset_offset is not None) == (e.method in (VSM, MCAT, MONOSEMOUS))
    penguin = next(e for e in entries if e.en.lemma == "Penguin")
    assert penguin.method == MONOSEMOUS
    assert penguin.en.definition.startswith("Penguins are")
