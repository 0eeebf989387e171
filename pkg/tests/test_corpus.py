import io
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pubcomm.corpus import (
    AuthorName,
    BiblioRecord,
    CitedRef,
    apply_disambiguation,
    apply_subject_filter,
    build_author_table,
    country_code,
    dump_canonical,
    last_name_commonality,
    load_canonical,
    load_disambiguation_map,
    normalize_corpus,
    normalize_last_name,
    parse_wos_flatfile,
)
from wos import block, corpus, record, wos


def test_minimal_block():
    recs = parse_wos_flatfile("AU SMITH, J\nPY 1995\nUT A1\nER\n")
    assert len(recs) == 1
    r = recs[0]
    assert (r.record_id, r.year) == ("A1", 1995)
    assert r.authors == (AuthorName("SMITH", "J"),)


def test_missing_ut_rejected_with_line_number():
    errors = []
    text = wos(block("A1", 2000), block(None, 2001), block("A3", None))
    recs = parse_wos_flatfile(text, errors)
    assert [r.record_id for r in recs] == ["A1"]
    assert len(errors) == 2
    assert "missing UT" in errors[0][1] and "missing PY" in errors[1][1]
    lines = text.splitlines()
    assert lines[errors[0][0] - 1] == "PT J"


def test_empty_input():
    assert parse_wos_flatfile(b"") == []
    assert parse_wos_flatfile("FN x\nVR 1.0\nEF\n") == []


def test_cr_year_token():
    r = parse_wos_flatfile(block("A1", 2000, refs=["DOE K, 1993, J CHEM, V12, P4", "ANON, NATURE, V1"]))[0]
    assert r.cited_refs == (CitedRef("DOE K, 1993, J CHEM, V12, P4", 1993, None), CitedRef("ANON, NATURE, V1", None, None))


def test_continuation_lines_and_fields():
    text = block("A1", 2001, authors=["Müller, H.-J.", "de la Cruz, M"], title="Cat systems", journal="J Cat",
                 addresses=["[Muller, HJ] Univ Bonn, Bonn, Germany.", "Harvard Univ, Cambridge, MA 02138 USA."],
                 cats=["Chemistry", "Physics"])
    r = parse_wos_flatfile(text.encode("utf-8-sig"))[0]
    assert [a.last_name for a in r.authors] == ["MULLER", "DE LA CRUZ"]
    assert r.authors[0].initials == "HJ"
    assert r.addresses == ("DE", "US")
    assert r.subject_categories == {"CHEMISTRY", "PHYSICS"}
    assert r.journal == "J CAT"


def test_file_object_input():
    text = block("A1", 2000)
    assert parse_wos_flatfile(io.BytesIO(text.encode())) == parse_wos_flatfile(text)


@pytest.mark.parametrize("address,code", [
    ("Univ Tokyo, Tokyo 113, Japan.", "JP"),
    ("Chinese Acad Sci, Beijing 100080, Peoples R China", "CN"),
    ("[Smith, J] MIT, Cambridge, MA 02139 USA", "US"),
    ("Univ Oxford, Oxford OX1 3QR, England", "GB"),
    ("Nowhere Inst, Atlantis", None),
])
def test_country_code(address, code):
    assert country_code(address) == code


def test_normalize_last_name():
    assert normalize_last_name("Gómez-Ruiz") == "GOMEZ-RUIZ"
    assert normalize_last_name("  o'brien ") == "O'BRIEN"


def test_dedup_first_wins():
    a = record("X", 2000, ["A"], title="first")
    b = record("X", 2001, ["B"], title="second")
    c = normalize_corpus([a, b])
    assert len(c) == 1 and c["X"].title == "first"
    assert len(c.warnings) == 1


def test_reference_matching_exact():
    c = corpus(
        record("A", refs=["B", "SMITH J, 1999, J, V1, P1, C", "A", "D"]),
        record("B"), record("C"),
    )
    matched = [r.matched_record_id for r in c["A"].cited_refs]
    assert matched == ["B", "C", None, None]
    # a matched reference with no year token takes the cited record's year
    assert c["A"].cited_refs[0].year == 2000


def test_records_without_authors_dropped_and_year_filter():
    recs = [record("A", 1990), record("B", 2000), BiblioRecord("C", 2000, (), "", "", frozenset(), (), ())]
    c = normalize_corpus(recs, year_range=(1991, 2010))
    assert c.ids == {"B"}
    assert len(c.warnings) == 2


def test_subject_filter():
    c = corpus(record("A", cats=["CHEM"]), record("B", cats=["MED"]))
    assert apply_subject_filter(c, {"CHEM", "PHYS"}).ids == {"A"}
    assert apply_subject_filter(c, {"CHEM", "MED"}).records == c.records
    with pytest.raises(ValueError):
        apply_subject_filter(c, set())


def test_disambiguation_map():
    recs = parse_wos_flatfile(wos(block("R1", 2000, ["LEE, J", "KIM, S"]), block("R2", 2001, ["LEE, J"])))
    c = normalize_corpus(recs)
    m = load_disambiguation_map("record_id,author_position,resolved_id\nR1,1,lee-1\nR2,1,lee-2\n")
    d = apply_disambiguation(c, m)
    assert d["R1"].author_keys() == ["lee-1", "KIM, S"]
    assert build_author_table(d).total_authors == 3
    assert build_author_table(c).total_authors == 2


def test_author_table_counts():
    c = corpus(record("1", authors=["A", "B", "C"]), record("2", authors=["B", "C"]),
               record("3", authors=["C"]), record("4", authors=["C"]), record("5", authors=["C"]))
    t = build_author_table(c, min_pubs=2)
    assert sorted(t.entries) == ["B", "C"]
    assert t.one_time_authors == 1 and t.removed == 1
    assert t["C"].publication_count == 5 == len(t["C"].record_ids)
    assert len(build_author_table(c, 1)) == 3
    with pytest.raises(ValueError):
        build_author_table(c, 0)


def test_last_name_commonality():
    recs = parse_wos_flatfile(wos(block("1", 2000, ["SMITH, J", "SMITH, K", "DOE, A"])))
    t = build_author_table(normalize_corpus(recs))
    assert last_name_commonality(t) == {"SMITH": 2, "DOE": 1}
    assert last_name_commonality(build_author_table(corpus())) == {}


def test_toy_roundtrip_fixed_point(toy_path):
    with open(toy_path, "rb") as fh:
        c = normalize_corpus(parse_wos_flatfile(fh.read()))
    text = dump_canonical(c)
    again = load_canonical(text)
    assert again.records == c.records
    assert dump_canonical(again) == text
    assert dump_canonical(normalize_corpus(again)) == text


def test_pub_count_sum_at_least_corpus_size(toy_path):
    with open(toy_path, "rb") as fh:
        c = normalize_corpus(parse_wos_flatfile(fh.read()))
    t = build_author_table(c, 1)
    assert sum(e.publication_count for e in t.entries.values()) >= len(c)
    for r in c:
        assert all(ref.matched_record_id != r.record_id for ref in r.cited_refs)


_name = st.text(string.ascii_uppercase + " -", min_size=1, max_size=8).filter(lambda s: s.strip(" -"))
_text = st.text(st.characters(blacklist_categories=("Cs", "Cc")), max_size=20)


@st.composite
def _records(draw):
    n = draw(st.integers(1, 6))
    ids = [f"ID{i}" for i in range(n)]
    out = []
    for rid in ids:
        authors = tuple(AuthorName(normalize_last_name(a) or "X", draw(st.sampled_from(["", "J", "AB"])),
                                   draw(st.one_of(st.none(), st.sampled_from(["r1", "r2"]))))
                        for a in draw(st.lists(_name, min_size=1, max_size=3)))
        refs = tuple(CitedRef(draw(st.sampled_from(ids + ["OUT, 1999, J"])), draw(st.one_of(st.none(), st.integers(1950, 2010))))
                     for _ in range(draw(st.integers(0, 3))))
        out.append(BiblioRecord(rid, draw(st.integers(1991, 2010)), authors, draw(_text), draw(_text),
                                frozenset(draw(st.lists(st.sampled_from(["CHEM", "PHYS"]), max_size=2))),
                                tuple(draw(st.lists(st.sampled_from(["US", "DE", "CN"]), max_size=3))), refs))
    return out


@settings(max_examples=60, deadline=None)
@given(_records())
def test_canonical_roundtrip_property(recs):
    c = normalize_corpus(recs)
    text = dump_canonical(c)
    assert dump_canonical(load_canonical(text)) == text
    assert load_canonical(text).records == c.records
    for r in c:
        for ref in r.cited_refs:
            assert ref.matched_record_id is None or (ref.matched_record_id in c and ref.matched_record_id != r.record_id)
