import pytest
from hypothesis import given
from hypothesis import strategies as st

from goldens import SENTENCE_1, SENTENCE_2
from segtr.errors import ParseError
from segtr.morphdict import (
    META_VARIANTS, MorphEntry, MorphVariant, load_dictionary, segment_morph, write_dictionary,
)
from segtr.text import tokenize_words

ROW = "yıkıyor\t1\tyıkamak\tyıkamak Pos Iyor A3sg\tVerb Pos Prog A3sg\tyık\tyık Pos Iyor A3sg\tVerb Pos Prog A3sg\tVerb"


def test_seven_variants():
    assert len(MorphVariant) == 7
    assert len(META_VARIANTS) == 3


def test_load_row(tmp_path):
    p = tmp_path / "d.tsv"
    p.write_text(ROW + "\n", encoding="utf-8")
    d = load_dictionary(p)
    assert d.lookup("yıkıyor").stem_suffix == ("yık", "Pos", "Iyor", "A3sg")
    assert len(d) == 1


def test_absent_surface_is_unknown(fixture_dict):
    entry = fixture_dict.lookup("qqq")
    assert entry.token_meta == ("Unk",)
    assert entry.lemma == entry.stem == entry.lemma_suffix == entry.stem_suffix == ("qqq",)
    assert not fixture_dict.is_known("qqq")


def test_two_rows(tmp_path):
    p = tmp_path / "d.tsv"
    other = ROW.replace("yıkıyor", "yıkadı", 1)
    p.write_text(ROW + "\n" + other + "\n", encoding="utf-8")
    assert len(load_dictionary(p)) == 2


def test_duplicate_last_wins(tmp_path):
    p = tmp_path / "d.tsv"
    second = ROW[: ROW.rfind("\t")] + "\tNoun"
    p.write_text(ROW + "\n" + second + "\n", encoding="utf-8")
    d = load_dictionary(p)
    assert d.duplicates == 1
    assert d.lookup("yıkıyor").token_meta == ("Noun",)


def test_empty_file(tmp_path):
    p = tmp_path / "d.tsv"
    p.write_text("", encoding="utf-8")
    assert len(load_dictionary(p)) == 0


@pytest.mark.parametrize("row", [
    "kısa\t1\tx",
    "kelime\t2" + "\tx" * 7,
    "kelime\t1\tx\t\tx\tx\tx\tx\tx",
    "kelime\t1\tx\ty z\tA\tx\tx\tA\tN",
])
def test_malformed_rows(tmp_path, row):
    p = tmp_path / "d.tsv"
    p.write_text(ROW + "\n" + row + "\n", encoding="utf-8")
    with pytest.raises(ParseError, match=":2:"):
        load_dictionary(p)


def test_running_examples(fixture_dict):
    s1, s2 = tokenize_words(SENTENCE_1), tokenize_words(SENTENCE_2)
    assert segment_morph(fixture_dict, MorphVariant.TOKEN_META, s1) == [
        "Noun", "Noun", "Noun", "Noun", "Unk", "Adj", "Adj", "Noun", "Punc"]
    assert " ".join(segment_morph(fixture_dict, MorphVariant.LEMMA, s2)) == (
        "geçen hafta el ulaşmak , kullanım kolay bulaşık pırıl pırıl yıkamak .")


@pytest.mark.parametrize("variant", list(MorphVariant))
def test_empty_input(fixture_dict, variant):
    assert segment_morph(fixture_dict, variant, []) == []


def test_one_token_per_word_variants(fixture_dict):
    words = tokenize_words(SENTENCE_1 + " " + SENTENCE_2) + ["bilinmeyen"]
    for variant in (MorphVariant.LEMMA, MorphVariant.TOKEN_META):
        assert len(segment_morph(fixture_dict, variant, words)) == len(words)


def test_suffix_variants_start_with_root(fixture_dict):
    for entry in fixture_dict.entries.values():
        if entry.known:
            assert entry.lemma_suffix[0] == entry.lemma[0]
            assert entry.stem_suffix[0] == entry.stem[0]


def test_meta_tags_closed_over_fixture(fixture_dict):
    tags = {t for e in fixture_dict.entries.values() for v in META_VARIANTS for t in e.tokens(v)}
    tags.add("Unk")
    words = tokenize_words(SENTENCE_1 + " " + SENTENCE_2) + ["yokyok"]
    for variant in META_VARIANTS:
        assert set(segment_morph(fixture_dict, variant, words)) <= tags


@given(st.text(alphabet="qwxzjğ", min_size=1, max_size=12))
def test_lookup_never_fails(fixture_dict, surface):
    entry = fixture_dict.lookup(surface)
    assert isinstance(entry, MorphEntry)
    if not entry.known:
        assert entry.lemma_meta == entry.stem_meta == entry.token_meta == ("Unk",)


def test_lookup_is_case_insensitive(fixture_dict):
    assert fixture_dict.lookup("FİLM").known


def test_write_load_round_trip(tmp_path, fixture_dict):
    p = tmp_path / "d.tsv"
    write_dictionary(p, fixture_dict)
    assert load_dictionary(p).entries == fixture_dict.entries
