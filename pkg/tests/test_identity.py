import pytest
from hypothesis import given, strategies as st

from votechain.errors import EmptyField, SeparatorInField
from votechain.identity import IdentityCommitment, PersonalData, canonicalize, commit
from oracles import sha256_oracle

DATA = PersonalData("AK123456", "Maria", "Papadopoulou", "6971234567")


def test_canonical_layout():
    assert canonicalize(DATA) == b"AK123456|Maria|Papadopoulou|6971234567"


def test_commitment_is_digest_of_canonical_bytes():
    assert commit(DATA).digest == sha256_oracle(canonicalize(DATA))


def test_unicode_normalization_stabilizes_commitment():
    composed = PersonalData("AK1", "José", "R", "210")       # é as one code point
    decomposed = PersonalData("AK1", "José", "R", "210")    # e + combining accent
    assert commit(composed) == commit(decomposed)


@pytest.mark.parametrize("field", ["id_number", "first_name", "last_name", "phone"])
def test_empty_field_rejected(field):
    from dataclasses import replace
    with pytest.raises(EmptyField):
        commit(replace(DATA, **{field: ""}))


def test_non_string_field_rejected():
    with pytest.raises(EmptyField):
        commit(PersonalData("AK1", None, "R", "210"))


@pytest.mark.parametrize("field", ["id_number", "first_name", "last_name", "phone"])
def test_separator_in_field_rejected(field):
    from dataclasses import replace
    with pytest.raises(SeparatorInField):
        commit(replace(DATA, **{field: "a|b"}))


def test_field_boundaries_cannot_collide():
    # without the separator ban these two would share canonical bytes
    a = PersonalData("AB", "C", "D", "1")
    b = PersonalData("A", "BC", "D", "1")
    assert commit(a) != commit(b)


def test_commitment_size_enforced():
    with pytest.raises(ValueError):
        IdentityCommitment(b"\x00" * 31)
    assert IdentityCommitment(b"\x11" * 32).hex == "11" * 32


clean_text = st.text(min_size=1, max_size=20).filter(lambda s: "|" not in s)


@given(clean_text, clean_text, clean_text, clean_text)
def test_commitment_matches_oracle(a, b, c, d):
    data = PersonalData(a, b, c, d)
    assert commit(data).digest == sha256_oracle(canonicalize(data))


@given(clean_text, clean_text, clean_text, clean_text, clean_text)
def test_changing_any_field_changes_commitment(a, b, c, d, other):
    import unicodedata
    base = commit(PersonalData(a, b, c, d))
    if unicodedata.normalize("NFC", other) != unicodedata.normalize("NFC", b):
        assert commit(PersonalData(a, other, c, d)) != base
