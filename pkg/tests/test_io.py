import pytest

from centralizer_lab.automorphisms import LetterMap
from centralizer_lab.constructions import odometer_setup
from centralizer_lab.groups import cyclic_group, symmetric_group
from centralizer_lab.io import (
    FormatError,
    format_language,
    format_letter_maps,
    parse_language,
    parse_letter_maps,
    parse_table,
    read_action_table,
    read_group_table,
    read_words,
    write_group_table,
    write_letter_maps,
    write_words,
)
from centralizer_lab.subshift import SubstitutionSequence, generate_union_language


def test_group_table_round_trip(tmp_path):
    s3 = symmetric_group(3)
    path = tmp_path / "s3.txt"
    write_group_table(path, s3)
    assert path.read_text().splitlines()[0] == "6"
    assert read_group_table(path).mul == s3.mul


def test_action_table_with_alphabet_header(tmp_path):
    path = tmp_path / "act.txt"
    path.write_text("2 3\n0 1 2\n1 2 0\n")
    with pytest.raises(Exception):
        read_action_table(path, cyclic_group(2))  # row 1 is not an involution
    path.write_text("2 3\n0 1 2\n0 2 1\n")
    act = read_action_table(path, cyclic_group(2))
    assert act.alphabet_size == 3


@pytest.mark.parametrize("text", ["", "2\n0 1\n", "2\n0 1\n1 x\n", "2 3\n0 1\n1 0\n"])
def test_bad_tables(text):
    with pytest.raises(FormatError):
        parse_table(text)


def test_words_round_trip(tmp_path):
    words = [(0, 1, 3), (2,), (3, 3)]
    write_words(tmp_path / "w.txt", words)
    assert (tmp_path / "w.txt").read_text() == "0 1 3\n2\n3 3\n"
    assert read_words(tmp_path / "w.txt") == words


def test_language_dump_round_trip():
    action, gens, _ = odometer_setup(4)
    lang = generate_union_language(SubstitutionSequence.from_action(action, [gens]), 4, 3)
    text = format_language(lang)
    assert text.startswith("len=1 count=4\n0\n1\n2\n3\nlen=2 count=")
    assert parse_language(text) == lang


def test_language_dump_count_mismatch():
    with pytest.raises(FormatError):
        parse_language("len=1 count=2\n0\n")


def test_letter_map_file_round_trip(tmp_path):
    maps = [LetterMap((1, 2, 0), "r"), LetterMap((0, 2, 1), "s")]
    assert format_letter_maps(maps) == "#labels r s\n1 2 0\n0 2 1\n"
    write_letter_maps(tmp_path / "m.txt", maps)
    assert parse_letter_maps((tmp_path / "m.txt").read_text()) == maps
    assert [m.label for m in parse_letter_maps("1 0\n0 1\n")] == ["h0", "h1"]
    with pytest.raises(FormatError):
        parse_letter_maps("#labels a\n1 0\n0 1\n")
