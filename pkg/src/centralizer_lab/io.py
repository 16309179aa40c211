"""Plain-text file formats: tables, words, language dumps and letter-map files."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .automorphisms import LetterMap
from .groups import FiniteGroup, GroupAction, group_from_table
from .subshift import Language, Word


class FormatError(ValueError):
    pass


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _ints(line: str, where: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise FormatError(f"{where}: expected decimal ids, got {line!r}") from exc


def parse_table(text: str) -> tuple[int, int, list[list[int]]]:
    """Header ``order`` or ``order alphabet_size`` followed by ``order`` rows.

    Returns ``(order, width, rows)``; the width defaults to the order.
    """
    lines = _lines(text)
    if not lines:
        raise FormatError("empty table")
    head = _ints(lines[0], "header")
    if len(head) not in (1, 2) or min(head) < 1:
        raise FormatError(f"header must be 'order' or 'order alphabet_size', got {lines[0]!r}")
    order = head[0]
    width = head[1] if len(head) == 2 else order
    rows = [_ints(ln, f"row {i}") for i, ln in enumerate(lines[1:])]
    if len(rows) != order:
        raise FormatError(f"expected {order} rows, found {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(f"row {i} has {len(row)} entries, expected {width}")
    return order, width, rows


def format_table(rows: Sequence[Sequence[int]], width: int | None = None) -> str:
    order = len(rows)
    head = f"{order}" if width is None or width == order else f"{order} {width}"
    return "\n".join([head, *(" ".join(map(str, r)) for r in rows)]) + "\n"


def read_group_table(path: str | Path, label: str = "table") -> FiniteGroup:
    order, width, rows = parse_table(Path(path).read_text())
    if width != order:
        raise FormatError("a multiplication table must be square")
    return group_from_table(rows, label)


def read_action_table(path: str | Path, group: FiniteGroup, label: str = "explicit") -> GroupAction:
    order, _, rows = parse_table(Path(path).read_text())
    if order != group.order:
        raise FormatError(f"action table has {order} rows but the group has order {group.order}")
    return GroupAction(group, tuple(tuple(r) for r in rows), label)


def write_group_table(path: str | Path, group: FiniteGroup) -> None:
    Path(path).write_text(format_table(group.mul))


def format_words(words: Iterable[Sequence[int]]) -> str:
    return "".join(" ".join(map(str, w)) + "\n" for w in words)


def parse_words(text: str) -> list[Word]:
    return [tuple(_ints(ln, f"word {i}")) for i, ln in enumerate(_lines(text))]


def read_words(path: str | Path) -> list[Word]:
    return parse_words(Path(path).read_text())


def write_words(path: str | Path, words: Iterable[Sequence[int]]) -> None:
    Path(path).write_text(format_words(words))


def format_language(lang: Language) -> str:
    """Strata in increasing length, each sorted and preceded by ``len=l count=c``."""
    out = []
    for ell in range(1, lang.max_len + 1):
        words = lang.sorted_stratum(ell)
        out.append(f"len={ell} count={len(words)}\n")
        out.append(format_words(words))
    return "".join(out)


def parse_language(text: str) -> Language:
    strata: dict[int, set[Word]] = {}
    current = None
    expected: dict[int, int] = {}
    for ln in _lines(text):
        if ln.startswith("len="):
            try:
                fields = dict(tok.split("=", 1) for tok in ln.split())
                current, expected[current] = int(fields["len"]), int(fields["count"])
            except (KeyError, ValueError) as exc:
                raise FormatError(f"bad stratum header {ln!r}") from exc
            strata[current] = set()
            continue
        if current is None:
            raise FormatError("word before the first stratum header")
        w = tuple(_ints(ln, f"stratum {current}"))
        if len(w) != current:
            raise FormatError(f"word {ln!r} has length {len(w)} in stratum {current}")
        strata[current].add(w)
    for ell, c in expected.items():
        if len(strata[ell]) != c:
            raise FormatError(f"stratum {ell} declares {c} words but lists {len(strata[ell])}")
    max_len = max(strata, default=0)
    if sorted(strata) != list(range(1, max_len + 1)):
        raise FormatError("strata must cover lengths 1..max without gaps")
    return Language.from_sets(strata, max_len, {"source": "dump"})


def format_letter_maps(maps: Sequence[LetterMap]) -> str:
    """Sidecar header ``#labels a b c`` then one image list per line."""
    head = "#labels " + " ".join(m.label for m in maps)
    return "\n".join([head, *(" ".join(map(str, m.images)) for m in maps)]) + "\n"


def parse_letter_maps(text: str) -> list[LetterMap]:
    raw = [ln.strip() for ln in text.splitlines() if ln.strip()]
    labels: list[str] | None = None
    if raw and raw[0].startswith("#labels"):
        labels = raw[0].split()[1:]
        raw = raw[1:]
    rows = [_ints(ln, f"map {i}") for i, ln in enumerate(raw) if not ln.startswith("#")]
    if labels is None:
        labels = [f"h{i}" for i in range(len(rows))]
    if len(labels) != len(rows):
        raise FormatError(f"{len(labels)} labels for {len(rows)} maps")
    return [LetterMap(tuple(r), lab) for r, lab in zip(rows, labels)]


def read_letter_maps(path: str | Path) -> list[LetterMap]:
    return parse_letter_maps(Path(path).read_text())


def write_letter_maps(path: str | Path, maps: Sequence[LetterMap]) -> None:
    Path(path).write_text(format_letter_maps(maps))
