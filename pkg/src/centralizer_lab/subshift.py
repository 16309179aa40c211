"""Words, generalized substitutions and finite-horizon S-adic languages.

Words are plain tuples of letter ids. A :class:`Language` holds the factors
of length ``1..max_len`` as frozensets, one per length ("stratum").
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .groups import GroupAction, QuotientTower

Word = tuple[int, ...]

BUDGET_ENV = "CENTRALIZER_LAB_BUDGET"
DEFAULT_BUDGET = 5_000_000


class BudgetExceeded(RuntimeError):
    """A word expansion would exceed the configured letter budget."""


class LanguageError(ValueError):
    pass


def default_budget() -> int:
    return int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))


def check_word(w: Iterable[int], alphabet_size: int) -> Word:
    w = tuple(int(a) for a in w)
    for i, a in enumerate(w):
        if not 0 <= a < alphabet_size:
            raise LanguageError(f"letter {a} at position {i} outside alphabet of size {alphabet_size}")
    return w


def factors(w: Sequence[int], max_len: int) -> dict[int, set[Word]]:
    out: dict[int, set[Word]] = {ell: set() for ell in range(1, max_len + 1)}
    n = len(w)
    w = tuple(w)
    for ell in range(1, min(max_len, n) + 1):
        bucket = out[ell]
        for i in range(n - ell + 1):
            bucket.add(w[i : i + ell])
    return out


@dataclass(frozen=True)
class Substitution:
    images: tuple[Word, ...]
    label: str = "tau"

    def __post_init__(self):
        n = len(self.images)
        if n == 0:
            raise LanguageError("substitution needs at least one letter")
        for a, img in enumerate(self.images):
            if not img:
                raise LanguageError(f"image of letter {a} is empty")
            check_word(img, n)

    @property
    def alphabet_size(self) -> int:
        return len(self.images)

    @property
    def constant_length(self) -> int | None:
        lengths = {len(img) for img in self.images}
        return lengths.pop() if len(lengths) == 1 else None

    def __call__(self, w: Iterable[int]) -> Word:
        return apply_substitution(self, w)

    def incidence_matrix(self) -> list[list[int]]:
        """``M[a][b]`` = number of occurrences of ``a`` in the image of ``b``."""
        n = self.alphabet_size
        m = [[0] * n for _ in range(n)]
        for b, img in enumerate(self.images):
            for a in img:
                m[a][b] += 1
        return m


def substitution_from_action(action: GroupAction, gens: Sequence[int]) -> Substitution:
    """``a -> act(s_1, a) act(s_2, a) ... act(s_d, a)`` for the ordered generators."""
    grp = action.group
    gens = [int(s) for s in gens]
    if not gens:
        raise LanguageError("generator list is empty")
    if gens[0] != grp.identity:
        raise LanguageError(f"first generator must be the identity, got {gens[0]}")
    if len(set(gens)) != len(gens):
        raise LanguageError("generators must be distinct")
    missing = [s for s in gens if grp.inv[s] not in gens]
    if missing:
        raise LanguageError(f"generator set is not symmetric: inverse of {missing[0]} missing")
    images = tuple(tuple(action.act[s][a] for s in gens) for a in action.letters)
    return Substitution(images, f"tau[{','.join(map(str, gens))}]")


@dataclass(frozen=True)
class SubstitutionSequence:
    """Finite schedule ``tau_0 .. tau_K``; beyond it the last entry repeats."""

    seq: tuple[Substitution, ...]
    nested: bool = False

    def __post_init__(self):
        if not self.seq:
            raise LanguageError("empty substitution sequence")
        n = self.seq[0].alphabet_size
        if any(t.alphabet_size != n for t in self.seq):
            raise LanguageError("all substitutions must share the alphabet")
        if self.nested:
            for i, (s, t) in enumerate(zip(self.seq, self.seq[1:])):
                for a in range(n):
                    if t.images[a][: len(s.images[a])] != s.images[a]:
                        raise LanguageError(f"tau_{i}({a}) is not a prefix of tau_{i + 1}({a})")

    @classmethod
    def stationary(cls, sub: Substitution) -> "SubstitutionSequence":
        return cls((sub,), nested=True)

    @classmethod
    def from_action(cls, action: GroupAction, schedule: Sequence[Sequence[int]]) -> "SubstitutionSequence":
        return cls(tuple(substitution_from_action(action, g) for g in schedule), nested=True)

    @property
    def alphabet_size(self) -> int:
        return self.seq[0].alphabet_size

    def __getitem__(self, n: int) -> Substitution:
        return self.seq[min(n, len(self.seq) - 1)]


def _as_sequence(obj) -> SubstitutionSequence:
    if isinstance(obj, SubstitutionSequence):
        return obj
    if isinstance(obj, Substitution):
        return SubstitutionSequence.stationary(obj)
    raise TypeError(f"expected Substitution or SubstitutionSequence, got {type(obj).__name__}")


def apply_substitution(sub_or_seq, w: Iterable[int], depth: int | None = None) -> Word:
    """Concatenate images letter by letter.

    For a sequence, ``depth=j`` applies ``tau_0 o ... o tau_j`` (``tau_j``
    first); ``depth=None`` applies ``tau_0`` only.
    """
    if isinstance(sub_or_seq, Substitution):
        w = check_word(w, sub_or_seq.alphabet_size)
        out: list[int] = []
        for a in w:
            out.extend(sub_or_seq.images[a])
        return tuple(out)
    seq = _as_sequence(sub_or_seq)
    w = check_word(w, seq.alphabet_size)
    for n in range(depth or 0, -1, -1):
        w = apply_substitution(seq[n], w)
    return w


@dataclass(frozen=True)
class Language:
    max_len: int
    strata: tuple[frozenset[Word], ...]  # strata[l - 1] holds the words of length l
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    def stratum(self, ell: int) -> frozenset[Word]:
        if not 1 <= ell <= self.max_len:
            raise LanguageError(f"length {ell} outside 1..{self.max_len}")
        return self.strata[ell - 1]

    def sorted_stratum(self, ell: int) -> list[Word]:
        return sorted(self.stratum(ell))

    @property
    def top(self) -> frozenset[Word]:
        return self.strata[-1]

    def __contains__(self, w) -> bool:
        w = tuple(w)
        return 1 <= len(w) <= self.max_len and w in self.strata[len(w) - 1]

    def letters(self) -> frozenset[int]:
        return frozenset(w[0] for w in self.strata[0])

    def counts(self) -> list[int]:
        return [len(s) for s in self.strata]

    def is_factor_closed(self) -> bool:
        for ell in range(2, self.max_len + 1):
            lower = self.strata[ell - 2]
            for w in self.strata[ell - 1]:
                if w[1:] not in lower or w[:-1] not in lower:
                    return False
        return True

    @classmethod
    def from_sets(cls, sets: dict[int, Iterable[Word]], max_len: int, provenance: dict | None = None) -> "Language":
        strata = tuple(frozenset(sets.get(ell, ())) for ell in range(1, max_len + 1))
        return cls(max_len, strata, provenance or {})

    @classmethod
    def from_words(cls, words: Iterable[Sequence[int]], max_len: int, provenance: dict | None = None) -> "Language":
        """Factor-closed language of the given finite words."""
        acc: dict[int, set[Word]] = {ell: set() for ell in range(1, max_len + 1)}
        for w in words:
            for ell, ws in factors(w, max_len).items():
                acc[ell] |= ws
        return cls.from_sets(acc, max_len, provenance)

    @classmethod
    def full_shift(cls, alphabet_size: int, max_len: int) -> "Language":
        return cls.from_sets(
            {ell: product(range(alphabet_size), repeat=ell) for ell in range(1, max_len + 1)},
            max_len,
            {"kind": "full shift", "alphabet_size": alphabet_size},
        )

    @classmethod
    def periodic(cls, u: Sequence[int], max_len: int) -> "Language":
        """Language of the bi-infinite periodic sequence ``u^omega``."""
        u = tuple(u)
        reps = max_len // len(u) + 2
        return cls.from_words([u * reps], max_len, {"kind": "periodic", "u": list(u)})


def _expansion_lengths(seq: SubstitutionSequence, depth: int) -> list[list[int]]:
    """``lengths[i][a] = |tau_0 o ... o tau_i (a)|`` for ``i <= depth``."""
    n = seq.alphabet_size
    out = [[len(seq[0].images[a]) for a in range(n)]]
    for i in range(1, depth + 1):
        prev = out[-1]
        out.append([sum(prev[b] for b in seq[i].images[a]) for a in range(n)])
    return out


class _BlockExpander:
    """Expansions ``tau_0 o ... o tau_i (a)`` with the budget enforced."""

    def __init__(self, seq: SubstitutionSequence, max_len: int, depth: int, budget: int | None):
        self.seq = seq
        self.budget = default_budget() if budget is None else budget
        self.lengths = _expansion_lengths(seq, depth)
        # First depth whose every block is long enough that a factor of length
        # max_len meets at most two adjacent blocks.
        self.cut = next((i for i, ls in enumerate(self.lengths) if min(ls) >= max_len - 1), depth)
        self._cache: dict[tuple[int, int], Word] = {}

    def __call__(self, i: int, a: int) -> Word:
        key = (i, a)
        if key not in self._cache:
            if self.lengths[i][a] > self.budget:
                raise BudgetExceeded(
                    f"expanding letter {a} to depth {i} needs {self.lengths[i][a]} letters (budget {self.budget})"
                )
            self._cache[key] = apply_substitution(self.seq, (a,), depth=i)
        return self._cache[key]

    def blocks(self, seed: int, depth: int) -> tuple[set[Word], set[tuple[int, int]], set[int]]:
        """Words to scan directly, plus the letters and adjacent letter pairs of
        ``tau_(cut+1) o ... o tau_j (seed)`` over every ``j`` from ``cut`` to ``depth``."""
        direct = {self(j, seed) for j in range(min(self.cut, depth + 1))}
        letters_all: set[int] = set()
        pairs_all: set[tuple[int, int]] = set()
        for j in range(self.cut, depth + 1):
            letters = {seed}
            pairs: set[tuple[int, int]] = set()
            for k in range(j, self.cut, -1):
                sub = self.seq[k]
                new_pairs = set()
                for a in letters:
                    img = sub.images[a]
                    new_pairs.update(zip(img, img[1:]))
                for a, b in pairs:
                    new_pairs.add((sub.images[a][-1], sub.images[b][0]))
                letters = {x for a in letters for x in sub.images[a]}
                pairs = new_pairs
            letters_all |= letters
            pairs_all |= pairs
        return direct, pairs_all, letters_all


def _collect(expander: _BlockExpander, seeds: Iterable[int], max_len: int, depth: int) -> dict[int, set[Word]]:
    direct: set[Word] = set()
    pairs: set[tuple[int, int]] = set()
    letters: set[int] = set()
    for seed in seeds:
        d, p, l = expander.blocks(seed, depth)
        direct |= d
        pairs |= p
        letters |= l
    i = expander.cut
    words = list(direct)
    words += [expander(i, a) for a in sorted(letters)]
    words += [expander(i, a) + expander(i, b) for a, b in sorted(pairs)]
    acc: dict[int, set[Word]] = {ell: set() for ell in range(1, max_len + 1)}
    for w in words:
        for ell, ws in factors(w, max_len).items():
            acc[ell] |= ws
    return acc


def _check_horizons(max_len: int, depth: int) -> None:
    if max_len < 1:
        raise LanguageError("max_len must be at least 1")
    if depth < 0:
        raise LanguageError("depth must be nonnegative")


def generate_language(seq, seed: int, max_len: int, depth: int, budget: int | None = None) -> Language:
    """Factors of length ``<= max_len`` of ``tau_0 o ... o tau_j (seed)``, ``j <= depth``.

    Only short blocks are ever materialized: once every ``tau_0..tau_i``-word
    has length at least ``max_len - 1``, each factor sits inside the image of
    one or two adjacent letters, so it suffices to track which letters and
    letter pairs occur in ``tau_{i+1} o ... o tau_j (seed)``.
    """
    seq = _as_sequence(seq)
    _check_horizons(max_len, depth)
    if not 0 <= seed < seq.alphabet_size:
        raise LanguageError(f"seed letter {seed} outside alphabet")
    acc = _collect(_BlockExpander(seq, max_len, depth, budget), [seed], max_len, depth)
    return Language.from_sets(
        acc, max_len, {"seed": seed, "depth": depth, "schedule": [s.label for s in seq.seq]}
    )


def generate_union_language(seq, max_len: int, depth: int, budget: int | None = None) -> Language:
    """Union over every seed letter of :func:`generate_language`.

    Letterwise bijections commuting with the substitutions map this union
    onto itself at every finite horizon, unlike a single-seed language.
    """
    seq = _as_sequence(seq)
    _check_horizons(max_len, depth)
    acc = _collect(_BlockExpander(seq, max_len, depth, budget), range(seq.alphabet_size), max_len, depth)
    return Language.from_sets(acc, max_len, {"seed": "all", "depth": depth, "schedule": [s.label for s in seq.seq]})


@dataclass(frozen=True)
class PrimitivityResult:
    primitive: bool
    power: int | None
    target_power: int | None
    trail: tuple[tuple[tuple[int, ...], ...], ...]


def _matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def primitivity_check(sub: Substitution, target: Iterable[int] | None = None) -> PrimitivityResult:
    """Search ``k <= n^2`` with ``M^k`` entrywise positive.

    ``target_power`` is the least ``k <= n^2`` such that every column of
    ``M^k`` has a positive entry in a row of ``target`` (every letter's
    ``k``-fold image meets ``target``). ``trail`` lists ``M^1 .. M^k`` up to the
    last power examined.
    """
    n = sub.alphabet_size
    target = set(range(n)) if target is None else set(target)
    if not target or any(not 0 <= v < n for v in target):
        raise LanguageError("target set must be a nonempty set of letters")
    m = sub.incidence_matrix()
    power = target_power = None
    cur = m
    trail = []
    for k in range(1, n * n + 1):
        trail.append(tuple(tuple(r) for r in cur))
        if target_power is None and all(any(cur[v][b] > 0 for v in target) for b in range(n)):
            target_power = k
        if power is None and all(x > 0 for r in cur for x in r):
            power = k
        if power is not None and target_power is not None:
            break
        cur = _matmul(cur, m)
    return PrimitivityResult(power is not None, power, target_power, tuple(trail))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: object = None
    note: str = ""

    def __bool__(self) -> bool:
        return self.ok


def compare_languages(la: Language, lb: Language) -> Verdict:
    """Stratum-by-stratum equality; witness ``(length, least word of the symmetric difference)``."""
    if la.max_len != lb.max_len:
        raise LanguageError("languages have different horizons")
    for ell in range(1, la.max_len + 1):
        diff = la.stratum(ell) ^ lb.stratum(ell)
        if diff:
            return Verdict(False, (ell, min(diff)))
    return Verdict(True)


def language_independence_check(seq, a: int, b: int, max_len: int, depth: int, budget: int | None = None) -> Verdict:
    """Compare the languages seeded by ``a`` and ``b`` stratum by stratum.

    A failing verdict carries ``(length, word)``: the shortest length where
    they differ and the least word of the symmetric difference.
    """
    if a == b:
        return Verdict(True, None, "identical seeds")
    return compare_languages(
        generate_language(seq, a, max_len, depth, budget),
        generate_language(seq, b, max_len, depth, budget),
    )


def recurrence_profile(lang: Language, w: Sequence[int], horizon: int) -> Verdict:
    """Least ``R <= horizon`` such that every length-``R`` word of ``lang`` contains ``w``.

    ``witness`` is ``R`` on success; on failure it is a length-``horizon``
    word avoiding ``w``.
    """
    w = tuple(w)
    if w not in lang:
        raise LanguageError(f"word {w} is not in the language")
    if horizon > lang.max_len:
        raise LanguageError(f"horizon {horizon} exceeds language max_len {lang.max_len}")
    k = len(w)
    for r in range(k, horizon + 1):
        stratum = lang.stratum(r)
        if stratum and all(_contains(u, w) for u in stratum):
            return Verdict(True, r)
    avoiding = sorted(u for u in lang.stratum(horizon) if not _contains(u, w))
    if not avoiding:
        return Verdict(False, None, f"stratum {horizon} is empty")
    return Verdict(False, avoiding[0], f"not uniformly recurrent at horizon {horizon}")


def _contains(u: Word, w: Word) -> bool:
    k = len(w)
    return any(u[i : i + k] == w for i in range(len(u) - k + 1))


def aperiodicity_check(lang: Language, p_max: int) -> Verdict:
    """``ok`` means no period ``p <= p_max`` explains the top stratum.

    Otherwise ``witness`` is the least ``u`` (shortest, then lexicographic)
    whose periodic sequence ``u^omega`` has all top-stratum words as factors.
    """
    if lang.max_len < 2 * p_max:
        raise LanguageError(f"max_len {lang.max_len} is below 2 * p_max = {2 * p_max}")
    top = lang.top
    n = lang.max_len
    if not top:
        return Verdict(False, None, "top stratum is empty")
    for p in range(1, p_max + 1):
        for u in lang.sorted_stratum(p):
            periodic = u * (n // p + 2)
            windows = {periodic[i : i + n] for i in range(p)}
            if top <= windows:
                return Verdict(False, u, f"period {p}")
    return Verdict(True, None, f"no period <= {p_max}")


@dataclass(frozen=True)
class AlphabetMetric:
    """Letter metric: ``discrete`` (0/1) or ``tower`` (``2**-s``, ``s`` = deepest
    tower level where the letters agree). Values are exact fractions."""

    mode: str = "discrete"
    tower: QuotientTower | None = None

    def __post_init__(self):
        if self.mode not in ("discrete", "tower"):
            raise ValueError(f"unknown metric mode {self.mode!r}")
        if self.mode == "tower" and self.tower is None:
            raise ValueError("tower metric needs a tower")

    def __call__(self, a: int, b: int) -> Fraction:
        if a == b:
            return Fraction(0)
        if self.mode == "discrete":
            return Fraction(1)
        return Fraction(1, 2 ** self.tower.agreement_depth(a, b))

    def words(self, u: Sequence[int], v: Sequence[int]) -> Fraction:
        """Word pseudometric: max letter distance over the common prefix range."""
        return max((self(a, b) for a, b in zip(u, v)), default=Fraction(0))


def seq_distance(x: Sequence[int], y: Sequence[int], metric: AlphabetMetric | None = None, center: int | None = None) -> Fraction:
    """Windowed ``sum_n 2^-|n| dist(x_n, y_n)`` with index 0 at ``center``."""
    if len(x) != len(y):
        raise LanguageError(f"windows differ in length: {len(x)} vs {len(y)}")
    metric = metric or AlphabetMetric()
    center = len(x) // 2 if center is None else center
    return sum(
        (Fraction(1, 2 ** abs(i - center)) * metric(a, b) for i, (a, b) in enumerate(zip(x, y))),
        Fraction(0),
    )


