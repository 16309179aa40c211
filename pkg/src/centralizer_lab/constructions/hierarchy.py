"""Block hierarchy carrying a faithful letterwise group action.

Level 1 is every single letter. Level ``n`` words have the shape
``w_1 .. w_n x_s(1) .. x_s(k)``: ``n`` free blocks from level ``n - 1``
followed by every marker exactly once, in any order. Markers are a union of
diagonal orbits inside two-block words of level ``n - 1``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from ..groups import GroupAction, action_diagnostics
from ..subshift import AlphabetMetric, Word

DEFAULT_K_CAP = 5
DEFAULT_ENUMERATION_CAP = 200_000
EXACT_ORBIT_SEARCH_MAX = 12


class HierarchyError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def unrank_permutation(rank: int, k: int) -> tuple[int, ...]:
    """Lexicographic unranking of a permutation of ``0..k-1``."""
    items = list(range(k))
    out = []
    for i in range(k, 0, -1):
        f = math.factorial(i - 1)
        q, rank = divmod(rank, f)
        out.append(items.pop(q))
    return tuple(out)


@dataclass
class BlockLevel:
    n: int
    length: int
    markers: tuple[Word, ...]
    prev: "BlockLevel | None" = field(default=None, repr=False)
    alphabet_size: int = 0
    density: Fraction | None = None
    target_density: Fraction | None = None
    words: frozenset[Word] | None = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return len(self.markers)

    @property
    def count(self) -> int:
        if self.prev is None:
            return self.alphabet_size
        return self.prev.count ** self.n * math.factorial(self.k)

    @property
    def enumerated(self) -> bool:
        return self.words is not None

    def word_at(self, index: int) -> Word:
        """Word with canonical index: prefix choices (mixed radix, first block
        most significant) then marker permutation rank."""
        if not 0 <= index < self.count:
            raise IndexError(index)
        if self.prev is None:
            return (index,)
        prefix_index, rank = divmod(index, math.factorial(self.k))
        base = self.prev.count
        blocks = []
        for _ in range(self.n):
            prefix_index, r = divmod(prefix_index, base)
            blocks.append(r)
        out: list[int] = []
        for r in reversed(blocks):
            out.extend(self.prev.word_at(r))
        for s in unrank_permutation(rank, self.k):
            out.extend(self.markers[s])
        return tuple(out)

    def __iter__(self) -> Iterator[Word]:
        return (self.word_at(i) for i in range(self.count))

    def __contains__(self, w) -> bool:
        w = tuple(w)
        if self.words is not None:
            return w in self.words
        return self.decompose(w) is not None

    def decompose(self, w: Sequence[int]) -> tuple[list[Word], list[Word]] | None:
        """Split ``w`` on the canonical grid into (free blocks, marker blocks),
        or ``None`` if it is not a word of this level."""
        w = tuple(w)
        if len(w) != self.length:
            return None
        if self.prev is None:
            return ([w], []) if 0 <= w[0] < self.alphabet_size else None
        lp = self.prev.length
        free = [w[i * lp : (i + 1) * lp] for i in range(self.n)]
        tail = w[self.n * lp :]
        marks = [tail[i * 2 * lp : (i + 1) * 2 * lp] for i in range(self.k)]
        if any(b not in self.prev for b in free):
            return None
        if sorted(marks) != sorted(self.markers):
            return None
        return free, marks


@dataclass
class BlockHierarchy:
    action: GroupAction
    levels: list[BlockLevel]
    k_cap: int = DEFAULT_K_CAP
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    metric: AlphabetMetric = field(default_factory=AlphabetMetric)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> BlockLevel:
        return self.levels[n - 1]


def diagonal(action: GroupAction, g: int, w: Iterable[int]) -> Word:
    row = action.act[g]
    return tuple(row[a] for a in w)


def diagonal_orbit(action: GroupAction, w: Sequence[int]) -> frozenset[Word]:
    return frozenset(diagonal(action, g, w) for g in action.group.elements)


def _density(metric: AlphabetMetric, ambient: Iterable[Word], markers: Sequence[Word]) -> Fraction:
    if metric.mode == "discrete":
        # distances are 0 on equal words and 1 otherwise
        marks = set(markers)
        return Fraction(0) if all(v in marks for v in ambient) else Fraction(1)
    worst = Fraction(0)
    for v in ambient:
        best = min(metric.words(v, x) for x in markers)
        if best > worst:
            worst = best
    return worst


def _pairs(level: BlockLevel) -> Iterator[Word]:
    words = sorted(level.words) if level.words is not None else list(level)
    for u in words:
        for v in words:
            yield u + v


def _choose_markers(action, prev: BlockLevel, eps: Fraction, k_cap: int, cap: int, metric) -> tuple[tuple[Word, ...], Fraction]:
    if prev.count ** 2 > cap:
        raise HierarchyError(
            f"level {prev.n + 1}: {prev.count ** 2} two-block words exceed the enumeration cap; give markers explicitly"
        )
    ambient = list(_pairs(prev))
    orbits: list[frozenset[Word]] = []
    seen: set[Word] = set()
    for w in ambient:
        if w not in seen:
            orb = diagonal_orbit(action, w)
            seen |= orb
            orbits.append(orb)
    orbits.sort(key=min)
    best: tuple[Fraction, tuple[Word, ...]] | None = None
    if len(orbits) <= EXACT_ORBIT_SEARCH_MAX:
        candidates = []
        for r in range(1, len(orbits) + 1):
            for combo in combinations(range(len(orbits)), r):
                size = sum(len(orbits[i]) for i in combo)
                if size <= k_cap:
                    candidates.append((size, combo))
        candidates.sort()
        for size, combo in candidates:
            marks = tuple(sorted(w for i in combo for w in orbits[i]))
            d = _density(metric, ambient, marks)
            if best is None or d < best[0]:
                best = (d, marks)
            if d <= eps:
                return marks, d
    else:
        chosen: list[Word] = []
        for orb in orbits:
            if len(chosen) + len(orb) > k_cap:
                continue
            chosen.extend(orb)
            d = _density(metric, ambient, chosen)
            if best is None or d < best[0]:
                best = (d, tuple(sorted(chosen)))
            if d <= eps:
                return tuple(sorted(chosen)), d
    achievable = None if best is None else best[0]
    raise HierarchyError(
        f"level {prev.n + 1}: no invariant {eps}-dense marker set with at most {k_cap} markers; "
        f"smallest achievable density {achievable}",
        achievable,
    )


def build_block_hierarchy(
    action: GroupAction,
    N: int,
    markers: dict[int, Sequence[Sequence[int]]] | None = None,
    density: dict[int, Fraction] | None = None,
    k_cap: int = DEFAULT_K_CAP,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    metric: AlphabetMetric | None = None,
) -> BlockHierarchy:
    """Build levels ``1..N``.

    ``markers[n]`` lists seed words whose diagonal orbits form the level-``n``
    markers (checked against ``density[n]`` only when that is given);
    otherwise the smallest union of orbits meeting ``density[n]`` (default
    ``1/n``) under the word pseudometric is chosen. Levels with at
    most ``enumeration_cap`` words are materialized.
    """
    if N < 1:
        raise HierarchyError("N must be at least 1")
    diag = action_diagnostics(action)
    if not diag.faithful:
        raise HierarchyError("action is not faithful", diag.faithful_witness)
    metric = metric or AlphabetMetric()
    markers = markers or {}
    density = density or {}
    lvl1 = BlockLevel(1, 1, (), None, action.alphabet_size)
    lvl1.words = frozenset((a,) for a in action.letters)
    levels = [lvl1]
    for n in range(2, N + 1):
        prev = levels[-1]
        explicit_eps = density.get(n)
        eps = Fraction(explicit_eps) if explicit_eps is not None else Fraction(1, n)
        if not 0 < eps <= 1:
            raise HierarchyError(f"density for level {n} must lie in (0, 1]")
        if n in markers:
            marks: set[Word] = set()
            for seed in markers[n]:
                seed = tuple(int(a) for a in seed)
                lp = prev.length
                if len(seed) != 2 * lp or seed[:lp] not in prev or seed[lp:] not in prev:
                    raise HierarchyError(f"marker seed {seed} is not a two-block word of level {n - 1}", seed)
                marks |= diagonal_orbit(action, seed)
            mk = tuple(sorted(marks))
            if len(mk) > k_cap:
                raise HierarchyError(f"level {n}: {len(mk)} markers exceed the cap {k_cap}", len(mk))
            d = _density(metric, _pairs(prev), mk) if prev.count ** 2 <= enumeration_cap else None
            if explicit_eps is None:
                eps = d if d is not None else Fraction(1)
            elif d is not None and d > eps:
                raise HierarchyError(f"level {n}: markers are only {d}-dense, need {eps}", d)
        else:
            mk, d = _choose_markers(action, prev, eps, k_cap, enumeration_cap, metric)
        lvl = BlockLevel(n, (n + 2 * len(mk)) * prev.length, mk, prev, action.alphabet_size, d, eps)
        if lvl.count <= enumeration_cap:
            lvl.words = frozenset(lvl)
        levels.append(lvl)
    return BlockHierarchy(action, levels, k_cap, enumeration_cap, metric)


@dataclass
class HierarchyReport:
    lengths_ok: bool
    invariance_ok: bool
    nesting_ok: bool
    claim_ok: bool
    faithful_ok: bool
    invariance_checked: int
    claim_checked: int
    claim_max_distance: Fraction | None
    claim_exact_hits: int
    faithfulness_witnesses: dict[int, tuple[int, Word]]
    sampled: bool
    seed: int | None
    failures: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.lengths_ok and self.invariance_ok and self.nesting_ok and self.claim_ok and self.faithful_ok


def _level_words(level: BlockLevel, sample: int | None, rng: random.Random | None) -> list[Word]:
    if level.words is not None:
        return sorted(level.words)
    if rng is None or sample is None:
        raise HierarchyError(f"level {level.n} is implicit; sampling needs a budget and a seed")
    return [level.word_at(rng.randrange(level.count)) for _ in range(sample)]


def hierarchy_checks(h: BlockHierarchy, sample: int | None = None, seed: int | None = None) -> HierarchyReport:
    """Invariance, windowed minimality claim and faithfulness of a hierarchy.

    The claim check asks, for each ``u`` in level ``n + 1`` and each two-block
    word ``v`` of level ``n``, that some length-``2 l_n`` factor of ``u u'``
    lies within the level-``n + 1`` marker density of ``v``. With a ``sample``
    budget (and ``seed``), implicit levels and two-block sets larger than the
    budget are sampled instead of enumerated.
    """
    rng = random.Random(seed) if seed is not None else None
    action = h.action
    grp = action.group
    failures: list[tuple] = []
    sampled = any(lvl.words is None for lvl in h.levels)

    lengths_ok = h.levels[0].length == 1
    for prev, lvl in zip(h.levels, h.levels[1:]):
        if lvl.length != (lvl.n + 2 * lvl.k) * prev.length:
            lengths_ok = False
            failures.append(("length", lvl.n))

    invariance_ok, nesting_ok, inv_count = True, True, 0
    for lvl in h.levels:
        words = _level_words(lvl, sample, rng)
        for w in words:
            if len(w) != lvl.length:
                lengths_ok = False
                failures.append(("word length", lvl.n, w))
            if lvl.prev is not None:
                lp = lvl.prev.length
                if any(w[i : i + lp] not in lvl.prev for i in range(0, len(w), lp)):
                    nesting_ok = False
                    failures.append(("nesting", lvl.n, w))
            for g in grp.elements:
                inv_count += 1
                if diagonal(action, g, w) not in lvl:
                    invariance_ok = False
                    failures.append(("invariance", lvl.n, g, w))
        if lvl.prev is not None:
            marks = set(lvl.markers)
            for x in lvl.markers:
                for g in grp.elements:
                    if diagonal(action, g, x) not in marks:
                        invariance_ok = False
                        failures.append(("marker invariance", lvl.n, g, x))

    discrete = h.metric.mode == "discrete"
    claim_ok, claim_count, hits = True, 0, 0
    max_dist: Fraction | None = None
    for lower, upper in zip(h.levels, h.levels[1:]):
        bound = upper.density
        if bound is None:
            bound = upper.target_density
        width = 2 * lower.length
        ambient_size = lower.count ** 2
        if ambient_size <= h.enumeration_cap and (sample is None or ambient_size <= sample):
            targets = list(_pairs(lower))
        else:
            if rng is None or sample is None:
                raise HierarchyError("claim check on an implicit level needs a sample budget and a seed")
            targets = [lower.word_at(rng.randrange(lower.count)) + lower.word_at(rng.randrange(lower.count)) for _ in range(sample)]
        tail = upper.word_at(0)
        for u in _level_words(upper, sample, rng):
            uu = u + tail
            windows = {uu[i : i + width] for i in range(len(uu) - width + 1)}
            for v in targets:
                claim_count += 1
                if v in windows:
                    d = Fraction(0)
                elif discrete:
                    d = Fraction(1)
                else:
                    d = min(h.metric.words(f, v) for f in windows)
                hits += d == 0
                if max_dist is None or d > max_dist:
                    max_dist = d
                if d > bound:
                    claim_ok = False
                    failures.append(("claim", upper.n, u, v, d))

    witnesses: dict[int, tuple[int, Word]] = {}
    faithful_ok = True
    marker_words = [x for lvl in h.levels[1:] for x in lvl.markers]
    for g in grp.elements:
        if g == grp.identity:
            continue
        found = next(((a, x) for x in marker_words for a in x if action.act[g][a] != a), None)
        if found is None:
            faithful_ok = False
            failures.append(("faithfulness", g))
        else:
            witnesses[g] = found

    return HierarchyReport(
        lengths_ok=lengths_ok,
        invariance_ok=invariance_ok,
        nesting_ok=nesting_ok,
        claim_ok=claim_ok,
        faithful_ok=faithful_ok,
        invariance_checked=inv_count,
        claim_checked=claim_count,
        claim_max_distance=max_dist,
        claim_exact_hits=hits,
        faithfulness_witnesses=witnesses,
        sampled=sampled,
        seed=seed,
        failures=failures[:20],
    )


def _fmt(w: Sequence[int]) -> str:
    return " ".join(map(str, w))


def dump_hierarchy(h: BlockHierarchy, words: bool = True) -> str:
    lines = []
    for lvl in h.levels:
        lines.append(f"n={lvl.n} ln={lvl.length} kn={lvl.k} |Bn|={lvl.count}")
        for x in lvl.markers:
            lines.append(f"marker {_fmt(x)}")
        if words and lvl.words is not None:
            lines.extend(_fmt(w) for w in sorted(lvl.words))
    return "\n".join(lines) + "\n"
