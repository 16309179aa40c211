"""Exact finite groups, quotient towers and finite group actions.

Elements of a :class:`FiniteGroup` are integer ids ``0 .. order-1``. Ids are
assigned canonically per family:

* cyclic ``Z/m``: the residue itself;
* symmetric ``S_k``: rank of the one-line notation in lexicographic order, with
  ``mul(p, q) = p o q`` (apply ``q`` first);
* direct products ``G x H``: ``(g, h) -> g * |H| + h``.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

ASSOCIATIVITY_EXHAUSTIVE_MAX = 64
ASSOCIATIVITY_SAMPLES = 20000


class GroupError(ValueError):
    """Raised for malformed group, tower or action data.

    ``witness`` carries the offending element ids when there is one.
    """

    def __init__(self, message: str, witness: tuple | None = None):
        super().__init__(message if witness is None else f"{message} (witness {witness})")
        self.witness = witness


Table = tuple[tuple[int, ...], ...]


def _as_table(rows: Sequence[Sequence[int]]) -> Table:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class FiniteGroup:
    mul: Table
    inv: tuple[int, ...]
    identity: int
    label: str = "group"

    @property
    def order(self) -> int:
        return len(self.mul)

    @property
    def elements(self) -> range:
        return range(self.order)

    def __len__(self) -> int:
        return self.order

    def m(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def power(self, g: int, n: int) -> int:
        if n < 0:
            g, n = self.inv[g], -n
        out = self.identity
        for _ in range(n):
            out = self.mul[out][g]
        return out

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul[x][g]
            k += 1
        return k

    @cached_property
    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a] for a in self.elements for b in self.elements)

    def generated_subgroup(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(gens)
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.mul[x][s]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def generating_set(self) -> list[int]:
        """Greedy small generating set: repeatedly add the least id outside the span."""
        gens: list[int] = []
        span = frozenset({self.identity})
        for g in self.elements:
            if g not in span:
                gens.append(g)
                span = self.generated_subgroup(gens)
            if len(span) == self.order:
                break
        return gens

    def automorphisms(self) -> list[tuple[int, ...]]:
        """All automorphisms of the group, as image tuples, sorted.

        Enumerates images of a generating set and keeps the assignments that
        extend to a bijective homomorphism.
        """
        gens = self.generating_set()
        words = _spanning_words(self, gens)
        found = []
        for images in itertools.product(self.elements, repeat=len(gens)):
            phi = [None] * self.order
            phi[self.identity] = self.identity
            for g, word in words.items():
                x = self.identity
                for k in word:
                    x = self.mul[x][images[k]]
                phi[g] = x
            if len(set(phi)) != self.order:
                continue
            if all(
                phi[self.mul[a][b]] == self.mul[phi[a]][phi[b]]
                for a in self.elements
                for b in self.elements
            ):
                found.append(tuple(phi))
        return sorted(found)


def _spanning_words(group: FiniteGroup, gens: Sequence[int]) -> dict[int, tuple[int, ...]]:
    # BFS words (as generator indices) reaching each element.
    words = {group.identity: ()}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for k, s in enumerate(gens):
                y = group.mul[x][s]
                if y not in words:
                    words[y] = words[x] + (k,)
                    nxt.append(y)
        frontier = nxt
    return words


def group_from_table(
    rows: Sequence[Sequence[int]],
    label: str = "table",
    exhaustive_max: int = ASSOCIATIVITY_EXHAUSTIVE_MAX,
    seed: int = 0,
) -> FiniteGroup:
    """Validate an explicit multiplication table and wrap it.

    Associativity is checked over all triples up to ``exhaustive_max``
    elements, otherwise on ``ASSOCIATIVITY_SAMPLES`` seeded random triples.
    """
    mul = _as_table(rows)
    n = len(mul)
    if n == 0:
        raise GroupError("empty multiplication table")
    for i, row in enumerate(mul):
        if len(row) != n:
            raise GroupError(f"row {i} has length {len(row)}, expected {n}", (i,))
        for j, x in enumerate(row):
            if not 0 <= x < n:
                raise GroupError("table entry out of range", (i, j, x))
    identity = next(
        (e for e in range(n) if all(mul[e][g] == g and mul[g][e] == g for g in range(n))),
        None,
    )
    if identity is None:
        raise GroupError("no two-sided identity")
    inv = []
    for g in range(n):
        h = next((h for h in range(n) if mul[g][h] == identity and mul[h][g] == identity), None)
        if h is None:
            raise GroupError("element has no inverse", (g,))
        inv.append(h)
    if n <= exhaustive_max:
        triples: Iterable[tuple[int, int, int]] = itertools.product(range(n), repeat=3)
    else:
        rng = random.Random(seed)
        triples = (
            (rng.randrange(n), rng.randrange(n), rng.randrange(n))
            for _ in range(ASSOCIATIVITY_SAMPLES)
        )
    for a, b, c in triples:
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            raise GroupError("table is not associative", (a, b, c))
    return FiniteGroup(mul, tuple(inv), identity, label)


def cyclic_group(m: int) -> FiniteGroup:
    if m < 1:
        raise GroupError(f"cyclic order must be positive, got {m}")
    mul = tuple(tuple((a + b) % m for b in range(m)) for a in range(m))
    inv = tuple((-a) % m for a in range(m))
    return FiniteGroup(mul, inv, 0, f"Z/{m}")


def symmetric_group(k: int) -> FiniteGroup:
    if k < 1:
        raise GroupError(f"symmetric degree must be positive, got {k}")
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    mul = tuple(
        tuple(index[tuple(p[q[i]] for i in range(k))] for q in perms) for p in perms
    )
    inv = []
    for p in perms:
        q = [0] * k
        for i, x in enumerate(p):
            q[x] = i
        inv.append(index[tuple(q)])
    return FiniteGroup(mul, tuple(inv), 0, f"S{k}")


def symmetric_permutations(k: int) -> list[tuple[int, ...]]:
    """One-line notations of ``S_k`` in canonical id order."""
    return list(itertools.permutations(range(k)))


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    ng, nh = g.order, h.order
    mul = tuple(
        tuple(
            g.mul[a // nh][b // nh] * nh + h.mul[a % nh][b % nh] for b in range(ng * nh)
        )
        for a in range(ng * nh)
    )
    inv = tuple(g.inv[a // nh] * nh + h.inv[a % nh] for a in range(ng * nh))
    return FiniteGroup(mul, inv, g.identity * nh + h.identity, f"{g.label}x{h.label}")


def pair_id(g: FiniteGroup, h: FiniteGroup, a: int, b: int) -> int:
    """Id of ``(a, b)`` in ``direct_product(g, h)``."""
    return a * h.order + b


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def build_group(spec) -> FiniteGroup:
    """Build a group from a description.

    Accepted forms: ``"cyclic 4"``, ``"symmetric 3"``, ``"trivial"``,
    ``"product(cyclic 2, cyclic 3)"``, or a mapping with one of the keys
    ``cyclic``, ``symmetric``, ``product`` (list of specs) or ``table``.

    >>> build_group("product(cyclic 2, cyclic 3)").order
    6
    """
    if isinstance(spec, FiniteGroup):
        return spec
    if isinstance(spec, dict):
        if "cyclic" in spec:
            return cyclic_group(int(spec["cyclic"]))
        if "symmetric" in spec:
            return symmetric_group(int(spec["symmetric"]))
        if "product" in spec:
            factors = [build_group(s) for s in spec["product"]]
            if not factors:
                raise GroupError("empty product")
            out = factors[0]
            for f in factors[1:]:
                out = direct_product(out, f)
            return out
        if "table" in spec:
            return group_from_table(spec["table"], label=spec.get("label", "table"))
        raise GroupError(f"unsupported group spec keys: {sorted(spec)}")
    if not isinstance(spec, str):
        raise GroupError(f"unsupported group spec: {spec!r}")
    text = spec.strip()
    m = re.fullmatch(r"product\s*\((.*)\)", text)
    if m:
        return build_group({"product": _split_top_level(m.group(1))})
    if text == "trivial":
        return cyclic_group(1)
    m = re.fullmatch(r"(cyclic|symmetric|Z/|S)\s*(\d+)", text)
    if m:
        fam = m.group(1)
        n = int(m.group(2))
        return cyclic_group(n) if fam in ("cyclic", "Z/") else symmetric_group(n)
    raise GroupError(f"unsupported group spec: {spec!r}")


@dataclass(frozen=True)
class QuotientTower:
    """Groups ``G_1 .. G_D`` with surjective homomorphisms ``G_{d+1} -> G_d``.

    ``projections[d]`` maps level ``d + 1`` onto level ``d`` (0-based lists).
    """

    levels: tuple[FiniteGroup, ...]
    projections: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.levels:
            raise GroupError("tower depth must be at least 1")
        if len(self.projections) != len(self.levels) - 1:
            raise GroupError("need exactly one projection between consecutive levels")
        for d, proj in enumerate(self.projections):
            lo, hi = self.levels[d], self.levels[d + 1]
            if len(proj) != hi.order or any(not 0 <= x < lo.order for x in proj):
                raise GroupError(f"projection {d} has the wrong shape")
            if set(proj) != set(lo.elements):
                missing = min(set(lo.elements) - set(proj))
                raise GroupError(f"projection {d} is not surjective", (missing,))
            for a in hi.elements:
                for b in hi.elements:
                    if proj[hi.mul[a][b]] != lo.mul[proj[a]][proj[b]]:
                        raise GroupError(f"projection {d} is not a homomorphism", (a, b))

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, d: int) -> FiniteGroup:
        """Level ``d`` (1-based, as in ``G_1 .. G_D``)."""
        if not 1 <= d <= self.depth:
            raise GroupError(f"level {d} outside 1..{self.depth}")
        return self.levels[d - 1]

    def project(self, x: int, src: int, dst: int) -> int:
        """Image of an element of level ``src`` in level ``dst <= src`` (1-based)."""
        if dst > src:
            raise GroupError("can only project downwards")
        for d in range(src - 1, dst - 1, -1):
            x = self.projections[d - 1][x]
        return x

    def agreement_depth(self, a: int, b: int, level: int | None = None) -> int:
        """Deepest 1-based level at which ``a`` and ``b`` have equal images (0 if none)."""
        level = self.depth if level is None else level
        for d in range(level, 0, -1):
            if self.project(a, level, d) == self.project(b, level, d):
                return d
        return 0

    def separating_level(self, a: int, b: int) -> int | None:
        """Least level separating two top-level elements, ``None`` if equal."""
        if a == b:
            return None
        for d in range(1, self.depth + 1):
            if self.project(a, self.depth, d) != self.project(b, self.depth, d):
                return d
        return None  # unreachable: the top level separates distinct ids


def build_quotient_tower(spec) -> QuotientTower:
    """Build a tower from ``{"cyclic_chain": [m1, .., mD]}``, ``{"sign": k}``
    (``Z/2 <- S_k``), ``{"levels": [...], "projections": [...]}``, or a bare list
    taken as a cyclic chain.
    """
    if isinstance(spec, QuotientTower):
        return spec
    if isinstance(spec, (list, tuple)):
        spec = {"cyclic_chain": list(spec)}
    if "cyclic_chain" in spec:
        chain = [int(m) for m in spec["cyclic_chain"]]
        if not chain:
            raise GroupError("tower depth must be at least 1")
        for lo, hi in zip(chain, chain[1:]):
            if hi % lo:
                raise GroupError(f"{lo} does not divide {hi}", (lo, hi))
        levels = tuple(cyclic_group(m) for m in chain)
        projections = tuple(tuple(x % lo for x in range(hi)) for lo, hi in zip(chain, chain[1:]))
        return QuotientTower(levels, projections)
    if "sign" in spec:
        k = int(spec["sign"])
        perms = symmetric_permutations(k)
        sign = tuple(_parity(p) for p in perms)
        return QuotientTower((cyclic_group(2), symmetric_group(k)), (sign,))
    if "levels" in spec:
        levels = tuple(build_group(s) for s in spec["levels"])
        projections = tuple(tuple(int(x) for x in p) for p in spec.get("projections", ()))
        return QuotientTower(levels, projections)
    raise GroupError(f"unsupported tower spec: {spec!r}")


def _parity(p: Sequence[int]) -> int:
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j]) % 2


@dataclass(frozen=True)
class ActionDiagnostics:
    faithful: bool
    free: bool
    transitive: bool
    faithful_witness: tuple[int, int] | None = None
    free_witness: tuple[int, int] | None = None
    transitive_witness: tuple[int, int] | None = None


@dataclass(frozen=True)
class GroupAction:
    """Left action table ``act[g][a]`` of a finite group on letters ``0..n-1``."""

    group: FiniteGroup
    act: Table
    label: str = "action"

    def __post_init__(self):
        g = self.group
        if len(self.act) != g.order:
            raise GroupError("action table needs one row per group element")
        n = len(self.act[0]) if self.act else 0
        if n == 0:
            raise GroupError("empty letter set")
        for i, row in enumerate(self.act):
            if len(row) != n or sorted(row) != list(range(n)):
                raise GroupError("action row is not a permutation", (i,))
        if list(self.act[g.identity]) != list(range(n)):
            raise GroupError("identity does not act trivially", (g.identity,))
        for x in g.elements:
            for y in g.elements:
                row_xy, row_x, row_y = self.act[g.mul[x][y]], self.act[x], self.act[y]
                for a in range(n):
                    if row_xy[a] != row_x[row_y[a]]:
                        raise GroupError("table is not a left action", (x, y, a))

    @property
    def alphabet_size(self) -> int:
        return len(self.act[0])

    @property
    def letters(self) -> range:
        return range(self.alphabet_size)

    def __call__(self, g: int, a: int) -> int:
        return self.act[g][a]

    def orbit(self, a: int) -> frozenset[int]:
        return frozenset(row[a] for row in self.act)

    def orbit_of_set(self, block: Iterable[int]) -> set[frozenset[int]]:
        block = list(block)
        return {frozenset(row[a] for a in block) for row in self.act}

    @cached_property
    def diagnostics(self) -> ActionDiagnostics:
        return action_diagnostics(self)


def action_diagnostics(action: GroupAction) -> ActionDiagnostics:
    """Exhaustive faithful / free / transitive flags, each with a witness when false.

    Witnesses: faithful -> least pair ``(g, g')`` acting identically; free ->
    least ``(g, a)`` with ``g != e`` fixing ``a``; transitive -> ``(0, b)``
    with ``b`` outside the orbit of letter 0.
    """
    g = action.group
    seen: dict[tuple[int, ...], int] = {}
    faithful_w = None
    for x in g.elements:
        row = action.act[x]
        if row in seen:
            faithful_w = (seen[row], x)
            break
        seen[row] = x
    free_w = None
    for x in g.elements:
        if x == g.identity:
            continue
        fixed = next((a for a in action.letters if action.act[x][a] == a), None)
        if fixed is not None:
            free_w = (x, fixed)
            break
    orbit0 = action.orbit(0)
    outside = [b for b in action.letters if b not in orbit0]
    trans_w = (0, outside[0]) if outside else None
    return ActionDiagnostics(
        faithful=faithful_w is None,
        free=free_w is None,
        transitive=trans_w is None,
        faithful_witness=faithful_w,
        free_witness=free_w,
        transitive_witness=trans_w,
    )


def left_translation(group: FiniteGroup) -> GroupAction:
    return GroupAction(group, group.mul, f"{group.label} left translation")


def build_action(group: FiniteGroup, kind="left-translation", **kw) -> GroupAction:
    """Build an action of ``group``.

    ``kind`` is one of

    * ``"left-translation"``: ``act(g, a) = g a`` on the group itself;
    * ``"quotient-translation"``: ``act(g, a) = pi(g) a`` on a quotient, given
      ``quotient=`` (a FiniteGroup) and ``projection=`` (image list of ``pi``);
    * ``"explicit"``: ``table=`` rows of letter ids, one row per element;
    * ``"trivial"``: every element fixes each of ``letters=`` letters.

    A mapping ``{"kind": ..., ...}`` is also accepted for config use.
    """
    if isinstance(kind, dict):
        kw = {k: v for k, v in kind.items() if k != "kind"}
        kind = kind.get("kind", "left-translation")
    if kind == "left-translation":
        return left_translation(group)
    if kind == "quotient-translation":
        quotient = build_group(kw["quotient"])
        proj = [int(x) for x in kw["projection"]]
        if len(proj) != group.order:
            raise GroupError("projection must list one image per element")
        for a in group.elements:
            for b in group.elements:
                if proj[group.mul[a][b]] != quotient.mul[proj[a]][proj[b]]:
                    raise GroupError("projection is not a homomorphism", (a, b))
        table = tuple(quotient.mul[proj[g]] for g in group.elements)
        return GroupAction(group, table, f"{group.label} on {quotient.label}")
    if kind == "explicit":
        return GroupAction(group, _as_table(kw["table"]), kw.get("label", "explicit"))
    if kind == "trivial":
        n = int(kw["letters"])
        return GroupAction(group, tuple(tuple(range(n)) for _ in group.elements), "trivial")
    raise GroupError(f"unsupported action kind {kind!r}")


@dataclass(frozen=True)
class CosetData:
    stabilizer: frozenset[int]
    representatives: tuple[int, ...]
    index_of: tuple[int, ...] = field(repr=False)  # element id -> coset index

    @property
    def index(self) -> int:
        return len(self.representatives)


def stabilizer_and_cosets(
    action: GroupAction, partition: Sequence[Iterable[int]], block: Iterable[int]
) -> CosetData:
    """Setwise stabilizer of ``block`` and left-coset representatives of it.

    The identity represents its own coset; the other representatives are the
    least element ids of their cosets. ``index_of[g]`` is the index ``i`` with
    ``g`` in ``g_i Stab``.
    """
    blocks = [frozenset(b) for b in partition]
    covered = sorted(a for b in blocks for a in b)
    if covered != list(action.letters) or any(not b for b in blocks):
        raise GroupError("partition must split the letter set into nonempty blocks")
    block = frozenset(block)
    if block not in blocks:
        raise GroupError("block is not a block of the partition")
    block_set = set(blocks)
    for x in action.group.elements:
        for b in blocks:
            img = frozenset(action.act[x][a] for a in b)
            if img not in block_set:
                raise GroupError("action does not permute the blocks", (x, min(b)))
    grp = action.group
    stab = frozenset(x for x in grp.elements if {action.act[x][a] for a in block} == block)
    order = [grp.identity] + [x for x in grp.elements if x != grp.identity]
    reps: list[int] = []
    index_of = [-1] * grp.order
    for x in order:
        if index_of[x] >= 0:
            continue
        i = len(reps)
        reps.append(x)
        for s in stab:
            index_of[grp.mul[x][s]] = i
    return CosetData(stab, tuple(reps), tuple(index_of))


def symmetric_generators(group: FiniteGroup, elems: Iterable[int]) -> tuple[int, ...]:
    """Identity first, then each element followed by its inverse, duplicates dropped."""
    out = [group.identity]
    for g in elems:
        for x in (g, group.inv[g]):
            if x not in out:
                out.append(x)
    return tuple(out)
