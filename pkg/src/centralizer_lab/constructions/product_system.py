"""Normalizer realization through a product of minimal components.

A finite group ``G`` together with ``Z/m`` acts on ``G x Z/m``; the ``Z/m``
generator ``f`` commutes with every ``T^g`` and its orbits are the fibers.
Taking one representative component per coset of its stabilizer gives the
product state space ``(Z/m)^I`` with the coordinatewise action ``S^n``; each
``g`` induces a map ``T~^g`` that normalizes ``S``, twisting ``n`` by the
coordinate permutation ``alpha_g``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from ..groups import (
    FiniteGroup,
    GroupAction,
    cyclic_group,
    direct_product,
    pair_id,
    stabilizer_and_cosets,
)

DEFAULT_STATE_CAP = 200_000


class ProductSystemError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message if witness is None else f"{message} (witness {witness})")
        self.witness = witness


Perm = tuple[int, ...]


@dataclass(frozen=True)
class CyclicExtensionSystem:
    """``G + Z/m`` acting on points ``(h, k)`` encoded as ``h * m + k``."""

    group: FiniteGroup
    modulus: int
    phi: GroupAction
    f: Perm
    T: tuple[Perm, ...]

    @property
    def size(self) -> int:
        return len(self.f)

    def point(self, h: int, k: int) -> int:
        return h * self.modulus + k

    def components(self) -> list[frozenset[int]]:
        """Orbits of ``f``, ordered by least point."""
        seen: set[int] = set()
        out = []
        for p in range(self.size):
            if p in seen:
                continue
            orbit = [p]
            q = self.f[p]
            while q != p:
                orbit.append(q)
                q = self.f[q]
            seen.update(orbit)
            out.append(frozenset(orbit))
        return out

    def commutation_failures(self) -> list[tuple[int, int]]:
        return [
            (g, p)
            for g, tg in enumerate(self.T)
            for p in range(self.size)
            if self.f[tg[p]] != tg[self.f[p]]
        ]

    @property
    def T_action(self) -> GroupAction:
        return GroupAction(self.group, self.T, "T")


def build_cyclic_extension_system(group: FiniteGroup, m: int) -> CyclicExtensionSystem:
    """``phi^(g, n)(h, k) = (g h, k + n mod m)``, ``f = phi^(e, 1)``, ``T^g = phi^(g, 0)``."""
    if m < 2:
        raise ProductSystemError(f"modulus must be at least 2, got {m}")
    zm = cyclic_group(m)
    big = direct_product(group, zm)
    size = group.order * m
    table = []
    for gn in big.elements:
        g, n = divmod(gn, m)
        table.append(tuple(group.mul[g][p // m] * m + (p % m + n) % m for p in range(size)))
    phi = GroupAction(big, tuple(table), f"{group.label}+Z/{m} on {group.label}xZ/{m}")
    f = phi.act[pair_id(group, zm, group.identity, 1)]
    T = tuple(phi.act[pair_id(group, zm, g, 0)] for g in group.elements)
    return CyclicExtensionSystem(group, m, phi, f, T)


@dataclass
class ProductSystem:
    base: CyclicExtensionSystem
    base_point: int
    stabilizer: frozenset[int]
    reps: tuple[int, ...]
    sigma: tuple[Perm, ...]  # sigma[g][i]
    chart: dict[int, tuple[int, int]] = field(repr=False)  # point -> (i, coordinate)
    charts_inv: tuple[tuple[int, ...], ...] = field(repr=False)  # (i, c) -> point
    states: list[tuple[int, ...]] | None = field(default=None, repr=False)
    sampled: bool = False
    seed: int | None = None

    @property
    def group(self) -> FiniteGroup:
        return self.base.group

    @property
    def m(self) -> int:
        return self.base.modulus

    @property
    def index_size(self) -> int:
        return len(self.reps)

    @property
    def state_count(self) -> int:
        return self.m ** self.index_size

    def S(self, n, y) -> tuple[int, ...]:
        """``S^n(y)_i = f^(n_i)(y_i)``."""
        f = self.base.f
        out = []
        for i, (ni, yi) in enumerate(zip(n, y)):
            p = self.charts_inv[i][yi]
            for _ in range(ni % self.m):
                p = f[p]
            out.append(self.chart[p][1])
        return tuple(out)

    def alpha(self, g: int, n) -> tuple[int, ...]:
        s = self.sigma[g]
        return tuple(n[s[i]] for i in range(self.index_size))

    def T_tilde(self, g: int, y) -> tuple[int, ...]:
        """``T~^g(y)_i = T^g(y_(sigma_g(i)))``, read in the chart of component ``i``."""
        s = self.sigma[g]
        tg = self.base.T[g]
        out = []
        for i in range(self.index_size):
            p = tg[self.charts_inv[s[i]][y[s[i]]]]
            j, c = self.chart[p]
            if j != i:
                raise ProductSystemError("T^g does not land in component i", (g, i))
            out.append(c)
        return tuple(out)


def build_product_normalizer(
    system: CyclicExtensionSystem,
    base_component: int = 0,
    state_cap: int = DEFAULT_STATE_CAP,
    sample: int | None = None,
    seed: int | None = None,
) -> ProductSystem:
    """Product system built on the ``f``-component containing ``base_component``.

    The state space ``(Z/m)^I`` is enumerated when it has at most
    ``state_cap`` points; otherwise ``sample`` states are drawn with ``seed``.
    """
    comps = system.components()
    block = next((c for c in comps if base_component in c), None)
    if block is None:
        raise ProductSystemError(f"point {base_component} outside the system")
    cos = stabilizer_and_cosets(system.T_action, comps, block)
    grp = system.group
    y0 = min(block)
    chart: dict[int, tuple[int, int]] = {}
    charts_inv = []
    for i, g in enumerate(cos.representatives):
        p = system.T[g][y0]
        pts = []
        for c in range(system.modulus):
            chart[p] = (i, c)
            pts.append(p)
            p = system.f[p]
        charts_inv.append(tuple(pts))
    # sigma_g(i) is the coset index of g^-1 g_i, i.e. g g_(sigma_g(i)) in g_i Stab.
    sigma = tuple(
        tuple(cos.index_of[grp.mul[grp.inv[g]][gi]] for gi in cos.representatives) for g in grp.elements
    )
    for g, s in enumerate(sigma):
        if sorted(s) != list(range(len(cos.representatives))):
            raise ProductSystemError("sigma_g is not a permutation", (g,))
        for i, gi in enumerate(cos.representatives):
            if cos.index_of[grp.mul[g][cos.representatives[s[i]]]] != i:
                raise ProductSystemError("sigma_g violates its defining membership", (g, i))
    ps = ProductSystem(system, y0, cos.stabilizer, cos.representatives, sigma, chart, tuple(charts_inv))
    total = ps.state_count
    if total <= state_cap:
        ps.states = list(product(range(system.modulus), repeat=ps.index_size))
    elif sample is not None:
        if seed is None:
            raise ProductSystemError("sampling requires an explicit seed")
        rng = random.Random(seed)
        ps.states = [
            tuple(rng.randrange(system.modulus) for _ in range(ps.index_size)) for _ in range(sample)
        ]
        ps.sampled, ps.seed = True, seed
    else:
        raise ProductSystemError(f"state space of size {total} exceeds cap {state_cap} and sampling is off")
    return ps


def unit_vectors(k: int) -> list[tuple[int, ...]]:
    """``e_i`` and ``-e_i`` for every coordinate."""
    out = []
    for i in range(k):
        for sgn in (1, -1):
            v = [0] * k
            v[i] = sgn
            out.append(tuple(v))
    return out


@dataclass
class RelationReport:
    instances: int
    groups: int
    vectors: int
    states: int
    relation_ok: bool
    hom_ok: bool
    injective: bool
    alpha_hom_ok: bool
    free_ok: bool
    free_instances: int
    sampled: bool
    witness: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.relation_ok and self.hom_ok and self.injective and self.alpha_hom_ok and self.free_ok


def verify_product_relations(ps: ProductSystem, vectors: list[tuple[int, ...]] | None = None) -> RelationReport:
    """Exact check of ``T~^g o S^n == S^(alpha_g(n)) o T~^g`` on every ``(g, n, y)``.

    Also checks that ``g -> T~^g`` is an injective homomorphism, that
    ``g -> alpha_g`` is multiplicative (``alpha_(gh) = alpha_g o alpha_h``), and
    that ``S^n(y) == y`` with ``|n_i| < m`` forces ``n = 0``.
    """
    grp = ps.group
    k = ps.index_size
    vectors = unit_vectors(k) if vectors is None else [tuple(v) for v in vectors]
    states = ps.states or []
    witness: dict = {}
    relation_ok = True
    images: dict[int, list[tuple[int, ...]]] = {g: [ps.T_tilde(g, y) for y in states] for g in grp.elements}
    for g in grp.elements:
        tg = images[g]
        for n in vectors:
            an = ps.alpha(g, n)
            for y, ty in zip(states, tg):
                if ps.T_tilde(g, ps.S(n, y)) != ps.S(an, ty):
                    relation_ok = False
                    witness.setdefault("relation", (g, n, y))
                    break

    hom_ok = True
    for g in grp.elements:
        for h in grp.elements:
            gh = grp.mul[g][h]
            for idx, y in enumerate(states):
                if ps.T_tilde(g, images[h][idx]) != images[gh][idx]:
                    hom_ok = False
                    witness.setdefault("homomorphism", (g, h, y))
                    break
    seen: dict[tuple, int] = {}
    injective = True
    for g in grp.elements:
        sig = tuple(images[g])
        if sig in seen:
            injective = False
            witness.setdefault("injective", (seen[sig], g))
        seen[sig] = g

    alpha_ok = True
    window = list(product(range(-(ps.m - 1), ps.m), repeat=k)) if (2 * ps.m - 1) ** k <= 100_000 else vectors
    for g in grp.elements:
        for h in grp.elements:
            gh = grp.mul[g][h]
            for n in window:
                if ps.alpha(gh, n) != ps.alpha(g, ps.alpha(h, n)):
                    alpha_ok = False
                    witness.setdefault("alpha", (g, h, n))
                    break

    # S acts coordinatewise, so S^n fixes y iff every f^(n_i) fixes y_i.
    free_ok = True
    free_instances = 0
    f = ps.base.f
    for i in range(k):
        for c in range(ps.m):
            p0 = ps.charts_inv[i][c]
            for ni in range(-(ps.m - 1), ps.m):
                if ni == 0:
                    continue
                p = p0
                for _ in range(ni % ps.m):
                    p = f[p]
                free_instances += 1
                if p == p0:
                    free_ok = False
                    witness.setdefault("free", (i, c, ni))
    return RelationReport(
        instances=grp.order * len(vectors) * len(states),
        groups=grp.order,
        vectors=len(vectors),
        states=len(states),
        relation_ok=relation_ok,
        hom_ok=hom_ok,
        injective=injective,
        alpha_hom_ok=alpha_ok,
        free_ok=free_ok,
        free_instances=free_instances,
        sampled=ps.sampled,
        witness=witness,
    )


def dump_product_system(ps: ProductSystem) -> str:
    """Index order, then ``sigma_g`` and ``alpha_g`` per element in one-line notation."""
    lines = [f"I={' '.join(map(str, ps.reps))}", f"stab={' '.join(map(str, sorted(ps.stabilizer)))}"]
    for g, s in enumerate(ps.sigma):
        lines.append(f"sigma[{g}]={' '.join(map(str, s))}")
    for g in ps.group.elements:
        # alpha_g permutes coordinates: position i receives coordinate sigma_g(i)
        lines.append(f"alpha[{g}]={' '.join(map(str, ps.sigma[g]))}")
    return "\n".join(lines) + "\n"


__all__ = [
    "CyclicExtensionSystem",
    "ProductSystem",
    "ProductSystemError",
    "RelationReport",
    "build_cyclic_extension_system",
    "build_product_normalizer",
    "dump_product_system",
    "unit_vectors",
    "verify_product_relations",
]
