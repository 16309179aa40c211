"""Letterwise automorphisms: lifting, equivariance and normalizer classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Sequence

from .groups import FiniteGroup, GroupAction, action_diagnostics
from .subshift import Language, Substitution, Verdict, Word, substitution_from_action


class AutomorphismError(ValueError):
    pass


@dataclass(frozen=True)
class LetterMap:
    images: tuple[int, ...]
    label: str = "phi"

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise AutomorphismError(f"letter map {self.label!r} is not a bijection")

    @property
    def alphabet_size(self) -> int:
        return len(self.images)

    def __call__(self, a: int) -> int:
        return self.images[a]

    def compose(self, other: "LetterMap") -> "LetterMap":
        """``self o other``."""
        return LetterMap(tuple(self.images[b] for b in other.images), f"{self.label}*{other.label}")

    def inverse(self) -> "LetterMap":
        inv = [0] * len(self.images)
        for a, b in enumerate(self.images):
            inv[b] = a
        return LetterMap(tuple(inv), f"{self.label}^-1")

    @property
    def is_identity(self) -> bool:
        return all(a == b for a, b in enumerate(self.images))

    def fixed_letters(self) -> frozenset[int]:
        return frozenset(a for a, b in enumerate(self.images) if a == b)

    @classmethod
    def identity(cls, n: int) -> "LetterMap":
        return cls(tuple(range(n)), "id")


@dataclass(frozen=True)
class SlidingAutomorphism:
    """Radius-0 sliding map: the base letter map applied at every coordinate."""

    base: LetterMap

    def __call__(self, w: Iterable[int]) -> Word:
        return tuple(map(self.base.images.__getitem__, w))

    def compose(self, other: "SlidingAutomorphism") -> "SlidingAutomorphism":
        return SlidingAutomorphism(self.base.compose(other.base))


def lift_letter_map(phi: LetterMap) -> SlidingAutomorphism:
    return SlidingAutomorphism(phi)


def verify_equivariance(sub: Substitution, phi: LetterMap) -> Verdict:
    """Check ``tau(phi(a)) == phi_bar(tau(a))`` for every letter; witness = first failing letter."""
    if sub.alphabet_size != phi.alphabet_size:
        raise AutomorphismError("substitution and letter map use different alphabets")
    lifted = lift_letter_map(phi)
    for a in range(sub.alphabet_size):
        if sub.images[phi(a)] != lifted(sub.images[a]):
            return Verdict(False, a)
    return Verdict(True)


def verify_shift_commutation(h: Callable[[Word], Word], lang: Language) -> Verdict:
    """Compare ``h(w)`` shifted left by one with ``h(w[1:])`` on their overlap.

    Letterwise lifts always pass; a failure means ``h`` is not a sliding map
    of radius 0.
    """
    top = lang.sorted_stratum(lang.max_len)
    if not top:
        return Verdict(True, None, "top stratum empty: vacuously true")
    for w in top:
        left = tuple(h(w))[1:]
        right = tuple(h(w[1:]))
        k = min(len(left), len(right))
        if left[:k] != right[:k]:
            return Verdict(False, w)
    return Verdict(True)


@dataclass(frozen=True)
class NormalizerVerdict:
    accepted: bool
    alpha: tuple[int, ...] | None = None
    unique: bool = True
    witness: tuple | None = None
    reason: str = ""
    label: str = ""

    @property
    def in_centralizer(self) -> bool:
        return self.accepted and all(a == g for g, a in enumerate(self.alpha))


def classify_normalizer(h: LetterMap, action: GroupAction) -> NormalizerVerdict:
    """Find ``alpha`` with ``h(act(g, a)) == act(alpha(g), h(a))`` for all ``g, a``.

    For each ``g`` the candidate set for ``alpha(g)`` is narrowed letter by
    letter; an empty set rejects with witness ``(g, a)``. When the action is
    not faithful several candidates survive; the least is taken and
    ``unique`` is false.
    """
    grp = action.group
    if h.alphabet_size != action.alphabet_size:
        raise AutomorphismError("letter map and action use different alphabets")
    alpha = []
    unique = True
    for g in grp.elements:
        cands = list(grp.elements)
        for a in action.letters:
            target = h(action.act[g][a])
            ha = h(a)
            cands = [k for k in cands if action.act[k][ha] == target]
            if not cands:
                return NormalizerVerdict(False, witness=(g, a), reason="h T^g h^-1 is not a group translation", label=h.label)
        unique &= len(cands) == 1
        alpha.append(cands[0])
    if len(set(alpha)) != grp.order:
        i, j = _first_collision(alpha)
        return NormalizerVerdict(False, witness=(i, j), reason="alpha is not injective", label=h.label)
    for x in grp.elements:
        for y in grp.elements:
            if alpha[grp.mul[x][y]] != grp.mul[alpha[x]][alpha[y]]:
                return NormalizerVerdict(False, witness=(x, y), reason="alpha is not multiplicative", label=h.label)
    return NormalizerVerdict(True, tuple(alpha), unique, label=h.label)


def _first_collision(xs: Sequence[int]) -> tuple[int, int]:
    seen: dict[int, int] = {}
    for i, x in enumerate(xs):
        if x in seen:
            return seen[x], i
        seen[x] = i
    raise ValueError("no collision")


def commutes_with_action(h: LetterMap, action: GroupAction) -> bool:
    return all(h(action.act[g][a]) == action.act[g][h(a)] for g in action.group.elements for a in action.letters)


@dataclass
class ExactSequenceReport:
    verdicts: list[NormalizerVerdict]
    kernel: list[str]
    image: list[tuple[int, ...]]
    homomorphism_ok: bool
    homomorphism_witness: tuple[str, str] | None
    kernel_matches_commutant: bool
    automorphism_group_order: int
    faithful: bool
    sign_image: bool | None = None  # cyclic groups only: every alpha is g -> +-g

    @property
    def image_order(self) -> int:
        return len(self.image)


def exact_sequence_report(candidates: Sequence[LetterMap], action: GroupAction) -> ExactSequenceReport:
    """Classify candidates and check that ``h -> alpha_h`` is a homomorphism
    with kernel the commuting maps."""
    grp = action.group
    verdicts = [classify_normalizer(h, action) for h in candidates]
    accepted = [(h, v) for h, v in zip(candidates, verdicts) if v.accepted]
    hom_ok, hom_w = True, None
    for (h1, v1), (h2, v2) in product(accepted, repeat=2):
        v12 = classify_normalizer(h1.compose(h2), action)
        expected = tuple(v1.alpha[v2.alpha[g]] for g in grp.elements)
        if not v12.accepted or v12.alpha != expected:
            hom_ok, hom_w = False, (h1.label, h2.label)
            break
    kernel = [h.label for h, v in accepted if v.in_centralizer]
    commutant = [h.label for h in candidates if commutes_with_action(h, action)]
    image = sorted({v.alpha for _, v in accepted})
    sign = None
    if _is_cyclic(grp):
        gen = next(g for g in grp.elements if grp.element_order(g) == grp.order)
        sign = all(a[gen] in (gen, grp.inv[gen]) for a in image)
    return ExactSequenceReport(
        verdicts=verdicts,
        kernel=kernel,
        image=image,
        homomorphism_ok=hom_ok,
        homomorphism_witness=hom_w,
        kernel_matches_commutant=kernel == commutant,
        automorphism_group_order=len(grp.automorphisms()),
        faithful=action_diagnostics(action).faithful,
        sign_image=sign,
    )


def _is_cyclic(grp: FiniteGroup) -> bool:
    return any(grp.element_order(g) == grp.order for g in grp.elements)


@dataclass(frozen=True)
class FreenessEntry:
    label: str
    certified: bool
    fixed_letters: tuple[int, ...]


def freeness_check(accepted: Sequence[SlidingAutomorphism], lang: Language) -> list[FreenessEntry]:
    """Sufficient test for a free action: no non-identity map fixes a letter of ``lang``.

    A map fixing some occurring letter is reported uncertified (inconclusive),
    with the fixed letters as witness. Identity maps are skipped.
    """
    occurring = lang.letters()
    out = []
    for aut in accepted:
        if aut.base.is_identity:
            continue
        fixed = tuple(sorted(aut.base.fixed_letters() & occurring))
        out.append(FreenessEntry(aut.base.label, not fixed, fixed))
    return out


@dataclass
class EmbeddingReport:
    equivariance_failures: dict[str, int]
    distinct: bool
    distinct_witness: tuple[str, str] | None
    composition_ok: bool
    composition_witness: tuple[str, str] | None
    composition_table: list[list[int | None]]
    closed: bool
    cyclic: bool
    preserves_language: bool
    preservation_witness: tuple[str, int] | None
    count: int

    @property
    def ok(self) -> bool:
        return not self.equivariance_failures and self.distinct and self.composition_ok and self.preserves_language


def embed_centralizer(
    action: GroupAction, gens: Sequence[int], auts: Sequence[LetterMap], lang: Language, sub: Substitution | None = None
) -> EmbeddingReport:
    """Certify that ``phi -> phi_bar`` embeds the given automorphisms.

    Checks equivariance with the substitution, pairwise distinctness of lifts
    on single letters, ``lift(phi o psi) == lift(phi) o lift(psi)`` on the top
    stratum for every ``phi`` and every ``psi`` in a generating set of the
    family (all ``psi`` when the family is not closed), and stratum-wise
    preservation of ``lang``.
    """
    sub = sub or substitution_from_action(action, gens)
    failures = {}
    for phi in auts:
        v = verify_equivariance(sub, phi)
        if not v:
            failures[phi.label] = v.witness
    letters = sorted(lang.letters())
    lifts = [lift_letter_map(phi) for phi in auts]
    distinct, dw = True, None
    sigs: dict[tuple, str] = {}
    for phi, lf in zip(auts, lifts):
        sig = tuple(lf((a,))[0] for a in letters)
        if sig in sigs:
            distinct, dw = False, (sigs[sig], phi.label)
            break
        sigs[sig] = phi.label
    top = lang.sorted_stratum(lang.max_len) or [tuple(letters)]
    index = {phi.images: i for i, phi in enumerate(auts)}
    table = [[index.get(phi.compose(psi).images) for psi in auts] for phi in auts]
    closed = all(x is not None for row in table for x in row)
    cyclic = closed and _table_is_cyclic(table)
    comp_gens = _table_generators(table) if closed else list(range(len(auts)))
    comp_ok, cw = True, None
    for i, phi in enumerate(auts):
        for j in comp_gens:
            composite = lift_letter_map(phi.compose(auts[j]))
            if any(composite(w) != lifts[i](lifts[j](w)) for w in top):
                comp_ok, cw = False, (phi.label, auts[j].label)
                break
        if not comp_ok:
            break
    pres, pw = _preservation(auts, lang)
    return EmbeddingReport(
        equivariance_failures=failures,
        distinct=distinct,
        distinct_witness=dw,
        composition_ok=comp_ok,
        composition_table=table,
        composition_witness=cw,
        closed=closed,
        cyclic=cyclic,
        preserves_language=pres,
        preservation_witness=pw,
        count=len(auts),
    )


def _preservation(auts: Sequence[LetterMap], lang: Language) -> tuple[bool, tuple[str, int] | None]:
    """Stratum-wise ``lift(phi)(L_l) == L_l``; the witness is ``(label, l)``.

    Lifts are injective on words, so equality follows from the image landing
    inside the stratum. Words over at most 256 letters are packed into bytes
    and mapped with ``bytes.translate``.
    """
    packed = all(len(phi.images) <= 256 for phi in auts)
    for ell in range(1, lang.max_len + 1):
        s = lang.stratum(ell)
        if packed:
            words = {bytes(w) for w in s}
            for phi in auts:
                tbl = bytes(phi.images) + bytes(256 - len(phi.images))
                if not all(w.translate(tbl) in words for w in words):
                    return False, (phi.label, ell)
        else:
            for phi in auts:
                lf = lift_letter_map(phi)
                if not all(lf(w) in s for w in s):
                    return False, (phi.label, ell)
    return True, None


def _table_generators(table: list[list[int]]) -> list[int]:
    """Greedy generating set of a closed composition table."""
    n = len(table)
    gens: list[int] = []
    span: set[int] = set()
    for g in range(n):
        if g in span:
            continue
        gens.append(g)
        span = {g for g in gens}
        frontier = list(span)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = table[x][s]
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        if len(span) == n:
            break
    return gens


def _table_is_cyclic(table: list[list[int]]) -> bool:
    # Some element generates everything under left multiplication.
    n = len(table)
    ident = next((e for e in range(n) if all(table[e][x] == x for x in range(n))), None)
    if ident is None:
        return False
    for g in range(n):
        seen, x = {ident}, g
        while x not in seen:
            seen.add(x)
            x = table[g][x]
        if len(seen) == n:
            return True
    return False


def translations(group: FiniteGroup, side: str = "left") -> list[LetterMap]:
    """All left (``x -> c x``) or right (``x -> x c``) translations of a group."""
    if side == "left":
        return [LetterMap(group.mul[c], f"L{c}") for c in group.elements]
    return [LetterMap(tuple(group.mul[x][c] for x in group.elements), f"R{c}") for c in group.elements]


def conjugations(group: FiniteGroup) -> list[LetterMap]:
    """``x -> k x k^-1`` for every ``k``."""
    return [
        LetterMap(tuple(group.mul[group.mul[k][x]][group.inv[k]] for x in group.elements), f"C{k}")
        for k in group.elements
    ]
