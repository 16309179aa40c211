"""S-adic centralizer embedding and its two corollary constructions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..automorphisms import (
    LetterMap,
    classify_normalizer,
    conjugations,
    embed_centralizer,
    freeness_check,
    lift_letter_map,
    translations,
    verify_equivariance,
    verify_shift_commutation,
)
from ..checks import Check, Status, check, overall
from ..groups import (
    GroupAction,
    QuotientTower,
    action_diagnostics,
    direct_product,
    left_translation,
    symmetric_generators,
)
from ..subshift import (
    BudgetExceeded,
    LanguageError,
    SubstitutionSequence,
    aperiodicity_check,
    generate_language,
    generate_union_language,
    compare_languages,
    primitivity_check,
    recurrence_profile,
)


@dataclass(frozen=True)
class Horizons:
    L: int = 8
    K: int = 4
    H: int = 16
    p_max: int = 4
    independence_L: int | None = None
    independence_K: int | None = None

    @property
    def language_len(self) -> int:
        return max(self.L, self.H, 2 * self.p_max)


@dataclass
class PipelineReport:
    name: str
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def status(self) -> Status:
        return overall(self.checks)

    def get(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)


def run_sadic_embedding(
    action: GroupAction,
    schedule: Sequence[Sequence[int]],
    auts: Sequence[LetterMap],
    horizons: Horizons = Horizons(),
    budget: int | None = None,
) -> PipelineReport:
    """Substitution, language, primitivity, independence, recurrence,
    aperiodicity and embedding stages, each recorded as one check.

    Per-seed languages are compared at the independence horizons; every other
    stage runs on the union over seeds at ``(language_len, K)``. A failing
    stage does not stop later stages unless they depend on its output.
    """
    rep = PipelineReport("sadic-embedding")
    rep.info["schedule"] = [list(map(int, g)) for g in schedule]
    try:
        seq = SubstitutionSequence.from_action(action, schedule)
    except LanguageError as exc:
        rep.checks.append(check("substitution", False, reason=str(exc)))
        return rep
    rep.checks.append(check("substitution", True, lengths=[s.constant_length for s in seq.seq]))

    n = seq.alphabet_size
    L = horizons.language_len
    try:
        lang = generate_union_language(seq, L, horizons.K, budget)
    except BudgetExceeded as exc:
        rep.checks.append(check("language", False, reason=f"budget: {exc}"))
        return rep
    rep.checks.append(
        check("language", lang.is_factor_closed(), reason="not factor closed", max_len=L, depth=horizons.K, profile=lang.counts())
    )

    prim_ok, powers, witness = True, [], None
    for i, sub in enumerate(seq.seq):
        pr = primitivity_check(sub)
        powers.append(pr.power)
        if not pr.primitive:
            prim_ok, witness = False, {"substitution": i, "reason": "no positive power up to n^2"}
    rep.checks.append(check("primitivity", prim_ok, witness, powers=powers, bound=n * n))

    li_L = horizons.independence_L or horizons.L
    li_K = horizons.independence_K or horizons.K
    ind_ok, ind_w, pairs = True, None, 0
    per_seed = [generate_language(seq, a, li_L, li_K, budget) for a in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            pairs += 1
            v = compare_languages(per_seed[a], per_seed[b])
            if not v:
                ind_ok, ind_w = False, {"seeds": [a, b], "length": v.witness[0], "word": v.witness[1]}
                break
        if not ind_ok:
            break
    rep.checks.append(check("language_independence", ind_ok, ind_w, pairs=pairs, L=li_L, K=li_K))

    rec, rec_ok, rec_w = {}, True, None
    for a in range(n):
        if (a,) not in lang:
            rec_ok, rec_w = False, {"letter": a, "reason": "letter absent from language"}
            continue
        v = recurrence_profile(lang, (a,), horizons.H)
        if v:
            rec[a] = v.witness
        else:
            rec_ok = False
            rec_w = rec_w or {"letter": a, "avoiding": v.witness, "reason": v.note}
    rep.checks.append(check("recurrence", rec_ok, rec_w, bounds=rec, horizon=horizons.H))

    ap = aperiodicity_check(lang, horizons.p_max)
    rep.checks.append(check("aperiodicity", ap.ok, ap.witness, reason=ap.note, p_max=horizons.p_max, max_len=L))
    rep.info["minimality_evidence"] = prim_ok and ind_ok and rec_ok

    emb = embed_centralizer(action, schedule[0], auts, lang, seq[0])
    for i, sub in enumerate(seq.seq[1:], start=1):
        for phi in auts:
            v = verify_equivariance(sub, phi)
            if not v:
                emb.equivariance_failures.setdefault(phi.label, v.witness)
    rep.checks.append(
        check("equivariance", not emb.equivariance_failures, emb.equivariance_failures, maps=len(auts))
    )
    shift_bad = [phi.label for phi in auts if not verify_shift_commutation(lift_letter_map(phi), lang)]
    rep.checks.append(check("shift_commutation", not shift_bad, shift_bad, maps=len(auts)))
    rep.checks.append(check("lift_injective", emb.distinct, emb.distinct_witness, distinct_lifts=len(auts) if emb.distinct else None))
    rep.checks.append(check("lift_composition", emb.composition_ok, emb.composition_witness, closed=emb.closed, cyclic=emb.cyclic))
    rep.checks.append(check("language_preserved", emb.preserves_language, emb.preservation_witness))
    free = freeness_check([lift_letter_map(p) for p in auts], lang)
    uncertified = {e.label: list(e.fixed_letters) for e in free if not e.certified}
    rep.checks.append(
        Check(
            "freeness",
            Status.PASS if not uncertified else Status.INCONCLUSIVE,
            uncertified or None,
            {"certified": sum(e.certified for e in free), "checked": len(free)},
        )
    )
    rep.info["composition_table"] = emb.composition_table
    rep.info["embedded"] = len(auts)
    return rep


def odometer_setup(m: int, steps: Sequence[int] = (1,)):
    """Left translation of ``Z/m`` with generators ``{0, +s, -s}`` and all translations."""
    from ..groups import cyclic_group

    grp = cyclic_group(m)
    action = left_translation(grp)
    gens = symmetric_generators(grp, steps)
    return action, gens, translations(grp)


def build_profinite_realization(tower: QuotientTower, depth: int, horizons: Horizons | None = None) -> PipelineReport:
    """Left translation of level ``depth`` on itself; right translations as centralizer.

    For nonabelian levels the conjugations are classified too and should be
    normalizer elements with nontrivial ``alpha``.
    """
    grp = tower.level(depth)
    action = left_translation(grp)
    rep = PipelineReport("profinite")
    rights = translations(grp, "right")
    verdicts = [classify_normalizer(r, action) for r in rights]
    central = [v for v in verdicts if v.in_centralizer]
    rep.checks.append(
        check(
            "right_translations_central",
            len(central) == grp.order,
            [v.label for v in verdicts if not v.in_centralizer],
            accepted=len(central),
            order=grp.order,
        )
    )
    right_action = GroupAction(
        grp, tuple(tuple(grp.mul[x][grp.inv[c]] for x in grp.elements) for c in grp.elements), "right"
    )
    diag = action_diagnostics(right_action)
    rep.checks.append(check("right_action_free", diag.free, diag.free_witness))
    rep.checks.append(check("right_action_transitive", diag.transitive, diag.transitive_witness))
    rep.info["order"] = grp.order
    rep.info["abelian"] = grp.is_abelian
    if not grp.is_abelian:
        conj = [classify_normalizer(c, action) for c in conjugations(grp)]
        proper = [v for v in conj if v.accepted and not v.in_centralizer]
        rejected = [v.label for v in conj if not v.accepted]
        central_conj = [v.label for v in conj if v.in_centralizer]
        rep.checks.append(
            check(
                "conjugations_normalize",
                not rejected,
                rejected,
                proper_normalizer=len(proper),
                central=len(central_conj),
            )
        )
        rep.info["conjugation_alphas"] = {v.label: list(v.alpha) for v in conj if v.accepted}
    if horizons is not None:
        gens = symmetric_generators(grp, grp.generating_set())
        sub_rep = run_sadic_embedding(action, [gens], rights, horizons)
        for c in sub_rep.checks:
            c.name = f"embedding.{c.name}"
            rep.checks.append(c)
        rep.info["generators"] = list(gens)
    return rep


@dataclass
class ComponentSystem:
    action: GroupAction
    gens: tuple[int, ...]
    auts: list[LetterMap]


def product_generators(a: ComponentSystem, b: ComponentSystem) -> tuple[tuple[int, int], ...]:
    """Identity pair, then ``(s, e)``, then ``(e, t)``, then every ``(s, t)`` with
    both entries non-identity, each group in generator order."""
    ea, eb = a.gens[0], b.gens[0]
    out = [(ea, eb)]
    out += [(s, eb) for s in a.gens[1:]]
    out += [(ea, t) for t in b.gens[1:]]
    out += [(s, t) for s in a.gens[1:] for t in b.gens[1:]]
    return tuple(out)


def product_letter_maps(a: ComponentSystem, b: ComponentSystem) -> list[LetterMap]:
    """``(phi, psi)`` acting on the pair letter ``x * |B| + y`` coordinatewise."""
    nb = b.action.alphabet_size
    n = a.action.alphabet_size * nb
    return [
        LetterMap(tuple(phi(x // nb) * nb + psi(x % nb) for x in range(n)), f"({phi.label},{psi.label})")
        for phi in a.auts
        for psi in b.auts
    ]


def build_direct_product(a: ComponentSystem, b: ComponentSystem, horizons: Horizons = Horizons(L=4, K=3, H=4, p_max=2)) -> PipelineReport:
    """Product action on letter pairs and the product of the two automorphism families."""
    rep = PipelineReport("direct-product")
    for tag, sysx in (("A", a), ("B", b)):
        lang = generate_union_language(SubstitutionSequence.from_action(sysx.action, [sysx.gens]), horizons.L, horizons.K)
        emb = embed_centralizer(sysx.action, sysx.gens, sysx.auts, lang)
        rep.checks.append(check(f"component_{tag}_embedding", emb.ok, emb.equivariance_failures or emb.distinct_witness or emb.composition_witness or emb.preservation_witness, maps=len(sysx.auts)))
    ga, gb = a.action.group, b.action.group
    na, nb = a.action.alphabet_size, b.action.alphabet_size
    grp = direct_product(ga, gb)
    table = tuple(
        tuple(a.action.act[g // gb.order][x // nb] * nb + b.action.act[g % gb.order][x % nb] for x in range(na * nb))
        for g in grp.elements
    )
    action = GroupAction(grp, table, f"{a.action.label} x {b.action.label}")
    pairs = product_generators(a, b)
    gens = tuple(s * gb.order + t for s, t in pairs)
    rep.info["generator_convention"] = "identity pair, (s,e), (e,t), then all (s,t) with s,t non-identity"
    rep.info["generators"] = [list(p) for p in pairs]
    prod_auts = product_letter_maps(a, b)
    seq = SubstitutionSequence.from_action(action, [gens])
    failures = {}
    for p in prod_auts:
        v = verify_equivariance(seq[0], p)
        if not v:
            failures[p.label] = v.witness
    rep.checks.append(check("product_equivariance", not failures, failures, maps=len(prod_auts)))
    distinct = len({p.images for p in prod_auts}) == len(prod_auts)
    rep.checks.append(check("pair_map_injective", distinct, reason="two pairs give the same map", distinct=len({p.images for p in prod_auts})))
    lang = generate_union_language(seq, horizons.L, horizons.K)
    emb = embed_centralizer(action, gens, prod_auts, lang, seq[0])
    rep.checks.append(check("product_embedding", emb.ok, emb.distinct_witness or emb.composition_witness or emb.preservation_witness, maps=len(prod_auts)))
    rep.info["product_automorphisms"] = len(prod_auts)
    return rep
