from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centralizer_lab.automorphisms import (
    AutomorphismError,
    LetterMap,
    classify_normalizer,
    commutes_with_action,
    conjugations,
    embed_centralizer,
    exact_sequence_report,
    freeness_check,
    lift_letter_map,
    translations,
    verify_equivariance,
    verify_shift_commutation,
)
from centralizer_lab.groups import cyclic_group, left_translation, symmetric_group
from centralizer_lab.subshift import Language, SubstitutionSequence, generate_union_language, substitution_from_action

Z4 = cyclic_group(4)
S3 = symmetric_group(3)


def tau4():
    return substitution_from_action(left_translation(Z4), (0, 1, 3))


def plus(c, m=4):
    return LetterMap(tuple((a + c) % m for a in range(m)), f"+{c}")


def test_letter_map_must_be_bijective():
    with pytest.raises(AutomorphismError):
        LetterMap((0, 0, 1))


def test_lift_identity_and_translation():
    ident = lift_letter_map(LetterMap.identity(4))
    assert ident((3, 1, 2)) == (3, 1, 2)
    assert lift_letter_map(plus(1))((0, 1, 3)) == (1, 2, 0)


def test_lift_composition_exhaustive_small_words():
    lhs = lift_letter_map(plus(1).compose(plus(2)))
    rhs3 = lift_letter_map(plus(3))
    for ell in range(4):
        for w in product(range(4), repeat=ell):
            assert lhs(w) == lift_letter_map(plus(1))(lift_letter_map(plus(2))(w)) == rhs3(w)


perm8 = st.integers(1, 8).flatmap(lambda n: st.tuples(st.permutations(range(n)), st.permutations(range(n))))


@given(perm8, st.data())
@settings(max_examples=50, deadline=None)
def test_functoriality(pair, data):
    p, q = (LetterMap(tuple(x)) for x in pair)
    n = len(p.images)
    w = tuple(data.draw(st.lists(st.integers(0, n - 1), max_size=6)))
    assert lift_letter_map(p.compose(q))(w) == lift_letter_map(p)(lift_letter_map(q)(w))
    u = tuple(data.draw(st.lists(st.integers(0, n - 1), max_size=6)))
    assert lift_letter_map(p)(w + u) == lift_letter_map(p)(w) + lift_letter_map(p)(u)


def test_equivariance_of_translations():
    t = tau4()
    for c in range(4):
        assert verify_equivariance(t, plus(c))
    assert verify_equivariance(t, LetterMap.identity(4))


def test_equivariance_failure_for_transposition():
    v = verify_equivariance(tau4(), LetterMap((0, 2, 1, 3), "(1 2)"))
    assert not v and v.witness == 0


def test_shift_commutation():
    seq = SubstitutionSequence.stationary(tau4())
    lang = generate_union_language(seq, 6, 3)
    assert verify_shift_commutation(lift_letter_map(plus(1)), lang)

    def anchored(w):
        # x_i -> x_i + x_0: reads the letter at the window start, so it cannot commute with the shift
        return tuple((a + w[0]) % 4 for a in w)

    v = verify_shift_commutation(anchored, lang)
    assert not v and v.witness in lang.top
    empty = Language.from_sets({1: [(0,)]}, 2)
    v = verify_shift_commutation(lift_letter_map(plus(1)), empty)
    assert v and "vacuous" in v.note


def brute_alpha(h, grp):
    """Exhaustive search over all maps g -> k satisfying h(g a) = alpha(g) h(a)."""
    out = []
    for g in grp.elements:
        ks = [k for k in grp.elements if all(h.images[grp.mul[g][a]] == grp.mul[k][h.images[a]] for a in grp.elements)]
        if len(ks) != 1:
            return None
        out.append(ks[0])
    return tuple(out)


def test_right_translations_of_s3_are_central():
    act = left_translation(S3)
    for r in translations(S3, "right"):
        v = classify_normalizer(r, act)
        assert v.accepted and v.in_centralizer and v.unique
        assert v.alpha == brute_alpha(r, S3)


def test_conjugations_of_s3_give_inner_automorphisms():
    act = left_translation(S3)
    for k, c in zip(S3.elements, conjugations(S3)):
        v = classify_normalizer(c, act)
        assert v.accepted
        assert v.alpha == tuple(S3.mul[S3.mul[k][g]][S3.inv[k]] for g in S3.elements)
        assert v.alpha == brute_alpha(c, S3)


def test_negation_on_z4():
    v = classify_normalizer(LetterMap((0, 3, 2, 1), "neg"), left_translation(Z4))
    assert v.accepted and v.alpha == (0, 3, 2, 1)


def test_rejection_carries_witness():
    h = LetterMap((0, 2, 1, 3), "(1 2)")
    act = left_translation(Z4)
    v = classify_normalizer(h, act)
    assert not v.accepted
    g, a = v.witness
    # no k satisfies the relation on letters 0..a, while some k still does on 0..a-1
    def fits(k, letters):
        return all(h.images[act.act[g][b]] == act.act[k][h.images[b]] for b in letters)

    assert not any(fits(k, range(a + 1)) for k in Z4.elements)
    assert any(fits(k, range(a)) for k in Z4.elements)


def test_classification_soundness_post_hoc():
    act = left_translation(S3)
    for h in translations(S3, "right") + conjugations(S3) + translations(S3, "left"):
        v = classify_normalizer(h, act)
        if v.accepted:
            for g, a in product(S3.elements, repeat=2):
                assert h(act.act[g][a]) == act.act[v.alpha[g]][h(a)]


def test_exact_sequence_s3():
    act = left_translation(S3)
    cands = translations(S3, "right") + conjugations(S3)
    rep = exact_sequence_report(cands, act)
    assert rep.homomorphism_ok
    assert rep.kernel == [f"R{c}" for c in S3.elements] + ["C0"]
    assert rep.kernel_matches_commutant
    inner = sorted({tuple(S3.mul[S3.mul[k][g]][S3.inv[k]] for g in S3.elements) for k in S3.elements})
    assert rep.image == inner
    commuting = [h.label for h in cands if all(h(S3.mul[g][a]) == S3.mul[g][h(a)] for g in S3.elements for a in S3.elements)]
    assert commuting == rep.kernel


def test_exact_sequence_identity_only():
    rep = exact_sequence_report([LetterMap.identity(4)], left_translation(Z4))
    assert rep.kernel == ["id"] and rep.image == [(0, 1, 2, 3)]


def test_exact_sequence_z4_index_two():
    cands = translations(Z4) + [LetterMap((0, 3, 2, 1), "neg")]
    rep = exact_sequence_report(cands, left_translation(Z4))
    assert rep.image_order == 2
    assert rep.sign_image
    assert rep.automorphism_group_order == 2


def test_commutes_with_action_matches_kernel():
    act = left_translation(Z4)
    assert commutes_with_action(plus(2), act)
    assert not commutes_with_action(LetterMap((0, 3, 2, 1)), act)


def test_freeness():
    seq = SubstitutionSequence.stationary(tau4())
    lang = generate_union_language(seq, 4, 3)
    res = freeness_check([lift_letter_map(plus(c)) for c in range(4)], lang)
    assert len(res) == 3 and all(e.certified for e in res)
    swap = freeness_check([lift_letter_map(LetterMap((0, 2, 1, 3), "(1 2)"))], lang)
    assert not swap[0].certified and swap[0].fixed_letters == (0, 3)


def test_embedding_z4():
    seq = SubstitutionSequence.stationary(tau4())
    lang = generate_union_language(seq, 8, 4)
    rep = embed_centralizer(left_translation(Z4), (0, 1, 3), translations(Z4), lang)
    assert rep.ok and rep.cyclic and rep.closed
    assert rep.composition_table == [[(i + j) % 4 for j in range(4)] for i in range(4)]


def test_embedding_z8():
    z8 = cyclic_group(8)
    seq = SubstitutionSequence.from_action(left_translation(z8), [(0, 1, 7)])
    lang = generate_union_language(seq, 8, 4)
    rep = embed_centralizer(left_translation(z8), (0, 1, 7), translations(z8), lang)
    assert rep.ok and rep.count == 8 and rep.distinct


def test_embedding_identity_only():
    seq = SubstitutionSequence.stationary(tau4())
    lang = generate_union_language(seq, 4, 2)
    rep = embed_centralizer(left_translation(Z4), (0, 1, 3), [LetterMap.identity(4)], lang)
    assert rep.ok and rep.distinct


def test_embedding_reports_equivariance_failures():
    seq = SubstitutionSequence.stationary(tau4())
    lang = generate_union_language(seq, 4, 2)
    rep = embed_centralizer(left_translation(Z4), (0, 1, 3), [LetterMap((0, 2, 1, 3), "swap")], lang)
    assert rep.equivariance_failures == {"swap": 0}
    assert not rep.ok


def test_language_preservation_is_set_equality():
    seq = SubstitutionSequence.stationary(tau4())
    lang = generate_union_language(seq, 7, 4)
    for c in range(4):
        lf = lift_letter_map(plus(c))
        for ell in range(1, 8):
            assert {lf(w) for w in lang.stratum(ell)} == lang.stratum(ell)
