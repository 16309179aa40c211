from itertools import permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centralizer_lab.groups import (
    GroupAction,
    GroupError,
    action_diagnostics,
    build_action,
    build_group,
    build_quotient_tower,
    cyclic_group,
    direct_product,
    group_from_table,
    left_translation,
    stabilizer_and_cosets,
    symmetric_group,
    symmetric_generators,
)


def brute_order(grp, g):
    x, n = g, 1
    while x != grp.identity:
        x, n = grp.mul[x][g], n + 1
    return n


def test_cyclic_table():
    z4 = build_group("cyclic 4")
    assert z4.order == 4
    assert all(z4.mul[a][b] == (a + b) % 4 for a in range(4) for b in range(4))


def test_symmetric_order_and_canonical_ids():
    s3 = build_group("symmetric 3")
    assert s3.order == 6
    assert s3.identity == 0
    # ids follow lexicographic one-line notation
    perms = sorted(permutations(range(3)))
    # composition p o q on one-line notation
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            pq = tuple(p[q[x]] for x in range(3))
            assert s3.mul[i][j] == perms.index(pq)


def test_product_of_cyclics_is_cyclic_of_order_six():
    g = build_group("product(cyclic 2, cyclic 3)")
    assert g.order == 6
    orders = [brute_order(g, x) for x in g.elements]
    assert 6 in orders


@pytest.mark.parametrize("spec", ["Z/5", "S3", "trivial", {"cyclic": 3}, {"symmetric": 2}, {"product": ["cyclic 2", "cyclic 2"]}])
def test_build_group_accepts_spellings(spec):
    g = build_group(spec)
    assert g.order >= 1


@pytest.mark.parametrize(
    "rows",
    [
        [[0, 1], [1, 1]],  # no inverse for 1
        [[0, 1, 2], [1, 0, 0], [2, 0, 1]],  # 2 has no inverse
    ],
)
def test_malformed_tables_rejected(rows):
    with pytest.raises(GroupError) as exc:
        group_from_table(rows)
    assert exc.value.witness is not None


def test_table_without_identity_rejected():
    with pytest.raises(GroupError, match="identity"):
        group_from_table([[1, 1], [1, 1]])


def test_nonassociative_witness_is_a_triple():
    # loop of order 5 that is not a group: latin square with identity 0
    rows = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupError) as exc:
        group_from_table(rows)
    w = exc.value.witness
    assert len(w) == 3
    a, b, c = w
    assert rows[rows[a][b]][c] != rows[a][rows[b][c]]


@given(st.integers(1, 12), st.integers(1, 12))
@settings(max_examples=30, deadline=None)
def test_direct_product_invariants(m, n):
    g = direct_product(cyclic_group(m), cyclic_group(n))
    e = g.identity
    for a in g.elements:
        assert g.mul[e][a] == a == g.mul[a][e]
        assert g.mul[a][g.inv[a]] == e


def test_tower_cyclic_chain():
    t = build_quotient_tower([2, 4, 8])
    assert [lv.order for lv in t.levels] == [2, 4, 8]
    assert t.project(3, 2, 1) == 1
    assert t.project(7, 3, 1) == 1


def test_tower_rejections():
    with pytest.raises(GroupError):
        build_quotient_tower([2, 3])
    with pytest.raises(GroupError):
        build_quotient_tower([])


def test_tower_separating_level_is_least():
    t = build_quotient_tower([2, 4, 8])
    top = t.level(3)
    for a, b in product(top.elements, repeat=2):
        if a == b:
            continue
        lvl = t.separating_level(a, b)
        # brute force: reduce mod 2, 4, 8 and find the first level that differs
        expected = next(d for d, m in enumerate((2, 4, 8), start=1) if a % m != b % m)
        assert lvl == expected


def test_sign_tower_is_homomorphic():
    t = build_quotient_tower({"sign": 3})
    s3 = t.level(2)
    assert s3.order == 6 and t.level(1).order == 2
    for a, b in product(s3.elements, repeat=2):
        assert t.project(s3.mul[a][b], 2, 1) == t.level(1).mul[t.project(a, 2, 1)][t.project(b, 2, 1)]


def test_left_translation_of_z4():
    act = build_action(cyclic_group(4), "left-translation")
    assert all(act.act[g][a] == (g + a) % 4 for g in range(4) for a in range(4))
    d = action_diagnostics(act)
    assert d.free and d.transitive and d.faithful


def test_s3_left_translation_flags():
    d = action_diagnostics(left_translation(symmetric_group(3)))
    assert (d.free, d.transitive, d.faithful) == (True, True, True)


def test_reduction_action_not_faithful():
    act = build_action(cyclic_group(4), {"kind": "quotient-translation", "quotient": "cyclic 2", "projection": [0, 1, 0, 1]})
    d = action_diagnostics(act)
    assert not d.faithful
    assert d.faithful_witness == (0, 2)


def test_trivial_action_not_free():
    d = action_diagnostics(build_action(cyclic_group(2), "trivial", letters=3))
    assert not d.free
    g, a = d.free_witness
    assert g == 1 and a in range(3)


def test_explicit_action_rejects_non_bijective_row():
    with pytest.raises(GroupError):
        build_action(cyclic_group(4), "explicit", table=[[0, 1, 2, 3], [1, 1, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2]])


def test_explicit_action_rejects_non_identity_row():
    with pytest.raises(GroupError):
        GroupAction(cyclic_group(2), ((1, 0), (0, 1)))


def test_cosets_of_free_action_singletons():
    s3 = symmetric_group(3)
    act = left_translation(s3)
    cos = stabilizer_and_cosets(act, [[a] for a in range(6)], [0])
    assert cos.stabilizer == frozenset({0})
    assert len(cos.representatives) == 6
    assert cos.representatives[0] == s3.identity


def test_cosets_on_three_blocks():
    s3 = symmetric_group(3)
    act = left_translation(s3)
    # left cosets of the subgroup {e, (0 2 1)}: partition by left translation classes
    h = s3.generated_subgroup([s3.elements[1]])
    blocks = sorted({frozenset(s3.mul[g][x] for x in h) for g in s3.elements}, key=min)
    cos = stabilizer_and_cosets(act, blocks, blocks[0])
    assert len(cos.stabilizer) == 2 and len(cos.representatives) == 3
    # orbit-stabilizer
    orbit = {frozenset(act.act[g][a] for a in blocks[0]) for g in s3.elements}
    assert len(orbit) * len(cos.stabilizer) == s3.order
    # deterministic choice: identity first, then least ids
    for i, r in enumerate(cos.representatives):
        assert r == min(g for g in s3.elements if cos.index_of[g] == i)


def test_cosets_reject_non_block():
    act = left_translation(cyclic_group(4))
    with pytest.raises(GroupError):
        stabilizer_and_cosets(act, [[0, 1], [2, 3]], [0, 2])


def test_symmetric_generators_closed_under_inverse():
    s3 = symmetric_group(3)
    gens = symmetric_generators(s3, s3.generating_set())
    assert gens[0] == s3.identity
    assert set(gens) == {s3.inv[g] for g in gens}
    assert s3.generated_subgroup(gens) == frozenset(s3.elements)
