from itertools import product

import pytest

from centralizer_lab.constructions import (
    ProductSystemError,
    build_cyclic_extension_system,
    build_product_normalizer,
    dump_product_system,
    unit_vectors,
    verify_product_relations,
)
from centralizer_lab.groups import build_group, cyclic_group, symmetric_group


@pytest.fixture(scope="module")
def s3_system():
    return build_cyclic_extension_system(symmetric_group(3), 3)


def test_extension_system_components(s3_system):
    assert s3_system.size == 18
    comps = s3_system.components()
    assert len(comps) == 6 and all(len(c) == 3 for c in comps)
    # the components are the fibers {h} x Z/3
    assert {frozenset(p // 3 for p in c) for c in comps} == {frozenset({h}) for h in range(6)}
    assert s3_system.commutation_failures() == []


def test_trivial_group_single_component():
    sysm = build_cyclic_extension_system(build_group("trivial"), 5)
    assert len(sysm.components()) == 1
    assert sorted(sysm.f) == list(range(5)) and sysm.f == (1, 2, 3, 4, 0)


def test_modulus_must_be_at_least_two():
    with pytest.raises(ProductSystemError):
        build_cyclic_extension_system(cyclic_group(2), 1)


def test_s3_product_normalizer_shape(s3_system):
    ps = build_product_normalizer(s3_system)
    assert ps.index_size == 6 and ps.stabilizer == frozenset({0})
    assert len(ps.states) == 729
    assert ps.reps[0] == 0
    assert ps.sigma[0] == tuple(range(6))
    y = ps.states[100]
    assert ps.T_tilde(0, y) == y


def test_sigma_matches_defining_membership(s3_system):
    ps = build_product_normalizer(s3_system)
    g3 = s3_system.group
    stab = ps.stabilizer
    for g in g3.elements:
        for i, gi in enumerate(ps.reps):
            j = ps.sigma[g][i]
            # g g_j lies in g_i Stab
            assert g3.mul[g3.inv[gi]][g3.mul[g][ps.reps[j]]] in stab
        if g3.element_order(g) == 2:
            s = ps.sigma[g]
            assert all(s[s[i]] == i for i in range(6))


def test_sigma_composition_law(s3_system):
    ps = build_product_normalizer(s3_system)
    g3 = s3_system.group
    for g, h in product(g3.elements, repeat=2):
        gh = g3.mul[g][h]
        assert ps.sigma[gh] == tuple(ps.sigma[h][ps.sigma[g][i]] for i in range(6))


def test_relations_s3_full(s3_system):
    ps = build_product_normalizer(s3_system)
    rep = verify_product_relations(ps)
    assert rep.instances == 6 * 12 * 729
    assert rep.ok and not rep.sampled


def test_relation_with_zero_vector(s3_system):
    ps = build_product_normalizer(s3_system)
    rep = verify_product_relations(ps, [(0,) * 6])
    assert rep.relation_ok


def test_relation_independent_recheck(s3_system):
    """Recompute both sides of the relation straight from the point tables."""
    ps = build_product_normalizer(s3_system)
    f, T, m = s3_system.f, s3_system.T, 3

    def point(i, c):
        return ps.charts_inv[i][c]

    def S(n, y):
        out = []
        for i in range(6):
            p = point(i, y[i])
            for _ in range(n[i] % m):
                p = f[p]
            out.append(ps.charts_inv[i].index(p))
        return tuple(out)

    def Tt(g, y):
        return tuple(ps.charts_inv[i].index(T[g][point(ps.sigma[g][i], y[ps.sigma[g][i]])]) for i in range(6))

    for g in range(6):
        for n in unit_vectors(6):
            an = tuple(n[ps.sigma[g][i]] for i in range(6))
            for y in ps.states[::37]:
                assert Tt(g, S(n, y)) == S(an, Tt(g, y))


def test_sampling_requires_seed(s3_system):
    with pytest.raises(ProductSystemError):
        build_product_normalizer(s3_system, state_cap=10, sample=5)
    with pytest.raises(ProductSystemError):
        build_product_normalizer(s3_system, state_cap=10)
    ps = build_product_normalizer(s3_system, state_cap=10, sample=50, seed=7)
    again = build_product_normalizer(s3_system, state_cap=10, sample=50, seed=7)
    assert ps.sampled and ps.states == again.states
    assert verify_product_relations(ps).ok


def test_dump_lists_index_and_tables(s3_system):
    text = dump_product_system(build_product_normalizer(s3_system))
    lines = text.splitlines()
    assert lines[0] == "I=0 1 2 3 4 5"
    assert sum(ln.startswith("sigma[") for ln in lines) == 6
    assert sum(ln.startswith("alpha[") for ln in lines) == 6
