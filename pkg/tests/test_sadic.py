import pytest

from centralizer_lab.automorphisms import LetterMap
from centralizer_lab.checks import Status
from centralizer_lab.constructions import (
    ComponentSystem,
    Horizons,
    build_direct_product,
    build_profinite_realization,
    odometer_setup,
    product_generators,
    product_letter_maps,
    run_sadic_embedding,
)
from centralizer_lab.groups import build_quotient_tower


def test_z4_pipeline_all_stages_pass():
    action, gens, auts = odometer_setup(4)
    assert gens == (0, 1, 3)
    rep = run_sadic_embedding(action, [gens], auts, Horizons(L=10, K=6, H=16, p_max=4))
    assert rep.status is Status.PASS, [(c.name, c.witness) for c in rep.checks if not c.passed]
    assert rep.get("primitivity").counts["powers"] == [2]
    assert rep.get("recurrence").counts["bounds"] == {0: 10, 1: 10, 2: 10, 3: 10}
    assert rep.info["minimality_evidence"]
    assert rep.info["embedded"] == 4


def test_identity_generators_fail_primitivity():
    action, _, auts = odometer_setup(4)
    rep = run_sadic_embedding(action, [(0,)], auts, Horizons(L=4, K=2, H=4, p_max=2))
    assert rep.get("primitivity").status is Status.FAIL
    assert not rep.info["minimality_evidence"]
    assert rep.status is Status.FAIL


def test_bad_schedule_stops_early():
    action, _, auts = odometer_setup(4)
    rep = run_sadic_embedding(action, [(1, 0, 3)], auts)
    assert [c.name for c in rep.checks] == ["substitution"]
    assert rep.status is Status.FAIL


def test_budget_overrun_reported_per_stage():
    action, gens, auts = odometer_setup(4)
    rep = run_sadic_embedding(action, [gens], auts, Horizons(L=40, K=6, H=40, p_max=4), budget=10)
    assert rep.get("language").status is Status.FAIL
    assert "budget" in rep.get("language").witness


def test_non_equivariant_map_fails_equivariance_stage():
    action, gens, auts = odometer_setup(4)
    bad = auts + [LetterMap((0, 2, 1, 3), "swap")]
    rep = run_sadic_embedding(action, [gens], bad, Horizons(L=8, K=4, H=16, p_max=4))
    assert rep.get("equivariance").status is Status.FAIL
    assert rep.get("equivariance").witness == {"swap": 0}
    assert rep.get("freeness").status is Status.INCONCLUSIVE


@pytest.mark.slow
def test_z8_pipeline():
    action, gens, auts = odometer_setup(8)
    hz = Horizons(L=16, K=8, H=96, p_max=8, independence_L=10, independence_K=10)
    rep = run_sadic_embedding(action, [gens], auts, hz)
    assert rep.status is Status.PASS, [(c.name, c.witness) for c in rep.checks if not c.passed]
    assert rep.info["embedded"] == 8
    assert rep.get("primitivity").counts["powers"] == [4]
    assert set(rep.get("recurrence").counts["bounds"].values()) == {82}


def test_z8_independence_needs_depth_ten():
    """Per-seed Z/8 languages still differ at depth 6 and agree from depth 10."""
    action, gens, auts = odometer_setup(8)
    early = run_sadic_embedding(action, [gens], auts, Horizons(L=10, K=6, H=10, p_max=4))
    assert early.get("language_independence").status is Status.FAIL
    late = run_sadic_embedding(action, [gens], auts, Horizons(L=10, K=10, H=10, p_max=4))
    assert late.get("language_independence").status is Status.PASS


def test_profinite_2_4_8():
    tower = build_quotient_tower([2, 4, 8])
    rep = build_profinite_realization(tower, 3)
    assert rep.status is Status.PASS
    assert rep.get("right_translations_central").counts == {"accepted": 8, "order": 8}
    one = build_profinite_realization(tower, 1)
    assert one.get("right_translations_central").counts["accepted"] == 2


def test_profinite_s3_level():
    tower = build_quotient_tower({"sign": 3})
    hz = Horizons(L=12, K=6, H=40, p_max=6, independence_L=10, independence_K=6)
    rep = build_profinite_realization(tower, 2, hz)
    assert rep.status is Status.PASS, [(c.name, c.witness) for c in rep.checks if not c.passed]
    assert rep.get("right_translations_central").counts["accepted"] == 6
    conj = rep.get("conjugations_normalize").counts
    assert conj == {"proper_normalizer": 5, "central": 1}


def test_product_generator_convention():
    a = ComponentSystem(*odometer_setup(4))
    b = ComponentSystem(*odometer_setup(2))
    pairs = product_generators(a, b)
    assert pairs == ((0, 0), (1, 0), (3, 0), (0, 1), (1, 1), (3, 1))


def test_direct_product_z4_z2():
    rep = build_direct_product(ComponentSystem(*odometer_setup(4)), ComponentSystem(*odometer_setup(2)))
    assert rep.status is Status.PASS
    assert rep.info["product_automorphisms"] == 8
    assert rep.get("pair_map_injective").counts["distinct"] == 8


def test_direct_product_z4_z4():
    a = ComponentSystem(*odometer_setup(4))
    rep = build_direct_product(a, a)
    assert rep.status is Status.PASS
    assert rep.info["product_automorphisms"] == 16


def test_direct_product_identity_pair_is_identity():
    a = ComponentSystem(*odometer_setup(4))
    b = ComponentSystem(*odometer_setup(2))
    maps = {m.label: m for m in product_letter_maps(a, b)}
    assert maps["(L0,L0)"].is_identity
    assert sum(m.is_identity for m in maps.values()) == 1
    assert build_direct_product(a, b).info["generators"][0] == [0, 0]
