from __future__ import annotations

import json
from collections import Counter

import pytest

from affinetask import (Adversary, AdversaryError, ComplexError, Simplex,
                        agreement_function, build_r_a, build_r_kof,
                        build_r_tres, carrier, chr2_complex,
                        concurrency_levels, contention_simplices,
                        critical_data, critical_simplices, is_contention,
                        is_critical, make_k_of, make_superset_closed,
                        make_t_resilient, standard_simplex, task_to_dict,
                        two_round_facet, variant_divergence_report,
                        verify_cs_distribution, verify_single_carrier)
from conftest import DATA_DIR
from oracles import resilient_facets_by_vertex_filter


# --- contention -----------------------------------------------------------------


def test_contending_pair_from_inverted_schedules():
    # round 1: 1 before 2; round 2: 2 before 1
    f = two_round_facet(((1,), (2,)), ((2,), (1,)), 2)
    assert is_contention(f)


def test_synchronized_schedule_is_not_contending():
    f = two_round_facet(((1, 2),), ((1, 2),), 2)
    assert not is_contention(f)
    # same round-1 order repeated: views agree in direction, no inversion
    g = two_round_facet(((1,), (2,)), ((1,), (2,)), 2)
    assert not is_contention(g)


def test_single_vertices_are_vacuously_contending():
    f = two_round_facet(((1, 2),), ((1, 2),), 2)
    for v in f:
        assert is_contention(Simplex((v,)))


def test_contention_counts():
    assert [s.dim for s in contention_simplices(chr2_complex(2), min_dim=1)] == [1, 1]
    by_dim = Counter(s.dim for s in contention_simplices(chr2_complex(3), min_dim=1))
    assert by_dim == {1: 78, 2: 6}


# --- criticality ------------------------------------------------------------------


def test_is_critical_requires_subdivision_vertices():
    base = next(iter(standard_simplex(2).facets))
    alpha = agreement_function(make_k_of(2, 1))
    with pytest.raises(ComplexError):
        is_critical(base, alpha)


def test_critical_simplices_solo_level():
    """With only solo live sets, exactly the full-carrier rainbows drop alpha."""
    crits = critical_simplices(make_k_of(3, 1))
    assert len(crits) == 7  # one per nonempty face of the base triangle
    for s in crits:
        assert s.colors == carrier(s, "s").colors


@pytest.mark.parametrize("adv,expected", [
    (make_k_of(3, 2), 16),
    (make_t_resilient(3, 1), 16),
    (make_superset_closed(3, [[2], [1, 3]]), 15),
    (make_t_resilient(3, 2), 19),
])
def test_critical_simplex_counts(adv, expected):
    assert len(critical_simplices(adv)) == expected


def test_critical_set_is_not_closed_under_faces():
    alpha = agreement_function(make_k_of(3, 1))
    crits = critical_simplices(make_k_of(3, 1))
    full = next(s for s in crits if len(s.vertices) == 3)
    proper = Simplex(full.vertices[:2])
    assert not is_critical(proper, alpha)


def test_critical_data_solo_level():
    alpha = agreement_function(make_k_of(3, 1))
    full = next(s for s in critical_simplices(make_k_of(3, 1))
                if len(s.vertices) == 3)
    data = critical_data(full, alpha)
    assert data.cs == frozenset({full})
    assert data.csm == full.vertex_set
    assert data.csv_colors == frozenset({1, 2, 3})
    assert data.conc == 1


def test_critical_data_empty_for_center_vertex():
    # center vertices never drop a two-level alpha on their own
    alpha = agreement_function(make_k_of(3, 2))
    conc = concurrency_levels(make_k_of(3, 2))
    zeros = [s for s, c in conc.items() if c == 0]
    assert len(zeros) == 3
    for s in zeros:
        assert len(s.vertices) == 1
        assert carrier(s, "s").colors == frozenset({1, 2, 3})
        data = critical_data(s, alpha)
        assert data.cs == frozenset() and data.conc == 0


def test_concurrency_level_distribution():
    conc = concurrency_levels(make_k_of(3, 2))
    assert Counter(conc.values()) == {2: 37, 1: 9, 0: 3}


# --- task constructions --------------------------------------------------------------


def test_solo_task_matches_adversary_task():
    """Banning all contending pairs equals the guard construction at level 1."""
    for n in (2, 3):
        direct = build_r_kof(n, 1)
        derived = build_r_a(make_k_of(n, 1))
        assert direct.complex.facets == derived.complex.facets
    assert build_r_kof(2, 1).facet_count() == 7
    assert build_r_kof(3, 1).facet_count() == 73


def test_level_two_task_strictly_contains_adversary_task():
    """Banning only contending triangles keeps 21 facets the guard drops.

    Each extra facet schedules some process that saw everyone in round 1
    alone first in round 2; the guard construction never admits that order.
    """
    direct = build_r_kof(3, 2)
    derived = build_r_a(make_k_of(3, 2))
    assert direct.facet_count() == 163
    assert derived.facet_count() == 142
    assert derived.complex.facets < direct.complex.facets
    extra = direct.complex.facets - derived.complex.facets
    assert len(extra) == 21
    n = 3
    for facet in extra:
        solo_first = any(
            len(carrier(v, "s")) == n and len(carrier(v, "chr")) == 1
            for v in facet)
        assert solo_first


def test_resilient_task_dual_route(chr2_3):
    task = build_r_tres(3, 1)
    assert task.complex.facets == resilient_facets_by_vertex_filter(chr2_3, 3, 1)
    assert task.facet_count() == 142


def test_resilient_adversary_task_equals_vertex_filter():
    direct = build_r_tres(3, 1)
    derived = build_r_a(make_t_resilient(3, 1))
    assert direct.complex.facets == derived.complex.facets


def test_wait_free_task_is_whole_subdivision(chr2_3):
    task = build_r_a(make_t_resilient(3, 2))
    assert task.complex.facets == chr2_3.facets
    assert task.facet_count() == 169


@pytest.mark.parametrize("name,union_count,inter_count", [
    ("obstruction_free_1", 73, 49),
    ("obstruction_free_2", 142, 115),
    ("resilient_1", 142, 142),
    ("superset_closed_2_13", 145, 139),
])
def test_task_facet_counts(fixture_adversaries, name, union_count, inter_count):
    adv = fixture_adversaries[name]
    assert build_r_a(adv, combine="union").facet_count() == union_count
    assert build_r_a(adv, combine="intersection").facet_count() == inter_count


def test_union_variant_contains_intersection_variant(fixture_adversaries):
    for adv in fixture_adversaries.values():
        union = build_r_a(adv, combine="union")
        inter = build_r_a(adv, combine="intersection")
        assert inter.complex.facets <= union.complex.facets


def test_variant_divergence_matches_golden(fixture_adversaries):
    got = variant_divergence_report(sorted(fixture_adversaries.items()))
    want = json.loads((DATA_DIR / "ra_variant_divergence.json").read_text())
    assert got == want


def test_tasks_are_pure_full_dimensional(fixture_tasks):
    for task in fixture_tasks.values():
        dims = {f.dim for f in task.complex.facets}
        assert dims == {task.n - 1}


def test_build_r_a_validates_input():
    with pytest.raises(AdversaryError):
        build_r_a(make_k_of(3, 1), combine="xor")
    with pytest.raises(AdversaryError):
        build_r_a(Adversary(3, [frozenset({1, 2}), frozenset({3})]))
    with pytest.raises(AdversaryError):
        build_r_a(Adversary(3, []))
    with pytest.raises(AdversaryError):
        build_r_kof(3, 4)
    with pytest.raises(AdversaryError):
        build_r_tres(3, 3)


# --- verification sweeps ----------------------------------------------------------


def test_cs_distribution_holds_for_fair_families(fair_live_adversaries):
    for adv in fair_live_adversaries:
        report = verify_cs_distribution(adv)
        assert report.ok, report.violations


def test_single_carrier_holds_for_fair_families(fair_live_adversaries):
    for adv in fair_live_adversaries:
        report = verify_single_carrier(adv)
        assert report.ok, report.violations


# --- serialization -----------------------------------------------------------------


def test_task_to_dict_shape(fixture_tasks):
    doc = task_to_dict(fixture_tasks["obstruction_free_1"])
    assert doc["name"] == "r_adv"
    assert doc["combine"] == "union"
    assert doc["n"] == 3
    assert len(doc["facets"]) == 73
    assert doc["alpha"][""] == 0
    assert doc["alpha"]["1,2,3"] == 1
