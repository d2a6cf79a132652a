"""Tests for the degree laboratory: left/right degrees of irreducible
morphisms, kernel characterization, the mesh degree-shift law, the
degree-two classifier, composite analysis, sectional family sums, and
the finite-type criterion."""

from __future__ import annotations

import threading
from fractions import Fraction

import pytest

from arknit.degrees import (
    RadFiltration,
    classify_degree_two,
    composite_analysis,
    degree_shift,
    finite_type_check,
    kernel_characterization,
    left_degree,
    rad_square_perturbations,
    right_degree,
    sectional_family_sum,
    sectional_paths,
)
from arknit.errors import ComputationError
from arknit.quiver import parse_quiver
from arknit.reps import (
    cokernel,
    direct_sum,
    i_quotient,
    identity_mor,
    injective,
    is_isomorphic,
    kernel,
    knit_ar_component,
    p_inclusion,
    projective,
    simple,
)

A2 = "v 1\nv 2\na 1 1 2"
A3 = "v 1\nv 2\nv 3\na 1 1 2\na 2 2 3"
A4 = "v 1\nv 2\nv 3\nv 4\na 1 1 2\na 2 2 3\na 3 3 4"
D4 = "v 1\nv 2\nv 3\nv 4\na 1 2 1\na 2 3 1\na 3 4 1"
ATILDE2 = "v 1\nv 2\nv 3\na 1 1 2\na 2 2 3\na 3 1 3"


def _q(text):
    return parse_quiver(text)


def _knit(q, direction="projectives", bound=None):
    return knit_ar_component(q, direction=direction, bound=bound)


def _vid(ar, dims):
    hits = [v for v in ar.vids() if ar.module(v).dim_vector() == tuple(dims)]
    assert len(hits) == 1
    return hits[0]


def _arrow(ar, src_dims, tgt_dims):
    tq = ar.tq
    hits = [
        a
        for a in sorted(tq.arrows)
        if ar.module(tq.src(a)).dim_vector() == tuple(src_dims)
        and ar.module(tq.tgt(a)).dim_vector() == tuple(tgt_dims)
    ]
    assert len(hits) == 1
    return hits[0]


def _is_epi(f):
    return cokernel(f)[0].total_dim == 0


def _is_mono(f):
    return kernel(f)[0].total_dim == 0


# -- radical filtrations -----------------------------------------------------


def test_rad_filtration_matches_calculator():
    q = _q(A3)
    ar = _knit(q)
    left = RadFiltration(ar, "left")
    right = RadFiltration(ar, "right")
    expected = {
        ((0, 0, 1), (1, 1, 1)): [1, 1, 1, 0],
        ((0, 1, 1), (1, 1, 0)): [1, 1, 1, 0],
        ((0, 0, 1), (0, 1, 1)): [1, 1, 0, 0],
    }
    calc = ar.radical_calculator()
    for (sd, td), chain in expected.items():
        s, t = _vid(ar, sd), _vid(ar, td)
        i = calc.index_of(ar.module(s))
        j = calc.index_of(ar.module(t))
        for n, dim in enumerate(chain):
            assert left.dim(s, t, n) == dim
            assert right.dim(s, t, n) == dim
            assert calc.rad_dim(i, j, n) == dim


def test_rad_filtration_truncation_side_rules():
    q = _q(ATILDE2)
    arp = _knit(q, direction="projectives", bound=3)
    ari = _knit(q, direction="injectives", bound=3)
    assert arp.truncated and ari.truncated
    with pytest.raises(ComputationError):
        RadFiltration(arp, "left")
    with pytest.raises(ComputationError):
        RadFiltration(ari, "right")
    RadFiltration(arp, "right")
    RadFiltration(ari, "left")


# -- left and right degrees --------------------------------------------------


def test_left_degree_a2_canonical_quotient():
    q = _q(A2)
    ar = _knit(q)
    f = i_quotient(q, 1)
    rep = left_degree(f, ar, 5)
    assert rep.side == "left"
    assert rep.finite and rep.outcome == "finite"
    assert rep.n == 1
    assert ar.module(rep.witness_vertex).dim_vector() == (0, 1)
    assert rep.witness is not None
    assert rep.zero_witness is not None
    assert (f * rep.zero_witness).is_zero()
    assert rep.witness_path is not None and len(rep.witness_path) == 1
    assert not rep.truncation_limited


def test_right_degree_a2_socle_inclusion():
    q = _q(A2)
    ar = _knit(q)
    f = p_inclusion(q, 1)
    rep = right_degree(f, ar, 5)
    assert rep.side == "right"
    assert rep.finite and rep.n == 1
    assert ar.module(rep.witness_vertex).dim_vector() == (1, 0)
    assert rep.zero_witness is not None
    assert (rep.zero_witness * f).is_zero()
    assert rep.witness_path is not None and len(rep.witness_path) == 1


def test_degree_rejects_non_irreducible():
    q = _q(A3)
    ar = _knit(q)
    p1 = projective(q, 1)
    with pytest.raises(ComputationError, match="not irreducible"):
        left_degree(identity_mor(p1), ar, 3)
    # a composite of two arrows lies in rad^2
    deep = ar.arrow_mor[_arrow(ar, (0, 1, 1), (1, 1, 1))] * ar.arrow_mor[
        _arrow(ar, (0, 0, 1), (0, 1, 1))
    ]
    with pytest.raises(ComputationError, match="not irreducible"):
        left_degree(deep, ar, 3)


def test_degree_rejects_module_outside_component():
    q = _q(A3)
    ar = _knit(q)
    p1 = projective(q, 1)
    total, _, projs = direct_sum([p1, p1], quiver=q)
    with pytest.raises(ComputationError, match="component"):
        left_degree(projs[0], ar, 3)


def test_a3_arrow_degree_table():
    q = _q(A3)
    ar = _knit(q)
    left_expected = {
        ((0, 0, 1), (0, 1, 1)): None,
        ((0, 1, 1), (1, 1, 1)): None,
        ((0, 1, 1), (0, 1, 0)): 1,
        ((1, 1, 1), (1, 1, 0)): 2,
        ((0, 1, 0), (1, 1, 0)): None,
        ((1, 1, 0), (1, 0, 0)): 1,
    }
    right_expected = {
        ((0, 0, 1), (0, 1, 1)): 1,
        ((0, 1, 1), (1, 1, 1)): 2,
        ((0, 1, 1), (0, 1, 0)): None,
        ((1, 1, 1), (1, 1, 0)): None,
        ((0, 1, 0), (1, 1, 0)): 1,
        ((1, 1, 0), (1, 0, 0)): None,
    }
    tq = ar.tq
    for a in sorted(tq.arrows):
        key = (
            ar.module(tq.src(a)).dim_vector(),
            ar.module(tq.tgt(a)).dim_vector(),
        )
        f = ar.arrow_mor[a]
        lrep = left_degree(f, ar, 6)
        rrep = right_degree(f, ar, 6)
        if left_expected[key] is None:
            assert not lrep.finite, key
        else:
            assert lrep.n == left_expected[key], key
        if right_expected[key] is None:
            assert not rrep.finite, key
        else:
            assert rrep.n == right_expected[key], key
        # trichotomy on a finite-type component
        assert _is_epi(f) == lrep.finite, key
        assert _is_mono(f) == rrep.finite, key
        assert lrep.finite != rrep.finite, key


def test_left_degree_witness_shape_a3():
    q = _q(A3)
    ar = _knit(q)
    aid = _arrow(ar, (1, 1, 1), (1, 1, 0))
    f = ar.arrow_mor[aid]
    rep = left_degree(f, ar, 6)
    assert rep.n == 2
    assert ar.module(rep.witness_vertex).dim_vector() == (0, 0, 1)
    filt = RadFiltration(ar, "left")
    xv = _vid(ar, (1, 1, 1))
    zv = rep.witness_vertex
    coords = filt.coords(zv, xv, rep.witness)
    assert filt.level(zv, xv, 2).contains(coords)
    assert not filt.level(zv, xv, 3).contains(coords)
    assert rep.zero_witness is not None
    assert (f * rep.zero_witness).is_zero()
    assert rep.witness_path is not None and len(rep.witness_path) == 2
    js = rep.for_json()
    assert js["outcome"] == "finite" and js["n"] == 2
    assert js["witness_module"] == [0, 0, 1]


def test_d4_left_degree_epi_arm():
    q = _q(D4)
    ar = _knit(q)
    aid = _arrow(ar, (2, 1, 1, 1), (1, 0, 1, 1))
    rep = left_degree(ar.arrow_mor[aid], ar, 6)
    assert rep.n == 1
    assert ar.module(rep.witness_vertex).dim_vector() == (1, 1, 0, 0)


# -- kernel characterization -------------------------------------------------


def test_kernel_characterization_finite():
    q = _q(A3)
    ar = _knit(q)
    f = ar.arrow_mor[_arrow(ar, (1, 1, 1), (1, 1, 0))]
    rep = kernel_characterization(f, ar, 6)
    assert rep.degree.n == 2
    assert not rep.mono
    assert ar.module(rep.kernel_vertex).dim_vector() == (0, 0, 1)
    assert rep.incl_level_ok
    assert rep.factors_through_kernel
    assert rep.factor_iso
    assert rep.status == "verified"


def test_kernel_characterization_mono_consistent():
    q = _q(A3)
    ar = _knit(q)
    f = ar.arrow_mor[_arrow(ar, (0, 1, 0), (1, 1, 0))]
    rep = kernel_characterization(f, ar, 6)
    assert not rep.degree.finite
    assert rep.mono
    assert rep.kernel_vertex is None
    assert rep.status == "consistent"


def test_kernel_characterization_partial_on_small_bound():
    q = _q(A3)
    ar = _knit(q)
    f = ar.arrow_mor[_arrow(ar, (1, 1, 1), (1, 1, 0))]
    rep = kernel_characterization(f, ar, 1)
    assert not rep.degree.finite
    assert not rep.mono
    assert rep.status == "partial"


# -- degree shift at a mesh --------------------------------------------------


def test_degree_shift_a3_finite_pair():
    q = _q(A3)
    ar = _knit(q)
    aid = _arrow(ar, (1, 1, 1), (1, 1, 0))
    rep = degree_shift(ar, aid, 6)
    assert rep.f_report.n == 2
    assert rep.g_report.n == 1
    assert rep.shift_ok
    other = _arrow(ar, (0, 1, 0), (1, 1, 0))
    rep2 = degree_shift(ar, other, 6)
    assert not rep2.f_report.finite
    assert not rep2.g_report.finite
    assert rep2.shift_ok


def test_degree_shift_rejects_single_arm():
    q = _q(A3)
    ar = _knit(q)
    aid = _arrow(ar, (0, 1, 1), (0, 1, 0))
    with pytest.raises(ComputationError, match="X' != 0"):
        degree_shift(ar, aid, 6)


def test_degree_shift_rejects_projective_target():
    q = _q(A3)
    ar = _knit(q)
    aid = _arrow(ar, (0, 0, 1), (0, 1, 1))
    with pytest.raises(ComputationError, match="mesh"):
        degree_shift(ar, aid, 6)


def test_degree_shift_d4_three_arm_mesh():
    q = _q(D4)
    ar = _knit(q)
    aid = _arrow(ar, (1, 1, 0, 0), (2, 1, 1, 1))
    rep = degree_shift(ar, aid, 6)
    assert not rep.f_report.finite
    assert not rep.g_report.finite
    assert rep.shift_ok
    # the complement consists of the two remaining arms
    assert len(rep.complement) == 2


# -- degree-two classification ----------------------------------------------


def test_classify_degree_two_a3():
    q = _q(A3)
    ar = _knit(q)
    rep = classify_degree_two(ar, 6)
    assert rep.ok
    tq = ar.tq
    left_two = {
        (
            ar.module(tq.src(r["arrow"])).dim_vector(),
            ar.module(tq.tgt(r["arrow"])).dim_vector(),
        )
        for r in rep.records
        if r["actual_left"]
    }
    right_two = {
        (
            ar.module(tq.src(r["arrow"])).dim_vector(),
            ar.module(tq.tgt(r["arrow"])).dim_vector(),
        )
        for r in rep.records
        if r["actual_right"]
    }
    assert left_two == {((1, 1, 1), (1, 1, 0))}
    assert right_two == {((0, 1, 1), (1, 1, 1))}
    for r in rep.records:
        assert r["predicted_left"] == r["actual_left"]
        assert r["predicted_right"] == r["actual_right"]


def test_classify_degree_two_requires_complete():
    q = _q(ATILDE2)
    ar = _knit(q, direction="injectives", bound=3)
    with pytest.raises(ComputationError, match="complete"):
        classify_degree_two(ar, 4)


# -- composite analysis and sectional sums -----------------------------------


def test_composite_analysis_sectional_not_deep():
    q = _q(A3)
    ar = _knit(q)
    a1 = _arrow(ar, (0, 0, 1), (0, 1, 1))
    a2 = _arrow(ar, (0, 1, 1), (1, 1, 1))
    rep = composite_analysis(ar, [ar.arrow_mor[a1], ar.arrow_mor[a2]])
    assert not rep.holds
    assert not rep.composite_zero
    assert not rep.in_rad_next
    assert rep.level == 2


def test_composite_analysis_zero_hook():
    q = _q(A3)
    ar = _knit(q)
    a1 = _arrow(ar, (0, 0, 1), (0, 1, 1))
    a2 = _arrow(ar, (0, 1, 1), (0, 1, 0))
    rep = composite_analysis(ar, [ar.arrow_mor[a1], ar.arrow_mor[a2]])
    assert not rep.holds
    assert rep.composite_zero


def test_composite_analysis_rejects_non_composable():
    q = _q(A3)
    ar = _knit(q)
    a1 = _arrow(ar, (0, 0, 1), (0, 1, 1))
    a2 = _arrow(ar, (1, 1, 1), (1, 1, 0))
    with pytest.raises(ComputationError, match="composable"):
        composite_analysis(ar, [ar.arrow_mor[a1], ar.arrow_mor[a2]])


def test_sectional_family_sum_single_path():
    q = _q(A3)
    ar = _knit(q)
    path = [
        _arrow(ar, (0, 0, 1), (0, 1, 1)),
        _arrow(ar, (0, 1, 1), (1, 1, 1)),
    ]
    rep = sectional_family_sum(ar, [path])
    assert rep.n == 2
    assert rep.in_rad_n and not rep.in_rad_next
    assert rep.ok


def test_sectional_family_sum_two_lengths_atilde2():
    q = _q(ATILDE2)
    ar = _knit(q, direction="injectives", bound=3)
    direct = [_arrow(ar, (2, 1, 1), (1, 0, 0))]
    detour = [
        _arrow(ar, (2, 1, 1), (1, 1, 0)),
        _arrow(ar, (1, 1, 0), (1, 0, 0)),
    ]
    rep = sectional_family_sum(ar, [direct, detour])
    assert rep.n == 1
    assert rep.ok


def test_sectional_family_sum_rejects_hook():
    q = _q(A3)
    ar = _knit(q)
    hook = [
        _arrow(ar, (0, 0, 1), (0, 1, 1)),
        _arrow(ar, (0, 1, 1), (0, 1, 0)),
    ]
    with pytest.raises(ComputationError, match="sectional family invalid"):
        sectional_family_sum(ar, [hook])


def test_sectional_paths_a3():
    q = _q(A3)
    ar = _knit(q)
    paths = sectional_paths(ar.tq)
    assert len(paths) == 8
    assert max(len(p) for _, p in paths) == 2
    for start, arrows in paths:
        assert ar.tq.src(arrows[0]) == start


# -- the extended example with two parallel quotients ------------------------


def test_atilde2_kernel_rank_profiles():
    q = _q(ATILDE2)
    f = i_quotient(q, 3)
    mu = i_quotient(q, 1) * i_quotient(q, 2)
    assert not mu.is_zero()
    k1, _ = kernel(f)
    k2, _ = kernel(f + mu)
    assert k1.dim_vector() == (1, 1, 1)
    assert k2.dim_vector() == (1, 1, 1)
    profiles = {
        tuple(k.mats[a].rank() for a in sorted(q.arrows)) for k in (k1, k2)
    }
    assert profiles == {(1, 1, 0), (1, 1, 1)}
    assert not is_isomorphic(k1, k2)


def test_left_degree_atilde2_not_found():
    q = _q(ATILDE2)
    ar = _knit(q, direction="injectives", bound=4)
    f = i_quotient(q, 3)
    rep = left_degree(f, ar, 6)
    assert not rep.finite
    assert rep.outcome == "not_found"
    assert rep.bound == 6
    assert rep.truncation_limited
    assert rep.notes["interior"] == len(ar.vids()) - len(ar.frontier)


def test_rad_square_perturbations():
    q = _q(ATILDE2)
    ar = _knit(q, direction="injectives", bound=3)
    f = ar.arrow_mor[_arrow(ar, (2, 1, 1), (1, 0, 0))]
    eps = rad_square_perturbations(f, ar, 3, seed=7)
    assert len(eps) == 3
    assert any(not e.is_zero() for e in eps)
    again = rad_square_perturbations(f, ar, 3, seed=7)
    assert all(a == b for a, b in zip(eps, again))
    x = _vid(ar, (2, 1, 1))
    y = _vid(ar, (1, 0, 0))
    filt = RadFiltration(ar, "left")
    for e in eps:
        assert filt.level(x, y, 2).contains(filt.coords(x, y, e))
    # on a linear quiver the parallel radical-square space vanishes
    q4 = _q(A4)
    ar4 = _knit(q4)
    f4 = ar4.arrow_mor[_arrow(ar4, (1, 1, 0, 0), (1, 0, 0, 0))]
    eps4 = rad_square_perturbations(f4, ar4, 2, seed=11)
    assert all(e.is_zero() for e in eps4)
    rep = left_degree(f4 + eps4[0], ar4, 4)
    assert rep.n == 1


# -- finite type check -------------------------------------------------------


def test_finite_type_a2():
    rep = finite_type_check(_q(A2), 8)
    assert rep.verdict == "finite"
    assert rep.ok
    assert rep.projective_degrees == {1: 1}
    assert rep.injective_degrees == {2: 1}
    assert rep.skipped["projectives"] == [2]
    assert rep.skipped["injectives"] == [1]
    assert all(r["ok"] for r in rep.path_bound_checks)


def test_finite_type_a3():
    rep = finite_type_check(_q(A3), 10)
    assert rep.verdict == "finite"
    assert rep.projective_degrees == {1: 2, 2: 1}
    assert rep.injective_degrees == {2: 1, 3: 2}
    assert rep.skipped == {"projectives": [3], "injectives": [1]}
    assert len(rep.path_bound_checks) == 2
    for r in rep.path_bound_checks:
        assert r["ok"]
        assert r["length"] <= r["degree"]
    assert max(rep.projective_degrees.values()) <= rep.diameter
    js = rep.for_json()
    assert js["verdict"] == "finite"


def test_finite_type_inconclusive_atilde2():
    rep = finite_type_check(_q(ATILDE2), 4)
    assert rep.verdict == "inconclusive"
    assert not rep.ok
    assert rep.truncated["projectives"] or rep.truncated["injectives"]
    assert rep.path_bound_checks == []


def test_finite_type_bound_zero():
    rep = finite_type_check(_q(A3), 0)
    assert rep.verdict == "inconclusive"


# -- concurrency -------------------------------------------------------------


def test_concurrent_degree_searches_agree():
    q = _q(A3)
    ar = _knit(q)
    filt = RadFiltration(ar, "left")
    aids = [
        _arrow(ar, (1, 1, 1), (1, 1, 0)),
        _arrow(ar, (1, 1, 0), (1, 0, 0)),
        _arrow(ar, (0, 1, 1), (0, 1, 0)),
    ]
    results = {}

    def work(a):
        results[a] = left_degree(ar.arrow_mor[a], ar, 6, filt=filt)

    threads = [threading.Thread(target=work, args=(a,)) for a in aids]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert [results[a].n for a in aids] == [2, 1, 1]
