from __future__ import annotations

from fractions import Fraction

import pytest

from arknit.cover import build_cover
from arknit.errors import ComputationError
from arknit.functors import (
    generalized_standard_probe,
    lift_sectional_family,
    verify_assignment,
    well_behaved_assignment,
)
from arknit.quiver import parse_quiver
from arknit.reps import hom_basis, knit_ar_component, zero_mor

A2 = parse_quiver("v 1\nv 2\na 1 1 2\n")
A3 = parse_quiver("v 1\nv 2\nv 3\na 1 1 2\na 2 2 3\n")
KRONECKER = parse_quiver("v 1\nv 2\na 1 1 2\na 2 1 2\n")


def _knit(q):
    return knit_ar_component(q, direction="projectives")


def _vid(ar, dims):
    hits = [
        v for v in ar.vids() if ar.module(v).dim_vector() == tuple(dims)
    ]
    assert len(hits) == 1, dims
    return hits[0]


def _arrow(ar, src_dims, tgt_dims):
    s = _vid(ar, src_dims)
    t = _vid(ar, tgt_dims)
    hits = [a for a, st in ar.tq.arrows.items() if st == (s, t)]
    assert len(hits) == 1, (src_dims, tgt_dims)
    return hits[0]


def _over(cover, base_vid):
    hits = [v for v in sorted(cover.pv) if cover.pv[v] == base_vid]
    assert hits, base_vid
    return hits[0]


def _cover_arrow_over(cover, base_aid):
    hits = [a for a in sorted(cover.pa) if cover.pa[a] == base_aid]
    assert len(hits) == 1, base_aid
    return hits[0]


def test_pullback_assignment_a2():
    ar = _knit(A2)
    cover = build_cover(ar.tq, radius=6)
    f = well_behaved_assignment(cover, ar)
    assert set(f.arrow_mor) == set(cover.tq.arrows)
    calc = ar.radical_calculator()
    for aid in cover.tq.arrows:
        mor = f.morphism(aid)
        s, t = cover.tq.arrows[aid]
        assert mor.src.dim_vector() == f.module(s).dim_vector()
        assert mor.tgt.dim_vector() == f.module(t).dim_vector()
    report = verify_assignment(f)
    assert report.ok, report.violations


def test_a2_pinned_mesh_is_almost_split():
    # pin an arbitrary scalar multiple of the irreducible map P1 -> S1
    ar = _knit(A2)
    cover = build_cover(ar.tq, radius=6)
    p1 = _vid(ar, (1, 1))
    s1 = _vid(ar, (1, 0))
    s2 = _vid(ar, (0, 1))
    pin_mor = hom_basis(ar.module(p1), ar.module(s1))[0].scale(
        Fraction(5, 7)
    )
    aid = _cover_arrow_over(cover, _arrow(ar, (1, 1), (1, 0)))
    f = well_behaved_assignment(cover, ar, pinned={aid: pin_mor})
    assert f.morphism(aid) == pin_mor
    # the mesh over 0 -> S2 -> P1 -> S1 -> 0 composes to zero and is exact
    arm_in = f.morphism(aid)
    sigma_aid = cover.tq.sigma[aid]
    arm_out = f.morphism(sigma_aid)
    assert (arm_in * arm_out).is_zero()
    assert arm_out.is_vertexwise_injective()
    assert ar.module(s2).total_dim + ar.module(s1).total_dim == (
        ar.module(p1).total_dim
    )
    report = verify_assignment(f)
    assert report.ok, report.violations


def test_pin_zero_morphism_rejected():
    ar = _knit(A2)
    cover = build_cover(ar.tq, radius=6)
    p1 = _vid(ar, (1, 1))
    s1 = _vid(ar, (1, 0))
    aid = _cover_arrow_over(cover, _arrow(ar, (1, 1), (1, 0)))
    target = cover.tq.tgt(aid)
    pin = zero_mor(ar.module(p1), ar.module(s1))
    with pytest.raises(ComputationError) as err:
        well_behaved_assignment(cover, ar, pinned={aid: pin})
    assert "not extendable" in str(err.value)
    assert "vertex %d" % target in str(err.value)


def test_pin_dependent_parallel_pair_rejected():
    ar = knit_ar_component(KRONECKER, direction="injectives", bound=3)
    cover = build_cover(ar.tq, radius=10)
    groups = {}
    for a, st in cover.tq.arrows.items():
        groups.setdefault(st, []).append(a)
    pair = sorted(groups[min(k for k, v in groups.items() if len(v) == 2)])
    same = ar.arrow_mor[cover.pa[pair[0]]]
    with pytest.raises(ComputationError) as err:
        well_behaved_assignment(
            cover, ar, pinned={pair[0]: same, pair[1]: same}
        )
    assert "not extendable" in str(err.value)


def test_mesh_pins_scalar_consistency():
    ar = _knit(A3)
    cover = build_cover(ar.tq, radius=8)
    base = well_behaved_assignment(cover, ar)
    a_p1 = _cover_arrow_over(cover, _arrow(ar, (1, 1, 1), (1, 1, 0)))
    a_s2 = _cover_arrow_over(cover, _arrow(ar, (0, 1, 0), (1, 1, 0)))
    doubled = {
        a_p1: base.morphism(a_p1).scale(Fraction(2)),
        a_s2: base.morphism(a_s2).scale(Fraction(2)),
    }
    f = well_behaved_assignment(cover, ar, pinned=doubled)
    assert f.morphism(a_p1) == doubled[a_p1]
    assert f.morphism(a_s2) == doubled[a_s2]
    assert verify_assignment(f).ok
    mixed = {
        a_p1: base.morphism(a_p1).scale(Fraction(2)),
        a_s2: base.morphism(a_s2).scale(Fraction(3)),
    }
    with pytest.raises(ComputationError) as err:
        well_behaved_assignment(cover, ar, pinned=mixed)
    assert "not extendable" in str(err.value)


def test_pin_propagates_through_later_mesh():
    ar = _knit(A3)
    cover = build_cover(ar.tq, radius=8)
    a_mid = _cover_arrow_over(cover, _arrow(ar, (0, 1, 1), (0, 1, 0)))
    pin = ar.arrow_mor[cover.pa[a_mid]].scale(Fraction(2))
    f = well_behaved_assignment(cover, ar, pinned={a_mid: pin})
    assert f.morphism(a_mid) == pin
    report = verify_assignment(f)
    assert report.ok, report.violations
    # mesh relation at the vertex over I2 still composes to zero
    a1 = _cover_arrow_over(cover, _arrow(ar, (1, 1, 1), (1, 1, 0)))
    a2 = _cover_arrow_over(cover, _arrow(ar, (0, 1, 0), (1, 1, 0)))
    b1 = _cover_arrow_over(cover, _arrow(ar, (0, 1, 1), (1, 1, 1)))
    b2 = a_mid
    total = f.morphism(a1) * f.morphism(b1) + f.morphism(a2) * f.morphism(
        b2
    )
    assert total.is_zero()


def test_lift_sectional_family_a3():
    ar = _knit(A3)
    cover = build_cover(ar.tq, radius=8)
    chain = [
        _arrow(ar, (0, 0, 1), (0, 1, 1)),
        _arrow(ar, (0, 1, 1), (1, 1, 1)),
    ]
    lifts = lift_sectional_family(cover, ar, [chain])
    assert len(lifts) == 1
    assert [cover.pa[a] for a in lifts[0].arrows] == chain
    assert cover.tq.is_sectional(lifts[0])
    star = [
        [_arrow(ar, (0, 1, 1), (1, 1, 1))],
        [_arrow(ar, (0, 1, 1), (0, 1, 0))],
    ]
    lifted = lift_sectional_family(cover, ar, star)
    assert len(lifted) == 2
    assert lifted[0].start == lifted[1].start
    arrows = [p.arrows[0] for p in lifted]
    assert len(set(arrows)) == 2
    assert sorted(cover.pa[a] for a in arrows) == sorted(
        p[0] for p in star
    )


def test_lift_sectional_family_rejects_hook():
    ar = _knit(A3)
    cover = build_cover(ar.tq, radius=8)
    hook = [
        [
            _arrow(ar, (0, 1, 1), (1, 1, 1)),
            _arrow(ar, (1, 1, 1), (1, 1, 0)),
        ]
    ]
    with pytest.raises(ComputationError) as err:
        lift_sectional_family(cover, ar, hook)
    assert "hook" in str(err.value)


def test_probe_a3_all_pairs_exact():
    ar = _knit(A3)
    cover = build_cover(ar.tq, radius=8)
    f = well_behaved_assignment(cover, ar)
    report = generalized_standard_probe(ar, cover, f, upto=6)
    assert report.ok, report.for_json()
    assert not report.skipped
    by_pair = {(r["x"], r["y"]): r for r in report.pairs}
    assert len(by_pair) == 36
    for rec in report.pairs:
        assert rec["hom"] == rec["cover_hom"]
        assert rec["levels_module"] == rec["levels_cover"]
    x = _over(cover, _vid(ar, (0, 1, 1)))
    y = _over(cover, _vid(ar, (1, 1, 0)))
    rec = by_pair[(x, y)]
    assert rec["hom"] == 1
    assert rec["levels_module"][2] == 1
    assert sum(rec["levels_module"]) == 1
    zx = _over(cover, _vid(ar, (0, 0, 1)))
    zy = _over(cover, _vid(ar, (1, 0, 0)))
    assert by_pair[(zx, zy)]["hom"] == 0
    assert by_pair[(zx, zy)]["cover_hom"] == 0


def test_probe_json_shape():
    ar = _knit(A2)
    cover = build_cover(ar.tq, radius=6)
    f = well_behaved_assignment(cover, ar)
    report = generalized_standard_probe(ar, cover, f)
    doc = report.for_json()
    assert set(doc) == {"ok", "pairs", "skipped", "notes"}
    assert doc["ok"] is True
    again = generalized_standard_probe(ar, cover, f).for_json()
    assert doc == again


def test_assignment_on_truncated_cover():
    ar = _knit(A3)
    cover = build_cover(ar.tq, radius=2)
    f = well_behaved_assignment(cover, ar)
    covered = set(f.arrow_mor) | set(f.notes["skipped"])
    assert covered == set(cover.tq.arrows)
    for a in cover.tq.arrows:
        s, t = cover.tq.arrows[a]
        if s in cover.interior and t in cover.interior:
            assert a in f.arrow_mor
    report = verify_assignment(f)
    assert report.ok, report.violations


def test_base_mismatch_rejected():
    ar = _knit(A3)
    other = _knit(A2)
    cover = build_cover(other.tq, radius=6)
    with pytest.raises(ComputationError):
        well_behaved_assignment(cover, ar)


def test_verify_assignment_detects_corruption():
    ar = _knit(A2)
    cover = build_cover(ar.tq, radius=6)
    f = well_behaved_assignment(cover, ar)
    victim = max(f.arrow_mor)
    f.arrow_mor[victim] = f.arrow_mor[victim].scale(Fraction(0))
    report = verify_assignment(f)
    assert not report.ok
