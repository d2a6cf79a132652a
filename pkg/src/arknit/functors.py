"""Arrow-by-arrow module assignments on truncated covers.

Given a knitted component and a cover of its translation quiver, assign
to every cover vertex the module of its projected vertex and to every
cover arrow an irreducible morphism, so that each complete cover mesh
maps to an almost split sequence.  Prescribed morphisms on some arrows
(pins) are honored when possible: the extension walks vertices by
increasing length level, realizes each mesh end as a cokernel of the
already-assigned arm tuple, and matches pins up to the one remaining
scalar.  A probe compares radical-filtration dimensions between the
module category and the cover's path category, the numerical signature
of the assignment being a covering.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import ComputationError
from .meshcat import MeshCategory
from .quiver import Path, length_function
from .reps import (
    Mor,
    check_sectional_family,
    cokernel,
    direct_sum,
    find_iso,
    hom_basis,
    identity_mor,
    is_isomorphic,
    kernel,
)


def _require_same_base(cover, ar):
    base = cover.base
    tq = ar.tq
    if (
        base.vertices != tq.vertices
        or base.arrows != tq.arrows
        or base.projectives != tq.projectives
        or base.injectives != tq.injectives
        or base.tau != tq.tau
        or base.sigma != tq.sigma
    ):
        raise ComputationError(
            "cover base does not match the knitted component"
        )


def _ratio(pin: Mor, component: Mor):
    """The scalar c with pin == c * component, or None."""
    flat = component.flatten()
    pflat = pin.flatten()
    idx = next((k for k, v in enumerate(flat) if v), None)
    if idx is None:
        return None
    c = pflat[idx] / flat[idx]
    if all(p == c * v for p, v in zip(pflat, flat)):
        return c
    return None


class WellBehavedAssignment:
    """Modules on cover vertices, irreducible morphisms on cover arrows."""

    def __init__(self, cover, ar, arrow_mor, pinned, notes):
        self.cover = cover
        self.ar = ar
        self.arrow_mor = arrow_mor
        self.pinned = dict(pinned)
        self.notes = notes

    def module(self, v: int):
        return self.ar.module(self.cover.pv[v])

    def morphism(self, aid: int) -> Mor:
        if aid not in self.arrow_mor:
            raise ComputationError("arrow %d carries no assignment" % aid)
        return self.arrow_mor[aid]


def well_behaved_assignment(
    cover, ar, pinned=None
) -> WellBehavedAssignment:
    _require_same_base(cover, ar)
    pinned = dict(pinned or {})
    ctq = cover.tq
    calc = ar.radical_calculator()

    def fmod(v):
        return ar.module(cover.pv[v])

    def findex(v):
        return calc.index_of(fmod(v))

    for aid, pin in pinned.items():
        if aid not in ctq.arrows:
            raise ComputationError("pinned arrow %d is not in the cover" % aid)
        s, t = ctq.arrows[aid]
        if pin.src.dim_vector() != fmod(s).dim_vector() or (
            pin.tgt.dim_vector() != fmod(t).dim_vector()
        ):
            raise ComputationError(
                "pinned morphism on arrow %d has wrong endpoints" % aid
            )
        i, j = findex(s), findex(t)
        hs = calc.hom_space(i, j)
        coords = hs.coords(pin)
        if not calc.rad_level(i, j, 1).contains(coords) or (
            calc.rad_level(i, j, 2).contains(coords)
        ):
            raise ComputationError(
                "pinned assignment not extendable at vertex %d: morphism "
                "on arrow %d is not irreducible" % (t, aid)
            )
    by_pair = {}
    for aid in sorted(pinned):
        by_pair.setdefault(ctq.arrows[aid], []).append(aid)
    for (s, t), aids in sorted(by_pair.items()):
        if len(aids) < 2:
            continue
        i, j = findex(s), findex(t)
        hs = calc.hom_space(i, j)
        ech = calc.rad_level(i, j, 2).copy()
        for aid in aids:
            if not ech.add(hs.coords(pinned[aid])):
                raise ComputationError(
                    "pinned assignment not extendable at vertex %d: "
                    "pinned morphisms %d -> %d are dependent modulo "
                    "rad^2" % (t, s, t)
                )

    lengths = length_function(ctq)
    order = sorted(ctq.vertices, key=lambda v: (lengths[v], v))
    assigned: dict[int, Mor] = {}
    skipped: list[int] = []

    def steinitz(v, ins, candidates_of):
        """Pins first, then completion keeping residues independent."""
        groups: dict[int, list[int]] = {}
        for aid in ins:
            groups.setdefault(ctq.src(aid), []).append(aid)
        for y in sorted(groups):
            group = sorted(groups[y])
            i, j = findex(y), findex(v)
            hs = calc.hom_space(i, j)
            ech = calc.rad_level(i, j, 2).copy()
            rest = []
            for aid in group:
                if aid in pinned:
                    if not ech.add(hs.coords(pinned[aid])):
                        raise ComputationError(
                            "pinned assignment not extendable at vertex "
                            "%d" % v
                        )
                    assigned[aid] = pinned[aid]
                else:
                    rest.append(aid)
            cands = candidates_of(group)
            for aid in rest:
                for cand in cands:
                    if ech.add(hs.coords(cand)):
                        assigned[aid] = cand
                        break
                else:
                    raise ComputationError(
                        "pinned assignment not extendable at vertex %d"
                        % v
                    )

    for v in order:
        ins = sorted(ctq.in_arrows(v))
        if not ins:
            continue
        if v in ctq.tau:
            t = ctq.tau[v]
            arms = [(aid, ctq.src(aid), ctq.sigma[aid]) for aid in ins]
            if any(sa not in assigned for _, _, sa in arms):
                if any(aid in pinned for aid in ins):
                    raise ComputationError(
                        "pinned assignment not extendable at vertex %d"
                        % v
                    )
                skipped.extend(ins)
                continue
            mods = [fmod(y) for _, y, _ in arms]
            mid, incls, projs = direct_sum(mods, quiver=ar.quiver)
            g = incls[0] * assigned[arms[0][2]]
            for k in range(1, len(arms)):
                g = g + incls[k] * assigned[arms[k][2]]
            if not g.is_vertexwise_injective():
                raise ComputationError(
                    "pinned assignment not extendable at vertex %d" % v
                )
            coker, qmor = cokernel(g)
            psi = find_iso(coker, fmod(v))
            if psi is None:
                raise ComputationError(
                    "cover vertex %d does not carry the expected cokernel"
                    % v
                )
            h_arm = [(psi * qmor) * incls[k] for k in range(len(arms))]
            lam = None
            for k, (aid, _, _) in enumerate(arms):
                if aid in pinned:
                    c = _ratio(pinned[aid], h_arm[k])
                    if c is None or c == 0 or (
                        lam is not None and c != lam
                    ):
                        raise ComputationError(
                            "pinned assignment not extendable at vertex "
                            "%d" % v
                        )
                    lam = c
            if lam is None:
                lam = Fraction(1)
            for k, (aid, _, _) in enumerate(arms):
                assigned[aid] = (
                    pinned[aid] if aid in pinned else h_arm[k].scale(lam)
                )
        elif cover.pv[v] in cover.base.projectives:
            steinitz(
                v,
                ins,
                lambda group: [
                    ar.arrow_mor[b]
                    for b in sorted(cover.pa[aid] for aid in group)
                ],
            )
        else:
            # translate truncated away: fall back to the component's own
            # almost split data, which needs the full arm set
            bv = cover.pv[v]
            want = sorted(cover.base.in_arrows(bv))
            got = sorted(cover.pa[aid] for aid in ins)
            if got != want:
                if any(aid in pinned for aid in ins):
                    raise ComputationError(
                        "pinned assignment not extendable at vertex %d"
                        % v
                    )
                skipped.extend(ins)
                continue
            steinitz(
                v,
                ins,
                lambda group: [
                    ar.arrow_mor[b]
                    for b in sorted(cover.pa[aid] for aid in group)
                ],
            )
            if any(aid in pinned for aid in ins):
                mods = [fmod(ctq.src(aid)) for aid in ins]
                mid, incls, projs = direct_sum(mods, quiver=ar.quiver)
                h = assigned[ins[0]] * projs[0]
                for k in range(1, len(ins)):
                    h = h + assigned[ins[k]] * projs[k]
                full_rank = all(
                    h.blocks[u].rank() == fmod(v).dims[u]
                    for u in ar.quiver.vertices
                )
                ker, _ = kernel(h)
                expect = ar.module(cover.base.tau[bv])
                if not full_rank or not is_isomorphic(ker, expect):
                    raise ComputationError(
                        "pinned assignment not extendable at vertex %d"
                        % v
                    )
    notes = {"skipped": sorted(set(skipped))}
    return WellBehavedAssignment(cover, ar, assigned, pinned, notes)


class AssignmentReport:
    def __init__(self, violations, notes):
        self.violations = violations
        self.notes = notes

    @property
    def ok(self) -> bool:
        return not self.violations

    def for_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": list(self.violations),
            "notes": dict(self.notes),
        }


_SECTION_COST = 400


def verify_assignment(assignment: WellBehavedAssignment) -> AssignmentReport:
    """Check meshes map to almost split sequences and arrow tuples stay
    independent modulo rad^2, over the assigned part of the cover."""
    cover = assignment.cover
    ar = assignment.ar
    ctq = cover.tq
    mors = assignment.arrow_mor
    calc = ar.radical_calculator()
    violations = []
    light = []
    unchecked = []

    def fmod(v):
        return ar.module(cover.pv[v])

    for z in sorted(ctq.tau):
        ins = sorted(ctq.in_arrows(z))
        needed = ins + [ctq.sigma[a] for a in ins]
        if any(a not in mors for a in needed):
            if z in cover.interior:
                violations.append(
                    "mesh at vertex %d is not fully assigned" % z
                )
            else:
                unchecked.append(z)
            continue
        t = ctq.tau[z]
        mods = [fmod(ctq.src(a)) for a in ins]
        mid, incls, projs = direct_sum(mods, quiver=ar.quiver)
        g = incls[0] * mors[ctq.sigma[ins[0]]]
        h = mors[ins[0]] * projs[0]
        for k in range(1, len(ins)):
            g = g + incls[k] * mors[ctq.sigma[ins[k]]]
            h = h + mors[ins[k]] * projs[k]
        if not (h * g).is_zero():
            violations.append(
                "mesh at vertex %d does not compose to zero" % z
            )
            continue
        if not g.is_vertexwise_injective():
            violations.append(
                "mesh at vertex %d has a non-injective left map" % z
            )
            continue
        if any(
            h.blocks[u].rank() != fmod(z).dims[u]
            for u in ar.quiver.vertices
        ):
            violations.append(
                "mesh at vertex %d has a non-surjective right map" % z
            )
            continue
        if mid.total_dim != fmod(t).total_dim + fmod(z).total_dim:
            violations.append("mesh at vertex %d is not exact" % z)
            continue
        if fmod(z).total_dim * mid.total_dim <= _SECTION_COST:
            sections = hom_basis(fmod(z), mid)
            cols = [(h * s).flatten() for s in sections]
            target = identity_mor(fmod(z)).flatten()
            if cols:
                from .linalg import QMat

                sys = QMat.from_rows(
                    [[col[i] for col in cols] for i in range(len(target))],
                    ncols=len(cols),
                )
                if sys.solve(target) is not None:
                    violations.append("mesh at vertex %d splits" % z)
        else:
            light.append(z)

    for v in sorted(ctq.vertices):
        for arrows, keyed in (
            (ctq.in_arrows(v), ctq.src),
            (ctq.out_arrows(v), ctq.tgt),
        ):
            groups: dict[int, list[int]] = {}
            for a in arrows:
                if a in mors:
                    groups.setdefault(keyed(a), []).append(a)
            for w, group in sorted(groups.items()):
                if len(group) < 2:
                    continue
                src_v, tgt_v = ctq.arrows[sorted(group)[0]]
                i = calc.index_of(fmod(src_v))
                j = calc.index_of(fmod(tgt_v))
                hs = calc.hom_space(i, j)
                ech = calc.rad_level(i, j, 2).copy()
                for a in sorted(group):
                    if not ech.add(hs.coords(mors[a])):
                        violations.append(
                            "arrows %d -> %d dependent modulo rad^2 at "
                            "vertex %d" % (src_v, tgt_v, v)
                        )
                        break
    notes = {
        "meshes": len(ctq.tau),
        "light": sorted(light),
        "unchecked": sorted(unchecked),
    }
    return AssignmentReport(sorted(set(violations)), notes)


def lift_sectional_family(
    cover, ar, paths, morphisms=None, start=None
) -> list[Path]:
    """Lift a family of sectional paths with a common source into the
    cover; the lifted arrows come out pairwise distinct."""
    _require_same_base(cover, ar)
    report = check_sectional_family(ar, paths, morphisms)
    if not report.ok:
        raise ComputationError(
            "sectional family invalid: %s" % report.violations[0]
        )
    if not paths:
        return []
    x = ar.tq.src(paths[0][0])
    if start is None:
        fiber = sorted(v for v in cover.pv if cover.pv[v] == x)
        if not fiber:
            raise ComputationError("no cover vertex over vertex %d" % x)
        start = fiber[0]
    elif cover.pv.get(start) != x:
        raise ComputationError(
            "start vertex %r does not lie over vertex %d" % (start, x)
        )
    lifts = [cover.lift_path(start, Path(x, tuple(p))) for p in paths]
    seen = [a for p in lifts for a in p.arrows]
    if len(seen) != len(set(seen)):
        raise ComputationError("lifted arrows are not pairwise distinct")
    return lifts


class ProbeReport:
    def __init__(self, pairs, skipped, notes):
        self.pairs = pairs
        self.skipped = skipped
        self.notes = notes

    @property
    def ok(self) -> bool:
        return all(
            r["equal"]
            for r in self.pairs
            if not r["skipped"] and not r["boundary_fiber"]
        )

    def for_json(self) -> dict:
        return {
            "ok": self.ok,
            "pairs": [dict(r) for r in self.pairs],
            "skipped": self.skipped,
            "notes": dict(self.notes),
        }


def _quotients(dims_fn, upto):
    levels = []
    n = 0
    while True:
        a = dims_fn(n)
        b = dims_fn(n + 1)
        levels.append(a - b)
        n += 1
        if upto is not None:
            if n > upto:
                break
        elif b == 0:
            break
    return levels


def generalized_standard_probe(
    ar, cover, assignment: WellBehavedAssignment, pairs=None, upto=None
) -> ProbeReport:
    """Compare Hom dimensions with summed cover path-space dimensions,
    level by level of the radical filtration."""
    _require_same_base(cover, ar)
    mesh = MeshCategory(cover.tq)
    calc = ar.radical_calculator()
    interior = cover.interior
    fibers: dict[int, list[int]] = {}
    for v in sorted(cover.pv):
        fibers.setdefault(cover.pv[v], []).append(v)
    if pairs is None:
        pairs = [
            (x, y) for x in sorted(interior) for y in sorted(interior)
        ]
    records = []
    skipped = 0
    for x, y in pairs:
        if x not in interior or y not in interior:
            records.append(
                {
                    "x": x,
                    "y": y,
                    "hom": None,
                    "cover_hom": None,
                    "levels_module": [],
                    "levels_cover": [],
                    "equal": False,
                    "skipped": True,
                    "boundary_fiber": False,
                }
            )
            skipped += 1
            continue
        fib = fibers[cover.pv[y]]
        boundary_fiber = any(z not in interior for z in fib)
        i = calc.index_of(ar.module(cover.pv[x]))
        j = calc.index_of(ar.module(cover.pv[y]))
        hom = calc.rad_dim(i, j, 0)
        cover_hom = sum(mesh.hom_dim(x, z) for z in fib)
        lm = _quotients(lambda n: calc.rad_dim(i, j, n), upto)
        lc = _quotients(
            lambda n: sum(
                mesh.radical_power(x, z, n).rank for z in fib
            ),
            upto,
        )
        width = max(len(lm), len(lc))
        lm = lm + [0] * (width - len(lm))
        lc = lc + [0] * (width - len(lc))
        records.append(
            {
                "x": x,
                "y": y,
                "hom": hom,
                "cover_hom": cover_hom,
                "levels_module": lm,
                "levels_cover": lc,
                "equal": hom == cover_hom and lm == lc,
                "skipped": False,
                "boundary_fiber": boundary_fiber,
            }
        )
    notes = {
        "interior": len(interior),
        "truncated": bool(cover.boundary),
        "upto": upto,
    }
    return ProbeReport(records, skipped, notes)
