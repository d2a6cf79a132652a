"""Truncated generic coverings of translation quivers.

The cover at a base vertex is built from walks: identify parallel arrows,
then take classes of walks under backtrack cancellation and exchange of
the two-edge arm routes through each mesh, with both closed under
context.  Classes are maintained as a congruence-closure table (nodes
with a neighbor map per (parallel class, direction) step, merged through
a union-find), saturated level by level out to the requested radius plus
some slack, and re-run with more slack until the ball of the requested
radius stops changing.

Arrows of the cover are then restored with the base multiplicity: one
cover arrow per base arrow out of the projected vertex.  Vertices whose
translation partner falls outside the ball are flagged and re-marked so
the truncated cover is again a valid translation quiver.
"""
from __future__ import annotations

from .errors import ComputationError
from .quiver import Path, TranslationQuiver, validate

_NODE_CAP = 200000


def _pclass_data(tq: TranslationQuiver):
    classes = sorted(tq.parallel_classes().items())
    pairs = [pair for pair, _ in classes]
    members = {k: aids for k, (_, aids) in enumerate(classes)}
    index = {}
    for k, (_, aids) in enumerate(classes):
        for a in aids:
            index[a] = k
    return pairs, members, index


class _WalkTable:
    """Congruence closure over walk classes."""

    def __init__(self, tq, base, pairs, pindex):
        self.tq = tq
        self.pairs = pairs
        self.pindex = pindex
        self.steps_at = {}
        for v in tq.vertices:
            steps = []
            for k, (s, t) in enumerate(pairs):
                if s == v:
                    steps.append((k, 1))
                if t == v:
                    steps.append((k, -1))
            steps.sort(key=lambda st: (st[0], 0 if st[1] == 1 else 1))
            self.steps_at[v] = steps
        self.tau_inv = {m: z for z, m in tq.tau.items()}
        self.arm_pairs = {}
        for z in tq.tau:
            mesh = tq.mesh_at(z)
            arms = sorted(
                {(pindex[sb], pindex[b]) for b, sb in mesh.arms}
            )
            self.arm_pairs[z] = arms
        self.parent = [0]
        self.bv = [base]
        self.dist = [0]
        self.nbr: list[dict] = [{}]

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def roots(self) -> list[int]:
        return [i for i in range(len(self.parent)) if self.find(i) == i]

    def step(self, u: int, st, create: bool = False):
        u = self.find(u)
        c = self.nbr[u].get(st)
        if c is not None:
            return self.find(c)
        if not create:
            return None
        k, direction = st
        s, t = self.pairs[k]
        if (direction == 1 and self.bv[u] != s) or (
            direction == -1 and self.bv[u] != t
        ):
            raise ComputationError("walk step leaves the wrong vertex")
        new = len(self.parent)
        if new > _NODE_CAP:
            raise ComputationError("cover construction exceeded node cap")
        self.parent.append(new)
        self.bv.append(t if direction == 1 else s)
        self.dist.append(self.dist[u] + 1)
        self.nbr.append({(k, -direction): u})
        self.nbr[u][st] = new
        return new

    def union(self, a: int, b: int) -> bool:
        stack = [(a, b)]
        merged = False
        while stack:
            x, y = stack.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            keep, other = (x, y) if x < y else (y, x)
            if self.bv[keep] != self.bv[other]:
                raise ComputationError(
                    "cover construction merged walks with distinct ends"
                )
            merged = True
            self.parent[other] = keep
            self.dist[keep] = min(self.dist[keep], self.dist[other])
            for st, child in self.nbr[other].items():
                mine = self.nbr[keep].get(st)
                if mine is None:
                    self.nbr[keep][st] = child
                else:
                    stack.append((mine, child))
            self.nbr[other] = {}
        return merged

    def apply_rules_at(self, u: int) -> bool:
        """Mesh arm exchange, forward and backward, rooted at u."""
        changed = False
        u = self.find(u)
        b = self.bv[u]
        z = self.tau_inv.get(b)
        if z is not None:
            targets = []
            for sp, bp in self.arm_pairs[z]:
                mid = self.step(u, (sp, 1), create=True)
                targets.append(self.step(mid, (bp, 1), create=True))
            for other in targets[1:]:
                if self.union(targets[0], other):
                    changed = True
        if b in self.tq.tau:
            sources = []
            for sp, bp in self.arm_pairs[b]:
                mid = self.step(u, (bp, -1), create=True)
                sources.append(self.step(mid, (sp, -1), create=True))
            for other in sources[1:]:
                if self.union(sources[0], other):
                    changed = True
        return changed

    def redistance(self) -> bool:
        root0 = self.find(0)
        new = {root0: 0}
        queue = [root0]
        at = 0
        while at < len(queue):
            u = queue[at]
            at += 1
            for c in self.nbr[u].values():
                c = self.find(c)
                if c not in new:
                    new[c] = new[u] + 1
                    queue.append(c)
        changed = False
        for r, d in new.items():
            if self.dist[r] != d:
                self.dist[r] = d
                changed = True
        return changed

    def saturate(self, depth: int) -> int:
        rounds = 0
        while True:
            rounds += 1
            changed = False
            before = len(self.parent)
            for u in self.roots():
                if self.dist[u] >= depth:
                    continue
                for st in self.steps_at[self.bv[u]]:
                    if st not in self.nbr[self.find(u)]:
                        self.step(u, st, create=True)
            if len(self.parent) != before:
                changed = True
            for u in self.roots():
                if self.dist[u] <= depth - 2:
                    if self.apply_rules_at(u):
                        changed = True
            if len(self.parent) != before:
                changed = True
            if self.redistance():
                changed = True
            if not changed:
                return rounds

    def ball_signature(self, radius: int):
        order = self.canonical_ball(radius)
        canon = {r: k for k, r in enumerate(order)}
        edges = []
        for r in order:
            for st, c in sorted(self.nbr[r].items()):
                if st[1] != 1:
                    continue
                c = self.find(c)
                if c in canon:
                    edges.append((canon[r], st[0], canon[c]))
        return (
            tuple(self.bv[r] for r in order),
            tuple(self.dist[r] for r in order),
            tuple(sorted(edges)),
        )

    def canonical_ball(self, radius: int) -> list[int]:
        """Roots within the radius, in BFS order with sorted steps."""
        start = self.find(0)
        order = [start]
        seen = {start}
        at = 0
        while at < len(order):
            u = order[at]
            at += 1
            for st in self.steps_at[self.bv[u]]:
                c = self.nbr[u].get(st)
                if c is None:
                    continue
                c = self.find(c)
                if c in seen or self.dist[c] > radius:
                    continue
                seen.add(c)
                order.append(c)
        return order


class Cover:
    def __init__(
        self,
        tq,
        base,
        radius,
        base_vertex,
        pv,
        pa,
        dist,
        interior,
        boundary,
        tau_truncated,
        tau_inv_truncated,
        notes,
    ):
        self.tq = tq
        self.base = base
        self.radius = radius
        self.base_vertex = base_vertex
        self.pv = pv
        self.pa = pa
        self.dist = dist
        self.interior = frozenset(interior)
        self.boundary = frozenset(boundary)
        self.tau_truncated = frozenset(tau_truncated)
        self.tau_inv_truncated = frozenset(tau_inv_truncated)
        self.notes = notes
        self._lift = {}
        for aid, (s, _) in tq.arrows.items():
            self._lift[(s, self.pa[aid])] = aid

    def lift_path(self, start: int, path: Path) -> Path:
        if start not in self.pv:
            raise ComputationError("unknown cover vertex %d" % start)
        if self.pv[start] != path.start:
            raise ComputationError(
                "lift must start over vertex %d, not %d"
                % (path.start, self.pv[start])
            )
        self.base.path_end(path)
        at = start
        arrows = []
        for a in path.arrows:
            ca = self._lift.get((at, a))
            if ca is None:
                raise ComputationError(
                    "radius exceeded while lifting path at arrow %d" % a
                )
            arrows.append(ca)
            at = self.tq.tgt(ca)
        return Path(start, tuple(arrows))


class CoverReport:
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


def build_cover(
    tq: TranslationQuiver,
    radius: int,
    base: int | None = None,
    slack_limit: int = 8,
) -> Cover:
    """Truncated generic cover of tq around `base` out to `radius`."""
    if not isinstance(tq, TranslationQuiver):
        raise ComputationError("covers need a translation quiver")
    report = validate(tq)
    if not report.ok:
        raise ComputationError(
            "invalid translation quiver: %s" % report.violations[0]
        )
    if radius < 0:
        raise ComputationError("radius must be non-negative")
    if base is None:
        base = min(tq.vertices)
    if base not in set(tq.vertices):
        raise ComputationError("unknown base vertex %d" % base)

    pairs, members, pindex = _pclass_data(tq)
    table = None
    signature = None
    rounds = 0
    used_slack = None
    for slack in range(2, slack_limit + 1, 2):
        cand = _WalkTable(tq, base, pairs, pindex)
        rounds = cand.saturate(radius + slack)
        sig = cand.ball_signature(radius)
        if signature is not None and sig == signature:
            table = cand
            used_slack = slack
            break
        signature = sig
        table = cand
        used_slack = slack
    else:
        raise ComputationError(
            "cover construction did not stabilize within slack %d"
            % slack_limit
        )

    order = table.canonical_ball(radius)
    canon = {r: k for k, r in enumerate(order)}
    pv = {canon[r]: table.bv[r] for r in order}
    dist = {canon[r]: table.dist[r] for r in order}

    arrows = {}
    pa = {}
    aid_next = 0
    for k, r in enumerate(order):
        b = table.bv[r]
        for a in sorted(tq.arrows):
            if tq.src(a) != b:
                continue
            target = table.step(r, (pindex[a], 1))
            if target is None or table.dist[target] > radius:
                continue
            arrows[aid_next] = (k, canon[target])
            pa[aid_next] = a
            aid_next += 1

    lift_of = {}
    for aid, (s, _) in arrows.items():
        lift_of[(s, pa[aid])] = aid

    tau = {}
    sigma = {}
    tau_truncated = set()
    tau_inv_truncated = set()
    tau_inv_base = {m: z for z, m in tq.tau.items()}
    for k, r in enumerate(order):
        b = table.bv[r]
        if b in tq.tau:
            # walk backward through one arm to the translate
            sp, bp = table.arm_pairs[b][0]
            mid = table.step(r, (bp, -1))
            back = table.step(mid, (sp, -1)) if mid is not None else None
            if back is None or table.dist[back] > radius:
                tau_truncated.add(k)
            else:
                tau[k] = canon[back]
        z = tau_inv_base.get(b)
        if z is not None and b not in tq.injectives:
            sp, bp = table.arm_pairs[z][0]
            mid = table.step(r, (sp, 1))
            fwd = table.step(mid, (bp, 1)) if mid is not None else None
            if fwd is None or table.dist[fwd] > radius:
                tau_inv_truncated.add(k)
    for aid, (s, t) in arrows.items():
        if t in tau:
            base_arrow = pa[aid]
            sb = tq.sigma[base_arrow]
            lifted = lift_of.get((tau[t], sb))
            if lifted is None:
                raise ComputationError(
                    "cover construction lost a mesh arm at vertex %d" % t
                )
            sigma[aid] = lifted

    projectives = {
        k for k in pv if pv[k] in tq.projectives
    } | tau_truncated
    injectives = {
        k for k in pv if pv[k] in tq.injectives
    } | tau_inv_truncated
    cover_tq = TranslationQuiver(
        sorted(pv),
        arrows,
        projectives=frozenset(projectives),
        injectives=frozenset(injectives),
        tau=tau,
        sigma=sigma,
    )
    interior = frozenset(
        k
        for k in pv
        if dist[k] <= radius - 1
        and k not in tau_truncated
        and k not in tau_inv_truncated
    )
    boundary = frozenset(pv) - interior
    notes = {"slack": used_slack, "rounds": rounds}
    return Cover(
        tq=cover_tq,
        base=tq,
        radius=radius,
        base_vertex=base,
        pv=pv,
        pa=pa,
        dist=dist,
        interior=interior,
        boundary=boundary,
        tau_truncated=tau_truncated,
        tau_inv_truncated=tau_inv_truncated,
        notes=notes,
    )


def verify_cover(cover: Cover) -> CoverReport:
    """Check the covering axioms on the interior of the truncated cover."""
    violations = []
    base = cover.base
    ctq = cover.tq
    vr = validate(ctq)
    if not vr.ok:
        violations.extend(
            "cover quiver invalid: %s" % v for v in vr.violations
        )
    for v in sorted(cover.interior):
        b = cover.pv[v]
        if (v in ctq.projectives) != (b in base.projectives):
            violations.append(
                "projective mark at cover vertex %d does not pull back" % v
            )
        if (v in ctq.injectives) != (b in base.injectives):
            violations.append(
                "injective mark at cover vertex %d does not pull back" % v
            )
        got_out = sorted(cover.pa[a] for a in ctq.out_arrows(v))
        want_out = sorted(base.out_arrows(b))
        if got_out != want_out:
            violations.append(
                "out-arrows at cover vertex %d do not match the base" % v
            )
        got_in = sorted(cover.pa[a] for a in ctq.in_arrows(v))
        want_in = sorted(base.in_arrows(b))
        if got_in != want_in:
            violations.append(
                "in-arrows at cover vertex %d do not match the base" % v
            )
        out_targets = {}
        for a in ctq.out_arrows(v):
            out_targets.setdefault(cover.pv[ctq.tgt(a)], set()).add(
                ctq.tgt(a)
            )
        for bvert, targets in out_targets.items():
            if len(targets) > 1:
                violations.append(
                    "two arrows from cover vertex %d land over vertex %d"
                    % (v, bvert)
                )
        in_sources = {}
        for a in ctq.in_arrows(v):
            in_sources.setdefault(cover.pv[ctq.src(a)], set()).add(
                ctq.src(a)
            )
        for bvert, sources in in_sources.items():
            if len(sources) > 1:
                violations.append(
                    "two arrows into cover vertex %d start over vertex %d"
                    % (v, bvert)
                )
        if v in ctq.tau:
            if cover.pv[ctq.tau[v]] != base.tau.get(b):
                violations.append(
                    "translation does not commute with the projection at "
                    "cover vertex %d" % v
                )
            for a in ctq.in_arrows(v):
                sa = ctq.sigma.get(a)
                if sa is None or cover.pa[sa] != base.sigma.get(
                    cover.pa[a]
                ):
                    violations.append(
                        "sigma does not commute with the projection at "
                        "cover arrow %d" % a
                    )
    notes = {
        "interior": len(cover.interior),
        "boundary": len(cover.boundary),
        "vertices": len(cover.pv),
    }
    return CoverReport(sorted(set(violations)), notes)


def cover_to_json(cover: Cover) -> dict:
    return {
        "radius": cover.radius,
        "base_vertex": cover.base_vertex,
        "vertices": [
            {
                "id": v,
                "base": cover.pv[v],
                "dist": cover.dist[v],
                "projective": v in cover.tq.projectives,
                "injective": v in cover.tq.injectives,
            }
            for v in cover.tq.vertices
        ],
        "arrows": [
            {
                "id": a,
                "src": cover.tq.src(a),
                "tgt": cover.tq.tgt(a),
                "base": cover.pa[a],
            }
            for a in sorted(cover.tq.arrows)
        ],
        "tau": {str(k): v for k, v in sorted(cover.tq.tau.items())},
        "sigma": {str(a): b for a, b in sorted(cover.tq.sigma.items())},
        "tau_truncated": sorted(cover.tau_truncated),
        "tau_inv_truncated": sorted(cover.tau_inv_truncated),
        "interior": sorted(cover.interior),
    }
