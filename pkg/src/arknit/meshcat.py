"""The mesh category of a translation quiver with a length function.

Morphism spaces are spans of paths modulo the mesh ideal: for every
vertex z carrying a translation, the sum of the two-arrow arm composites
tau z -> y -> z is a relation, and the ideal is generated by all of its
pre- and post-composites with paths.  A length function forces every
path between two fixed vertices to have the same length, which keeps all
path spaces finite and makes the radical filtration line up with path
length; the latter is re-checked honestly (by composing radical factors)
rather than assumed.
"""
from __future__ import annotations

import threading
from fractions import Fraction

from .errors import ComputationError
from .linalg import Echelon
from .quiver import Path, TranslationQuiver, length_function, validate


class _PairSpace:
    __slots__ = ("paths", "index", "relations", "free")

    def __init__(self, paths, relations):
        self.paths = paths
        self.index = {p.arrows: k for k, p in enumerate(paths)}
        self.relations = relations
        pivot_set = set(relations.pivots)
        self.free = [k for k in range(len(paths)) if k not in pivot_set]


class LawReport:
    def __init__(self, mismatches):
        self.mismatches = mismatches

    @property
    def ok(self):
        return not self.mismatches

    def for_json(self):
        return {"ok": self.ok, "mismatches": list(self.mismatches)}


class SectionalReport:
    def __init__(self, failures, checked):
        self.failures = failures
        self.checked = checked

    @property
    def ok(self):
        return not self.failures

    def for_json(self):
        return {
            "ok": self.ok,
            "checked": self.checked,
            "failures": list(self.failures),
        }


class MeshCategory:
    def __init__(self, tq: TranslationQuiver, check: bool = True):
        if not isinstance(tq, TranslationQuiver):
            raise ComputationError(
                "mesh categories need a translation quiver"
            )
        if check:
            report = validate(tq)
            if not report.ok:
                raise ComputationError(
                    "invalid translation quiver: %s" % report.violations[0]
                )
        self.tq = tq
        try:
            self.lengths = length_function(tq)
        except ComputationError as err:
            raise ComputationError(
                "unbounded path spaces: %s" % err
            ) from err
        self._paths: dict[tuple[int, int], list[Path]] = {}
        self._pairs: dict[tuple[int, int], _PairSpace] = {}
        self._rad: dict[tuple[int, int, int], Echelon] = {}
        self._lock = threading.RLock()

    # -- path and relation bookkeeping ----------------------------------

    def paths(self, x: int, y: int) -> list[Path]:
        with self._lock:
            key = (x, y)
            if key not in self._paths:
                if self.lengths.get(y, 0) < self.lengths.get(x, 0):
                    self._paths[key] = []
                else:
                    self._paths[key] = self.tq.paths_between(x, y)
            return self._paths[key]

    def pair(self, x: int, y: int) -> _PairSpace:
        with self._lock:
            key = (x, y)
            if key not in self._pairs:
                self._pairs[key] = self._build_pair(x, y)
            return self._pairs[key]

    def _build_pair(self, x: int, y: int) -> _PairSpace:
        paths = self.paths(x, y)
        index = {p.arrows: k for k, p in enumerate(paths)}
        relations = Echelon(len(paths))
        for z in sorted(self.tq.tau):
            tz = self.tq.tau[z]
            heads = self.paths(x, tz)
            tails = self.paths(z, y)
            if not heads or not tails:
                continue
            mesh = self.tq.mesh_at(z)
            for q in heads:
                for p in tails:
                    vec = [Fraction(0)] * len(paths)
                    for beta, sigma_beta in mesh.arms:
                        arrows = q.arrows + (sigma_beta, beta) + p.arrows
                        vec[index[arrows]] += 1
                    relations.add(vec)
        return _PairSpace(paths, relations)

    # -- morphism classes ------------------------------------------------

    def hom_dim(self, x: int, y: int) -> int:
        pair = self.pair(x, y)
        return len(pair.free)

    def normal_form(self, x: int, y: int, vec) -> list[Fraction]:
        return self.pair(x, y).relations.reduce(vec)

    def path_class(self, x: int, y: int, arrows) -> list[Fraction]:
        pair = self.pair(x, y)
        arrows = tuple(arrows)
        if arrows not in pair.index:
            raise ComputationError(
                "no path %r from %d to %d" % (arrows, x, y)
            )
        vec = [Fraction(0)] * len(pair.paths)
        vec[pair.index[arrows]] = Fraction(1)
        return pair.relations.reduce(vec)

    def basis_paths(self, x: int, y: int) -> list[Path]:
        pair = self.pair(x, y)
        return [pair.paths[k] for k in pair.free]

    def compose(self, x, y, z, f_vec, g_vec) -> list[Fraction]:
        """Class of (g after f) for f: x -> y, g: y -> z, in path
        coordinates of the (x, z) space (normal form)."""
        pxy = self.pair(x, y)
        pyz = self.pair(y, z)
        pxz = self.pair(x, z)
        out = [Fraction(0)] * len(pxz.paths)
        for i, ci in enumerate(f_vec):
            if not ci:
                continue
            for j, cj in enumerate(g_vec):
                if not cj:
                    continue
                arrows = pxy.paths[i].arrows + pyz.paths[j].arrows
                out[pxz.index[arrows]] += ci * cj
        return pxz.relations.reduce(out)

    # -- radical filtration ----------------------------------------------

    def radical_power(self, x: int, y: int, n: int) -> Echelon:
        with self._lock:
            return self._radical_locked(x, y, n)

    def _radical_locked(self, x: int, y: int, n: int) -> Echelon:
        key = (x, y, n)
        if key in self._rad:
            return self._rad[key]
        pair = self.pair(x, y)
        ech = Echelon(len(pair.paths))
        if n <= 0 or (n == 1 and x != y):
            for k in pair.free:
                vec = [Fraction(0)] * len(pair.paths)
                vec[k] = Fraction(1)
                ech.add(pair.relations.reduce(vec))
        elif n == 1:
            pass  # End(x) is spanned by the identity; its radical is 0
        else:
            if self._radical_locked(x, y, n - 1).rank:
                for u in self.tq.vertices:
                    first = self._radical_locked(x, u, 1)
                    if not first.rank:
                        continue
                    rest = self._radical_locked(u, y, n - 1)
                    if not rest.rank:
                        continue
                    for f_vec in first.basis():
                        for g_vec in rest.basis():
                            ech.add(self.compose(x, u, y, f_vec, g_vec))
        self._rad[key] = ech
        return ech

    def radical_dims(self, x: int, y: int, upto: int | None = None) -> list[int]:
        """[dim R^0, dim R^1, ...] down to the last nonzero power."""
        out = []
        n = 0
        while True:
            d = self.radical_power(x, y, n).rank
            if d == 0:
                break
            out.append(d)
            n += 1
            if upto is not None and n > upto:
                break
        return out

    # -- reports ----------------------------------------------------------

    def with_length_report(self) -> LawReport:
        """Check that the honestly computed radical filtration matches the
        prediction of the length function: between distinct vertices every
        power up to the length difference is the whole space and the next
        one vanishes."""
        mismatches = []
        for x in self.tq.vertices:
            for y in self.tq.vertices:
                h = self.hom_dim(x, y)
                d = self.lengths[y] - self.lengths[x]
                if x == y:
                    if h != 1 or self.radical_power(x, x, 1).rank != 0:
                        mismatches.append(
                            "endomorphisms at %d not reduced to scalars" % x
                        )
                    continue
                if h == 0:
                    continue
                if d <= 0:
                    mismatches.append(
                        "nonzero space %d -> %d against the length order"
                        % (x, y)
                    )
                    continue
                for n in range(d + 1):
                    if self.radical_power(x, y, n).rank != h:
                        mismatches.append(
                            "radical power %d of %d -> %d dropped early"
                            % (n, x, y)
                        )
                        break
                if self.radical_power(x, y, d + 1).rank != 0:
                    mismatches.append(
                        "radical power %d of %d -> %d does not vanish"
                        % (d + 1, x, y)
                    )
        return LawReport(mismatches)

    def sectional_report(self) -> SectionalReport:
        """Classes of sectional paths must stay linearly independent
        modulo the mesh ideal."""
        failures = []
        checked = 0
        for x in self.tq.vertices:
            for y in self.tq.vertices:
                pair = self.pair(x, y)
                sect = [
                    p for p in pair.paths if self.tq.is_sectional(p)
                ]
                if not sect:
                    continue
                ech = pair.relations.copy()
                for p in sect:
                    checked += 1
                    vec = [Fraction(0)] * len(pair.paths)
                    vec[pair.index[p.arrows]] = Fraction(1)
                    if not ech.add(vec):
                        failures.append(
                            "dependent sectional path classes %d -> %d"
                            % (x, y)
                        )
        return SectionalReport(failures, checked)

    def dims_json(self) -> dict:
        pairs = []
        for x in self.tq.vertices:
            for y in self.tq.vertices:
                dims = self.radical_dims(x, y)
                if dims:
                    pairs.append({"x": x, "y": y, "dims": dims})
        return {"pairs": pairs}
