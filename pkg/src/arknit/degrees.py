"""Degrees of irreducible morphisms over a knitted AR component.

The left degree of an irreducible morphism f: X -> Y is the least n for
which some g in rad^n(Z, X) \\ rad^{n+1} pushes into rad^{n+2}(Z, Y)
under f; the right degree is dual.  Degree searches here run over the
modules of a knitted component and use an exact radical filtration that
peels minimal almost split maps off one side:

    rad^{n+1}(Z, X) = rad^n(V, X) o u   (u: Z -> V minimal left almost split)
    rad^{n+1}(Y, Z) = v o rad^n(Y, U)   (v: U -> Z minimal right almost split)

Peeling the source needs every forward mesh, so it is available on
complete components and on components knitted from the injectives;
peeling the target dually needs complete backward meshes.  Searches
never assert that a degree is infinite: a failed search reports the
bound it exhausted.
"""

from __future__ import annotations

import itertools
import random
import threading
from collections import deque
from fractions import Fraction

from .errors import ComputationError
from .linalg import Echelon, QMat
from .quiver import Quiver, TranslationQuiver
from .reps import (
    ARQuiver,
    Mor,
    Rep,
    check_sectional_family,
    cokernel,
    find_iso,
    hom_basis,
    i_quotient,
    injective,
    kernel,
    knit_ar_component,
    p_inclusion,
    simple,
)

_PATH_CAP = 4000


# -- radical filtration ------------------------------------------------------


class RadFiltration:
    """Radical powers rad^n(src, tgt) between component modules, stored as
    echelon subspaces of the hom-space coordinates.

    side "left" peels the source through its minimal left almost split
    map; side "right" peels the target through its minimal right almost
    split map.  Levels are memoized and safe to share across threads.
    """

    def __init__(self, ar: ARQuiver, side: str):
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        if ar.truncated and side == "left" and ar.direction != "injectives":
            raise ComputationError(
                "left radical filtration needs complete forward meshes; "
                "knit from injectives or use a complete component"
            )
        if ar.truncated and side == "right" and ar.direction != "projectives":
            raise ComputationError(
                "right radical filtration needs complete backward meshes; "
                "knit from projectives or use a complete component"
            )
        self.ar = ar
        self.side = side
        self.calc = ar.radical_calculator()
        self._pos = {v: k for k, v in enumerate(ar.tq.vertices)}
        self._levels: dict[tuple[int, int, int], Echelon] = {}
        self._comp: dict[tuple[int, int], QMat] = {}
        self._lock = threading.RLock()

    def hom(self, s: int, t: int):
        return self.calc.hom_space(self._pos[s], self._pos[t])

    def coords(self, s: int, t: int, f: Mor):
        return self.hom(s, t).coords(f)

    def mor(self, s: int, t: int, coords) -> Mor:
        return self.hom(s, t).from_coords(coords)

    def level(self, s: int, t: int, n: int) -> Echelon:
        with self._lock:
            return self._level_locked(s, t, n)

    def dim(self, s: int, t: int, n: int) -> int:
        return self.level(s, t, n).rank

    def _full(self, s: int, t: int) -> Echelon:
        d = self.hom(s, t).dim
        ech = Echelon(d)
        for k in range(d):
            ech.add([Fraction(int(i == k)) for i in range(d)])
        return ech

    def _level_locked(self, s: int, t: int, n: int) -> Echelon:
        if n <= 0:
            key = (s, t, 0)
            if key not in self._levels:
                self._levels[key] = self._full(s, t)
            return self._levels[key]
        key = (s, t, n)
        hit = self._levels.get(key)
        if hit is not None:
            return hit
        tq = self.ar.tq
        ech = Echelon(self.hom(s, t).dim)
        if self.side == "left":
            for a in sorted(tq.out_arrows(s)):
                prev = self._level_locked(tq.tgt(a), t, n - 1)
                mat = self._pre_matrix(a, t)
                for row in prev.rows:
                    ech.add(mat.apply(row))
        else:
            for a in sorted(tq.in_arrows(t)):
                prev = self._level_locked(s, tq.src(a), n - 1)
                mat = self._post_matrix(s, a)
                for row in prev.rows:
                    ech.add(mat.apply(row))
        self._levels[key] = ech
        return ech

    def _pre_matrix(self, aid: int, t: int) -> QMat:
        """Pre-composition with the arrow: Hom(tgt a, t) -> Hom(src a, t)."""
        key = (aid, t)
        hit = self._comp.get(key)
        if hit is not None:
            return hit
        tq = self.ar.tq
        u = self.ar.arrow_mor[aid]
        hs_from = self.hom(tq.tgt(aid), t)
        hs_to = self.hom(tq.src(aid), t)
        cols = [hs_to.coords(b * u) for b in hs_from.basis]
        mat = QMat.from_rows(
            [[col[i] for col in cols] for i in range(hs_to.dim)],
            ncols=hs_from.dim,
        )
        self._comp[key] = mat
        return mat

    def _post_matrix(self, s: int, aid: int) -> QMat:
        """Post-composition with the arrow: Hom(s, src a) -> Hom(s, tgt a)."""
        key = (-aid - 1, s)
        hit = self._comp.get(key)
        if hit is not None:
            return hit
        tq = self.ar.tq
        u = self.ar.arrow_mor[aid]
        hs_from = self.hom(s, tq.src(aid))
        hs_to = self.hom(s, tq.tgt(aid))
        cols = [hs_to.coords(u * b) for b in hs_from.basis]
        mat = QMat.from_rows(
            [[col[i] for col in cols] for i in range(hs_to.dim)],
            ncols=hs_from.dim,
        )
        self._comp[key] = mat
        return mat


def _filtration_for(ar: ARQuiver) -> RadFiltration:
    if ar.truncated and ar.direction == "projectives":
        return RadFiltration(ar, "right")
    return RadFiltration(ar, "left")


# -- degree reports ----------------------------------------------------------


class DegreeReport:
    """Outcome of a degree search: Finite(n) with a witness, or
    NotFoundWithin(bound)."""

    def __init__(
        self,
        side,
        outcome,
        n,
        bound,
        witness_vertex=None,
        witness=None,
        zero_witness=None,
        witness_path=None,
        truncation_limited=False,
        notes=None,
    ):
        self.side = side
        self.outcome = outcome
        self.n = n
        self.bound = bound
        self.witness_vertex = witness_vertex
        self.witness = witness
        self.zero_witness = zero_witness
        self.witness_path = witness_path
        self.truncation_limited = truncation_limited
        self.notes = notes or {}

    @property
    def finite(self) -> bool:
        return self.outcome == "finite"

    def for_json(self) -> dict:
        module = self.notes.get("witness_module")
        return {
            "side": self.side,
            "outcome": self.outcome,
            "n": self.n,
            "bound": self.bound,
            "witness_vertex": self.witness_vertex,
            "witness_module": list(module) if module is not None else None,
            "zero_composite_witness": self.zero_witness is not None,
            "witness_path": list(self.witness_path)
            if self.witness_path is not None
            else None,
            "truncation_limited": self.truncation_limited,
            "notes": {
                k: v for k, v in self.notes.items() if k != "witness_module"
            },
        }


def _resolve_vertex(ar: ARQuiver, rep: Rep, what: str) -> int:
    vid = ar.find_vertex(rep)
    if vid is None:
        raise ComputationError(
            "%s module does not lie in the component" % what
        )
    return vid


def _component_iso(ar: ARQuiver, vid: int, rep: Rep) -> Mor | None:
    """Iso from the component module onto rep, or None when the two are
    the same presentation."""
    mod = ar.module(vid)
    if mod.dims == rep.dims and mod.mats == rep.mats:
        return None
    iso = find_iso(mod, rep)
    if iso is None:
        raise ComputationError(
            "module is isomorphic to a component vertex but could not be "
            "aligned with it"
        )
    return iso


def _normalize_components(f, side):
    comps = list(f) if isinstance(f, (list, tuple)) else [f]
    if not comps:
        raise ComputationError("no morphism components given")
    anchor = comps[0].src if side == "left" else comps[0].tgt
    for c in comps[1:]:
        end = c.src if side == "left" else c.tgt
        if end.dims != anchor.dims or end.mats != anchor.mats:
            raise ComputationError(
                "components do not share a %s"
                % ("source" if side == "left" else "target")
            )
    return comps


def _align(f, ar: ARQuiver, side: str):
    """Resolve f (a morphism or component list) into the component's own
    hom spaces.  Returns (aligned components, anchor vid, other vids,
    anchor iso for transporting witnesses back)."""
    comps = _normalize_components(f, side)
    if side == "left":
        anchor = _resolve_vertex(ar, comps[0].src, "source")
        others = [_resolve_vertex(ar, c.tgt, "target") for c in comps]
        phi = _component_iso(ar, anchor, comps[0].src)
        out = []
        for c, ov in zip(comps, others):
            g = c if phi is None else c * phi
            psi = _component_iso(ar, ov, g.tgt)
            if psi is not None:
                inv = psi.inverse()
                if inv is None:
                    raise ComputationError("could not invert alignment iso")
                g = inv * g
            out.append(g)
        return out, anchor, others, phi
    anchor = _resolve_vertex(ar, comps[0].tgt, "target")
    others = [_resolve_vertex(ar, c.src, "source") for c in comps]
    phi = _component_iso(ar, anchor, comps[0].tgt)
    out = []
    for c, ov in zip(comps, others):
        g = c
        if phi is not None:
            inv = phi.inverse()
            if inv is None:
                raise ComputationError("could not invert alignment iso")
            g = inv * c
        psi = _component_iso(ar, ov, g.src)
        if psi is not None:
            g = g * psi
        out.append(g)
    return out, anchor, others, phi


def _check_irreducible(filt: RadFiltration, comps, anchor, others, side):
    coords = []
    for c, ov in zip(comps, others):
        pair = (anchor, ov) if side == "left" else (ov, anchor)
        vec = filt.coords(pair[0], pair[1], c)
        if not filt.level(pair[0], pair[1], 1).contains(vec):
            raise ComputationError(
                "morphism is not irreducible: a component is not radical"
            )
        coords.append((pair, vec))
    groups: dict[tuple[int, int], Echelon] = {}
    for pair, vec in coords:
        ech = groups.get(pair)
        if ech is None:
            ech = filt.level(pair[0], pair[1], 2).copy()
            groups[pair] = ech
        if not ech.add(vec):
            raise ComputationError(
                "morphism is not irreducible: components are dependent "
                "modulo rad^2"
            )
    return [vec for _, vec in coords]


def _paths_between(tq: TranslationQuiver, s: int, t: int, length: int):
    found = []

    def walk(v, acc):
        if len(found) >= _PATH_CAP:
            return
        if len(acc) == length:
            if v == t:
                found.append(list(acc))
            return
        for a in sorted(tq.out_arrows(v)):
            acc.append(a)
            walk(tq.tgt(a), acc)
            acc.pop()

    walk(s, [])
    return found


def _combine(basis_rows, coef):
    width = len(basis_rows[0])
    out = [Fraction(0)] * width
    for c, row in zip(coef, basis_rows):
        if c:
            for i, x in enumerate(row):
                if x:
                    out[i] += c * x
    return out


def _degree_search(f, ar: ARQuiver, bound: int, side: str, filt=None):
    if bound < 0:
        raise ComputationError("degree bound must be non-negative")
    if filt is None:
        filt = RadFiltration(ar, side)
    comps, anchor, others, phi = _align(f, ar, side)
    _check_irreducible(filt, comps, anchor, others, side)
    tq = ar.tq
    if ar.truncated:
        zs = sorted(v for v in ar.vids() if v not in ar.frontier)
    else:
        zs = sorted(ar.vids())
    notes = {"interior": len(zs)}

    def cond_matrix(z, ci):
        # linear map induced by the morphism component on Hom(-/-, z)
        c = comps[ci]
        ov = others[ci]
        if side == "left":
            hs_from = filt.hom(z, anchor)
            hs_to = filt.hom(z, ov)
            cols = [hs_to.coords(c * b) for b in hs_from.basis]
        else:
            hs_from = filt.hom(anchor, z)
            hs_to = filt.hom(ov, z)
            cols = [hs_to.coords(b * c) for b in hs_from.basis]
        return QMat.from_rows(
            [[col[i] for col in cols] for i in range(hs_to.dim)],
            ncols=hs_from.dim,
        )

    cond_cache: dict[tuple[int, int], QMat] = {}

    def conds(z):
        mats = []
        for ci in range(len(comps)):
            key = (z, ci)
            if key not in cond_cache:
                cond_cache[key] = cond_matrix(z, ci)
            mats.append(cond_cache[key])
        return mats

    def pair(z):
        return (z, anchor) if side == "left" else (anchor, z)

    def deep_pair(z, ci):
        return (z, others[ci]) if side == "left" else (others[ci], z)

    for n in range(1, bound + 1):
        for z in zs:
            p = pair(z)
            dn = filt.dim(p[0], p[1], n)
            if dn == 0 or dn == filt.dim(p[0], p[1], n + 1):
                continue
            basis_rows = filt.level(p[0], p[1], n).basis()
            mats = conds(z)
            deep = [
                filt.level(*deep_pair(z, ci), n + 2)
                for ci in range(len(comps))
            ]
            resid_cols = []
            raw_cols = []
            for row in basis_rows:
                resid = []
                raw = []
                for mat, ech in zip(mats, deep):
                    w = mat.apply(row)
                    raw.extend(w)
                    resid.extend(ech.reduce(w))
                resid_cols.append(resid)
                raw_cols.append(raw)
            height = len(resid_cols[0])
            m_resid = QMat.from_rows(
                [[col[i] for col in resid_cols] for i in range(height)],
                ncols=dn,
            )
            rad_next = filt.level(p[0], p[1], n + 1)
            witness_vec = None
            for coef in m_resid.nullspace():
                vec = _combine(basis_rows, coef)
                if not rad_next.contains(vec):
                    witness_vec = vec
                    break
            if witness_vec is None:
                continue
            witness = filt.mor(p[0], p[1], witness_vec)
            m_raw = QMat.from_rows(
                [[col[i] for col in raw_cols] for i in range(len(raw_cols[0]))],
                ncols=dn,
            )
            zero_witness = None
            for coef in m_raw.nullspace():
                vec = _combine(basis_rows, coef)
                if not rad_next.contains(vec):
                    zero_witness = filt.mor(p[0], p[1], vec)
                    break
            witness_path = None
            route = (z, anchor) if side == "left" else (anchor, z)
            for path in _paths_between(tq, route[0], route[1], n):
                comp_mor = ar.arrow_mor[path[0]]
                for a in path[1:]:
                    comp_mor = ar.arrow_mor[a] * comp_mor
                vec = filt.coords(p[0], p[1], comp_mor)
                if rad_next.contains(vec):
                    continue
                if all(
                    ech.contains(mat.apply(vec))
                    for mat, ech in zip(mats, deep)
                ):
                    witness_path = path
                    break
            notes["witness_module"] = ar.module(z).dim_vector()
            notes["path_witness"] = witness_path is not None
            if phi is not None:
                if side == "left":
                    witness = phi * witness
                    if zero_witness is not None:
                        zero_witness = phi * zero_witness
                else:
                    witness = witness * phi.inverse()
                    if zero_witness is not None:
                        zero_witness = zero_witness * phi.inverse()
                notes["aligned"] = True
            return DegreeReport(
                side,
                "finite",
                n,
                bound,
                witness_vertex=z,
                witness=witness,
                zero_witness=zero_witness,
                witness_path=witness_path,
                truncation_limited=ar.truncated,
                notes=notes,
            )
    return DegreeReport(
        side,
        "not_found",
        None,
        bound,
        truncation_limited=ar.truncated,
        notes=notes,
    )


def left_degree(f, ar: ARQuiver, bound: int, filt=None) -> DegreeReport:
    """Left degree of an irreducible morphism out of a component module.

    f may be a single morphism or a list of components sharing a source
    (for maps into a decomposable target)."""
    return _degree_search(f, ar, bound, "left", filt)


def right_degree(f, ar: ARQuiver, bound: int, filt=None) -> DegreeReport:
    """Right degree, dual to :func:`left_degree`; components share a
    target."""
    return _degree_search(f, ar, bound, "right", filt)


# -- kernel characterization -------------------------------------------------


class KernelReport:
    def __init__(
        self,
        degree,
        mono,
        epi,
        kernel_vertex,
        incl_level_ok,
        factors_through_kernel,
        factor_iso,
        status,
        notes=None,
    ):
        self.degree = degree
        self.mono = mono
        self.epi = epi
        self.kernel_vertex = kernel_vertex
        self.incl_level_ok = incl_level_ok
        self.factors_through_kernel = factors_through_kernel
        self.factor_iso = factor_iso
        self.status = status
        self.notes = notes or {}

    def for_json(self) -> dict:
        return {
            "degree": self.degree.for_json(),
            "mono": self.mono,
            "epi": self.epi,
            "kernel_vertex": self.kernel_vertex,
            "incl_level_ok": self.incl_level_ok,
            "factors_through_kernel": self.factors_through_kernel,
            "factor_iso": self.factor_iso,
            "status": self.status,
            "notes": dict(self.notes),
        }


def kernel_characterization(
    f: Mor, ar: ARQuiver, bound: int, filt=None
) -> KernelReport:
    """Compare the left degree of f with the radical level of ker(f).

    For an irreducible f with indecomposable source, a finite left
    degree n is equivalent to f being non-mono with its kernel inclusion
    in rad^n \\ rad^{n+1}; any exact zero-composite witness must then
    factor through the kernel by an isomorphism."""
    if filt is None:
        filt = RadFiltration(ar, "left")
    comps, anchor, _, _ = _align(f, ar, "left")
    g = comps[0]
    deg = left_degree(g, ar, bound, filt=filt)
    ker, incl = kernel(g)
    mono = ker.total_dim == 0
    epi = cokernel(g)[0].total_dim == 0
    notes: dict = {}
    if not deg.finite:
        if mono:
            return KernelReport(
                deg, True, epi, None, None, None, None, "consistent", notes
            )
        notes["reason"] = (
            "no finite degree found within the bound although the "
            "morphism is not mono"
        )
        return KernelReport(
            deg, False, epi, None, None, None, None, "partial", notes
        )
    if mono:
        notes["reason"] = "finite left degree on a mono morphism"
        return KernelReport(
            deg, True, epi, None, False, None, None, "partial", notes
        )
    kv = ar.find_vertex(ker)
    if kv is None:
        notes["reason"] = "kernel lies outside the component"
        return KernelReport(
            deg, False, epi, None, None, None, None, "partial", notes
        )
    psi = find_iso(ar.module(kv), ker)
    incl_c = incl * psi if psi is not None else incl
    vec = filt.coords(kv, anchor, incl_c)
    incl_ok = filt.level(kv, anchor, deg.n).contains(vec) and not filt.level(
        kv, anchor, deg.n + 1
    ).contains(vec)
    factors = None
    factor_iso = None
    if deg.zero_witness is not None:
        h = deg.zero_witness
        hb = hom_basis(h.src, ker)
        cols = [(incl * b).flatten() for b in hb]
        width = len(h.flatten())
        mat = QMat.from_rows(
            [[col[i] for col in cols] for i in range(width)],
            ncols=len(hb),
        )
        sol = mat.solve(h.flatten())
        factors = sol is not None
        if factors:
            fac = None
            for c, b in zip(sol, hb):
                term = b.scale(c)
                fac = term if fac is None else fac + term
            factor_iso = fac is not None and fac.inverse() is not None
    status = "verified" if incl_ok else "partial"
    return KernelReport(
        deg, False, epi, kv, incl_ok, factors, factor_iso, status, notes
    )


# -- degree shift across a mesh ----------------------------------------------


class ShiftReport:
    def __init__(self, arrow, f_report, g_report, shift_ok, complement, notes):
        self.arrow = arrow
        self.f_report = f_report
        self.g_report = g_report
        self.shift_ok = shift_ok
        self.complement = complement
        self.notes = notes

    def for_json(self) -> dict:
        return {
            "arrow": self.arrow,
            "f": self.f_report.for_json(),
            "g": self.g_report.for_json(),
            "shift_ok": self.shift_ok,
            "complement": list(self.complement),
            "notes": dict(self.notes),
        }


def degree_shift(ar: ARQuiver, arrow: int, bound: int, filt=None) -> ShiftReport:
    """Check the mesh degree-shift law at the mesh ending in the target
    of the given arrow: with f the arrow and g the map from the
    translate onto the complementary summands, a finite left degree n
    for f goes with a finite left degree n - 1 for g."""
    tq = ar.tq
    if arrow not in tq.arrows:
        raise ComputationError("unknown arrow %d" % arrow)
    y = tq.tgt(arrow)
    mesh = tq.mesh_at(y)
    if mesh is None:
        raise ComputationError("arrow %d does not end at a mesh" % arrow)
    others = [(b, sb) for b, sb in mesh.arms if b != arrow]
    if not others:
        raise ComputationError(
            "degree shift hypothesis X' != 0 violated at vertex %d" % y
        )
    if filt is None:
        filt = RadFiltration(ar, "left")
    f_rep = left_degree(ar.arrow_mor[arrow], ar, bound, filt=filt)
    g_comps = [ar.arrow_mor[sb] for _, sb in others]
    g_rep = left_degree(g_comps, ar, bound, filt=filt)
    notes: dict = {}
    if f_rep.finite and g_rep.finite:
        ok = g_rep.n == f_rep.n - 1
    elif f_rep.finite:
        ok = False
        notes["violation"] = "f finite but g not found within the bound"
    elif g_rep.finite:
        ok = g_rep.n + 1 > bound
        if not ok:
            notes["violation"] = "g finite but f not found within the bound"
    else:
        ok = True
    complement = [tq.src(b) for b, _ in others]
    return ShiftReport(arrow, f_rep, g_rep, ok, complement, notes)


# -- degree-two classification -----------------------------------------------


class DegreeTwoReport:
    def __init__(self, records, bound):
        self.records = records
        self.bound = bound

    @property
    def ok(self) -> bool:
        return all(r["agree"] for r in self.records)

    def for_json(self) -> dict:
        return {
            "ok": self.ok,
            "bound": self.bound,
            "records": [dict(r) for r in self.records],
        }


def _predict_left_two(tq: TranslationQuiver, aid: int) -> bool:
    y = tq.tgt(aid)
    mesh = tq.mesh_at(y)
    if mesh is None or len(mesh.arms) != 2:
        return False
    others = [b for b, _ in mesh.arms if b != aid]
    if len(others) != 1:
        return False
    x2 = tq.src(others[0])
    mesh2 = tq.mesh_at(x2)
    if mesh2 is None or len(mesh2.arms) != 1:
        return False
    return tq.src(mesh2.arms[0][0]) == mesh.start


def _predict_right_two(tq: TranslationQuiver, aid: int, tau_inv) -> bool:
    x = tq.src(aid)
    z = tau_inv.get(x)
    if z is None:
        return False
    mesh = tq.mesh_at(z)
    if mesh is None or len(mesh.arms) != 2:
        return False
    others = [b for b, sb in mesh.arms if sb != aid]
    if len(others) != 1:
        return False
    y2 = tq.src(others[0])
    z2 = tau_inv.get(y2)
    if z2 is None:
        return False
    mesh2 = tq.mesh_at(z2)
    if mesh2 is None or len(mesh2.arms) != 1:
        return False
    return tq.src(mesh2.arms[0][0]) == z


def classify_degree_two(ar: ARQuiver, bound: int) -> DegreeTwoReport:
    """Predict which arrows have left or right degree exactly two from
    the mesh shapes alone, and cross-check against direct searches."""
    if ar.truncated:
        raise ComputationError(
            "degree-two classification requires a complete component"
        )
    tq = ar.tq
    tau_inv = {x: z for z, x in tq.tau.items()}
    filt_l = RadFiltration(ar, "left")
    filt_r = RadFiltration(ar, "right")
    records = []
    for aid in sorted(tq.arrows):
        f = ar.arrow_mor[aid]
        lrep = left_degree(f, ar, bound, filt=filt_l)
        rrep = right_degree(f, ar, bound, filt=filt_r)
        pl = _predict_left_two(tq, aid)
        pr = _predict_right_two(tq, aid, tau_inv)
        al = lrep.finite and lrep.n == 2
        arr = rrep.finite and rrep.n == 2
        records.append(
            {
                "arrow": aid,
                "src": tq.src(aid),
                "tgt": tq.tgt(aid),
                "predicted_left": pl,
                "actual_left": al,
                "predicted_right": pr,
                "actual_right": arr,
                "agree": pl == al and pr == arr,
            }
        )
    return DegreeTwoReport(records, bound)


# -- composite analysis ------------------------------------------------------


class CompositeReport:
    def __init__(
        self, n, composite_zero, in_rad_next, level, holds, decomposition, notes
    ):
        self.n = n
        self.composite_zero = composite_zero
        self.in_rad_next = in_rad_next
        self.level = level
        self.holds = holds
        self.decomposition = decomposition
        self.notes = notes

    def for_json(self) -> dict:
        dec = None
        if self.decomposition is not None:
            dec = dict(self.decomposition)
            dec["lambdas"] = [str(x) for x in dec["lambdas"]]
        return {
            "n": self.n,
            "composite_zero": self.composite_zero,
            "in_rad_next": self.in_rad_next,
            "level": self.level,
            "holds": self.holds,
            "decomposition": dec,
            "notes": dict(self.notes),
        }


def composite_analysis(ar: ARQuiver, morphisms) -> CompositeReport:
    """Analyse a composable chain of irreducible morphisms.

    Decides whether the composite of the n morphisms lies in
    rad^{n+1} \\ {0}; when it does and every step runs along an arrow
    without parallels, produce arrow morphisms f_i with zero composite
    together with deformed steps (equal to f_i or lying in rad^2) whose
    composite stays non-zero."""
    mors = list(morphisms)
    if not mors:
        raise ComputationError("empty chain of morphisms")
    for i in range(len(mors) - 1):
        nxt, cur = mors[i + 1].src, mors[i].tgt
        if nxt.dims != cur.dims or nxt.mats != cur.mats:
            raise ComputationError(
                "morphisms are not composable at step %d" % (i + 1)
            )
    filt = _filtration_for(ar)
    chain = [_resolve_vertex(ar, mors[0].src, "source")]
    aligned = []
    phi = _component_iso(ar, chain[0], mors[0].src)
    for i, m in enumerate(mors):
        g = m if phi is None else m * phi
        tv = _resolve_vertex(ar, m.tgt, "target")
        phi = _component_iso(ar, tv, m.tgt)
        if phi is not None:
            inv = phi.inverse()
            if inv is None:
                raise ComputationError("could not invert alignment iso")
            g = inv * g
        aligned.append(g)
        chain.append(tv)
    n = len(aligned)
    _check_irreducible(
        filt,
        [aligned[i] for i in range(n)][:1],
        chain[0],
        [chain[1]],
        "left",
    )
    for i in range(1, n):
        _check_irreducible(filt, [aligned[i]], chain[i], [chain[i + 1]], "left")
    composite = aligned[0]
    for g in aligned[1:]:
        composite = g * composite
    s, t = chain[0], chain[-1]
    vec = filt.coords(s, t, composite)
    zero = composite.is_zero()
    in_next = filt.level(s, t, n + 1).contains(vec)
    level = None
    if not zero:
        m = n
        while True:
            if filt.dim(s, t, m + 1) == 0 or not filt.level(
                s, t, m + 1
            ).contains(vec):
                level = m
                break
            m += 1
    holds = in_next and not zero
    notes: dict = {}
    decomposition = None
    if holds:
        decomposition = _decompose_composite(ar, filt, aligned, chain, notes)
    return CompositeReport(n, zero, in_next, level, holds, decomposition, notes)


def _decompose_composite(ar, filt, aligned, chain, notes):
    tq = ar.tq
    n = len(aligned)
    arrows = []
    for i in range(n):
        cands = [
            a
            for a in sorted(tq.out_arrows(chain[i]))
            if tq.tgt(a) == chain[i + 1]
        ]
        if len(cands) != 1:
            notes["decomposition"] = (
                "skipped: parallel arrows between steps %d and %d"
                % (i, i + 1)
            )
            return None
        arrows.append(cands[0])
    lambdas = []
    deforms = []
    for i, aid in enumerate(arrows):
        s, t = chain[i], chain[i + 1]
        ech = filt.level(s, t, 2)
        rh = ech.reduce(filt.coords(s, t, aligned[i]))
        rf = ech.reduce(filt.coords(s, t, ar.arrow_mor[aid]))
        idx = next((k for k, x in enumerate(rf) if x), None)
        if idx is None:
            notes["decomposition"] = "skipped: arrow morphism is not reduced"
            return None
        lam = rh[idx] / rf[idx]
        lambdas.append(lam)
        deforms.append(aligned[i] - ar.arrow_mor[aid].scale(lam))
    f_prod = ar.arrow_mor[arrows[0]]
    for aid in arrows[1:]:
        f_prod = ar.arrow_mor[aid] * f_prod
    f_zero = f_prod.is_zero()
    eps_indices = None
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            prod = None
            for i in range(n):
                step = deforms[i] if i in combo else ar.arrow_mor[arrows[i]]
                prod = step if prod is None else step * prod
            if not prod.is_zero():
                eps_indices = list(combo)
                break
        if eps_indices is not None:
            break
    return {
        "arrows": arrows,
        "lambdas": lambdas,
        "epsilon_indices": eps_indices,
        "f_product_zero": f_zero,
        "epsilon_product_nonzero": eps_indices is not None,
        "ok": f_zero and eps_indices is not None,
    }


# -- sectional families ------------------------------------------------------


class SumReport:
    def __init__(self, n, end_vertex, in_rad_n, in_rad_next, notes):
        self.n = n
        self.end_vertex = end_vertex
        self.in_rad_n = in_rad_n
        self.in_rad_next = in_rad_next
        self.notes = notes

    @property
    def ok(self) -> bool:
        return self.in_rad_n and not self.in_rad_next

    def for_json(self) -> dict:
        return {
            "ok": self.ok,
            "n": self.n,
            "end_vertex": self.end_vertex,
            "in_rad_n": self.in_rad_n,
            "in_rad_next": self.in_rad_next,
            "notes": dict(self.notes),
        }


def sectional_family_sum(
    ar: ARQuiver, paths, morphisms=None, filt=None
) -> SumReport:
    """Sum the path composites of a sectional family with a common start
    and end; the sum must lie in rad^n but not rad^{n+1} for n the
    minimal path length."""
    fam = check_sectional_family(ar, paths, morphisms)
    if not fam.ok:
        raise ComputationError(
            "sectional family invalid: %s" % fam.violations[0]
        )
    tq = ar.tq
    ends = {tq.tgt(p[-1]) for p in paths}
    if len(ends) != 1:
        raise ComputationError("paths do not share a common end vertex")
    end = ends.pop()
    start = tq.src(paths[0][0])
    morphisms = morphisms or {}
    total = None
    for pi, arrows in enumerate(paths):
        comp = None
        for level, a in enumerate(arrows, start=1):
            step = morphisms.get((pi, level), ar.arrow_mor[a])
            comp = step if comp is None else step * comp
        total = comp if total is None else total + comp
    if filt is None:
        filt = _filtration_for(ar)
    n = fam.min_length
    vec = filt.coords(start, end, total)
    in_n = filt.level(start, end, n).contains(vec)
    in_next = filt.level(start, end, n + 1).contains(vec)
    return SumReport(n, end, in_n, in_next, {"paths": len(paths)})


def sectional_paths(tq: TranslationQuiver):
    """All sectional paths of positive length, as (start, arrows) pairs."""
    out = []

    def walk(start, u, acc):
        for a in sorted(tq.out_arrows(u)):
            if acc and tq.is_hook(acc[-1], a):
                continue
            acc.append(a)
            out.append((start, list(acc)))
            walk(start, tq.tgt(a), acc)
            acc.pop()

    for v in sorted(tq.vertices):
        walk(v, v, [])
    return out


# -- perturbations -----------------------------------------------------------


def rad_square_perturbations(f: Mor, ar: ARQuiver, count: int, seed: int):
    """Deterministic sample of rad^2 morphisms parallel to f."""
    comps, anchor, others, phi = _align(f, ar, "left")
    if len(comps) != 1:
        raise ComputationError("perturbations need a single morphism")
    ov = others[0]
    filt = _filtration_for(ar)
    if filt.side == "right":
        pair = (anchor, ov)
    else:
        pair = (anchor, ov)
    basis = [
        filt.mor(pair[0], pair[1], row)
        for row in filt.level(pair[0], pair[1], 2).rows
    ]
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        eps = None
        for b in basis:
            term = b.scale(Fraction(rng.randint(-5, 5)))
            eps = term if eps is None else eps + term
        if eps is None:
            eps = comps[0] - comps[0]
        if phi is not None:
            inv = phi.inverse()
            eps = eps * inv
            psi = _component_iso(ar, ov, f.tgt)
            if psi is not None:
                eps = psi * eps
        out.append(eps)
    return out


# -- finite type check -------------------------------------------------------


class FiniteTypeReport:
    def __init__(
        self,
        verdict,
        bound,
        projective_degrees,
        injective_degrees,
        reports,
        skipped,
        truncated,
        path_bound_checks,
        diameter,
        notes,
    ):
        self.verdict = verdict
        self.bound = bound
        self.projective_degrees = projective_degrees
        self.injective_degrees = injective_degrees
        self.reports = reports
        self.skipped = skipped
        self.truncated = truncated
        self.path_bound_checks = path_bound_checks
        self.diameter = diameter
        self.notes = notes

    @property
    def ok(self) -> bool:
        return self.verdict == "finite"

    def for_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "bound": self.bound,
            "projective_degrees": {
                str(k): v for k, v in self.projective_degrees.items()
            },
            "injective_degrees": {
                str(k): v for k, v in self.injective_degrees.items()
            },
            "skipped": {k: list(v) for k, v in self.skipped.items()},
            "truncated": dict(self.truncated),
            "path_bound_checks": [
                {k: v for k, v in rec.items() if k != "path"}
                for rec in self.path_bound_checks
            ],
            "diameter": self.diameter,
            "notes": dict(self.notes),
        }


def _shortest_path(tq: TranslationQuiver, s: int, t: int):
    if s == t:
        return []
    seen = {s: None}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for a in sorted(tq.out_arrows(u)):
            w = tq.tgt(a)
            if w in seen:
                continue
            seen[w] = (u, a)
            if w == t:
                path = []
                while w != s:
                    u, a = seen[w]
                    path.append(a)
                    w = u
                path.reverse()
                return path
            queue.append(w)
    return None


def _diameter(tq: TranslationQuiver) -> int:
    best = 0
    for s in tq.vertices:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in tq.out_arrows(u):
                w = tq.tgt(a)
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        best = max(best, max(dist.values()))
    return best


def finite_type_check(q: Quiver, bound: int = 25) -> FiniteTypeReport:
    """Run the degree criterion for finite representation type.

    Knits from the projectives and from the injectives up to the bound,
    then searches the right degree of each radical inclusion rad P -> P
    and the left degree of each socle quotient I -> I/soc I.  The
    verdict is "finite" exactly when both knits closed up and every
    degree search succeeded; otherwise it stays "inconclusive" - an
    infinite degree is never asserted.  On a finite verdict the path
    bound for simples is checked: each simple reaches its injective
    envelope along a path no longer than the envelope's degree."""
    notes: dict = {}
    skipped = {"projectives": [], "injectives": []}
    if bound <= 0:
        notes["reason"] = "bound 0: nothing explored"
        return FiniteTypeReport(
            "inconclusive",
            bound,
            {},
            {},
            {},
            skipped,
            {"projectives": True, "injectives": True},
            [],
            0,
            notes,
        )
    arp = knit_ar_component(q, direction="projectives", bound=bound)
    ari = knit_ar_component(q, direction="injectives", bound=bound)
    filt_r = RadFiltration(arp, "right")
    filt_l = RadFiltration(ari, "left")
    reports = {"projective": {}, "injective": {}}
    proj_deg = {}
    inj_deg = {}
    all_finite = True
    for i in sorted(q.vertices):
        outs = sorted(q.out_arrows(i))
        if not outs:
            skipped["projectives"].append(i)
            continue
        comps = [p_inclusion(q, a) for a in outs]
        rep = right_degree(comps, arp, bound, filt=filt_r)
        reports["projective"][i] = rep
        if rep.finite:
            proj_deg[i] = rep.n
        else:
            all_finite = False
    for j in sorted(q.vertices):
        ins = sorted(q.in_arrows(j))
        if not ins:
            skipped["injectives"].append(j)
            continue
        comps = [i_quotient(q, a) for a in ins]
        rep = left_degree(comps, ari, bound, filt=filt_l)
        reports["injective"][j] = rep
        if rep.finite:
            inj_deg[j] = rep.n
        else:
            all_finite = False
    truncated = {"projectives": arp.truncated, "injectives": ari.truncated}
    complete = not (arp.truncated or ari.truncated)
    verdict = "finite" if complete and all_finite else "inconclusive"
    path_checks = []
    if verdict == "finite":
        for j, n in sorted(inj_deg.items()):
            sv = ari.find_vertex(simple(q, j))
            iv = ari.injective_vertex.get(j)
            if iv is None:
                iv = ari.find_vertex(injective(q, j))
            if sv is None or iv is None:
                path_checks.append(
                    {
                        "simple": j,
                        "injective": j,
                        "length": None,
                        "degree": n,
                        "ok": False,
                        "path": None,
                    }
                )
                continue
            path = _shortest_path(ari.tq, sv, iv)
            path_checks.append(
                {
                    "simple": j,
                    "injective": j,
                    "length": None if path is None else len(path),
                    "degree": n,
                    "ok": path is not None and len(path) <= n,
                    "path": path,
                }
            )
    diameter = _diameter(arp.tq)
    return FiniteTypeReport(
        verdict,
        bound,
        proj_deg,
        inj_deg,
        reports,
        skipped,
        truncated,
        path_checks,
        diameter,
        notes,
    )
