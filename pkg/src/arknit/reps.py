"""Quiver representations over Q and Auslander-Reiten components.

Conventions used throughout:

* A representation assigns to each vertex a column space Q^d and to each
  arrow a: s -> t a matrix of shape (d_t, d_s) acting on column vectors.
* A morphism f: M -> N is a family of blocks f_v with N_a f_s = f_t M_a
  for every arrow a: s -> t; composition (g * f)_v = g_v f_v.
* projective(q, i) has basis the paths leaving i, arrows act by extending
  a path; injective(q, j) has basis the paths into j, arrows act by
  stripping the first arrow of a path.

Components of the AR quiver are knitted from the projectives (or, by
duality, from the injectives): whenever the ends of every almost split
sequence starting at a module are available, the next module is the
cokernel of the sum of the irreducible maps out of it.  Dimension vectors
are cross-checked against the Coxeter transformation at every step.
"""
from __future__ import annotations

import itertools
import threading
from fractions import Fraction

from .errors import ComputationError
from .linalg import Echelon, QMat
from .quiver import Path, Quiver, TranslationQuiver

_SAFETY_CAP = 20000


class Rep:
    """A finite-dimensional representation of a quiver over Q."""

    def __init__(self, quiver: Quiver, dims: dict[int, int], mats=None):
        self.quiver = quiver
        self.dims = {v: int(dims.get(v, 0)) for v in quiver.vertices}
        self.mats: dict[int, QMat] = {}
        mats = mats or {}
        for aid, (s, t) in quiver.arrows.items():
            block = mats.get(aid)
            if block is None:
                block = QMat.zeros(self.dims[t], self.dims[s])
            if block.shape != (self.dims[t], self.dims[s]):
                raise ValueError(
                    "arrow %d block has shape %s, expected %s"
                    % (aid, block.shape, (self.dims[t], self.dims[s]))
                )
            self.mats[aid] = block
        self.paths = None  # populated by the path-basis constructors

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def dim_vector(self) -> tuple[int, ...]:
        return tuple(self.dims[v] for v in self.quiver.vertices)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def __repr__(self) -> str:
        return "Rep(dims=%r)" % (self.dims,)


class Mor:
    """A morphism of representations, stored as per-vertex blocks."""

    def __init__(self, src: Rep, tgt: Rep, blocks=None):
        self.src = src
        self.tgt = tgt
        self.blocks: dict[int, QMat] = {}
        blocks = blocks or {}
        for v in src.quiver.vertices:
            block = blocks.get(v)
            if block is None:
                block = QMat.zeros(tgt.dims[v], src.dims[v])
            if block.shape != (tgt.dims[v], src.dims[v]):
                raise ValueError(
                    "block at vertex %d has shape %s, expected %s"
                    % (v, block.shape, (tgt.dims[v], src.dims[v]))
                )
            self.blocks[v] = block

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks.values())

    def is_identity(self) -> bool:
        if self.src.dims != self.tgt.dims:
            return False
        return all(
            self.blocks[v] == QMat.identity(self.src.dims[v])
            for v in self.src.quiver.vertices
        )

    def __mul__(self, other: "Mor") -> "Mor":
        if not isinstance(other, Mor):
            return NotImplemented
        if other.tgt.dims != self.src.dims:
            raise ValueError("composition shape mismatch")
        return Mor(
            other.src,
            self.tgt,
            {
                v: self.blocks[v] * other.blocks[v]
                for v in self.src.quiver.vertices
            },
        )

    def __add__(self, other: "Mor") -> "Mor":
        return Mor(
            self.src,
            self.tgt,
            {
                v: self.blocks[v] + other.blocks[v]
                for v in self.src.quiver.vertices
            },
        )

    def __sub__(self, other: "Mor") -> "Mor":
        return Mor(
            self.src,
            self.tgt,
            {
                v: self.blocks[v] - other.blocks[v]
                for v in self.src.quiver.vertices
            },
        )

    def scale(self, c) -> "Mor":
        return Mor(
            self.src,
            self.tgt,
            {v: self.blocks[v].scale(c) for v in self.src.quiver.vertices},
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Mor)
            and self.src.dims == other.src.dims
            and self.tgt.dims == other.tgt.dims
            and all(
                self.blocks[v] == other.blocks[v]
                for v in self.src.quiver.vertices
            )
        )

    def flatten(self) -> list[Fraction]:
        out: list[Fraction] = []
        for v in self.src.quiver.vertices:
            for row in self.blocks[v].rows:
                out.extend(row)
        return out

    def inverse(self) -> "Mor | None":
        if self.src.dims != self.tgt.dims:
            return None
        inv_blocks = {}
        for v in self.src.quiver.vertices:
            inv = self.blocks[v].inverse()
            if inv is None:
                return None
            inv_blocks[v] = inv
        return Mor(self.tgt, self.src, inv_blocks)

    def is_vertexwise_injective(self) -> bool:
        return all(
            self.blocks[v].rank() == self.src.dims[v]
            for v in self.src.quiver.vertices
        )

    def check(self) -> bool:
        """Does this block family actually intertwine the arrow actions?"""
        q = self.src.quiver
        for aid, (s, t) in q.arrows.items():
            lhs = self.tgt.mats[aid] * self.blocks[s]
            rhs = self.blocks[t] * self.src.mats[aid]
            if lhs != rhs:
                return False
        return True

    def __repr__(self) -> str:
        return "Mor(%r -> %r)" % (self.src.dims, self.tgt.dims)


def zero_mor(src: Rep, tgt: Rep) -> Mor:
    return Mor(src, tgt)


def identity_mor(m: Rep) -> Mor:
    return Mor(m, m, {v: QMat.identity(m.dims[v]) for v in m.quiver.vertices})


def mor_flat_width(src: Rep, tgt: Rep) -> int:
    return sum(
        tgt.dims[v] * src.dims[v] for v in src.quiver.vertices
    )


def _unflatten(src: Rep, tgt: Rep, vec) -> Mor:
    blocks = {}
    at = 0
    for v in src.quiver.vertices:
        m, n = tgt.dims[v], src.dims[v]
        rows = [list(vec[at + i * n : at + (i + 1) * n]) for i in range(m)]
        blocks[v] = QMat.from_rows(rows, ncols=n)
        at += m * n
    return Mor(src, tgt, blocks)


# -- path-basis constructors -------------------------------------------------


def projective(q: Quiver, i: int) -> Rep:
    """The indecomposable projective at i: paths leaving i, arrows extend."""
    if i not in q.vertices:
        raise ComputationError("unknown vertex %d" % i)
    if not q.is_acyclic():
        raise ComputationError("path algebra infinite-dimensional")
    paths = {v: tuple(q.paths_between(i, v)) for v in q.vertices}
    dims = {v: len(paths[v]) for v in q.vertices}
    index = {v: {p: k for k, p in enumerate(paths[v])} for v in q.vertices}
    mats = {}
    for aid, (s, t) in q.arrows.items():
        block = QMat.zeros(dims[t], dims[s])
        for col, p in enumerate(paths[s]):
            longer = Path(i, p.arrows + (aid,))
            block.rows[index[t][longer]][col] = Fraction(1)
        mats[aid] = block
    rep = Rep(q, dims, mats)
    rep.paths = paths
    return rep


def injective(q: Quiver, j: int) -> Rep:
    """The indecomposable injective at j: paths into j, arrows strip."""
    if j not in q.vertices:
        raise ComputationError("unknown vertex %d" % j)
    if not q.is_acyclic():
        raise ComputationError("path algebra infinite-dimensional")
    paths = {v: tuple(q.paths_between(v, j)) for v in q.vertices}
    dims = {v: len(paths[v]) for v in q.vertices}
    index = {v: {p: k for k, p in enumerate(paths[v])} for v in q.vertices}
    mats = {}
    for aid, (s, t) in q.arrows.items():
        block = QMat.zeros(dims[t], dims[s])
        for col, p in enumerate(paths[s]):
            if p.arrows and p.arrows[0] == aid:
                shorter = Path(t, p.arrows[1:])
                block.rows[index[t][shorter]][col] = Fraction(1)
        mats[aid] = block
    rep = Rep(q, dims, mats)
    rep.paths = paths
    return rep


def simple(q: Quiver, v: int) -> Rep:
    if v not in q.vertices:
        raise ComputationError("unknown vertex %d" % v)
    return Rep(q, {v: 1})


def p_inclusion(q: Quiver, aid: int) -> Mor:
    """For an arrow a: i -> j, the inclusion P(j) -> P(i), p |-> p after a."""
    i, j = q.arrows[aid]
    pj = projective(q, j)
    pi = projective(q, i)
    index = {
        v: {p: k for k, p in enumerate(pi.paths[v])} for v in q.vertices
    }
    blocks = {}
    for v in q.vertices:
        block = QMat.zeros(pi.dims[v], pj.dims[v])
        for col, p in enumerate(pj.paths[v]):
            longer = Path(i, (aid,) + p.arrows)
            block.rows[index[v][longer]][col] = Fraction(1)
        blocks[v] = block
    return Mor(pj, pi, blocks)


def i_quotient(q: Quiver, aid: int) -> Mor:
    """For an arrow a: i -> j, the quotient I(j) -> I(i) stripping the
    final arrow of a path into j."""
    i, j = q.arrows[aid]
    ij = injective(q, j)
    ii = injective(q, i)
    index = {
        v: {p: k for k, p in enumerate(ii.paths[v])} for v in q.vertices
    }
    blocks = {}
    for v in q.vertices:
        block = QMat.zeros(ii.dims[v], ij.dims[v])
        for col, p in enumerate(ij.paths[v]):
            if p.arrows and p.arrows[-1] == aid:
                shorter = Path(v, p.arrows[:-1])
                block.rows[index[v][shorter]][col] = Fraction(1)
        blocks[v] = block
    return Mor(ij, ii, blocks)


def radical_inclusion(q: Quiver, i: int):
    """(rad P(i), inclusion into P(i)) as a direct sum over arrows at i."""
    outs = sorted(q.out_arrows(i))
    summands = [p_inclusion(q, a) for a in outs]
    total, incls, _ = direct_sum([f.src for f in summands], quiver=q)
    pi = projective(q, i)
    blocks = {
        v: QMat.hstack([f.blocks[v] for f in summands])
        if summands
        else QMat.zeros(pi.dims[v], 0)
        for v in q.vertices
    }
    return total, Mor(total, pi, blocks)


def socle_quotient(q: Quiver, j: int):
    """(I(j)/soc, quotient map) as a direct sum over arrows into j."""
    ins = sorted(q.in_arrows(j))
    summands = [i_quotient(q, a) for a in ins]
    total, _, _ = direct_sum([f.tgt for f in summands], quiver=q)
    ij = injective(q, j)
    blocks = {
        v: QMat.vstack([f.blocks[v] for f in summands])
        if summands
        else QMat.zeros(0, ij.dims[v])
        for v in q.vertices
    }
    return total, Mor(ij, total, blocks)


# -- sums, kernels, cokernels ------------------------------------------------


def direct_sum(reps: list[Rep], quiver: Quiver | None = None):
    """Returns (sum, inclusions, projections)."""
    if not reps and quiver is None:
        raise ValueError("direct_sum of nothing needs an explicit quiver")
    q = quiver if quiver is not None else reps[0].quiver
    dims = {v: sum(m.dims[v] for m in reps) for v in q.vertices}
    mats = {
        aid: QMat.block_diag([m.mats[aid] for m in reps])
        if reps
        else QMat.zeros(dims[q.tgt(aid)], dims[q.src(aid)])
        for aid in q.arrows
    }
    total = Rep(q, dims, mats)
    incls = []
    projs = []
    offset = {v: 0 for v in q.vertices}
    for m in reps:
        iblocks = {}
        pblocks = {}
        for v in q.vertices:
            d, dm = dims[v], m.dims[v]
            off = offset[v]
            ib = QMat.zeros(d, dm)
            pb = QMat.zeros(dm, d)
            for k in range(dm):
                ib.rows[off + k][k] = Fraction(1)
                pb.rows[k][off + k] = Fraction(1)
            iblocks[v] = ib
            pblocks[v] = pb
            offset[v] = off + dm
        incls.append(Mor(m, total, iblocks))
        projs.append(Mor(total, m, pblocks))
    return total, incls, projs


def kernel(f: Mor):
    """Returns (ker, inclusion)."""
    q = f.src.quiver
    bases = {}
    for v in q.vertices:
        ns = f.blocks[v].nullspace()
        bases[v] = ns
    dims = {v: len(bases[v]) for v in q.vertices}
    incl_blocks = {
        v: QMat.from_rows(
            [[vec[i] for vec in bases[v]] for i in range(f.src.dims[v])],
            ncols=dims[v],
        )
        for v in q.vertices
    }
    mats = {}
    for aid, (s, t) in q.arrows.items():
        block = QMat.zeros(dims[t], dims[s])
        for col, vec in enumerate(bases[s]):
            image = f.src.mats[aid].apply(vec)
            coords = incl_blocks[t].solve(image)
            if coords is None:
                raise ComputationError(
                    "kernel not stable under arrow %d" % aid
                )
            for row in range(dims[t]):
                block.rows[row][col] = coords[row]
        mats[aid] = block
    ker = Rep(q, dims, mats)
    return ker, Mor(ker, f.src, incl_blocks)


def cokernel(f: Mor):
    """Returns (coker, projection) with coordinates on the non-pivot
    standard basis vectors of each target space."""
    q = f.tgt.quiver
    free = {}
    echs = {}
    for v in q.vertices:
        ech = Echelon(f.tgt.dims[v])
        cols = f.blocks[v].transpose().rows
        ech.extend(cols)
        echs[v] = ech
        pivot_set = set(ech.pivots)
        free[v] = [c for c in range(f.tgt.dims[v]) if c not in pivot_set]
    dims = {v: len(free[v]) for v in q.vertices}

    def project(v, vec):
        residue = echs[v].reduce(vec)
        return [residue[c] for c in free[v]]

    proj_blocks = {}
    for v in q.vertices:
        cols = []
        for i in range(f.tgt.dims[v]):
            e = [Fraction(0)] * f.tgt.dims[v]
            e[i] = Fraction(1)
            cols.append(project(v, e))
        proj_blocks[v] = QMat.from_rows(
            [[cols[i][r] for i in range(f.tgt.dims[v])] for r in range(dims[v])],
            ncols=f.tgt.dims[v],
        )
    mats = {}
    for aid, (s, t) in q.arrows.items():
        block = QMat.zeros(dims[t], dims[s])
        for col, c in enumerate(free[s]):
            e = [Fraction(0)] * f.tgt.dims[s]
            e[c] = Fraction(1)
            image = f.tgt.mats[aid].apply(e)
            out = project(t, image)
            for row in range(dims[t]):
                block.rows[row][col] = out[row]
        mats[aid] = block
    coker = Rep(q, dims, mats)
    return coker, Mor(f.tgt, coker, proj_blocks)


# -- hom spaces --------------------------------------------------------------


def hom_basis(m: Rep, n: Rep) -> list[Mor]:
    """Canonical basis of Hom(m, n) via the intertwiner nullspace."""
    q = m.quiver
    width = mor_flat_width(m, n)
    if width == 0:
        return []
    offsets = {}
    at = 0
    for v in q.vertices:
        offsets[v] = at
        at += n.dims[v] * m.dims[v]
    rows = []
    for aid, (s, t) in q.arrows.items():
        na = n.mats[aid]
        ma = m.mats[aid]
        for i in range(n.dims[t]):
            for j in range(m.dims[s]):
                row = [Fraction(0)] * width
                for k in range(n.dims[s]):
                    row[offsets[s] + k * m.dims[s] + j] += na.rows[i][k]
                for l in range(m.dims[t]):
                    row[offsets[t] + i * m.dims[t] + l] -= ma.rows[l][j]
                rows.append(row)
    if not rows:
        sys = QMat.zeros(0, width)
    else:
        sys = QMat.from_rows(rows, ncols=width)
    return [_unflatten(m, n, vec) for vec in sys.nullspace()]


class HomSpace:
    """Hom(m, n) with a fixed canonical basis and coordinate maps."""

    def __init__(self, m: Rep, n: Rep):
        self.src = m
        self.tgt = n
        self.basis = hom_basis(m, n)
        self.dim = len(self.basis)
        self._flat = None

    def _flat_matrix(self) -> QMat:
        if self._flat is None:
            width = mor_flat_width(self.src, self.tgt)
            cols = [f.flatten() for f in self.basis]
            self._flat = QMat.from_rows(
                [[col[i] for col in cols] for i in range(width)],
                ncols=self.dim,
            )
        return self._flat

    def coords(self, f: Mor) -> list[Fraction]:
        if self.dim == 0:
            if all(x == 0 for x in f.flatten()):
                return []
            raise ComputationError("morphism outside its hom space")
        sol = self._flat_matrix().solve(f.flatten())
        if sol is None:
            raise ComputationError("morphism outside its hom space")
        return sol

    def from_coords(self, coords) -> Mor:
        f = zero_mor(self.src, self.tgt)
        for c, b in zip(coords, self.basis):
            if c:
                f = f + b.scale(c)
        return f


def total_trace(f: Mor) -> Fraction:
    tr = Fraction(0)
    for v in f.src.quiver.vertices:
        block = f.blocks[v]
        tr += sum((block.rows[i][i] for i in range(block.m)), Fraction(0))
    return tr


def endo_top_dim(m: Rep) -> int:
    """dim End(m)/rad End(m), via the trace form (exact in char 0)."""
    basis = hom_basis(m, m)
    d = len(basis)
    if d == 0:
        return 0
    gram = QMat.zeros(d, d)
    for i in range(d):
        for j in range(i, d):
            tr = total_trace(basis[i] * basis[j])
            gram.rows[i][j] = tr
            gram.rows[j][i] = total_trace(basis[j] * basis[i])
    return gram.rank()


# -- isomorphism testing -----------------------------------------------------


def find_iso(m: Rep, n: Rep) -> Mor | None:
    if m.dim_vector() != n.dim_vector():
        return None
    if m.total_dim == 0:
        return zero_mor(m, n)
    basis = hom_basis(m, n)
    if not basis:
        return None
    for f in basis:
        if f.inverse() is not None:
            return f
    if len(basis) <= 6:
        for coeffs in itertools.product((1, -1, 2, 0), repeat=len(basis)):
            f = zero_mor(m, n)
            for c, b in zip(coeffs, basis):
                if c:
                    f = f + b.scale(c)
            if f.inverse() is not None:
                return f
    else:
        state = 1
        for _ in range(500):
            f = zero_mor(m, n)
            for b in basis:
                state = (state * 48271) % 2147483647
                f = f + b.scale((state % 7) - 3)
            if f.inverse() is not None:
                return f
    return None


def is_isomorphic(m: Rep, n: Rep) -> bool:
    return find_iso(m, n) is not None


# -- radical powers over a fixed universe ------------------------------------


class RadicalCalculator:
    """Powers of the radical between members of a fixed list of pairwise
    non-isomorphic indecomposables, computed by honest composition:

        rad^n(X, Y) = sum over U of rad^{n-1}(U, Y) o rad(X, U).

    Results are memoized; a lock keeps concurrent queries consistent.
    """

    def __init__(self, universe: list[Rep], truncated: bool = False):
        self.universe = list(universe)
        self.truncated = truncated
        self._by_id = {id(m): k for k, m in enumerate(self.universe)}
        self._hom: dict[tuple[int, int], HomSpace] = {}
        self._rad: dict[tuple[int, int, int], Echelon] = {}
        self._level_mors: dict[tuple[int, int, int], list[Mor]] = {}
        self._lock = threading.RLock()

    def index_of(self, m: Rep) -> int | None:
        k = self._by_id.get(id(m))
        if k is not None:
            return k
        for k, u in enumerate(self.universe):
            if u.dim_vector() == m.dim_vector() and is_isomorphic(u, m):
                return k
        return None

    def hom_space(self, i: int, j: int) -> HomSpace:
        with self._lock:
            key = (i, j)
            if key not in self._hom:
                self._hom[key] = HomSpace(self.universe[i], self.universe[j])
            return self._hom[key]

    def rad_level(self, i: int, j: int, n: int) -> Echelon:
        with self._lock:
            return self._rad_level_locked(i, j, n)

    def _rad_level_locked(self, i: int, j: int, n: int) -> Echelon:
        key = (i, j, n)
        if key in self._rad:
            return self._rad[key]
        hs = self.hom_space(i, j)
        ech = Echelon(hs.dim)
        if n <= 0:
            ech.extend(QMat.identity(hs.dim).rows)
        elif n == 1:
            if i != j:
                ech.extend(QMat.identity(hs.dim).rows)
            else:
                traces = [total_trace(b) for b in hs.basis]
                if any(traces):
                    sys = QMat.from_rows([traces], ncols=hs.dim)
                    ech.extend(sys.nullspace())
                else:
                    ech.extend(QMat.identity(hs.dim).rows)
        else:
            prev_empty = all(
                self._rad_level_locked(u, j, n - 1).rank == 0
                for u in range(len(self.universe))
            )
            if not prev_empty:
                for u in range(len(self.universe)):
                    lefts = self._level_basis_locked(u, j, n - 1)
                    if not lefts:
                        continue
                    rights = self._level_basis_locked(i, u, 1)
                    if not rights:
                        continue
                    for g in lefts:
                        for h in rights:
                            ech.add(hs.coords(g * h))
        self._rad[key] = ech
        return ech

    def _level_basis_locked(self, i: int, j: int, n: int) -> list[Mor]:
        key = (i, j, n)
        if key not in self._level_mors:
            hs = self.hom_space(i, j)
            ech = self._rad_level_locked(i, j, n)
            self._level_mors[key] = [
                hs.from_coords(vec) for vec in ech.basis()
            ]
        return self._level_mors[key]

    def rad_dim(self, i: int, j: int, n: int) -> int:
        return self.rad_level(i, j, n).rank


class RadSubspace:
    """rad^n(M, N) presented inside Hom(M, N), possibly transported along
    isomorphisms into the calculator's universe."""

    def __init__(self, calc, i, j, n, pre=None, post_inv=None):
        self.calc = calc
        self.i = i
        self.j = j
        self.n = n
        self._pre = pre  # iso M -> U_i
        self._post_inv = post_inv  # iso N -> U_j
        self.dim = calc.rad_dim(i, j, n)

    def contains(self, f: Mor) -> bool:
        g = f
        if self._pre is not None or self._post_inv is not None:
            pre_inv = self._pre.inverse() if self._pre is not None else None
            g = f if pre_inv is None else f * pre_inv
            if self._post_inv is not None:
                g = self._post_inv * g
        coords = self.calc.hom_space(self.i, self.j).coords(g)
        return self.calc.rad_level(self.i, self.j, self.n).contains(coords)

    def basis(self) -> list[Mor]:
        hs = self.calc.hom_space(self.i, self.j)
        return [
            hs.from_coords(vec)
            for vec in self.calc.rad_level(self.i, self.j, self.n).basis()
        ]


def rad_power(m: Rep, n_rep: Rep, n: int, universe, calc=None) -> RadSubspace:
    """rad^n(m, n_rep) relative to the given universe of indecomposables."""
    if calc is None:
        calc = universe if isinstance(universe, RadicalCalculator) else (
            RadicalCalculator(universe)
        )
    i = calc._by_id.get(id(m))
    pre = None
    if i is None:
        for k, u in enumerate(calc.universe):
            if u.dim_vector() == m.dim_vector():
                iso = find_iso(m, u)
                if iso is not None:
                    i, pre = k, iso
                    break
    j = calc._by_id.get(id(n_rep))
    post_inv = None
    if j is None:
        for k, u in enumerate(calc.universe):
            if u.dim_vector() == n_rep.dim_vector():
                iso = find_iso(n_rep, u)
                if iso is not None:
                    j, post_inv = k, iso
                    break
    if i is None or j is None:
        raise ComputationError(
            "module not found in the given universe of indecomposables"
        )
    return RadSubspace(calc, i, j, n, pre=pre, post_inv=post_inv)


def is_irreducible(f: Mor, universe) -> bool:
    calc = universe if isinstance(universe, RadicalCalculator) else (
        RadicalCalculator(universe)
    )
    r1 = rad_power(f.src, f.tgt, 1, calc, calc=calc)
    if not r1.contains(f):
        return False
    r2 = rad_power(f.src, f.tgt, 2, calc, calc=calc)
    return not r2.contains(f)


# -- coxeter transformation --------------------------------------------------


def coxeter_matrix(q: Quiver) -> QMat:
    """Phi with Phi . dim M = dim (tau M) for non-projective M (columns are
    dimension vectors in sorted vertex order)."""
    if not q.is_acyclic():
        raise ComputationError("path algebra infinite-dimensional")
    verts = list(q.vertices)
    cartan = QMat.zeros(len(verts), len(verts))
    for col, i in enumerate(verts):
        p = projective(q, i)
        for row, v in enumerate(verts):
            cartan.rows[row][col] = Fraction(p.dims[v])
    inv = cartan.inverse()
    if inv is None:
        raise ComputationError("Cartan matrix not invertible")
    return (cartan.transpose() * inv).scale(-1)


# -- AR components -----------------------------------------------------------


class ARSeq:
    """One almost split sequence 0 -> start -> E -> end -> 0."""

    __slots__ = ("end", "start", "summands", "E", "left", "right")

    def __init__(self, end, start, summands, E, left, right):
        self.end = end
        self.start = start
        self.summands = summands
        self.E = E
        self.left = left
        self.right = right


class ARQuiver:
    """A knitted component of the AR quiver, with modules on the vertices
    and chosen irreducible morphisms on the arrows."""

    def __init__(
        self,
        quiver,
        direction,
        modules,
        tq,
        arrow_mor,
        sequences,
        generation,
        genuine_projectives,
        genuine_injectives,
        frontier,
        projective_vertex,
        injective_vertex,
        notes,
    ):
        self.quiver = quiver
        self.direction = direction
        self._modules = modules
        self.tq = tq
        self.arrow_mor = arrow_mor
        self.sequences = sequences
        self.generation = generation
        self.genuine_projectives = frozenset(genuine_projectives)
        self.genuine_injectives = frozenset(genuine_injectives)
        self.frontier = frozenset(frontier)
        self.projective_vertex = dict(projective_vertex)
        self.injective_vertex = dict(injective_vertex)
        self.notes = notes
        self.truncated = bool(self.frontier)
        self._calc = None
        self._lock = threading.Lock()

    def vids(self) -> list[int]:
        return list(self.tq.vertices)

    def module(self, vid: int) -> Rep:
        return self._modules[vid]

    def universe(self) -> list[Rep]:
        return [self._modules[v] for v in self.tq.vertices]

    def find_vertex(self, rep: Rep) -> int | None:
        for v in self.tq.vertices:
            if self._modules[v].dim_vector() == rep.dim_vector():
                if is_isomorphic(self._modules[v], rep):
                    return v
        return None

    def radical_calculator(self) -> RadicalCalculator:
        with self._lock:
            if self._calc is None:
                self._calc = RadicalCalculator(
                    self.universe(), truncated=self.truncated
                )
            return self._calc


def _match_injective(rep: Rep, injectives: dict[int, Rep]) -> int | None:
    for j in sorted(injectives):
        cand = injectives[j]
        if cand.dim_vector() == rep.dim_vector() and is_isomorphic(rep, cand):
            return j
    return None


def _match_projective(rep: Rep, projectives: dict[int, Rep]) -> int | None:
    for i in sorted(projectives):
        cand = projectives[i]
        if cand.dim_vector() == rep.dim_vector() and is_isomorphic(rep, cand):
            return i
    return None


def _verify_sequence(seq: ARSeq, modules, mode, notes, endo_cache):
    mmod = modules[seq.start]
    cmod = modules[seq.end]
    emod = seq.E
    q = mmod.quiver
    if mode == "auto":
        cost_split = sum(
            cmod.dims[v] * emod.dims[v] for v in q.vertices
        )
        cost_endo = sum(cmod.dims[v] ** 2 for v in q.vertices)
        tier = "full" if cost_split <= 200 and cost_endo <= 100 else "light"
    else:
        tier = mode
    if not (seq.right * seq.left).is_zero():
        raise ComputationError(
            "knitting failed: mesh maps do not compose to zero at vertex %d"
            % seq.start
        )
    for v in q.vertices:
        rl = seq.left.blocks[v].rank()
        rr = seq.right.blocks[v].rank()
        if rl != mmod.dims[v]:
            raise ComputationError(
                "knitting failed: left mesh map not injective at vertex %d"
                % seq.start
            )
        if rl + rr != emod.dims[v] or rr != cmod.dims[v]:
            raise ComputationError(
                "knitting failed: mesh not exact at vertex %d" % seq.start
            )
    if tier == "full":
        for vid in (seq.start, seq.end):
            if vid not in endo_cache:
                endo_cache[vid] = endo_top_dim(modules[vid])
            if endo_cache[vid] != 1:
                raise ComputationError(
                    "knitting failed: end term at vertex %d not "
                    "indecomposable" % vid
                )
        lifts = hom_basis(cmod, emod)
        if lifts:
            width = mor_flat_width(cmod, cmod)
            cols = [(seq.right * s).flatten() for s in lifts]
            sys = QMat.from_rows(
                [[col[i] for col in cols] for i in range(width)],
                ncols=len(cols),
            )
            if sys.solve(identity_mor(cmod).flatten()) is not None:
                raise ComputationError(
                    "knitting failed: sequence at vertex %d splits"
                    % seq.start
                )
    notes["verify"][seq.end] = tier


def knit_ar_component(
    q: Quiver,
    direction: str = "projectives",
    bound: int | None = None,
    verify: str = "auto",
) -> ARQuiver:
    """Knit the component of the AR quiver containing the projectives (or
    the injectives).  `bound` caps the number of translation generations;
    a component cut off by the bound is flagged `truncated`."""
    if direction not in ("projectives", "injectives"):
        raise ValueError("direction must be 'projectives' or 'injectives'")
    if verify not in ("auto", "full", "light"):
        raise ValueError("verify must be 'auto', 'full' or 'light'")
    if direction == "injectives":
        op = knit_ar_component(q.opposite(), "projectives", bound, verify)
        return _dualize_ar(op, q)
    if not q.is_acyclic():
        raise ComputationError("path algebra infinite-dimensional")
    if not q.is_connected():
        raise ComputationError("quiver is not connected")

    inj_reps = {j: injective(q, j) for j in q.vertices}
    proj_reps = {i: projective(q, i) for i in q.vertices}
    phi_inv = coxeter_matrix(q).inverse()

    modules: dict[int, Rep] = {}
    generation: dict[int, int] = {}
    ar_arrows: dict[int, tuple[int, int]] = {}
    arrow_mor: dict[int, Mor] = {}
    tau: dict[int, int] = {}
    sigma: dict[int, int] = {}
    inj_mark: set[int] = set()
    proj_mark: set[int] = set()
    out_list: dict[int, list[int]] = {}
    in_list: dict[int, list[int]] = {}
    sequences: dict[int, ARSeq] = {}
    injective_vertex: dict[int, int] = {}
    projective_vertex: dict[int, int] = {}
    notes: dict = {"verify": {}}
    endo_cache: dict[int, int] = {}
    counter = itertools.count()
    arrow_counter = itertools.count()

    def new_vertex(rep: Rep, gen: int) -> int:
        vid = next(counter)
        modules[vid] = rep
        generation[vid] = gen
        out_list[vid] = []
        in_list[vid] = []
        j = _match_injective(rep, inj_reps)
        if j is not None:
            inj_mark.add(vid)
            injective_vertex.setdefault(j, vid)
        return vid

    def new_arrow(s: int, t: int, mor: Mor) -> int:
        aid = next(arrow_counter)
        ar_arrows[aid] = (s, t)
        arrow_mor[aid] = mor
        out_list[s].append(aid)
        in_list[t].append(aid)
        return aid

    for i in sorted(q.vertices):
        vid = new_vertex(proj_reps[i], 0)
        proj_mark.add(vid)
        projective_vertex[i] = vid
    for a in sorted(q.arrows):
        i, j = q.arrows[a]
        new_arrow(
            projective_vertex[j], projective_vertex[i], p_inclusion(q, a)
        )

    processed: set[int] = set()
    max_gen = None if bound is None else bound - 1
    while True:
        ready = []
        for v in modules:
            if v in processed or v in inj_mark:
                continue
            if max_gen is not None and generation[v] >= max_gen:
                continue
            blocked = any(
                ar_arrows[aid][0] not in processed
                and ar_arrows[aid][0] not in inj_mark
                for aid in in_list[v]
            )
            if not blocked:
                ready.append(v)
        if not ready:
            break
        v = min(ready)
        outs = sorted(out_list[v], key=lambda a: (ar_arrows[a][1], a))
        if not outs:
            raise ComputationError(
                "knitting failed: empty mesh middle at vertex %d" % v
            )
        summands = [ar_arrows[a][1] for a in outs]
        esum, incls, _ = direct_sum([modules[t] for t in summands], quiver=q)
        g = Mor(
            modules[v],
            esum,
            {
                w: QMat.vstack([arrow_mor[a].blocks[w] for a in outs])
                for w in q.vertices
            },
        )
        expect = phi_inv.apply([Fraction(d) for d in modules[v].dim_vector()])
        cok, proj = cokernel(g)
        if [Fraction(d) for d in cok.dim_vector()] != expect:
            raise ComputationError(
                "knitting failed: translation dimension check at vertex %d"
                % v
            )
        nv = new_vertex(cok, generation[v] + 1)
        tau[nv] = v
        for k, a in enumerate(outs):
            na = new_arrow(summands[k], nv, proj * incls[k])
            sigma[na] = a
        seq = ARSeq(
            end=nv,
            start=v,
            summands=tuple(summands),
            E=esum,
            left=g,
            right=proj,
        )
        sequences[nv] = seq
        _verify_sequence(seq, modules, verify, notes, endo_cache)
        processed.add(v)
        if len(modules) > _SAFETY_CAP:
            raise ComputationError(
                "knitting exceeded the safety cap; supply a smaller bound"
            )

    frontier = frozenset(
        v for v in modules if v not in inj_mark and v not in processed
    )
    tq = TranslationQuiver(
        sorted(modules),
        ar_arrows,
        projectives=frozenset(proj_mark),
        injectives=frozenset(inj_mark) | frontier,
        tau=tau,
        sigma=sigma,
    )
    return ARQuiver(
        quiver=q,
        direction="projectives",
        modules=modules,
        tq=tq,
        arrow_mor=arrow_mor,
        sequences=sequences,
        generation=generation,
        genuine_projectives=proj_mark,
        genuine_injectives=inj_mark,
        frontier=frontier,
        projective_vertex=projective_vertex,
        injective_vertex=injective_vertex,
        notes=notes,
    )


def _dual_rep(m: Rep, q: Quiver) -> Rep:
    """The dual of a representation of q.opposite(), as a representation
    of q (same arrow ids, transposed matrices)."""
    mats = {aid: m.mats[aid].transpose() for aid in q.arrows}
    return Rep(q, dict(m.dims), mats)


def _dualize_ar(op: ARQuiver, q: Quiver) -> ARQuiver:
    dmod = {v: _dual_rep(op.module(v), q) for v in op.tq.vertices}
    arrows = {aid: (t, s) for aid, (s, t) in op.tq.arrows.items()}
    arrow_mor = {}
    for aid, (s, t) in op.tq.arrows.items():
        f = op.arrow_mor[aid]
        arrow_mor[aid] = Mor(
            dmod[t],
            dmod[s],
            {v: f.blocks[v].transpose() for v in q.vertices},
        )
    tau = {m: c for c, m in op.tq.tau.items()}
    sigma = {alpha: beta for beta, alpha in op.tq.sigma.items()}
    sequences = {}
    for c, seq in op.sequences.items():
        de = _dual_rep(seq.E, q)
        left = Mor(
            dmod[seq.end],
            de,
            {v: seq.right.blocks[v].transpose() for v in q.vertices},
        )
        right = Mor(
            de,
            dmod[seq.start],
            {v: seq.left.blocks[v].transpose() for v in q.vertices},
        )
        sequences[seq.start] = ARSeq(
            end=seq.start,
            start=seq.end,
            summands=seq.summands,
            E=de,
            left=left,
            right=right,
        )
    tq = TranslationQuiver(
        list(op.tq.vertices),
        arrows,
        projectives=op.tq.injectives,
        injectives=op.tq.projectives,
        tau=tau,
        sigma=sigma,
    )
    return ARQuiver(
        quiver=q,
        direction="injectives",
        modules=dmod,
        tq=tq,
        arrow_mor=arrow_mor,
        sequences=sequences,
        generation=dict(op.generation),
        genuine_projectives=op.genuine_injectives,
        genuine_injectives=op.genuine_projectives,
        frontier=op.frontier,
        projective_vertex=dict(op.injective_vertex),
        injective_vertex=dict(op.projective_vertex),
        notes=op.notes,
    )


def verify_almost_split(ar: ARQuiver, end_vid: int) -> bool:
    """Factorization test: every non-retraction U -> end factors through
    the right mesh map, for U running over the component's modules."""
    seq = ar.sequences[end_vid]
    cmod = ar.module(end_vid)
    width = mor_flat_width(cmod, cmod)
    for u in ar.tq.vertices:
        umod = ar.module(u)
        cands = hom_basis(umod, cmod)
        if not cands:
            continue
        if u == end_vid:
            kept = []
            traces = [total_trace(b) for b in cands]
            sys = QMat.from_rows([traces], ncols=len(cands))
            for vec in sys.nullspace():
                f = zero_mor(umod, cmod)
                for cval, b in zip(vec, cands):
                    if cval:
                        f = f + b.scale(cval)
                kept.append(f)
            cands = kept
        lifts = hom_basis(umod, seq.E)
        uw = mor_flat_width(umod, cmod)
        cols = [(seq.right * s).flatten() for s in lifts]
        if cols:
            sys = QMat.from_rows(
                [[col[i] for col in cols] for i in range(uw)],
                ncols=len(cols),
            )
        else:
            sys = QMat.zeros(uw, 0)
        for f in cands:
            if sys.solve(f.flatten()) is None:
                return False
    return True


# -- sectional families ------------------------------------------------------


class FamilyReport:
    def __init__(self, paths, violations, groups, min_length):
        self.paths = paths
        self.violations = violations
        self.groups = groups
        self.min_length = min_length

    @property
    def ok(self) -> bool:
        return not self.violations

    def for_json(self) -> dict:
        return {
            "ok": self.ok,
            "violations": list(self.violations),
            "paths": [list(p) for p in self.paths],
            "min_length": self.min_length,
        }


def check_sectional_family(
    ar: ARQuiver, paths: list[list[int]], morphisms=None
) -> FamilyReport:
    """Check a family of paths of irreducible morphisms with a common
    source: per-level morphisms between the same endpoints must stay
    linearly independent modulo rad^2, and no two consecutive levels may
    form a hook (an arrow pair y -> z with tau z = previous vertex)."""
    morphisms = morphisms or {}
    violations: list[str] = []
    tq = ar.tq
    verts: list[list[int]] = []
    for pi, arrows in enumerate(paths):
        if not arrows:
            violations.append("path %d is empty" % pi)
            verts.append([])
            continue
        chain = [tq.src(arrows[0])]
        ok = True
        for a in arrows:
            if a not in tq.arrows or tq.src(a) != chain[-1]:
                violations.append(
                    "path %d: arrow %d does not continue the path" % (pi, a)
                )
                ok = False
                break
            chain.append(tq.tgt(a))
        verts.append(chain if ok else [])
    if violations:
        return FamilyReport(paths, violations, {}, 0)
    starts = {chain[0] for chain in verts}
    if len(starts) > 1:
        violations.append("paths do not share a common source vertex")
        return FamilyReport(paths, violations, {}, 0)

    def mor_at(pi, level):
        override = morphisms.get((pi, level))
        if override is not None:
            return override
        return ar.arrow_mor[paths[pi][level - 1]]

    calc = ar.radical_calculator()
    groups: dict[tuple[int, int, int], list[int]] = {}
    for pi, arrows in enumerate(paths):
        for level in range(1, len(arrows) + 1):
            key = (verts[pi][level - 1], verts[pi][level], level)
            groups.setdefault(key, []).append(pi)
    for (svid, tvid, level), members in sorted(groups.items()):
        i = calc.index_of(ar.module(svid))
        j = calc.index_of(ar.module(tvid))
        hs = calc.hom_space(i, j)
        ech = calc.rad_level(i, j, 2).copy()
        rad1 = calc.rad_level(i, j, 1)
        for pi in members:
            f = mor_at(pi, level)
            coords = hs.coords(f)
            if not rad1.contains(coords):
                violations.append(
                    "level %d morphism on path %d is not radical"
                    % (level, pi)
                )
                continue
            if not ech.add(coords):
                violations.append(
                    "level %d morphisms %d -> %d not independent modulo "
                    "rad^2" % (level, svid, tvid)
                )
    for pi, arrows in enumerate(paths):
        for level in range(1, len(arrows) + 1):
            w = verts[pi][level]
            u = verts[pi][level - 1]
            for pj, arrows2 in enumerate(paths):
                if level + 1 > len(arrows2):
                    continue
                if verts[pj][level] != w:
                    continue
                z = verts[pj][level + 1]
                if z in tq.tau and tq.tau[z] == u:
                    violations.append(
                        "hook at levels %d/%d between paths %d and %d"
                        % (level, level + 1, pi, pj)
                    )
    min_length = min((len(p) for p in paths), default=0)
    return FamilyReport(paths, sorted(set(violations)), groups, min_length)


# -- serialization -----------------------------------------------------------


def rep_to_json(m: Rep) -> dict:
    return {
        "dims": {str(v): m.dims[v] for v in m.quiver.vertices},
        "mats": {
            str(aid): [[str(x) for x in row] for row in m.mats[aid].rows]
            for aid in sorted(m.quiver.arrows)
        },
    }


def rep_from_json(q: Quiver, payload: dict) -> Rep:
    dims = {int(v): int(d) for v, d in payload.get("dims", {}).items()}
    mats = {}
    for aid_s, rows in payload.get("mats", {}).items():
        aid = int(aid_s)
        s, t = q.arrows[aid]
        mats[aid] = QMat.from_rows(
            [[Fraction(x) for x in row] for row in rows],
            ncols=dims.get(s, 0),
        )
    return Rep(q, dims, mats)
