"""Quivers, translation quivers and their plain-text file format.

A quiver is a finite directed multigraph with integer vertex ids and
integer arrow ids.  A translation quiver adds projective/injective marks,
the translation ``tau`` (defined exactly on the non-projective vertices)
and the arrow bijection ``sigma`` sending an arrow ``y -> x`` (x
non-projective) to an arrow ``tau x -> y``.

The file format, one declaration per line, ``#`` starting a comment:

    v <id> [P] [I]
    a <id> <src> <tgt>
    t <x> <taux>
    s <arrow> <sigma-arrow>

Ordinary quivers simply omit marks and ``t``/``s`` lines.
"""
from __future__ import annotations

from typing import NamedTuple

from .errors import ComputationError, QuiverFormatError


class Path(NamedTuple):
    """A directed path: a start vertex and a tuple of composable arrow ids."""

    start: int
    arrows: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.arrows)


class Mesh(NamedTuple):
    """The mesh ending at a non-projective vertex.

    ``arms`` pairs each arrow ``beta: y -> end`` with ``sigma(beta):
    start -> y``, where ``start = tau(end)``.
    """

    end: int
    start: int
    arms: tuple[tuple[int, int], ...]


class Quiver:
    def __init__(self, vertices, arrows: dict[int, tuple[int, int]]):
        self.vertices = tuple(sorted(set(int(v) for v in vertices)))
        if len(self.vertices) != len(list(vertices)):
            raise ValueError("duplicate vertex ids")
        vset = set(self.vertices)
        self.arrows: dict[int, tuple[int, int]] = {}
        for aid in sorted(arrows):
            src, tgt = arrows[aid]
            if src not in vset or tgt not in vset:
                raise ValueError("arrow %d has undefined endpoint" % aid)
            self.arrows[int(aid)] = (int(src), int(tgt))
        self._out: dict[int, tuple[int, ...]] = {v: () for v in self.vertices}
        self._in: dict[int, tuple[int, ...]] = {v: () for v in self.vertices}
        for aid in sorted(self.arrows):
            src, tgt = self.arrows[aid]
            self._out[src] = self._out[src] + (aid,)
            self._in[tgt] = self._in[tgt] + (aid,)

    def src(self, aid: int) -> int:
        return self.arrows[aid][0]

    def tgt(self, aid: int) -> int:
        return self.arrows[aid][1]

    def out_arrows(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_arrows(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def has_loops(self) -> bool:
        return any(s == t for s, t in self.arrows.values())

    def parallel_classes(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """Group arrow ids by (src, tgt)."""
        classes: dict[tuple[int, int], list[int]] = {}
        for aid in sorted(self.arrows):
            classes.setdefault(self.arrows[aid], []).append(aid)
        return {key: tuple(v) for key, v in sorted(classes.items())}

    def topological_order(self) -> list[int] | None:
        indeg = {v: len(self._in[v]) for v in self.vertices}
        ready = sorted(v for v in self.vertices if indeg[v] == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            freed = []
            for aid in self._out[v]:
                w = self.tgt(aid)
                indeg[w] -= 1
                if indeg[w] == 0:
                    freed.append(w)
            for w in sorted(freed):
                # keep the ready list sorted for determinism
                lo = 0
                while lo < len(ready) and ready[lo] < w:
                    lo += 1
                ready.insert(lo, w)
        if len(order) != len(self.vertices):
            return None
        return order

    def is_acyclic(self) -> bool:
        return self.topological_order() is not None

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        nbrs: dict[int, set[int]] = {v: set() for v in self.vertices}
        for src, tgt in self.arrows.values():
            nbrs[src].add(tgt)
            nbrs[tgt].add(src)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def components(self) -> list[tuple[int, ...]]:
        """Connected components of the underlying graph, sorted."""
        nbrs: dict[int, set[int]] = {v: set() for v in self.vertices}
        for src, tgt in self.arrows.values():
            nbrs[src].add(tgt)
            nbrs[tgt].add(src)
        seen: set[int] = set()
        comps = []
        for v0 in self.vertices:
            if v0 in seen:
                continue
            comp = {v0}
            stack = [v0]
            while stack:
                v = stack.pop()
                for w in nbrs[v]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            comps.append(tuple(sorted(comp)))
        return comps

    def opposite(self) -> "Quiver":
        return Quiver(
            self.vertices,
            {aid: (t, s) for aid, (s, t) in self.arrows.items()},
        )

    def path_end(self, p: Path) -> int:
        at = p.start
        if at not in self._out:
            raise ComputationError("path starts at unknown vertex %d" % at)
        for aid in p.arrows:
            if aid not in self.arrows or self.src(aid) != at:
                raise ComputationError(
                    "arrow %d does not continue the path at vertex %d"
                    % (aid, at)
                )
            at = self.tgt(aid)
        return at

    def paths_between(
        self, x: int, y: int, max_len: int | None = None
    ) -> list[Path]:
        """All directed paths x -> y, DFS order on sorted arrow ids."""
        if max_len is None and not self.is_acyclic():
            raise ComputationError(
                "path enumeration on a cyclic quiver needs max_len"
            )
        found: list[Path] = []

        def walk(at: int, acc: tuple[int, ...]):
            if at == y:
                found.append(Path(x, acc))
            if max_len is not None and len(acc) >= max_len:
                return
            for aid in self._out[at]:
                walk(self.tgt(aid), acc + (aid,))

        walk(x, ())
        return found


class TranslationQuiver(Quiver):
    def __init__(
        self,
        vertices,
        arrows,
        projectives,
        injectives,
        tau: dict[int, int],
        sigma: dict[int, int],
    ):
        super().__init__(vertices, arrows)
        vset = set(self.vertices)
        self.projectives = frozenset(int(v) for v in projectives)
        self.injectives = frozenset(int(v) for v in injectives)
        if not self.projectives <= vset or not self.injectives <= vset:
            raise ValueError("marks reference undefined vertices")
        self.tau = {int(x): int(y) for x, y in tau.items()}
        for x, y in self.tau.items():
            if x not in vset or y not in vset:
                raise ValueError("tau references undefined vertices")
        self.sigma = {int(a): int(b) for a, b in sigma.items()}
        for a, b in self.sigma.items():
            if a not in self.arrows or b not in self.arrows:
                raise ValueError("sigma references undefined arrows")

    def non_projectives(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in self.projectives)

    def non_injectives(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in self.injectives)

    def mesh_at(self, z: int) -> Mesh | None:
        """The mesh ending at z, or None when z carries no translation."""
        if z not in self.tau:
            return None
        arms = []
        for beta in self.in_arrows(z):
            if beta not in self.sigma:
                raise ComputationError(
                    "sigma undefined for arrow %d into vertex %d" % (beta, z)
                )
            arms.append((beta, self.sigma[beta]))
        return Mesh(end=z, start=self.tau[z], arms=tuple(arms))

    def is_hook(self, a1: int, a2: int) -> bool:
        """Is the length-2 path (a1, a2) a hook tau z -> y -> z?"""
        if self.tgt(a1) != self.src(a2):
            raise ComputationError("arrows %d, %d not composable" % (a1, a2))
        z = self.tgt(a2)
        return z in self.tau and self.tau[z] == self.src(a1)

    def is_sectional(self, p: Path) -> bool:
        self.path_end(p)
        for a1, a2 in zip(p.arrows, p.arrows[1:]):
            if self.is_hook(a1, a2):
                return False
        return True


class ValidationReport:
    def __init__(self, violations: list[str], notes: dict):
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


def validate(q: Quiver) -> ValidationReport:
    """Check the translation-quiver axioms; violations are data, not errors."""
    notes = {
        "kind": "translation" if isinstance(q, TranslationQuiver) else "ordinary",
        "vertices": len(q.vertices),
        "arrows": len(q.arrows),
        "acyclic": q.is_acyclic(),
        "connected": q.is_connected(),
    }
    violations: list[str] = []
    for aid, (src, tgt) in sorted(q.arrows.items()):
        if src == tgt:
            violations.append("loop: arrow %d at vertex %d" % (aid, src))
    if not isinstance(q, TranslationQuiver):
        return ValidationReport(violations, notes)

    tq = q
    for v in tq.vertices:
        if v in tq.projectives:
            if v in tq.tau:
                violations.append("tau defined at projective vertex %d" % v)
        elif v not in tq.tau:
            violations.append("tau undefined at non-projective vertex %d" % v)
    image: dict[int, int] = {}
    for x in sorted(tq.tau):
        y = tq.tau[x]
        if y in tq.injectives:
            violations.append("tau(%d) = %d is injective" % (x, y))
        if y in image:
            violations.append(
                "tau not injective: tau(%d) = tau(%d) = %d" % (image[y], x, y)
            )
        else:
            image[y] = x
    for v in tq.vertices:
        if v not in tq.injectives and v not in image:
            violations.append(
                "vertex %d is non-injective but not a tau value" % v
            )
    seen_sigma: dict[int, int] = {}
    for aid in sorted(tq.arrows):
        src, tgt = tq.arrows[aid]
        if tgt in tq.tau:
            if aid not in tq.sigma:
                violations.append(
                    "sigma undefined for arrow %d into vertex %d" % (aid, tgt)
                )
            else:
                b = tq.sigma[aid]
                want = (tq.tau[tgt], src)
                if tq.arrows[b] != want:
                    violations.append(
                        "sigma(%d) = %d is not an arrow %d -> %d"
                        % (aid, b, want[0], want[1])
                    )
                if b in seen_sigma:
                    violations.append(
                        "sigma not injective: sigma(%d) = sigma(%d) = %d"
                        % (seen_sigma[b], aid, b)
                    )
                else:
                    seen_sigma[b] = aid
        elif aid in tq.sigma:
            violations.append(
                "sigma defined for arrow %d into vertex %d without tau"
                % (aid, tgt)
            )
    return ValidationReport(violations, notes)


def length_function(q: Quiver) -> dict[int, int]:
    """l with l(tgt) = l(src) + 1 per arrow, 0 at each component's least vertex.

    Raises ComputationError with a witness arrow when none exists.
    """
    level: dict[int, int] = {}
    incident: dict[int, list[tuple[int, int, int]]] = {v: [] for v in q.vertices}
    for aid, (src, tgt) in q.arrows.items():
        incident[src].append((aid, tgt, 1))
        incident[tgt].append((aid, src, -1))
    for comp in q.components():
        root = comp[0]
        level[root] = 0
        queue = [root]
        while queue:
            v = queue.pop(0)
            for aid, w, step in sorted(incident[v]):
                want = level[v] + step
                if w not in level:
                    level[w] = want
                    queue.append(w)
                elif level[w] != want:
                    raise ComputationError(
                        "no length function: arrow %d forces l(%d) = %d "
                        "but l(%d) = %d" % (aid, w, want, w, level[w])
                    )
        base = level[root]
        for v in comp:
            level[v] -= base
    return level


def _parse_int(token: str, lineno: int, col: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise QuiverFormatError(
            "line %d column %d: %s %r is not an integer"
            % (lineno, col, what, token)
        ) from None


def parse_quiver(text: str) -> Quiver | TranslationQuiver:
    verts: dict[int, tuple[bool, bool]] = {}
    arrows: dict[int, tuple[int, int]] = {}
    tau: dict[int, int] = {}
    sigma: dict[int, int] = {}
    marked = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        cols = []
        pos = 0
        for tok in parts:
            pos = raw.find(tok, pos)
            cols.append(pos + 1)
            pos += len(tok)
        kind = parts[0]
        if kind == "v":
            if len(parts) < 2:
                raise QuiverFormatError(
                    "line %d column %d: v needs an id" % (lineno, cols[0])
                )
            vid = _parse_int(parts[1], lineno, cols[1], "vertex id")
            if vid in verts:
                raise QuiverFormatError(
                    "line %d column %d: duplicate vertex %d"
                    % (lineno, cols[1], vid)
                )
            is_p = is_i = False
            for k, flag in enumerate(parts[2:], 2):
                if flag == "P":
                    is_p = True
                elif flag == "I":
                    is_i = True
                else:
                    raise QuiverFormatError(
                        "line %d column %d: unknown vertex flag %r"
                        % (lineno, cols[k], flag)
                    )
            if is_p or is_i:
                marked = True
            verts[vid] = (is_p, is_i)
        elif kind == "a":
            if len(parts) != 4:
                raise QuiverFormatError(
                    "line %d column %d: a needs <id> <src> <tgt>"
                    % (lineno, cols[0])
                )
            aid = _parse_int(parts[1], lineno, cols[1], "arrow id")
            src = _parse_int(parts[2], lineno, cols[2], "source")
            tgt = _parse_int(parts[3], lineno, cols[3], "target")
            if aid in arrows:
                raise QuiverFormatError(
                    "line %d column %d: duplicate arrow %d"
                    % (lineno, cols[1], aid)
                )
            for v, col in ((src, cols[2]), (tgt, cols[3])):
                if v not in verts:
                    raise QuiverFormatError(
                        "line %d column %d: undefined vertex %d"
                        % (lineno, col, v)
                    )
            arrows[aid] = (src, tgt)
        elif kind == "t":
            if len(parts) != 3:
                raise QuiverFormatError(
                    "line %d column %d: t needs <x> <taux>" % (lineno, cols[0])
                )
            x = _parse_int(parts[1], lineno, cols[1], "vertex")
            y = _parse_int(parts[2], lineno, cols[2], "vertex")
            for v, col in ((x, cols[1]), (y, cols[2])):
                if v not in verts:
                    raise QuiverFormatError(
                        "line %d column %d: undefined vertex %d"
                        % (lineno, col, v)
                    )
            if x in tau:
                raise QuiverFormatError(
                    "line %d column %d: duplicate t for vertex %d"
                    % (lineno, cols[1], x)
                )
            tau[x] = y
        elif kind == "s":
            if len(parts) != 3:
                raise QuiverFormatError(
                    "line %d column %d: s needs <arrow> <sigma-arrow>"
                    % (lineno, cols[0])
                )
            a = _parse_int(parts[1], lineno, cols[1], "arrow")
            b = _parse_int(parts[2], lineno, cols[2], "arrow")
            for aid, col in ((a, cols[1]), (b, cols[2])):
                if aid not in arrows:
                    raise QuiverFormatError(
                        "line %d column %d: undefined arrow %d"
                        % (lineno, col, aid)
                    )
            if a in sigma:
                raise QuiverFormatError(
                    "line %d column %d: duplicate s for arrow %d"
                    % (lineno, cols[1], a)
                )
            sigma[a] = b
        else:
            raise QuiverFormatError(
                "line %d column %d: unknown directive %r"
                % (lineno, cols[0], kind)
            )
    if marked or tau or sigma:
        return TranslationQuiver(
            vertices=list(verts),
            arrows=arrows,
            projectives={v for v, (p, _) in verts.items() if p},
            injectives={v for v, (_, i) in verts.items() if i},
            tau=tau,
            sigma=sigma,
        )
    return Quiver(list(verts), arrows)


def serialize_quiver(q: Quiver) -> str:
    lines = []
    is_tq = isinstance(q, TranslationQuiver)
    for v in q.vertices:
        line = "v %d" % v
        if is_tq:
            if v in q.projectives:
                line += " P"
            if v in q.injectives:
                line += " I"
        lines.append(line)
    for aid in sorted(q.arrows):
        src, tgt = q.arrows[aid]
        lines.append("a %d %d %d" % (aid, src, tgt))
    if is_tq:
        for x in sorted(q.tau):
            lines.append("t %d %d" % (x, q.tau[x]))
        for a in sorted(q.sigma):
            lines.append("s %d %d" % (a, q.sigma[a]))
    return "\n".join(lines) + "\n"


def load_quiver(path) -> Quiver | TranslationQuiver:
    with open(path, encoding="utf-8") as fh:
        return parse_quiver(fh.read())
