"""Dynamic forest state shared by every algorithm.

A :class:`ColoredForest` holds the topology (adjacency + parent pointers),
a proper partial edge coloring, per-vertex used-color multisets, cached
per-component edge counts, and the recourse accounting used by the harness.

Conventions
-----------
* Vertices are ``0..n-1``, fixed for the lifetime of a run.
* Colors are ``1..kappa``; color ``0`` means "uncolored (in transit)".
* Edge keys are canonical ``(min, max)`` tuples; rooted direction lives only
  in the parent pointers.
* Recourse is counted per update with net-diff semantics: an edge that is
  transiently uncolored and ends the update with its original color counts
  zero; coloring an edge created by the same update counts zero.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import (
    DegreeExceeded,
    DuplicateEdge,
    ImproperColoring,
    MissingEdge,
    PaletteError,
    ParseError,
    SameComponent,
)

EdgeKey = tuple  # canonical (min, max) vertex pair


def edge_key(a: int, b: int) -> EdgeKey:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Palette:
    """Color budget (delta, extra) with kappa = delta + extra."""

    delta: int
    extra: int = 0

    def __post_init__(self):
        if self.delta < 1:
            raise PaletteError(f"delta must be >= 1, got {self.delta}")
        if self.extra < 0:
            raise PaletteError(f"extra must be >= 0, got {self.extra}")
        if self.delta >= 3:
            if self.extra > self.delta - 2:
                raise PaletteError(
                    f"extra={self.extra} exceeds delta-2={self.delta - 2}"
                )
        elif self.extra != 0:
            raise PaletteError(f"delta={self.delta} requires extra=0")

    @property
    def kappa(self) -> int:
        return self.delta + self.extra

    def colors(self) -> range:
        return range(1, self.kappa + 1)


@dataclass(frozen=True)
class Update:
    """One edge insertion or deletion; '+' inserts, '-' deletes."""

    kind: str
    u: int
    v: int
    parent_hint: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("+", "-"):
            raise ValueError(f"bad update kind {self.kind!r}")
        if self.parent_hint is not None and self.parent_hint not in (self.u, self.v):
            raise ValueError("parent_hint must be one of the endpoints")

    @staticmethod
    def insert(u: int, v: int, parent: Optional[int] = None) -> "Update":
        return Update("+", u, v, parent)

    @staticmethod
    def delete(u: int, v: int) -> "Update":
        return Update("-", u, v)

    @property
    def key(self) -> EdgeKey:
        return edge_key(self.u, self.v)


UpdateSequence = list  # list[Update]


@dataclass
class RecourseLedger:
    """Per-update recolored-edge counts plus derived statistics."""

    per_update: list = field(default_factory=list)

    def record(self, recourse: int) -> None:
        self.per_update.append(recourse)

    @property
    def total(self) -> int:
        return sum(self.per_update)

    @property
    def updates(self) -> int:
        return len(self.per_update)

    def amortized(self) -> float:
        return self.total / self.updates if self.per_update else 0.0

    def worst_case(self) -> int:
        return max(self.per_update) if self.per_update else 0


class _RecourseScope:
    """Net-diff recourse bracket around one update (see module docstring)."""

    def __init__(self, forest: "ColoredForest", record: bool):
        self.forest = forest
        self.record = record
        self.baseline = {}  # edge -> color at scope start (0 = was uncolored)
        self.created = set()
        self.recourse = None

    def __enter__(self):
        if self.forest._scope is not None:
            raise RuntimeError("recourse scopes do not nest")
        self.forest._scope = self
        return self

    def __exit__(self, exc_type, exc, tb):
        self.forest._scope = None
        if exc_type is not None:
            return False
        count = 0
        for e, old in self.baseline.items():
            if old == 0 or e in self.created:
                continue
            if self.forest.edge_color_or_none(e) not in (None, old):
                count += 1
        self.recourse = count
        if self.record and self.forest.ledger is not None:
            self.forest.ledger.record(count)
        return False


class ColoredForest:
    """Mutable dynamic forest with a proper partial edge coloring."""

    def __init__(self, n: int, palette: Palette, ledger: Optional[RecourseLedger] = None):
        if n < 0:
            raise ValueError("n must be >= 0")
        self.n = n
        self.palette = palette
        self.ledger = ledger
        self.adjacency = [dict() for _ in range(n)]  # vertex -> {neighbor: color}
        self.parent: list = [None] * n
        self._used = [dict() for _ in range(n)]  # vertex -> {color: count}
        self.comp_edges = {}  # component root -> edge count (singletons omitted)
        self.on_recolor = []  # callbacks (edge, old, new)
        self._scope = None

    # -- basic queries ----------------------------------------------------

    @property
    def kappa(self) -> int:
        return self.palette.kappa

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adjacency[a]

    def edges(self) -> Iterator[EdgeKey]:
        for a in range(self.n):
            for b in self.adjacency[a]:
                if a < b:
                    yield (a, b)

    def edge_count(self) -> int:
        return sum(len(adj) for adj in self.adjacency) // 2

    def edge_color(self, e: EdgeKey) -> int:
        a, b = e
        try:
            return self.adjacency[a][b]
        except KeyError:
            raise MissingEdge(f"edge {e} not present") from None

    def edge_color_or_none(self, e: EdgeKey) -> Optional[int]:
        a, b = e
        return self.adjacency[a].get(b)

    def find_root(self, v: int) -> int:
        while self.parent[v] is not None:
            v = self.parent[v]
        return v

    def component_edge_count(self, v: int) -> int:
        return self.comp_edges.get(self.find_root(v), 0)

    def component_vertices(self, v: int) -> list:
        """All vertices of v's component, BFS order from the root."""
        root = self.find_root(v)
        out = [root]
        seen = {root}
        i = 0
        while i < len(out):
            x = out[i]
            i += 1
            for y in self.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    out.append(y)
        return out

    def children(self, v: int) -> list:
        return [w for w in self.adjacency[v] if self.parent[w] == v]

    def children_sorted(self, v: int) -> list:
        return sorted(self.children(v))

    def used_colors(self, v: int) -> set:
        return {c for c, k in self._used[v].items() if k > 0}

    def available_colors(self, v: int) -> set:
        used = self._used[v]
        return {c for c in self.palette.colors() if used.get(c, 0) == 0}

    def available_for_edge(self, e: EdgeKey) -> set:
        return self.available_colors(e[0]) & self.available_colors(e[1])

    # -- topology mutation -------------------------------------------------

    def insert_topology(self, u: int, v: int, parent_hint: Optional[int] = None) -> EdgeKey:
        """Add an uncolored edge {u, v}; the non-parent side gets rerooted.

        Without a hint, ``u`` plays the parent.  Rooted-model callers must
        validate root-ness themselves before calling.
        """
        if u == v:
            raise DuplicateEdge(f"self loop ({u},{v})")
        if self.has_edge(u, v):
            raise DuplicateEdge(f"edge {edge_key(u, v)} already present")
        if self.find_root(u) == self.find_root(v):
            raise SameComponent(f"({u},{v}) would close a cycle")
        for x in (u, v):
            if self.degree(x) >= self.palette.delta:
                raise DegreeExceeded(f"vertex {x} already has degree {self.degree(x)}")
        if parent_hint is None:
            p, r = u, v
        else:
            if parent_hint not in (u, v):
                raise ValueError("parent_hint must be an endpoint")
            p, r = parent_hint, (v if parent_hint == u else u)
        root_p = self.find_root(p)
        self.reroot(r)
        self.parent[r] = p
        self.adjacency[u][v] = 0
        self.adjacency[v][u] = 0
        self.comp_edges[root_p] = (
            self.comp_edges.get(root_p, 0) + self.comp_edges.pop(r, 0) + 1
        )
        e = edge_key(u, v)
        if self._scope is not None:
            self._scope.created.add(e)
            self._scope.baseline.setdefault(e, 0)
        return e

    def delete_topology(self, e: EdgeKey) -> None:
        """Remove an edge; the cut-off side's endpoint becomes its new root."""
        a, b = e
        if not (0 <= a < self.n and 0 <= b < self.n) or not self.has_edge(a, b):
            raise MissingEdge(f"edge {e} not present")
        if self.parent[b] == a:
            child = b
        elif self.parent[a] == b:
            child = a
        else:  # pragma: no cover - parent pointers always cover each edge
            raise ImproperColoring(f"edge {e} has no parent orientation")
        old_root = self.find_root(a)
        old_total = self.comp_edges.get(old_root, 0)
        color = self.adjacency[a][b]
        if self._scope is not None:
            self._scope.baseline.setdefault(edge_key(a, b), color)
        if color != 0:
            self._use(a, color, -1)
            self._use(b, color, -1)
        del self.adjacency[a][b]
        del self.adjacency[b][a]
        self.parent[child] = None
        child_size = self._count_edges_from(child)
        rest = old_total - child_size - 1
        if child_size:
            self.comp_edges[child] = child_size
        if old_root != child:
            if rest:
                self.comp_edges[old_root] = rest
            else:
                self.comp_edges.pop(old_root, None)

    def _count_edges_from(self, v: int) -> int:
        seen = {v}
        stack = [v]
        count = 0
        while stack:
            x = stack.pop()
            for y in self.adjacency[x]:
                count += 1
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return count // 2

    def reroot(self, new_root: int) -> None:
        """Reverse parent pointers along the old-root -> new_root path.

        Edge colors are untouched and no recourse is recorded.
        """
        path = [new_root]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        old_root = path[-1]
        if old_root == new_root:
            return
        for child, par in zip(path, path[1:]):
            self.parent[par] = child
        self.parent[new_root] = None
        size = self.comp_edges.pop(old_root, 0)
        if size:
            self.comp_edges[new_root] = size

    # -- coloring mutation ---------------------------------------------------

    def _use(self, v: int, color: int, delta: int) -> None:
        cnt = self._used[v].get(color, 0) + delta
        if cnt:
            self._used[v][color] = cnt
        else:
            self._used[v].pop(color, None)

    def set_color(self, e: EdgeKey, color: int) -> None:
        a, b = e
        old = self.edge_color(e)
        if color == old:
            return
        if not (1 <= color <= self.kappa):
            raise ImproperColoring(f"color {color} outside palette", color=color)
        if self._scope is not None:
            self._scope.baseline.setdefault(e, old)
        if old != 0:
            self._use(a, old, -1)
            self._use(b, old, -1)
        self.adjacency[a][b] = color
        self.adjacency[b][a] = color
        self._use(a, color, +1)
        self._use(b, color, +1)
        if old != 0 and not (self._scope is not None and e in self._scope.created):
            for hook in self.on_recolor:
                hook(e, old, color)

    def uncolor(self, e: EdgeKey) -> int:
        """Strip an edge's color (transit state); returns the old color."""
        a, b = e
        old = self.edge_color(e)
        if old == 0:
            return 0
        if self._scope is not None:
            self._scope.baseline.setdefault(e, old)
        self._use(a, old, -1)
        self._use(b, old, -1)
        self.adjacency[a][b] = 0
        self.adjacency[b][a] = 0
        return old

    def recourse_scope(self, record: bool = True) -> _RecourseScope:
        """Bracket one update; on exit the net recourse lands in the ledger."""
        return _RecourseScope(self, record)

    # -- invariants ---------------------------------------------------------

    def assert_proper(self) -> None:
        """Validate properness, the degree cap, acyclicity and rooting."""
        delta, kappa = self.palette.delta, self.kappa
        for v in range(self.n):
            if self.degree(v) > delta:
                raise ImproperColoring(f"vertex {v} exceeds degree {delta}", vertex=v)
            seen = set()
            for w, c in self.adjacency[v].items():
                if c == 0:
                    raise ImproperColoring(f"edge {edge_key(v, w)} uncolored", vertex=v)
                if not (1 <= c <= kappa):
                    raise ImproperColoring(f"color {c} outside palette", vertex=v, color=c)
                if c in seen:
                    raise ImproperColoring(
                        f"vertex {v} has two incident edges colored {c}",
                        vertex=v,
                        color=c,
                    )
                seen.add(c)
            if seen != self.used_colors(v):
                raise ImproperColoring(f"used-color cache stale at {v}", vertex=v)
        visited = set()
        for v in range(self.n):
            if v in visited:
                continue
            comp = self.component_vertices(v)
            visited.update(comp)
            edges = sum(len(self.adjacency[x]) for x in comp) // 2
            if edges != len(comp) - 1:
                raise ImproperColoring(
                    f"component of {v} has {edges} edges over {len(comp)} vertices"
                )
            roots = [x for x in comp if self.parent[x] is None]
            if len(roots) != 1:
                raise ImproperColoring(f"component of {v} has roots {roots}")
            cached = self.comp_edges.get(roots[0], 0)
            if cached != edges:
                raise ImproperColoring(
                    f"cached size {cached} != {edges} for component of {v}"
                )

    def subtree_sizes(self, root: int) -> dict:
        """Edge count of every rooted subtree in root's component (linear time)."""
        order = []
        stack = [(root, None)]
        while stack:
            v, par = stack.pop()
            order.append((v, par))
            for w in self.adjacency[v]:
                if w != par:
                    stack.append((w, v))
        sizes = {v: 0 for v, _ in order}
        for v, par in reversed(order):
            if par is not None:
                sizes[par] += sizes[v] + 1
        return sizes

    # -- serialization --------------------------------------------------------

    def snapshot(self) -> str:
        lines = [f"forest n={self.n} kappa={self.kappa} delta={self.palette.delta}"]
        for a, b in sorted(self.edges()):
            p = a if self.parent[b] == a else b
            lines.append(f"e {a} {b} {self.adjacency[a][b]} p={p}")
        return "\n".join(lines) + "\n"

    def state_hash(self) -> str:
        return hashlib.sha256(self.snapshot().encode()).hexdigest()

    @staticmethod
    def from_snapshot(text: str, ledger: Optional[RecourseLedger] = None) -> "ColoredForest":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("forest "):
            raise ParseError("missing 'forest' header", line=1)
        try:
            fields = dict(tok.split("=") for tok in lines[0].split()[1:])
            n, kappa, delta = (int(fields[k]) for k in ("n", "kappa", "delta"))
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad header: {exc}", line=1) from None
        forest = ColoredForest(n, Palette(delta, kappa - delta), ledger)
        oriented = []
        for idx, ln in enumerate(lines[1:], start=2):
            tok = ln.split()
            if len(tok) not in (4, 5) or tok[0] != "e":
                raise ParseError(f"bad edge line {ln!r}", line=idx)
            try:
                a, b, color = int(tok[1]), int(tok[2]), int(tok[3])
                p = int(tok[4][2:]) if len(tok) == 5 else a
            except ValueError:
                raise ParseError(f"bad edge line {ln!r}", line=idx) from None
            if p not in (a, b):
                raise ParseError(f"parent {p} not an endpoint of ({a},{b})", line=idx)
            e = forest.insert_topology(a, b)
            if color:
                forest.set_color(e, color)
            oriented.append((p, b if p == a else a, idx))
        # Restore the recorded rooting wholesale; replaying hints one edge at
        # a time would reroot components mid-parse.
        forest.parent = [None] * n
        for p, child, idx in oriented:
            if forest.parent[child] is not None:
                raise ParseError(f"vertex {child} has two parents", line=idx)
            forest.parent[child] = p
        forest.comp_edges = {}
        seen = set()
        for v in range(n):
            root = forest.find_root(v)
            if root not in seen:
                seen.add(root)
                size = forest._count_edges_from(root)
                if size:
                    forest.comp_edges[root] = size
        return forest

    def clone(self, ledger: Optional[RecourseLedger] = None) -> "ColoredForest":
        other = ColoredForest(self.n, self.palette, ledger)
        other.adjacency = [dict(adj) for adj in self.adjacency]
        other.parent = list(self.parent)
        other._used = [dict(u) for u in self._used]
        other.comp_edges = dict(self.comp_edges)
        return other
