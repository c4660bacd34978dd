"""Executable lower-bound constructions.

Static generators produce update sequences (plus scripted tie-breaks where a
construction needs to steer the algorithm's choices); adaptive adversaries
observe the current forest+coloring snapshot and emit the next update.
Every emitted update is legal: insertion endpoints lie in distinct
components with degree room, deletions name existing edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Optional

from .errors import (
    DepthTooSmall,
    InsufficientVertices,
    NotApplicable,
    PaletteError,
)
from .forest import ColoredForest, Palette, Update, edge_key
from .greedy import TieBreaker

WORKLOAD_IDS = (
    "adv:greedy-incremental",
    "adv:owner-stars",
    "adv:layered-cycle",
    "adv:shift-stars",
    "adv:delta2",
    "adv:rand-c0-inc",
    "adv:rand-c0-dyn",
    "adv:toggle",
)


@dataclass(frozen=True)
class SubPalette:
    """A subset of the palette; the complement is implied by kappa."""

    colors: frozenset

    @staticmethod
    def of(*colors) -> "SubPalette":
        return SubPalette(frozenset(colors))

    def complement(self, kappa: int) -> "SubPalette":
        return SubPalette(frozenset(range(1, kappa + 1)) - self.colors)

    def __len__(self):
        return len(self.colors)

    def sorted(self):
        return sorted(self.colors)


def check_layered_palette(palette: Palette, p: SubPalette) -> SubPalette:
    """Layered trees need c+1 <= |P| <= delta-1 (and the complement too)."""
    kappa, delta, c = palette.kappa, palette.delta, palette.extra
    q = p.complement(kappa)
    for part in (p, q):
        if not (c + 1 <= len(part) <= delta - 1):
            raise PaletteError(
                f"sub-palette sizes {len(p)}/{len(q)} invalid for "
                f"delta={delta}, c={c}"
            )
    return q


# ---------------------------------------------------------------------------
# incremental greedy lower bound (the ell-star construction)
# ---------------------------------------------------------------------------


@dataclass
class IncrementalLbPlan:
    n: int
    updates: list
    scripts: list  # one preference dict per insertion
    ell: int
    insertions: int
    predicted_recourse: int

    @property
    def amortized(self) -> Fraction:
        return Fraction(self.predicted_recourse, self.insertions)

    def tie_breaker(self) -> TieBreaker:
        return TieBreaker.scripted(self.scripts)


def gen_incremental_greedy_lb(palette: Palette) -> IncrementalLbPlan:
    """Hub + ell saturated stars; each star insertion pays exactly one
    recolor.  ell maximizes ell / (delta + (ell^2+(2c+1)ell)/2) subject to
    ell <= delta-1-c, falling back to ell = 1 when the optimum is infeasible.
    """
    delta, c = palette.delta, palette.extra
    if delta < 3:
        raise PaletteError("construction needs delta >= 3")

    def amortized(ell):
        return Fraction(2 * ell, 2 * delta + ell * ell + (2 * c + 1) * ell)

    bound = delta - 1 - c
    cands = {max(1, min(bound, f(math.sqrt(2 * delta)))) for f in (math.floor, math.ceil)}
    ell = max(cands, key=lambda l: (amortized(l), -l))

    updates, scripts = [], []
    hub = 0
    # hub leaves take the top colors ell+c+1 .. delta+c
    nxt = 1
    for j in range(1, delta - ell + 1):
        updates.append(Update.insert(hub, nxt))
        scripts.append({(hub, nxt): ell + c + j})
        nxt += 1
    for i in range(1, ell + 1):
        center = nxt
        nxt += 1
        for j in range(ell + c + 1 - i):
            updates.append(Update.insert(center, nxt))
            scripts.append({(center, nxt): i + j})
            nxt += 1
        updates.append(Update.insert(hub, center))
        scripts.append({(hub, center): i})
    insertions = len(updates)
    expected = delta + (ell * ell + (2 * c + 1) * ell) // 2
    assert insertions == expected
    return IncrementalLbPlan(nxt, updates, scripts, ell, insertions, ell)


# ---------------------------------------------------------------------------
# owner-star fully-dynamic adversary (Omega(1), approaching 1/2)
# ---------------------------------------------------------------------------


class OwnerStarAdversary:
    """Stars of degree delta-1 plus one owner vertex per (delta-1)-sub-palette.

    Each step connects an isolated star's center to the owner of its current
    palette; any connected star whose palette has since changed gets
    disconnected.  After s steps at least s - (c+1)*#palettes edges must have
    been recolored by the algorithm.
    """

    def __init__(self, palette: Palette, n: int, steps: int):
        delta, c, kappa = palette.delta, palette.extra, palette.kappa
        self.palette = palette
        self.subpalettes = [
            frozenset(s) for s in _k_subsets(range(1, kappa + 1), delta - 1)
        ]
        bins = len(self.subpalettes)
        n_stars = (c + 1) * bins + 1
        need = n_stars * delta + bins
        if n < need:
            raise InsufficientVertices(f"need n >= {need}, got {n}")
        self.owner_of = {
            pal: i for i, pal in enumerate(sorted(self.subpalettes, key=sorted))
        }
        self.centers = [bins + s * delta for s in range(n_stars)]
        self.steps_left = steps
        self.steps_total = steps
        self._built = False
        self._setup = []
        for s, center in enumerate(self.centers):
            for leaf in range(center + 1, center + delta):
                self._setup.append(Update.insert(center, leaf))
        self._queue = list(self._setup)
        self._recorded = {}  # center -> palette at connection time

    def star_palette(self, f: ColoredForest, center: int) -> frozenset:
        return frozenset(
            f.adjacency[center][w]
            for w in f.adjacency[center]
            if self._is_leaf_of(center, w)
        )

    def _is_leaf_of(self, center: int, w: int) -> bool:
        return center < w < center + self.palette.delta

    def next(self, f: ColoredForest) -> Optional[Update]:
        if self._queue:
            return self._queue.pop(0)
        # disconnect any connected star whose palette drifted
        for center, recorded in sorted(self._recorded.items()):
            if self.star_palette(f, center) != recorded:
                del self._recorded[center]
                owner = self.owner_of[recorded]
                return Update.delete(owner, center)
        if self.steps_left == 0:
            return None
        # connect an isolated star to its palette's owner
        for center in self.centers:
            if center in self._recorded:
                continue
            if any(not self._is_leaf_of(center, w) for w in f.adjacency[center]):
                continue  # still attached to an owner edge pending deletion
            pal = self.star_palette(f, center)
            owner = self.owner_of[pal]
            self._recorded[center] = pal
            self.steps_left -= 1
            return Update.insert(owner, center)
        raise AssertionError("no isolated star available")  # pragma: no cover

    def guaranteed_recolorings(self, steps: int) -> int:
        return steps - (self.palette.extra + 1) * len(self.subpalettes)


def _k_subsets(items, k):
    items = list(items)

    def rec(start, chosen):
        if len(chosen) == k:
            yield tuple(chosen)
            return
        for i in range(start, len(items)):
            chosen.append(items[i])
            yield from rec(i + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


# ---------------------------------------------------------------------------
# layered trees: direct construction, structural predicate, bootstrap
# ---------------------------------------------------------------------------


def build_layered_tree(
    f: ColoredForest, root: int, p: SubPalette, depth: int, next_vertex: int
) -> int:
    """Directly build a perfect P-layered tree of the given depth at `root`.

    Even-depth vertices fan out with the colors of P (ascending), odd-depth
    with the complement.  Returns the next unused vertex id.
    """
    q = check_layered_palette(f.palette, p)
    frontier = [(root, 0)]
    for level in range(depth):
        sub = p if level % 2 == 0 else q
        nxt_frontier = []
        for v, _ in frontier:
            for color in sub.sorted():
                if next_vertex >= f.n:
                    raise InsufficientVertices(
                        f"layered tree of depth {depth} does not fit in n={f.n}"
                    )
                e = f.insert_topology(v, next_vertex, parent_hint=v)
                f.set_color(e, color)
                nxt_frontier.append((next_vertex, level + 1))
                next_vertex += 1
        frontier = nxt_frontier
    return next_vertex


def layered_tree_vertices(palette: Palette, p: SubPalette, depth: int) -> int:
    q = p.complement(palette.kappa)
    total, width = 1, 1
    for level in range(depth):
        width *= len(p) if level % 2 == 0 else len(q)
        total += width
    return total


def is_layered(f: ColoredForest, root: int, p: SubPalette) -> bool:
    """Structural predicate for the layered condition at `root`."""
    q = p.complement(f.kappa)
    stack = [(root, None, 0)]
    while stack:
        v, par, depth = stack.pop()
        kids = [w for w in f.adjacency[v] if w != par]
        if not kids:
            continue
        want = p.colors if depth % 2 == 0 else q.colors
        colors = {f.adjacency[v][w] for w in kids}
        if len(kids) != len(want) or colors != want:
            return False
        stack.extend((w, v, depth + 1) for w in kids)
    return True


class LazyDriver:
    """Wraps an algorithm callable; raises NotApplicable on any recourse.

    The bootstrap only issues updates that admit a zero-recourse response, so
    a lazy algorithm (one that never recolors needlessly) stays at zero.
    """

    def __init__(self, f: ColoredForest, apply_update: Callable):
        self.f = f
        self.apply_update = apply_update

    def do(self, up: Update) -> None:
        recourse = self.apply_update(up)
        if recourse:
            raise NotApplicable(
                f"algorithm paid {recourse} recourse on a free update {up}; "
                "bootstrap requires a lazy algorithm"
            )


class LayeredBootstrap:
    """Reach layered trees from the empty forest against a lazy algorithm.

    Star farm: build delta-stars (the algorithm colors them), pick by
    pigeonhole a (c+1)-sub-palette P realized by enough stars, prune those
    stars down to P-stars.  Replication then mints further P-stars and
    complement-stars without ever forcing recourse, and layered trees are
    assembled bottom-up: attaching |X| complement-layered subtrees of depth
    k-1 under a fresh root forces the new edges to use exactly X.
    """

    def __init__(self, f: ColoredForest, driver: LazyDriver):
        self.f = f
        self.driver = driver
        self.free = list(range(f.n - 1, -1, -1))  # stack: low ids last
        self.p_stars = []  # centers of available P-stars
        self.q_stars = []
        self.p: Optional[SubPalette] = None

    def _take_vertex(self) -> int:
        while self.free:
            v = self.free.pop()
            if self.f.degree(v) == 0:
                return v
        raise InsufficientVertices("bootstrap ran out of fresh vertices")

    def _release(self, v: int) -> None:
        self.free.append(v)

    def farm_stars(self, p_target: int) -> SubPalette:
        """Build delta-stars until some (c+1)-palette has p_target stars."""
        f, driver = self.f, self.driver
        delta, c = f.palette.delta, f.palette.extra
        counts = {}
        pending = {}
        while True:
            center = self._take_vertex()
            leaves = [self._take_vertex() for _ in range(delta)]
            for leaf in leaves:
                driver.do(Update.insert(center, leaf))
            star_pal = frozenset(f.adjacency[center][w] for w in leaves)
            for sub in _k_subsets(sorted(star_pal), c + 1):
                key = frozenset(sub)
                counts[key] = counts.get(key, 0) + 1
                pending.setdefault(key, []).append((center, leaves))
                if counts[key] >= p_target:
                    self.p = SubPalette(key)
                    self._prune_to_p_stars(pending[key])
                    return self.p

    def _prune_to_p_stars(self, stars) -> None:
        f, driver = self.f, self.driver
        keep = self.p.colors
        for center, leaves in stars:
            for leaf in leaves:
                if f.adjacency[center][leaf] not in keep:
                    driver.do(Update.delete(center, leaf))
                    self._release(leaf)
            self.p_stars.append(center)

    def _stock(self) -> int:
        """P-stars that must stay on hand so replication can always run."""
        p, q = self.p, self.p.complement(self.f.kappa)
        return len(p) * len(q)

    def _ensure_p_stars(self, count: int) -> None:
        while len(self.p_stars) < count:
            self.replicate_p_star()

    def replicate_p_star(self) -> None:
        """|P| * |Pbar| P-stars beget one more P-star (stars are reusable)."""
        f, driver = self.f, self.driver
        p, q = self.p, self.p.complement(f.kappa)
        need = len(p) * len(q)
        if len(self.p_stars) < need:
            raise InsufficientVertices("not enough P-stars to replicate")
        groups = [self.p_stars[i * len(q) : (i + 1) * len(q)] for i in range(len(p))]
        parents = []
        for group in groups:
            parent = self._take_vertex()
            for center in group:
                driver.do(Update.insert(parent, center))
            parents.append(parent)
        grand = self._take_vertex()
        for parent in parents:
            driver.do(Update.insert(grand, parent))
        for group, parent in zip(groups, parents):
            for center in group:
                driver.do(Update.delete(parent, center))
        # grand + parents now form a fresh P-star
        self.p_stars.append(grand)

    def make_q_star(self) -> None:
        """Convert |Pbar| P-stars into one complement-star (centers consumed)."""
        f, driver = self.f, self.driver
        q = self.p.complement(f.kappa)
        self._ensure_p_stars(self._stock() + len(q))
        parent = self._take_vertex()
        consumed = [self.p_stars.pop() for _ in range(len(q))]
        for center in consumed:
            driver.do(Update.insert(parent, center))
        for center in consumed:
            for leaf in list(f.adjacency[center]):
                if leaf != parent:
                    driver.do(Update.delete(center, leaf))
                    self._release(leaf)
        self.q_stars.append(parent)

    def build_tree(self, p_side: bool, depth: int) -> int:
        """Assemble a depth-`depth` layered tree; returns its root."""
        f, driver = self.f, self.driver
        assert depth >= 1
        if depth == 1:
            if p_side:
                self._ensure_p_stars(self._stock() + 1)
                return self.p_stars.pop()
            if not self.q_stars:
                self.make_q_star()
            return self.q_stars.pop()
        sub = self.p if p_side else self.p.complement(f.kappa)
        roots = [self.build_tree(not p_side, depth - 1) for _ in range(len(sub))]
        root = self._take_vertex()
        for r in roots:
            driver.do(Update.insert(root, r))
        return root


def bootstrap_layered(
    f: ColoredForest,
    apply_update: Callable,
    depth: int,
    want_p: int = 1,
    want_q: int = 1,
):
    """Construct `want_p` P-layered and `want_q` complement-layered trees of
    the given depth from the empty forest, driving a lazy algorithm.

    Returns (p_roots, q_roots, P).  Raises NotApplicable if the algorithm
    recolors on a free update, InsufficientVertices if n is too small.
    """
    driver = LazyDriver(f, apply_update)
    boot = LayeredBootstrap(f, driver)
    c, delta = f.palette.extra, f.palette.delta
    boot.farm_stars(p_target=(c + 1) * (delta - 1))
    p_roots = [boot.build_tree(True, depth) for _ in range(want_p)]
    q_roots = [boot.build_tree(False, depth) for _ in range(want_q)]
    return p_roots, q_roots, boot.p


# ---------------------------------------------------------------------------
# the 6-update layered cycle (greedy pays Theta(log_Delta n) amortized)
# ---------------------------------------------------------------------------


def _tree_path(f: ColoredForest, a: int, b: int) -> list:
    """Vertices of the unique a-to-b path (BFS over adjacency)."""
    prev = {a: None}
    frontier = [a]
    while frontier and b not in prev:
        nxt = []
        for x in frontier:
            for y in f.adjacency[x]:
                if y not in prev:
                    prev[y] = x
                    nxt.append(y)
        frontier = nxt
    path = [b]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


class GreedyCycle:
    """Two perfect layered trees plus the 6-update cycle that forces greedy
    to recolor the same back-and-forth paths, paying 2*d1 + 2*d2 + 1 per
    cycle while restoring the starting state."""

    def __init__(self, palette: Palette, d: int):
        self.palette = palette
        self.d = d
        self.d1 = d // 3
        self.d2 = self.d1 - 1
        if self.d2 < 1:
            raise DepthTooSmall(f"cycle needs depth >= 6, got {d}")
        c = palette.extra
        self.p = SubPalette(frozenset(range(1, c + 2)))
        self.q = self.p.complement(palette.kappa)
        self.size1 = layered_tree_vertices(palette, self.p, d)
        self.size2 = layered_tree_vertices(palette, self.q, d)
        # the builder numbers vertices level by level, so the leftmost vertex
        # of each level (and its first child) have closed-form ids
        self.r1 = 0
        self.r2 = self.size1
        self.u1 = self._level_start(self.p, self.d1)
        self.r4 = self._level_start(self.p, self.d1 + 1)
        self.u2 = self.size1 + self._level_start(self.q, self.d2)
        self.r3 = self.size1 + self._level_start(self.q, self.d2 + 1)

    def _level_start(self, top: SubPalette, level: int) -> int:
        sizes = (len(top), len(top.complement(self.palette.kappa)))
        start, width = 0, 1
        for lvl in range(level):
            start += width
            width *= sizes[lvl % 2]
        return start

    def required_vertices(self) -> int:
        return self.size1 + self.size2

    @property
    def predicted_cycle_recourse(self) -> int:
        return 2 * self.d1 + 2 * self.d2 + 1

    def setup(self, f: ColoredForest) -> None:
        if f.n < self.required_vertices():
            raise InsufficientVertices(
                f"cycle at depth {self.d} needs n >= {self.required_vertices()}"
            )
        nxt = build_layered_tree(f, self.r1, self.p, self.d, 1)
        assert nxt == self.r2
        build_layered_tree(f, self.r2, self.q, self.d, nxt + 1)
        assert self.u1 == self._descend(f, self.r1, self.d1)
        assert self.r4 == f.children_sorted(self.u1)[0]
        assert self.u2 == self._descend(f, self.r2, self.d2)
        assert self.r3 == f.children_sorted(self.u2)[0]

    @staticmethod
    def _descend(f: ColoredForest, root: int, steps: int) -> int:
        v = root
        for _ in range(steps):
            v = f.children_sorted(v)[0]
        return v

    def cycle_updates(self) -> list:
        return [
            Update.delete(self.u1, self.r4),
            Update.delete(self.u2, self.r3),
            Update.insert(self.r1, self.r2, parent=self.r1),
            Update.insert(self.u2, self.r3, parent=self.u2),
            Update.delete(self.r1, self.r2),
            Update.insert(self.u1, self.r4, parent=self.u1),
        ]

    def hole_of(self, up: Update):
        """(hole vertex, recorded key) for an insert; the recoloring path
        must end on the hole's incident path edge taking the recorded color."""
        key = up.key
        if key == edge_key(self.r1, self.r2):
            return self.u2, edge_key(self.u2, self.r3)
        if key == edge_key(self.u2, self.r3):
            return self.u1, edge_key(self.u1, self.r4)
        return self.r1, edge_key(self.r1, self.r2)

    def prefs_for(self, f: ColoredForest, up: Update, recorded: dict) -> dict:
        """Scripted preference pinning the hole edge to the deleted color."""
        if up.kind != "+":
            return {}
        hole, deleted_key = self.hole_of(up)
        color = recorded.get(deleted_key)
        if color is None:
            return {}
        root = f.find_root(hole)
        start = up.u if f.find_root(up.u) == root and up.u != hole else up.v
        walk = _tree_path(f, start, hole)
        last_edge = edge_key(walk[-2], walk[-1])
        return {last_edge: color}

    def run(self, f: ColoredForest, algorithm, cycles: int, scripted: bool = False):
        """Drive `algorithm(f, update, tb)` through full cycles.

        Returns (per_cycle_recourse, hashes_match_initial) lists.
        """
        base_hash = f.state_hash()
        recorded = {}
        per_cycle, matches = [], []
        for _ in range(cycles):
            total = 0
            for up in self.cycle_updates():
                tb = None
                if scripted and up.kind == "+":
                    tb = TieBreaker.scripted([self.prefs_for(f, up, recorded)])
                if up.kind == "-":
                    recorded[up.key] = f.edge_color(up.key)
                total += algorithm(f, up, tb)
            per_cycle.append(total)
            matches.append(f.state_hash() == base_hash)
        return per_cycle, matches


# ---------------------------------------------------------------------------
# Delta=2 path doubling (and its use inside the shift-star reduction)
# ---------------------------------------------------------------------------


def doubling_length(i: int) -> int:
    """Closed form of d_1=1, d_{i+1} = 2 d_i + 1 + (d_i mod 2)."""
    return (4 * 2**i - 4 - (i % 2)) // 3


class PathDoublingAdversary:
    """Merge pairs of equal-length paths, always linking endpoints whose free
    colors mismatch, so a forced recoloring of the shorter side occurs.

    Works over an arbitrary terminal set with a caller-supplied `free2`
    reduced-free-color probe (identity for Delta=2; star-complement for the
    shift reduction).  `choose(ends, want_diff)` makes the adaptive choice;
    pass a seeded coin instead to get the oblivious variant.
    """

    def __init__(self, terminals, free2, rng=None):
        self.free2 = free2
        self.rng = rng  # None: adaptive (deterministic targets)
        self.pool = list(terminals)[::-1]
        self.level = []  # (endA, endB, length)
        self.next_level = []
        self.length = 1
        self.merges = []  # (len1, len2) at merge time
        self._queue = []
        self._carry = None

    def _pair_up(self):
        # keep ~1/4 of the terminals spare: odd-length levels each consume one
        # extension vertex per merge, about a third of the paired count
        spare = (len(self.pool) + 3) // 4
        while len(self.pool) - spare >= 2:
            a = self.pool.pop()
            b = self.pool.pop()
            self._queue.append(Update.insert(a, b))
            self.level.append((a, b, 1))

    def next(self, f: ColoredForest) -> Optional[Update]:
        if not self.level and not self.next_level and not self._queue:
            self._pair_up()
        if self._queue:
            return self._queue.pop(0)
        if self._carry is not None:
            # the extension insert was applied; now merge
            p1, p2 = self._carry
            self._carry = None
            return self._merge(f, p1, p2)
        if len(self.level) < 2:
            if len(self.next_level) < 2:
                return None
            self.level = self.next_level
            self.next_level = []
            self.length = self.level[0][2]
        p1 = self.level.pop(0)
        p2 = self.level.pop(0)
        if p1[2] % 2 == 1:
            if not self.pool:
                return None
            old_end = p1[1]
            v = self.pool.pop()
            self._carry = ((p1[0], v, p1[2] + 1), p2)
            return Update.insert(old_end, v)
        return self._merge(f, p1, p2)

    def _merge(self, f: ColoredForest, p1, p2) -> Update:
        a, b, len1 = p1
        w = p2[0]
        if self.rng is not None:
            end = (a, b)[self.rng.bounded(2)]
        else:
            fw = self.free2(f, w)
            end = a if not (self.free2(f, a) & fw) else b
        other1 = b if end == a else a
        self.merges.append((len1, p2[2]))
        self.next_level.append((other1, p2[1], len1 + p2[2] + 1))
        return Update.insert(end, w)


def gen_delta2_doubling(n: int, seed: Optional[int] = None):
    """Delta=2 doubling schedule over n vertices.

    With `seed` given, endpoint choices are fair coins (the oblivious variant
    for randomized algorithms); otherwise the adversary is adaptive and
    forces a mismatch on every merge.  Returns the adversary; lengths follow
    d_1 = 1, d_{i+1} = 2 d_i + 1 + (d_i mod 2).
    """
    from .rng import Rng

    free2 = lambda f, v: f.available_colors(v)
    rng = Rng(seed) if seed is not None else None
    return PathDoublingAdversary(range(n), free2, rng=rng)


def expected_doubling_recourse(n: int):
    """Per-level (length, merges, forced recourse >= length) table for the
    adaptive schedule with the standard 1/4 spare reservation."""
    pool = n - (n + 3) // 4
    paths = pool // 2
    out = []
    length = 1
    while paths >= 2:
        merges = paths // 2
        out.append((length, merges, merges * length))
        length = 2 * length + 1 + (length % 2)
        paths = merges
    return out


# ---------------------------------------------------------------------------
# shift-star reduction: make most colors unusable for shift-based algorithms
# ---------------------------------------------------------------------------


class ShiftStarReduction:
    """Group same-palette stars and play a reduced game on their centers.

    For c = 0 the stars have degree delta-2, so only two colors remain
    usable on center-center edges and the inner game is the Delta=2 doubling
    adversary.  For c >= 1 the stars have degree delta-c-2 and the reduction
    exposes a Delta' = c+2 instance on the centers; this object then only
    provides the setup and the grouping (the inner game is caller-supplied).
    """

    def __init__(self, palette: Palette, n: int):
        self.palette = palette
        delta, c = palette.delta, palette.extra
        self.star_degree = delta - c - 2
        if self.star_degree < 1:
            raise PaletteError("reduction needs delta - c - 2 >= 1")
        self.per_star = self.star_degree + 1
        self.n_stars = n // self.per_star
        if self.n_stars < 4:
            raise InsufficientVertices("need at least 4 stars")
        self.centers = [s * self.per_star for s in range(self.n_stars)]
        self._setup = []
        for center in self.centers:
            for leaf in range(center + 1, center + self.per_star):
                self._setup.append(Update.insert(center, leaf))
        self._groups = None
        self._inner = []
        self._inner_idx = 0
        self.setup_len = len(self._setup)

    def star_palette(self, f: ColoredForest, center: int) -> frozenset:
        return frozenset(
            f.adjacency[center][w]
            for w in f.adjacency[center]
            if center < w < center + self.per_star
        )

    def reduced_palette(self) -> Palette:
        return Palette(self.palette.extra + 2, self.palette.extra)

    def groups(self, f: ColoredForest) -> dict:
        by_pal = {}
        for center in self.centers:
            by_pal.setdefault(self.star_palette(f, center), []).append(center)
        return by_pal

    def next(self, f: ColoredForest) -> Optional[Update]:
        if self._setup:
            return self._setup.pop(0)
        if self.palette.extra != 0:
            raise NotApplicable(
                "built-in inner game only covers c = 0; use groups() to "
                "drive a reduced-instance adversary yourself"
            )
        if self._groups is None:
            self._groups = self.groups(f)
            kappa = self.palette.kappa
            for pal, centers in sorted(self._groups.items(), key=lambda kv: sorted(kv[0])):
                rest = sorted(frozenset(range(1, kappa + 1)) - pal)
                free2 = (
                    lambda f_, v, allowed=frozenset(rest): f_.available_colors(v)
                    & allowed
                )
                self._inner.append(PathDoublingAdversary(centers, free2))
        while self._inner_idx < len(self._inner):
            up = self._inner[self._inner_idx].next(f)
            if up is not None:
                return up
            self._inner_idx += 1
        return None

    def predicted_total_bound(self, n: int):
        """(K, B, (K/4) * lg(K/B)) for the c = 0 variant."""
        delta = self.palette.delta
        K = n // (delta - 1)
        B = comb(delta, 2)
        return K, B, K / 4 * math.log2(K / B)


# ---------------------------------------------------------------------------
# randomized c = 0 lower bounds
# ---------------------------------------------------------------------------


def gen_rand_c0_incremental(palette: Palette, gadgets: int, seed: int):
    """Pairs of (delta-1)-stars linked directly or through an intermediary on
    a fair coin; each gadget forces >= 1/2 expected recourse.

    Returns (updates, inserts_per_gadget_list).
    """
    from .rng import Rng

    if palette.extra != 0:
        raise PaletteError("construction is for kappa == delta")
    delta = palette.delta
    rng = Rng(seed)
    updates = []
    sizes = []
    nxt = 0
    for _ in range(gadgets):
        centers = []
        for _ in range(2):
            center = nxt
            nxt += 1
            for _ in range(delta - 1):
                updates.append(Update.insert(center, nxt))
                nxt += 1
            centers.append(center)
        v1, v2 = centers
        before = len(updates)
        if rng.chance(1, 2):
            updates.append(Update.insert(v1, v2))
        else:
            u = nxt
            nxt += 1
            updates.append(Update.insert(v1, u))
            updates.append(Update.insert(v2, u))
        sizes.append(len(updates) - before + 2 * (delta - 1))
    return updates, sizes, nxt


def gen_rand_c0_dynamic(palette: Palette, h: int, phases: int):
    """Two complete (delta-1)-ary depth-h trees; alternate a direct root link
    with a shared-intermediary link, deleting in between.  Every conflicting
    phase forces a full root-to-leaf recoloring (length h).

    Returns (setup_updates, phase_updates, r1, r2, u).
    """
    if palette.extra != 0:
        raise PaletteError("construction is for kappa == delta")
    b = palette.delta - 1
    setup, size = _complete_tree_updates(b, h, base=0)
    setup2, size2 = _complete_tree_updates(b, h, base=size)
    setup += setup2
    r1, r2, u = 0, size, size + size2
    phase_updates = []
    for i in range(phases):
        if i % 2 == 0:
            phase_updates.append(Update.insert(r1, r2, parent=r1))
            phase_updates.append(Update.delete(r1, r2))
        else:
            phase_updates.append(Update.insert(u, r1, parent=u))
            phase_updates.append(Update.insert(u, r2, parent=u))
            phase_updates.append(Update.delete(u, r1))
            phase_updates.append(Update.delete(u, r2))
    return setup, phase_updates, r1, r2, u


def _complete_tree_updates(branching: int, depth: int, base: int):
    """Rooted insertions building a complete tree top-down (heap numbering)."""
    size = 1
    level = 1
    for _ in range(depth):
        level *= branching
        size += level
    updates = []
    for k in range(1, size):
        parent = (k - 1) // branching + base
        updates.append(Update.insert(parent, base + k, parent=parent))
    return updates, size


# ---------------------------------------------------------------------------
# toggle workload (tightness of the expected-recourse bound)
# ---------------------------------------------------------------------------


def gen_toggle_workload(palette: Palette, h: int, toggles: int):
    """Setup plus `toggles` insert/delete repetitions of the root link.

    Returns (setup_updates, toggle_updates, expected_insert_recourse).
    """
    b = palette.delta - 1
    setup, size = _complete_tree_updates(b, h, base=0)
    setup2, _ = _complete_tree_updates(b, h, base=size)
    setup += setup2
    r1, r2 = 0, size
    seq = []
    for _ in range(toggles):
        seq.append(Update.insert(r1, r2, parent=r1))
        seq.append(Update.delete(r1, r2))
    return setup, seq, expected_toggle_recourse(palette, h)


def expected_toggle_recourse(palette: Palette, h: int) -> Fraction:
    """((delta-1)/kappa) * sum_{i<h} ((delta-1)/(kappa-1))^i, exactly."""
    delta, kappa = palette.delta, palette.kappa
    p = Fraction(delta - 1, kappa - 1)
    total = sum(p**i for i in range(h))
    return Fraction(delta - 1, kappa) * total


# ---------------------------------------------------------------------------
# how large n must be (exact counting forms of the proofs' thresholds)
# ---------------------------------------------------------------------------


def adversary_thresholds(palette: Palette):
    """(n0, n1, n2): vertices needed by the owner-star adversary, the layered
    bootstrap, and the shift-star bootstrap, via exact binomials.

    n0 = N*delta + B with B = C(kappa, c+1), N = (c+1)*B + 1 (stars of degree
    delta-1 plus one owner per sub-palette).  n1 packs delta-stars, each
    covering C(delta, c+1) possible (c+1)-stars, until (c+1)(delta-1) stars
    share a palette; one spare vertex per star pays for tree assembly.  n2
    repeats n1's packing for stars of degree x = min(2c+2, delta-c-2) and
    must also cover the reduced delta' = c+2 instance.
    """
    delta, c, kappa = palette.delta, palette.extra, palette.kappa
    if delta < 3:
        raise PaletteError("thresholds need delta >= 3")
    b_owner = comb(kappa, c + 1)
    n_stars = (c + 1) * b_owner + 1
    n0 = n_stars * delta + b_owner

    n1 = _packing_threshold(delta, kappa, c + 1, (c + 1) * (delta - 1))

    x = min(2 * c + 2, delta - (c + 2))
    if x >= 1:
        n2_pack = _packing_threshold(delta, kappa, x, x * (kappa - x))
    else:
        n2_pack = 0
    inner = Palette(c + 2, c)
    n1_inner = _packing_threshold(
        inner.delta, inner.kappa, c + 1, (c + 1) * (inner.delta - 1)
    )
    n2 = max(n2_pack, n1_inner)
    return n0, n1, n2


def _packing_threshold(delta: int, kappa: int, star_size: int, needed: int) -> int:
    """Vertices to pigeonhole `needed` same-palette stars of degree
    `star_size` out of packed delta-stars, plus one spare per delta-star."""
    b = comb(kappa, star_size)
    target = (needed - 1) * b + 1
    per_delta_star = comb(delta, star_size)
    n_delta_stars = -(-target // per_delta_star)  # ceil
    return n_delta_stars * (delta + 2)


# ---------------------------------------------------------------------------
# adversarial caterpillar merge (hard instance for bicolored-path repairs)
# ---------------------------------------------------------------------------


def build_caterpillar_merge(f: ColoredForest, n_spine: int):
    """Colored caterpillar plus a slightly larger blob inside `f`.

    kappa == delta required.  The spine alternates colors 1/2 and every
    spine vertex is saturated with leaves on the remaining colors, so the
    repair of the returned merge edge starts on a bicolored path running the
    whole spine.  The blob's endpoint has only color 1 free while the spine
    end has only color 2, forcing the conflict.  Returns
    (merge_edge_endpoints, caterpillar_edge_count).
    """
    palette = f.palette
    delta, kappa = palette.delta, palette.kappa
    if palette.extra != 0 or delta < 3:
        raise PaletteError("caterpillar instance needs kappa == delta >= 3")
    leaf_colors = list(range(3, kappa + 1))
    nxt = n_spine + 1
    for i in range(n_spine):
        f.set_color(f.insert_topology(i, i + 1, parent_hint=i), 1 + (i % 2))
    for i in range(n_spine + 1):
        for c in leaf_colors:
            if f.degree(i) >= delta - (1 if i == 0 else 0):
                break
            f.set_color(f.insert_topology(i, nxt, parent_hint=i), c)
            nxt += 1
    cat_edges = f.edge_count()
    u = nxt
    nxt += 1
    first_leaf = None
    for c in range(2, delta + 1):
        leaf = nxt
        nxt += 1
        f.set_color(f.insert_topology(u, leaf, parent_hint=u), c)
        if first_leaf is None:
            first_leaf = leaf
    tail = first_leaf
    while nxt < f.n and f.component_edge_count(u) <= cat_edges + 1:
        e2 = f.insert_topology(tail, nxt, parent_hint=tail)
        f.set_color(e2, sorted(f.available_for_edge(e2))[0])
        tail = nxt
        nxt += 1
    if f.component_edge_count(u) <= cat_edges:
        raise InsufficientVertices("blob side could not outgrow the caterpillar")
    return (u, 0), cat_edges


def caterpillar_vertices(palette: Palette, n_spine: int) -> int:
    """Forest size that comfortably fits build_caterpillar_merge."""
    kappa = palette.kappa
    cat = (n_spine + 1) * (kappa - 1)
    return cat + 1 + cat + 4
