"""Shared builders for tests: explicit forests, random instances, ary trees."""

import random

from forestcolor.forest import ColoredForest, Palette, RecourseLedger, edge_key


def build_forest(n, palette, edges, ledger=None):
    """Forest from (parent, child, color) triples; color 0 leaves it uncolored."""
    f = ColoredForest(n, palette, ledger)
    for p, c, color in edges:
        e = f.insert_topology(p, c, parent_hint=p)
        if color:
            f.set_color(e, color)
    return f


def random_proper_coloring(f, rng):
    """Color every edge top-down: uniform injective child colors avoiding the
    parent color.  Samples proper colorings without bias."""
    kappa = f.kappa
    done = set()
    for v in range(f.n):
        root = f.find_root(v)
        if root in done:
            continue
        done.add(root)
        stack = [(root, None, 0)]
        while stack:
            x, par, pcol = stack.pop()
            avail = [c for c in range(1, kappa + 1) if c != pcol]
            kids = sorted(w for w in f.adjacency[x] if w != par)
            for w in kids:
                c = avail.pop(rng.randrange(len(avail)))
                f.set_color(edge_key(x, w), c)
                stack.append((w, x, c))


def random_instance(rng, max_n=10, kappa_cap=4):
    """Random colored forest plus one legal uncolored insertion.

    Returns (forest, new_edge).  n <= max_n, delta <= 4, kappa <= kappa_cap.
    """
    while True:
        delta = rng.choice([2, 3, 4])
        extra_max = min(delta - 2, kappa_cap - delta) if delta >= 3 else 0
        extra = rng.randint(0, max(0, extra_max))
        n = rng.randint(4, max_n)
        f = ColoredForest(n, Palette(delta, extra))
        target = rng.randint(1, n - 2)
        for _ in range(30 * n):
            if f.edge_count() >= target:
                break
            u, v = rng.randrange(n), rng.randrange(n)
            if u == v or f.has_edge(u, v):
                continue
            if f.find_root(u) == f.find_root(v):
                continue
            if f.degree(u) >= delta or f.degree(v) >= delta:
                continue
            f.insert_topology(u, v)
        random_proper_coloring(f, rng)
        candidates = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if f.find_root(u) != f.find_root(v)
            and f.degree(u) < delta
            and f.degree(v) < delta
        ]
        if candidates:
            f.assert_proper()
            return f, rng.choice(candidates)


def grow_complete_ary_tree(f, root, branching, depth, next_vertex):
    """Attach a complete `branching`-ary tree of the given depth under root.

    Vertices are taken from next_vertex upward; returns the next free id.
    Edges are left uncolored.
    """
    frontier = [root]
    for _ in range(depth):
        nxt = []
        for p in frontier:
            for _ in range(branching):
                f.insert_topology(p, next_vertex, parent_hint=p)
                nxt.append(next_vertex)
                next_vertex += 1
        frontier = nxt
    return next_vertex
