"""Monte-Carlo drivers for the statistical verification suites.

These run rooted update scripts through the (possibly compiled) kernel
backend many times with split seeds, producing coloring histograms, repair
recourse samples, and per-depth recoloring frequencies.  The object-level
algorithms in :mod:`forestcolor.dist_maint` replay identical streams; the
kernel is just the fast twin (see tests/test_kernels.py).
"""

from __future__ import annotations

from . import kernels
from .errors import NotRoot
from .forest import ColoredForest, Palette
from .oracles import ColoringHistogram, enumerate_proper_colorings
from .rng import mix_seed


def compile_rooted_updates(n: int, palette: Palette, updates):
    """Turn a rooted-model update list into kernel primitives.

    Returns (ops, sim) where ops are ('i', parent, child) / ('d', parent,
    child) tuples and sim is the final topology (a ColoredForest without
    colors).  Orientation is resolved once here; it is deterministic, so
    every Monte-Carlo trial can replay the primitive list directly.
    """
    sim = ColoredForest(n, palette)
    ops = []
    for up in updates:
        if up.kind == "+":
            if up.parent_hint is not None:
                p = up.parent_hint
                r = up.v if p == up.u else up.u
            else:
                u_root = sim.parent[up.u] is None
                v_root = sim.parent[up.v] is None
                if u_root == v_root:
                    raise NotRoot(f"ambiguous rooted insertion ({up.u},{up.v})")
                p, r = (up.u, up.v) if v_root else (up.v, up.u)
            if sim.parent[r] is not None:
                raise NotRoot(f"vertex {r} is not a root")
            sim.insert_topology(p, r, parent_hint=p)
            ops.append(("i", p, r))
        else:
            a, b = up.key
            child = b if sim.parent[b] == a else a
            par = a if child == b else b
            sim.delete_topology(up.key)
            ops.append(("d", par, child))
    return ops, sim


def kernel_apply(kf, ops, rng):
    """Apply primitive ops; returns the recourse list, one entry per op."""
    out = []
    for kind, p, c in ops:
        if kind == "i":
            out.append(kf.insert(p, c, rng))
        else:
            out.append(kf.delete(p, c, rng))
    return out


def script_histogram(
    n: int,
    palette: Palette,
    updates,
    trials: int,
    seed: int,
    backend=None,
):
    """Histogram of final colorings over seeded runs of one update script.

    Returns (histogram, support_size) where the support is the number of
    proper colorings of the script's final topology.
    """
    backend = backend or kernels
    ops, sim = compile_rooted_updates(n, palette, updates)
    final_edges = sorted(sim.edges())
    child_of = [b if sim.parent[b] == a else a for a, b in final_edges]
    support = len(enumerate_proper_colorings(final_edges, palette.kappa))
    kf = backend.KernelForest(n, palette.kappa)
    empty_parents = [-1] * n
    empty_colors = [0] * n
    hist = ColoringHistogram()
    for t in range(trials):
        kf.reset(empty_parents, empty_colors)
        rng = backend.KernelRng(mix_seed(seed, t))
        kernel_apply(kf, ops, rng)
        colors = kf.colors()
        hist.add(",".join(str(colors[c]) for c in child_of))
    return hist, support


def complete_tree_parents(branching: int, depth: int, offset: int = 0):
    """Heap-numbered complete tree: vertex k's parent is (k-1)//branching.

    Returns (parents, size, depths) with vertex ids shifted by offset.
    """
    size = 1
    level = 1
    for _ in range(depth):
        level *= branching
        size += level
    parents = [-1] * size
    depths = [0] * size
    for k in range(1, size):
        parents[k] = (k - 1) // branching + offset
        depths[k] = depths[(k - 1) // branching] + 1
    return parents, size, depths


def toggle_run(
    delta: int,
    kappa: int,
    h: int,
    toggles: int,
    seed: int,
    backend=None,
):
    """Two complete (delta-1)-ary depth-h trees; insert/delete (r1, r2)
    repeatedly.  Returns (insert_recourses, delete_recourses).

    Takes raw (delta, kappa) so palettes beyond the delta+c cap (used by the
    toggle-expectation checks) can be exercised too.
    """
    backend = backend or kernels
    b = delta - 1
    parents1, size, _ = complete_tree_parents(b, h, offset=0)
    parents2, _, _ = complete_tree_parents(b, h, offset=size)
    parents = parents1 + parents2
    n = 2 * size
    kf = backend.KernelForest(n, kappa)
    kf.reset(parents, [0] * n)
    rng = backend.KernelRng(seed)
    kf.sample_colors(rng)
    r1, r2 = 0, size
    inserts, deletes = [], []
    for _ in range(toggles):
        inserts.append(kf.insert(r1, r2, rng))
        deletes.append(kf.delete(r1, r2, rng))
    return inserts, deletes


def insertion_depth_counts(
    palette: Palette,
    h: int,
    trials: int,
    seed: int,
    backend=None,
):
    """Fresh top-down coloring per trial, then one insertion above the root;
    counts, per depth, the trials whose repair recolored an edge there."""
    backend = backend or kernels
    b = palette.delta - 1
    parents, size, depths = complete_tree_parents(b, h)
    n = size + 1
    p = size  # isolated parent-to-be
    parents = parents + [-1]
    colors0 = [0] * n
    kf = backend.KernelForest(n, palette.kappa)
    counts = {d: 0 for d in range(1, h + 1)}
    for t in range(trials):
        kf.reset(parents, colors0)
        rng = backend.KernelRng(mix_seed(seed, t))
        kf.sample_colors(rng)
        kf.insert(p, 0, rng)
        for child in kf.last_recolored:
            counts[depths[child]] += 1
    return counts
