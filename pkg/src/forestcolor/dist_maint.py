"""Distribution-maintaining randomized recoloring (rooted and unrooted).

The maintained invariant: after every update the coloring is distributed as
the top-down distribution of the current rooted forest -- each vertex colors
its child edges uniformly injectively from the palette minus its parent-edge
color -- which equals the uniform distribution over all proper colorings, so
components may be rerooted freely.

Repairs swap two colors along a single downward path: an insertion colors
the new edge uniformly from the parent's free colors and pushes the
resulting forbidden color down from the old root; a deletion re-inserts the
freed color at the new root with the correct probability.

Randomness is consumed in a documented order (see :mod:`forestcolor.rng`):
free-color choices index the ascending-sorted available set; the deletion
repair draws one value t in [0, kappa) and starts iff t < #children, reusing
t as the child index.  The compiled kernel replays identical streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import MissingEdge, NotRoot
from .forest import ColoredForest, Update, edge_key
from .rng import Rng

ALGORITHM_ID_ROOTED = "dist-maint-rooted"
ALGORITHM_ID_UNROOTED = "dist-maint"


@dataclass
class RepairTrace:
    """Recoloring walk of one repair: a downward path swapping two colors."""

    start: int
    swapped: list = field(default_factory=list)  # (edge, old, new)


def sample_uniform_coloring(f: ColoredForest, rng: Rng) -> None:
    """Color the whole forest top-down (uniform over proper colorings).

    Components are processed by ascending root id, vertices in preorder with
    children ascending; each child edge pops one index from the ascending
    list of still-allowed colors.
    """
    kappa = f.kappa
    roots = sorted({f.find_root(v) for v in range(f.n)})
    for root in roots:
        stack = [(root, None, 0)]
        while stack:
            v, par, pcol = stack.pop()
            kids = sorted(w for w in f.adjacency[v] if w != par)
            if not kids:
                continue
            avail = [c for c in range(1, kappa + 1) if c != pcol]
            picked = []
            for w in kids:
                c = avail.pop(rng.bounded(len(avail)))
                f.set_color(edge_key(v, w), c)
                picked.append((w, c))
            for w, c in reversed(picked):
                stack.append((w, v, c))
    return None


def fix_forbidden(f: ColoredForest, v: int, alpha: int, beta: int) -> RepairTrace:
    """v's parent-edge color changed alpha -> beta; swap the two colors down
    the (alpha, beta)-bicolored path below v.  Consumes no randomness."""
    trace = RepairTrace(start=v)
    a, b = alpha, beta
    while True:
        hit = None
        for w in f.children_sorted(v):
            if f.adjacency[v][w] == b:
                hit = w
                break
        if hit is None:
            return trace
        e = edge_key(v, hit)
        f.set_color(e, a)
        trace.swapped.append((e, b, a))
        v = hit
        a, b = b, a


def root_to_child(f: ColoredForest, r: int, beta: int, rng: Rng) -> RepairTrace:
    """Former root r gained a parent edge colored beta; restore its child
    distribution conditioned on beta being forbidden."""
    trace = RepairTrace(start=r)
    hit = None
    for w in f.children_sorted(r):
        if f.adjacency[r][w] == beta:
            hit = w
            break
    if hit is None:
        return trace
    avail = sorted(f.available_colors(r))
    alpha = avail[rng.bounded(len(avail))]
    e = edge_key(r, hit)
    f.set_color(e, alpha)
    trace.swapped.append((e, beta, alpha))
    deeper = fix_forbidden(f, hit, beta, alpha)
    trace.swapped.extend(deeper.swapped)
    return trace


def child_to_root(f: ColoredForest, r: int, alpha: int, rng: Rng) -> RepairTrace:
    """r lost its parent edge (colored alpha); with probability ell/kappa move
    alpha onto a uniformly random child edge and repair below."""
    trace = RepairTrace(start=r)
    kids = f.children_sorted(r)
    if not kids:
        return trace
    t = rng.bounded(f.kappa)
    if t >= len(kids):
        return trace
    w = kids[t]
    beta = f.adjacency[r][w]
    e = edge_key(r, w)
    f.set_color(e, alpha)
    trace.swapped.append((e, beta, alpha))
    deeper = fix_forbidden(f, w, beta, alpha)
    trace.swapped.extend(deeper.swapped)
    return trace


def _resolve_rooted_insert(f: ColoredForest, up: Update) -> tuple:
    if up.parent_hint is not None:
        p = up.parent_hint
        r = up.v if p == up.u else up.u
        if f.parent[r] is not None:
            raise NotRoot(f"vertex {r} is not a component root")
        return p, r
    u_root = f.parent[up.u] is None
    v_root = f.parent[up.v] is None
    if u_root == v_root:
        raise NotRoot(
            f"insertion ({up.u},{up.v}) needs a parent hint: "
            f"{'both' if u_root else 'neither'} endpoints are roots"
        )
    return (up.u, up.v) if v_root else (up.v, up.u)


def dm_update_rooted(
    f: ColoredForest, up: Update, rng: Rng, trace_out: Optional[list] = None
) -> int:
    """Rooted-model update: insertion attaches a root beneath a parent."""
    with f.recourse_scope() as rs:
        if up.kind == "+":
            p, r = _resolve_rooted_insert(f, up)
            e = f.insert_topology(p, r, parent_hint=p)
            avail = sorted(f.available_colors(p))
            f.set_color(e, avail[rng.bounded(len(avail))])
            trace = root_to_child(f, r, f.edge_color(e), rng)
        else:
            a, b = up.key
            if not f.has_edge(a, b):
                raise MissingEdge(f"edge {up.key} not present")
            child = b if f.parent[b] == a else a
            alpha = f.edge_color(up.key)
            f.delete_topology(up.key)
            trace = child_to_root(f, child, alpha, rng)
        if trace_out is not None:
            trace_out.append(trace)
    return rs.recourse


def dm_update_unrooted(
    f: ColoredForest, up: Update, rng: Rng, trace_out: Optional[list] = None
) -> int:
    """General update; reroots one component before an insertion.

    Both components small (<= delta edges): the endpoint of smaller degree
    becomes the attached root; otherwise the smaller component's endpoint.
    Ties prefer the smaller vertex id.  Deletions use the current rooting.
    """
    if up.kind != "+":
        return dm_update_rooted(f, up, rng, trace_out)
    su = f.component_edge_count(up.u)
    sv = f.component_edge_count(up.v)
    delta = f.palette.delta
    if su <= delta and sv <= delta:
        child = min((up.u, up.v), key=lambda x: (f.degree(x), x))
    else:
        child = min((up.u, up.v), key=lambda x: (f.component_edge_count(x), x))
    parent = up.v if child == up.u else up.u
    f.reroot(child)
    return dm_update_rooted(
        f, Update.insert(parent, child, parent=parent), rng, trace_out
    )


def recolor_probability(kappa: int, depth: int) -> Fraction:
    """Probability that an insertion above a tree recolors a fixed edge at
    the given depth: 1 / (kappa * (kappa-1)^(depth-1)), exactly."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return Fraction(1, kappa * (kappa - 1) ** (depth - 1))
