"""Insertion scheme with sublinear worst-case recourse at kappa = delta.

A plain bicolored swap from the new edge down the smaller tree can be forced
to run for Omega(N/delta) steps.  This scheme caps every swap: when a repair
path would exceed the cap it is cut short, and the cut edge takes a color
conflicting on both sides, deliberately splitting one conflict into (at
most) two that continue in small disjoint subtrees.  Levels double the
number of conflicts but shrink the subtrees geometrically, so with
cap D = ceil(N^(1/l) * 2^((l+1)/2) / (delta-2)) and l = round(sqrt(2 lg N))
levels, everything dies out within the planned budget.

The truncation point and conflict color are chosen to minimize the largest
spawned subtree (a strictly safer refinement of the average-case choice).
Runtime per insertion is O(N), dominated by the subtree-size pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import WrongPalette
from .forest import ColoredForest, EdgeKey, edge_key

ALGORITHM_ID = "sublinear-delta"


@dataclass(frozen=True)
class LevelPlan:
    """Level count and the uniform per-repair cap for one insertion."""

    ell: int
    cap: int

    @staticmethod
    def for_size(n_edges: int, delta: int) -> "LevelPlan":
        if delta < 3:
            raise WrongPalette("plan needs delta >= 3")
        if n_edges < 1:
            return LevelPlan(1, 1)
        lg = math.log2(n_edges)
        ell = max(1, round(math.sqrt(2 * lg)))
        cap = max(
            1,
            math.ceil(n_edges ** (1 / ell) * 2 ** ((ell + 1) / 2) / (delta - 2)),
        )
        return LevelPlan(ell, cap)

    def recourse_bound(self) -> int:
        """R = sum over levels i of 2^(i-1) * cap."""
        return (2**self.ell - 1) * self.cap


def _side_sizes(f: ColoredForest, e: EdgeKey):
    u1, u2 = e
    out = {}
    for side, other in ((u1, u2), (u2, u1)):
        seen = {side, other}
        stack = [side]
        cnt = 0
        while stack:
            x = stack.pop()
            for y in f.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    cnt += 1
                    stack.append(y)
        out[side] = cnt
    return out


def _subtree_sizes_blocked(f: ColoredForest, root: int, block: EdgeKey) -> dict:
    ba, bb = block
    order = []
    stack = [(root, None)]
    while stack:
        v, par = stack.pop()
        order.append((v, par))
        for w in f.adjacency[v]:
            if w != par and not ((v == ba and w == bb) or (v == bb and w == ba)):
                stack.append((w, v))
    sizes = {v: 0 for v, _ in order}
    for v, par in reversed(order):
        if par is not None:
            sizes[par] += sizes[v] + 1
    return sizes


def sublinear_insert(f: ColoredForest, e: EdgeKey, report: dict = None) -> int:
    """Color the freshly inserted edge `e`; recourse stays within the plan.

    Optionally fills `report` with the plan and per-level conflict counts.
    """
    if f.palette.extra != 0 or f.palette.delta < 3:
        raise WrongPalette("sublinear-delta requires kappa == delta >= 3")
    with f.recourse_scope() as rs:
        _sublinear_run(f, e, report)
    return rs.recourse


def _sublinear_run(f: ColoredForest, e: EdgeKey, report) -> None:
    u1, u2 = e
    shared = f.available_for_edge(e)
    if shared:
        f.set_color(e, min(shared))
        if report is not None:
            report.update(plan=None, conflicts_per_level={})
        return
    sizes = _side_sizes(f, e)
    r = min((u1, u2), key=lambda x: (sizes[x], x))
    o = u2 if r == u1 else u1
    plan = LevelPlan.for_size(sizes[r], f.palette.delta)
    sub = _subtree_sizes_blocked(f, r, e)
    conflicts_per_level = {1: 1}
    tasks = [(e, o, r, 1)]
    while tasks:
        g, a, b, level = tasks.pop()
        spawned = _repair_task(f, g, a, b, plan.cap if level <= plan.ell else None, sub)
        for c_edge, c_anchor, c_far in spawned:
            conflicts_per_level[level + 1] = conflicts_per_level.get(level + 1, 0) + 1
            tasks.append((c_edge, c_anchor, c_far, level + 1))
    if report is not None:
        report.update(plan=plan, conflicts_per_level=conflicts_per_level)


def _repair_task(f: ColoredForest, g: EdgeKey, a: int, b: int, cap, sub):
    """Fix the uncolored edge g = (a, b) whose a-side is already consistent.

    Returns spawned conflict tasks (edge, anchor, far endpoint).
    """
    avail_a = f.available_colors(a)
    avail_b = f.available_colors(b)
    both = avail_a & avail_b
    if both:
        f.set_color(g, min(both))
        return []
    alpha_a = min(avail_a)
    alpha_b = min(avail_b)
    # maximal (alpha_a, alpha_b)-bicolored path descending from b
    path = []
    cur, prev, want = b, a, alpha_a
    while True:
        nxt = None
        for w, c in f.adjacency[cur].items():
            if w != prev and c == want:
                nxt = w
                break
        if nxt is None:
            break
        path.append((edge_key(cur, nxt), want))
        cur, prev = nxt, cur
        want = alpha_b if want == alpha_a else alpha_a
    assert path, "no shared color implies the path starts"
    if cap is None or len(path) <= cap:
        for edge, old in path:
            f.set_color(edge, alpha_b if old == alpha_a else alpha_a)
        f.set_color(g, alpha_a)
        return []
    # truncate: swap a prefix, then give the cut edge a color that conflicts
    # on both sides, choosing cut index and color to minimize the largest
    # subtree a conflict escapes into
    pair = (alpha_a, alpha_b)
    others = [c for c in f.palette.colors() if c not in pair]
    best = None
    for i in range(1, cap + 1):
        cut = path[i - 1][0]
        # the cut edge's top endpoint touches the previous path edge (or b)
        top = b if i == 1 else (set(cut) & set(path[i - 2][0])).pop()
        bottom = cut[0] if cut[1] == top else cut[1]
        for gamma in others:
            spawn_sizes = []
            for vert in (top, bottom):
                hit = _incident_with_color(f, vert, gamma, exclude=cut)
                if hit is not None:
                    spawn_sizes.append(sub.get(hit, 0))
            key = (
                max(spawn_sizes) if spawn_sizes else -1,
                sum(spawn_sizes),
                i,
                gamma,
            )
            if best is None or key < best[0]:
                best = (key, i, gamma, top, bottom)
    _, i, gamma, top, bottom = best
    for edge, old in path[: i - 1]:
        f.set_color(edge, alpha_b if old == alpha_a else alpha_a)
    f.set_color(g, alpha_a)
    cut_edge = path[i - 1][0]
    spawned = []
    for vert in (top, bottom):
        w = _incident_with_color(f, vert, gamma, exclude=cut_edge)
        if w is not None:
            conflict = edge_key(vert, w)
            f.uncolor(conflict)
            spawned.append((conflict, vert, w))
    f.set_color(cut_edge, gamma)
    return spawned


def _incident_with_color(f: ColoredForest, v: int, color: int, exclude: EdgeKey):
    for w, c in f.adjacency[v].items():
        if c == color and edge_key(v, w) != exclude:
            return w
    return None
