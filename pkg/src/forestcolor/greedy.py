"""Deterministic greedy update algorithms.

Four insertion strategies over a :class:`~forestcolor.forest.ColoredForest`:

* :func:`greedy_insert` -- exact minimum recourse.  Roots the two linked
  trees at the new edge's endpoints and solves, bottom-up, a table of
  subproblems ``P(v, beta)`` = cheapest recoloring of v's subtree given that
  v's parent edge takes color ``beta``.  Each table entry is a minimum-cost
  injective assignment of v's children to colors distinct from ``beta``
  (cost 1 per child edge whose color changes), solved by a bipartite
  assignment routine.
* :func:`greedy_shift_insert` -- cheapest *shift chain*: repeatedly color
  the uncolored edge with a color free at one endpoint and uncolor the
  unique conflicting edge at the other.  Chains may turn around a vertex
  (fans).  Computed as a shortest path over (edge, entry, freed-color)
  states.
* :func:`greedy_path_insert` -- same, but the chain must descend away from
  the new edge, so the recolored set is a simple path (no fans).
* :func:`smallest_subtree_path_insert` -- the kappa = delta heuristic that
  always continues into a smallest subtree; no optimality search.

Deletions keep the coloring and never pay recourse.

Bigger components make the exact DP the dominant cost: O(kappa) assignment
problems per vertex, each at most (delta-1) x (kappa-1).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import permutations
from typing import Optional

from scipy.optimize import linear_sum_assignment

from .errors import ScriptExhausted, WrongPalette
from .forest import ColoredForest, EdgeKey, edge_key
from .rng import Rng

ALGORITHM_IDS = ("greedy", "greedy-shift", "greedy-path", "smallest-subtree")


class TieBreaker:
    """Tie-breaking policy for the greedy family.

    * ``lexmin`` (default): lowest color, then lowest vertex id.
    * ``scripted``: one ``{edge: preferred_color}`` dict per insertion,
      consumed in order; the preference is honored whenever some
      minimum-recourse solution realizes it.  Running out raises
      :class:`ScriptExhausted`.
    * ``seeded``: reproducible random choice among minimum solutions.
    """

    def __init__(self, kind: str, scripts=None, rng: Optional[Rng] = None):
        self.kind = kind
        self.scripts = scripts
        self.rng = rng
        self._cursor = 0

    @staticmethod
    def lexmin() -> "TieBreaker":
        return TieBreaker("lexmin")

    @staticmethod
    def scripted(scripts) -> "TieBreaker":
        return TieBreaker("scripted", scripts=list(scripts))

    @staticmethod
    def seeded(seed: int) -> "TieBreaker":
        return TieBreaker("seeded", rng=Rng(seed))

    def take_prefs(self) -> dict:
        if self.kind != "scripted":
            return {}
        if self._cursor >= len(self.scripts):
            raise ScriptExhausted(
                f"script has {len(self.scripts)} entries, update {self._cursor + 1} requested"
            )
        prefs = self.scripts[self._cursor]
        self._cursor += 1
        return {edge_key(*e): c for e, c in prefs.items()}

    def order(self, candidates: list) -> list:
        """Deterministic candidate ordering (ascending; shuffled if seeded)."""
        out = sorted(candidates)
        if self.kind == "seeded":
            for i in range(len(out) - 1, 0, -1):
                j = self.rng.bounded(i + 1)
                out[i], out[j] = out[j], out[i]
        return out


@dataclass
class DpTable:
    """Subproblem costs P(v, beta) in recourse units, plus realized choices."""

    values: dict = field(default_factory=dict)  # (vertex, beta) -> recourse
    choice: dict = field(default_factory=dict)  # (vertex, beta) -> {child: color}


def _assignment_min(costs) -> int:
    """Minimum-cost injective row->column assignment; costs is l x k, l <= k."""
    l = len(costs)
    if l == 0:
        return 0
    if l == 1:
        return min(costs[0])
    k = len(costs[0])
    arrangements = 1
    for i in range(k, k - l, -1):
        arrangements *= i
    if arrangements <= 120:
        best = None
        for perm in permutations(range(k), l):
            s = sum(costs[i][perm[i]] for i in range(l))
            if best is None or s < best:
                best = s
        return best
    rows, cols = linear_sum_assignment(costs)
    return int(sum(costs[r][c] for r, c in zip(rows, cols)))


def _dp_component(f: ColoredForest, root: int, block: EdgeKey, weight: int, prefs: dict):
    """P tables for the tree hanging at `root`, not crossing `block`.

    Returns (table, kids, cur) where table[v] is a list indexed by color,
    kids[v] the DP children sorted ascending, and cur[v] the current color of
    v's DP-parent edge.
    """
    kappa = f.kappa
    ba, bb = block
    order = []
    stack = [(root, None)]
    while stack:
        v, par = stack.pop()
        order.append((v, par))
        for w in f.adjacency[v]:
            if w != par and not (
                (v == ba and w == bb) or (v == bb and w == ba)
            ):
                stack.append((w, v))
    kids = {v: [] for v, _ in order}
    cur = {}
    for v, par in order:
        if par is not None:
            kids[par].append(v)
            cur[v] = f.adjacency[par][v]
    for v in kids:
        kids[v].sort()
    table = {}
    for v, par in reversed(order):
        row = [0] * (kappa + 1)
        ch = kids[v]
        for beta in range(1, kappa + 1):
            if ch:
                cost_rows = [
                    [table[w][g] for g in range(1, kappa + 1) if g != beta]
                    for w in ch
                ]
                acc = _assignment_min(cost_rows)
            else:
                acc = 0
            if par is not None:
                e = edge_key(par, v)
                if beta != cur[v]:
                    acc += weight
                want = prefs.get(e)
                if want is not None and want != beta:
                    acc += 1
            row[beta] = acc
        table[v] = row
    return table, kids, cur


def _reconstruct(f, v, beta, table, kids, cur, weight, prefs, tb, out_choice):
    """Apply the cheapest child assignment below v given parent color beta.

    Iterative (recolored paths can be thousands of edges long); untouched
    zero-cost subtrees are pruned.
    """
    stack = [(v, beta)]
    while stack:
        v, beta = stack.pop()
        ch = kids[v]
        if not ch:
            continue
        allowed = [g for g in range(1, f.kappa + 1) if g != beta]
        target = _assignment_min([[table[w][g] for g in allowed] for w in ch])
        remaining_cols = list(allowed)
        chosen = {}
        for idx, w in enumerate(ch):
            cands = tb.order(remaining_cols)
            want = prefs.get(edge_key(v, w))
            if want in remaining_cols:
                cands = [want] + [g for g in cands if g != want]
            rest = ch[idx + 1 :]
            for g in cands:
                cols = [x for x in remaining_cols if x != g]
                tail = _assignment_min([[table[x][y] for y in cols] for x in rest])
                if table[w][g] + tail == target:
                    chosen[w] = g
                    remaining_cols.remove(g)
                    target -= table[w][g]
                    break
            else:  # pragma: no cover - assignment always completable
                raise AssertionError("assignment reconstruction failed")
        out_choice[(v, beta)] = dict(chosen)
        for w, g in chosen.items():
            changed = g != cur[w]
            if changed:
                f.set_color(edge_key(v, w), g)
            if changed or table[w][g] >= weight:
                stack.append((w, g))


def greedy_insert(
    f: ColoredForest,
    e: EdgeKey,
    tb: Optional[TieBreaker] = None,
    table_out: Optional[DpTable] = None,
) -> int:
    """Color the freshly inserted edge `e` with minimum recourse.

    Recolors a smallest set H of previously colored edges so the coloring
    extends to `e`; returns |H|.
    """
    tb = tb or TieBreaker.lexmin()
    prefs = tb.take_prefs()
    u1, u2 = e
    with f.recourse_scope() as rs:
        shared = f.available_for_edge(e)
        if shared:
            want = prefs.get(e)
            color = want if want in shared else tb.order(shared)[0]
            f.set_color(e, color)
        else:
            weight = f.n + 2
            t1, k1, c1 = _dp_component(f, u1, e, weight, prefs)
            t2, k2, c2 = _dp_component(f, u2, e, weight, prefs)
            want = prefs.get(e)

            def beta_cost(b):
                pen = 1 if (want is not None and want != b) else 0
                return t1[u1][b] + t2[u2][b] + pen

            beta = min(tb.order(list(range(1, f.kappa + 1))), key=beta_cost)
            choice = table_out.choice if table_out is not None else {}
            f.set_color(e, beta)
            _reconstruct(f, u1, beta, t1, k1, c1, weight, prefs, tb, choice)
            _reconstruct(f, u2, beta, t2, k2, c2, weight, prefs, tb, choice)
            if table_out is not None:
                for t in (t1, t2):
                    for v, row in t.items():
                        for b in range(1, f.kappa + 1):
                            table_out.values[(v, b)] = row[b] // weight
    return rs.recourse


def greedy_delete(f: ColoredForest, e: EdgeKey) -> int:
    """Delete an edge and keep the coloring; recourse is always zero."""
    with f.recourse_scope() as rs:
        f.delete_topology(e)
    return rs.recourse


# -- shift chains ------------------------------------------------------------


def _chain_search(f: ColoredForest, e: EdgeKey, allow_fans: bool, prefs: dict):
    """Cheapest legal shift chain starting at the uncolored edge `e`.

    State = (uncolored edge, entry vertex, freed color at entry, frozen set
    of chain edges incident to the entry); costs are (recourse, script
    penalty) pairs.  Returns (cost pair, plan) where plan lists
    (edge, new color) in application order.
    """
    u1, u2 = e
    avail = f.available_colors

    def pen(edge, color):
        want = prefs.get(edge)
        return 1 if (want is not None and want != color) else 0

    best = None  # (cost, pen, stop_edge, stop_color, state_key or None)
    start_shared = avail(u1) & avail(u2)
    if start_shared:
        want = prefs.get(e)
        color = want if want in start_shared else min(start_shared)
        return (0, pen(e, color)), [(e, color)]

    # Dijkstra over chain states.
    dist = {}
    preds = {}
    heap = []
    seq = 0
    for a, b in ((u1, u2), (u2, u1)):
        # first move: e takes the original color of an edge at b
        for w in sorted(f.adjacency[b]):
            if w == a:
                continue
            h = edge_key(b, w)
            c = f.adjacency[b][w]
            if c in avail(a):
                state = (h, b, 0, frozenset((e, h)))
                cost = (0, pen(e, c))
                if state not in dist or cost < dist[state]:
                    dist[state] = cost
                    preds[state] = (None, e, c)
                    heapq.heappush(heap, (cost, seq, state))
                    seq += 1
    while heap:
        cost, _, state = heapq.heappop(heap)
        if dist.get(state) != cost:
            continue
        if best is not None and (cost[0] + 1, cost[1]) > (best[0], best[1]):
            # any stop from here on costs at least one more recolor
            break
        g, entry, phi, used = state
        a, b = (entry, g[1] if g[0] == entry else g[0])
        old_g = f.adjacency[g[0]][g[1]]
        avail_a = avail(a) | ({phi} if phi else set())
        avail_b = avail(b) | {old_g}
        stops = avail_a & avail_b
        if stops:
            for color in sorted(stops):
                cand = (cost[0] + 1, cost[1] + pen(g, color), g, color, state)
                if best is None or cand[:2] < best[:2] or (
                    cand[:2] == best[:2] and cand[2:4] < best[2:4]
                ):
                    best = cand
        # forward: continue past b
        for w in sorted(f.adjacency[b]):
            h = edge_key(b, w)
            if h == g:
                continue
            c = f.adjacency[b][w]
            if c not in avail_a:
                continue
            nstate = (h, b, old_g, frozenset((g, h)))
            ncost = (cost[0] + 1, cost[1] + pen(g, c))
            if nstate not in dist or ncost < dist[nstate]:
                dist[nstate] = ncost
                preds[nstate] = (state, g, c)
                heapq.heappush(heap, (ncost, seq, nstate))
                seq += 1
        if not allow_fans:
            continue
        # backward: turn around the entry vertex (fan)
        for w in sorted(f.adjacency[a]):
            h = edge_key(a, w)
            if h == g or h in used:
                continue
            c = f.adjacency[a][w]
            if c not in avail_b:
                continue
            nstate = (h, a, phi, used | {h})
            ncost = (cost[0] + 1, cost[1] + pen(g, c))
            if nstate not in dist or ncost < dist[nstate]:
                dist[nstate] = ncost
                preds[nstate] = (state, g, c)
                heapq.heappush(heap, (ncost, seq, nstate))
                seq += 1
    if best is None:  # pragma: no cover - a leaf always lets the chain stop
        raise AssertionError("no legal shift chain found")
    _, _, stop_edge, stop_color, state = best
    plan = [(stop_edge, stop_color)]
    while state is not None:
        state, edge, color = preds[state]
        plan.append((edge, color))
    plan.reverse()
    return best[:2], plan


def _chain_insert(f: ColoredForest, e: EdgeKey, tb, allow_fans: bool) -> int:
    tb = tb or TieBreaker.lexmin()
    prefs = tb.take_prefs()
    with f.recourse_scope() as rs:
        _, plan = _chain_search(f, e, allow_fans, prefs)
        # apply in chain order: each edge takes its successor's old color, so
        # the coloring is proper again once the last edge is set
        for edge, color in plan:
            f.set_color(edge, color)
    return rs.recourse


def greedy_shift_insert(f: ColoredForest, e: EdgeKey, tb: Optional[TieBreaker] = None) -> int:
    """Cheapest shift chain; fans (turns around a vertex) allowed."""
    return _chain_insert(f, e, tb, allow_fans=True)


def greedy_path_insert(f: ColoredForest, e: EdgeKey, tb: Optional[TieBreaker] = None) -> int:
    """Cheapest shift chain whose recolored set is a simple path (no fans)."""
    return _chain_insert(f, e, tb, allow_fans=False)


def smallest_subtree_path_insert(f: ColoredForest, e: EdgeKey) -> int:
    """kappa = delta heuristic: shift down the smaller tree, at each step
    continuing into a smallest subtree; stops at or before a leaf."""
    if f.palette.extra != 0:
        raise WrongPalette("smallest-subtree requires kappa == delta")
    u1, u2 = e
    with f.recourse_scope() as rs:
        _smallest_subtree_walk(f, e, u1, u2)
    return rs.recourse


def _smallest_subtree_walk(f: ColoredForest, e: EdgeKey, u1: int, u2: int) -> None:
    shared = f.available_for_edge(e)
    if shared:
        f.set_color(e, min(shared))
    else:
        sizes = {}
        for side in (u1, u2):
            other = u2 if side == u1 else u1
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
            sizes[side] = cnt
        r = min((u1, u2), key=lambda x: (sizes[x], x))
        o = u2 if r == u1 else u1
        sub = _sizes_below(f, r, e)
        g, a, b = e, o, r
        guard = sizes[r] + 2
        while guard:
            guard -= 1
            avail_a = f.available_colors(a)
            avail_b = f.available_colors(b)
            stop = avail_a & avail_b
            if stop:
                f.set_color(g, min(stop))
                return
            cands = []
            for w in f.adjacency[b]:
                if w == a:
                    continue
                c = f.adjacency[b][w]
                if c in avail_a:
                    cands.append((sub[w], w, c))
            nxt_size, w, c = min(cands)
            h = edge_key(b, w)
            f.uncolor(h)
            f.set_color(g, c)
            g, a, b = h, b, w
        raise AssertionError("smallest-subtree walk failed to terminate")


def _sizes_below(f: ColoredForest, root: int, block: EdgeKey) -> dict:
    """Subtree edge counts in root's side, not crossing the blocked edge."""
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
