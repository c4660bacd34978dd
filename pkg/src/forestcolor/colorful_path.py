"""Rooted-forest recoloring with 2*Delta-2 colors and O(1) amortized recourse.

Insertions attach a component root `r` beneath a parent `p`.  The repair
walks a single downward path from `r`: stop as soon as the current uncolored
edge has a color free at both endpoints; otherwise prefer a child edge whose
color is free at the entry vertex and whose far endpoint can stop next
(a free-lookahead step); otherwise shift any child color different from the
color sitting two steps above, which guarantees that color stays free for a
future visit.  Deletions keep the coloring.

With kappa = 2*Delta-2, a step entering (u, v) from u fails to stop exactly
when deg(u) = deg(v) = Delta and the free colors at u are precisely the used
colors at v; the walk asserts this equivalence at every non-stopping step
(and, as a corollary, consecutive steps alternate between two complementary
(Delta-1)-subsets of the palette).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ImproperColoring, NotRoot, WrongPalette
from .forest import ColoredForest, EdgeKey, edge_key

ALGORITHM_ID = "colorful-path"

STOP = "stop"
STEP_TO_FREE = "step-to-free"
STEP_AVOID_GRANDPARENT = "step-avoid-grandparent"


@dataclass(frozen=True)
class CpStep:
    edge: EdgeKey
    kind: str
    color_taken: int


def _require_palette(f: ColoredForest) -> None:
    if f.palette.delta < 3 or f.kappa != 2 * f.palette.delta - 2:
        raise WrongPalette(
            f"colorful-path needs kappa = 2*delta-2 with delta >= 3, "
            f"got delta={f.palette.delta} kappa={f.kappa}"
        )


def cp_insert(
    f: ColoredForest,
    p: int,
    r: int,
    trace: Optional[list] = None,
    checked: bool = True,
) -> int:
    """Insert edge (p, r) where r is a root, color it, repair downward."""
    _require_palette(f)
    if f.parent[r] is not None:
        raise NotRoot(f"vertex {r} is not a component root")
    e = f.insert_topology(p, r, parent_hint=p)
    palette = set(f.palette.colors())
    with f.recourse_scope() as rs:
        cur, u, v = e, p, r
        prev_free_u = None
        guard = f.component_edge_count(p) + 2
        while guard:
            guard -= 1
            au = f.available_colors(u)
            av = f.available_colors(v)
            shared = au & av
            if shared:
                color = min(shared)
                f.set_color(cur, color)
                if trace is not None:
                    trace.append(CpStep(cur, STOP, color))
                break
            if checked:
                used_v = f.used_colors(v)
                if not (
                    f.degree(u) == f.palette.delta
                    and f.degree(v) == f.palette.delta
                    and au == used_v
                ):
                    raise ImproperColoring(
                        f"non-stop step on {cur} without the saturation pattern",
                        vertex=u,
                    )
                if prev_free_u is not None and au != palette - prev_free_u:
                    raise ImproperColoring(
                        f"free sets failed to alternate at {cur}", vertex=u
                    )
            prev_free_u = au
            kids = f.children_sorted(v)
            step_kind = None
            target = None
            for w in kids:
                cw = f.adjacency[v][w]
                if cw in au and (f.available_colors(w) & av):
                    step_kind, target = STEP_TO_FREE, w
                    break
            if step_kind is None:
                pu = f.parent[u]
                gu = f.parent[pu] if pu is not None else None
                beta2 = f.adjacency[gu][pu] if gu is not None else None
                candidates = [w for w in kids if f.adjacency[v][w] != beta2]
                target = min(candidates, key=lambda w: f.adjacency[v][w])
                step_kind = STEP_AVOID_GRANDPARENT
            color = f.adjacency[v][target]
            nxt = edge_key(v, target)
            f.uncolor(nxt)
            f.set_color(cur, color)
            if trace is not None:
                trace.append(CpStep(cur, step_kind, color))
            cur, u, v = nxt, v, target
        else:  # pragma: no cover - the walk always reaches a leaf
            raise AssertionError("colorful-path walk failed to terminate")
    return rs.recourse


def cp_delete(f: ColoredForest, e: EdgeKey) -> int:
    """Delete an edge; the coloring is kept, so recourse is zero."""
    _require_palette(f)
    with f.recourse_scope() as rs:
        f.delete_topology(e)
    return rs.recourse
