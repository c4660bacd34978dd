"""Brute-force ground truth and goodness-of-fit statistics.

Everything here is deliberately independent of the algorithm modules: the
enumerator and the minimum-recourse search are plain backtracking over edge
lists, and probabilities are exact rationals.  These are the reference
implementations the fast algorithms are tested against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Optional, Sequence

from scipy.stats import chi2 as _chi2

from .errors import ImproperColoring, InsufficientSamples, TooLarge
from .forest import EdgeKey, edge_key

ENUM_EDGE_LIMIT = 12  # keeps kappa**edges bounded for kappa <= 4

# scipy's regularized-gamma survival function is accurate to ~1e-14; the
# documented tolerance for p-values in this module is 1e-10.
CHISQ_TOLERANCE = 1e-10


def _canonical_edges(edges: Iterable) -> list:
    out = sorted(edge_key(a, b) for a, b in edges)
    if len(set(out)) != len(out):
        raise ValueError("duplicate edges in topology")
    return out


def enumerate_proper_colorings(edges: Iterable, kappa: int) -> list:
    """All proper colorings of an edge list, as tuples in sorted-edge order.

    Deterministic lexicographic order.  Guarded to ENUM_EDGE_LIMIT edges.
    """
    elist = _canonical_edges(edges)
    m = len(elist)
    if m > ENUM_EDGE_LIMIT:
        raise TooLarge(f"{m} edges exceeds enumeration guard {ENUM_EDGE_LIMIT}")
    used = {}
    out = []
    assignment = [0] * m

    def place(i: int) -> None:
        if i == m:
            out.append(tuple(assignment))
            return
        a, b = elist[i]
        ua, ub = used.setdefault(a, set()), used.setdefault(b, set())
        for c in range(1, kappa + 1):
            if c in ua or c in ub:
                continue
            assignment[i] = c
            ua.add(c)
            ub.add(c)
            place(i + 1)
            ua.remove(c)
            ub.remove(c)

    place(0)
    return out


def min_recourse_bruteforce(
    edges: Iterable,
    old_coloring: dict,
    new_edge: EdgeKey,
    kappa: int,
) -> int:
    """Minimum number of old edges recolored by any proper extension.

    ``edges`` is the old topology, ``old_coloring`` maps each old edge to its
    color, and ``new_edge`` is the (uncolored) edge being added.  Branch and
    bound over all proper colorings of the new forest.
    """
    elist = _canonical_edges(list(edges) + [new_edge])
    if len(elist) > ENUM_EDGE_LIMIT:
        raise TooLarge(f"{len(elist)} edges exceeds enumeration guard")
    old = {edge_key(a, b): c for (a, b), c in old_coloring.items()}
    new_key = edge_key(*new_edge)
    used = {}
    best = len(elist)  # recoloring everything is always enough

    def place(i: int, cost: int) -> None:
        nonlocal best
        if cost >= best:
            return
        if i == len(elist):
            best = cost
            return
        e = elist[i]
        a, b = e
        ua, ub = used.setdefault(a, set()), used.setdefault(b, set())
        keep = old.get(e)
        # try the current color first so the bound tightens early
        order = [keep] if keep is not None and e != new_key else []
        order += [c for c in range(1, kappa + 1) if c != keep]
        for c in order:
            if c in ua or c in ub:
                continue
            extra = 0 if (e == new_key or c == keep) else 1
            ua.add(c)
            ub.add(c)
            place(i + 1, cost + extra)
            ua.remove(c)
            ub.remove(c)

    place(0, 0)
    return best


def coloring_probability(
    edges: Iterable,
    kappa: int,
    coloring: dict,
    roots: Optional[Iterable] = None,
) -> Fraction:
    """Exact probability of one proper coloring under the top-down sampler.

    With ``roots`` given (one vertex per component) the rooted product
    (kappa-l(r))!/kappa! * prod_{v!=r} (kappa-1-l(v))!/(kappa-1)! is used;
    otherwise the equivalent degree form
    (1/kappa) * prod_v (kappa-deg(v))!/(kappa-1)! per tree.  Both depend only
    on the degree sequence, so the value is invariant to the choice of roots,
    and equals 1 / #proper-colorings.
    """
    elist = _canonical_edges(edges)
    colors = {edge_key(a, b): c for (a, b), c in coloring.items()}
    adj = {}
    for a, b in elist:
        c = colors.get((a, b))
        if c is None or not (1 <= c <= kappa):
            raise ImproperColoring(f"edge ({a},{b}) lacks a palette color")
        adj.setdefault(a, []).append(c)
        adj.setdefault(b, []).append(c)
    for v, cs in adj.items():
        if len(cs) != len(set(cs)):
            raise ImproperColoring(f"vertex {v} repeats a color", vertex=v)
    if roots is None:
        comps = _component_count(elist)
        prob = Fraction(1, kappa) ** comps
        for v, cs in adj.items():
            deg = len(cs)
            prob *= Fraction(factorial(kappa - deg), factorial(kappa - 1))
        return prob
    # rooted product over an explicit rooting
    nbrs = {}
    for a, b in elist:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    prob = Fraction(1)
    seen = set()
    for root in roots:
        if root in seen:
            raise ValueError(f"root {root} listed twice")
        stack = [(root, None)]
        while stack:
            v, par = stack.pop()
            seen.add(v)
            kids = [w for w in nbrs.get(v, []) if w != par]
            ell = len(kids)
            if par is None:
                prob *= Fraction(factorial(kappa - ell), factorial(kappa))
            else:
                prob *= Fraction(factorial(kappa - 1 - ell), factorial(kappa - 1))
            stack.extend((w, v) for w in kids)
    if seen != set(nbrs):
        raise ValueError("roots do not cover every component")
    return prob


def _component_count(elist: Sequence[EdgeKey]) -> int:
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    verts = set()
    for a, b in elist:
        verts.update((a, b))
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(v) for v in verts})


@dataclass
class ColoringHistogram:
    """Empirical counts over canonicalized colorings of one fixed topology."""

    counts: dict = field(default_factory=dict)
    total: int = 0

    def add(self, key: str) -> None:
        self.counts[key] = self.counts.get(key, 0) + 1
        self.total += 1

    @staticmethod
    def canonical_key(edges: Sequence[EdgeKey], coloring: dict) -> str:
        """Colors listed in sorted-EdgeKey order (labeled colorings)."""
        return ",".join(str(coloring[e]) for e in sorted(edges))


def chisq_uniformity(hist: ColoringHistogram, support_size: int):
    """Pearson chi-square of a histogram against the uniform null.

    Returns (statistic, p_value).  Requires total >= 10 * support_size.
    """
    if support_size < 1:
        raise ValueError("support_size must be >= 1")
    if hist.total < 10 * support_size:
        raise InsufficientSamples(
            f"{hist.total} samples < 10 x support {support_size}"
        )
    if len(hist.counts) > support_size:
        raise ValueError("histogram has more cells than the declared support")
    expected = hist.total / support_size
    stat = sum((c - expected) ** 2 for c in hist.counts.values())
    # cells never observed still contribute their expectation
    stat += (support_size - len(hist.counts)) * expected**2
    stat /= expected
    if support_size == 1:
        return stat, 1.0
    p = float(_chi2.sf(stat, support_size - 1))
    return stat, p
