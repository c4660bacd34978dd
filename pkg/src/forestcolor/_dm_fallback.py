"""Pure-Python twin of the compiled distribution-maintenance kernel.

Array-based rooted forest used by the Monte-Carlo verification loops.  The
compiled module (_dm_kernel) implements the same class bit-for-bit: same
splitmix64 stream, same draw order, same results for the same seed.  Selected
at import time by :mod:`forestcolor.kernels`.

Representation: ``parent[v]`` (-1 for roots), ``pcolor[v]`` = color of the
edge to the parent (0 if none), ``used[v]`` = bitmask of incident colors
(bit c set iff some incident edge has color c).
"""

from __future__ import annotations

from .rng import Rng as KernelRng

__all__ = ["KernelForest", "KernelRng"]


class KernelForest:
    def __init__(self, n: int, kappa: int):
        if not (1 <= kappa <= 62):
            raise ValueError("kernel supports 1 <= kappa <= 62")
        self.n = n
        self.kappa = kappa
        self.parent = [-1] * n
        self.pcolor = [0] * n
        self.used = [0] * n
        self.last_recolored = []

    # -- state I/O ---------------------------------------------------------

    def reset(self, parents, colors) -> None:
        n = self.n
        self.parent = list(parents)
        self.pcolor = list(colors)
        used = [0] * n
        for v in range(n):
            c = self.pcolor[v]
            if c:
                used[v] |= 1 << c
                used[self.parent[v]] |= 1 << c
        self.used = used
        self.last_recolored = []

    def parents(self):
        return list(self.parent)

    def colors(self):
        return list(self.pcolor)

    # -- sampling ----------------------------------------------------------

    def sample_colors(self, rng: KernelRng) -> None:
        """Top-down uniform proper coloring (components by ascending root id,
        preorder, children ascending, colors popped from the ascending list)."""
        n, kappa = self.n, self.kappa
        parent = self.parent
        self.pcolor = [0] * n
        self.used = [0] * n
        pcolor, used = self.pcolor, self.used
        kids = [[] for _ in range(n)]
        for v in range(n):
            p = parent[v]
            if p >= 0:
                kids[p].append(v)
        for root in range(n):
            if parent[root] >= 0:
                continue
            stack = [(root, 0)]
            while stack:
                v, pcol = stack.pop()
                ch = kids[v]
                if not ch:
                    continue
                avail = [c for c in range(1, kappa + 1) if c != pcol]
                picked = []
                for w in ch:
                    c = avail.pop(rng.bounded(len(avail)))
                    pcolor[w] = c
                    used[v] |= 1 << c
                    used[w] |= 1 << c
                    picked.append((w, c))
                for wc in reversed(picked):
                    stack.append(wc)

    # -- updates -----------------------------------------------------------

    def _child_with_color(self, v: int, color: int) -> int:
        parent, pcolor = self.parent, self.pcolor
        for w in range(self.n):
            if parent[w] == v and pcolor[w] == color:
                return w
        return -1

    def _draw_free(self, v: int, rng: KernelRng) -> int:
        mask = self.used[v]
        free = [c for c in range(1, self.kappa + 1) if not (mask >> c) & 1]
        return free[rng.bounded(len(free))]

    def _fix_forbidden(self, v: int, a: int, b: int) -> int:
        """Parent color of v changed a -> b; swap down.  Returns recolors."""
        count = 0
        pcolor, used = self.pcolor, self.used
        while True:
            x = self._child_with_color(v, b)
            if x < 0:
                return count
            pcolor[x] = a
            used[v] |= 1 << a
            used[x] = (used[x] & ~(1 << b)) | (1 << a)
            self.last_recolored.append(x)
            count += 1
            v = x
            a, b = b, a

    def insert(self, p: int, r: int, rng: KernelRng) -> int:
        """Attach root r beneath p; returns the recourse of the repair."""
        self.last_recolored = []
        beta = self._draw_free(p, rng)
        self.parent[r] = p
        self.pcolor[r] = beta
        self.used[p] |= 1 << beta
        self.used[r] |= 1 << beta
        w = self._child_with_color(r, beta)
        if w < 0 or w == r:
            return 0
        alpha = self._draw_free(r, rng)
        self.pcolor[w] = alpha
        self.used[r] |= 1 << alpha
        self.used[w] = (self.used[w] & ~(1 << beta)) | (1 << alpha)
        self.last_recolored.append(w)
        return 1 + self._fix_forbidden(w, beta, alpha)

    def delete(self, u: int, v: int, rng: KernelRng) -> int:
        """Remove the edge from child v to its parent u; repair at v."""
        if self.parent[v] != u:
            raise ValueError(f"{v} is not a child of {u}")
        alpha = self.pcolor[v]
        self.parent[v] = -1
        self.pcolor[v] = 0
        self.used[u] &= ~(1 << alpha)
        self.used[v] &= ~(1 << alpha)
        self.last_recolored = []
        parent = self.parent
        kids = [w for w in range(self.n) if parent[w] == v]
        if not kids:
            return 0
        t = rng.bounded(self.kappa)
        if t >= len(kids):
            return 0
        w = kids[t]
        beta = self.pcolor[w]
        self.pcolor[w] = alpha
        self.used[v] = (self.used[v] & ~(1 << beta)) | (1 << alpha)
        self.used[w] = (self.used[w] & ~(1 << beta)) | (1 << alpha)
        self.last_recolored.append(w)
        return 1 + self._fix_forbidden(w, beta, alpha)
