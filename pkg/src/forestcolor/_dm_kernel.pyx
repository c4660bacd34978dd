# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled distribution-maintenance kernel.

Mirrors forestcolor._dm_fallback exactly: same splitmix64 stream, same draw
order, identical results for identical seeds.  See that module for the
representation contract.
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef class KernelRng:
    cdef public uint64_t state

    def __cinit__(self, seed):
        self.state = <uint64_t> (seed & 0xFFFFFFFFFFFFFFFF)

    cdef inline uint64_t _u64(self) nogil:
        self.state += GOLDEN
        return _mix(self.state)

    cdef inline long _bounded(self, long n):
        # accept x < 2**64 - (2**64 % n), i.e. x <= 0xFF..FF - (2**64 % n)
        cdef uint64_t m = ((<uint64_t> 0) - <uint64_t> n) % <uint64_t> n
        cdef uint64_t hi = 0xFFFFFFFFFFFFFFFFULL - m
        cdef uint64_t x
        while True:
            x = self._u64()
            if x <= hi:
                return <long> (x % <uint64_t> n)

    def u64(self):
        return self._u64()

    def bounded(self, n):
        if n <= 0:
            raise ValueError("bounded() needs n >= 1")
        return self._bounded(n)


cdef class KernelForest:
    cdef public int n
    cdef public int kappa
    cdef int* parent
    cdef int* pcolor
    cdef uint64_t* used
    cdef public list last_recolored

    def __cinit__(self, int n, int kappa):
        if kappa < 1 or kappa > 62:
            raise ValueError("kernel supports 1 <= kappa <= 62")
        self.n = n
        self.kappa = kappa
        self.parent = <int*> calloc(n if n else 1, sizeof(int))
        self.pcolor = <int*> calloc(n if n else 1, sizeof(int))
        self.used = <uint64_t*> calloc(n if n else 1, sizeof(uint64_t))
        if not (self.parent and self.pcolor and self.used):
            raise MemoryError()
        cdef int v
        for v in range(n):
            self.parent[v] = -1
        self.last_recolored = []

    def __dealloc__(self):
        free(self.parent)
        free(self.pcolor)
        free(self.used)

    # -- state I/O --------------------------------------------------------

    def reset(self, parents, colors):
        cdef int v, c, n = self.n
        for v in range(n):
            self.parent[v] = parents[v]
            self.pcolor[v] = colors[v]
            self.used[v] = 0
        for v in range(n):
            c = self.pcolor[v]
            if c:
                self.used[v] |= (<uint64_t> 1) << c
                self.used[self.parent[v]] |= (<uint64_t> 1) << c
        self.last_recolored = []

    def parents(self):
        return [self.parent[v] for v in range(self.n)]

    def colors(self):
        return [self.pcolor[v] for v in range(self.n)]

    # -- sampling ----------------------------------------------------------

    def sample_colors(self, KernelRng rng):
        cdef int n = self.n, kappa = self.kappa
        cdef int v, w, c, pcol, i, navail
        cdef list stack, avail, picked, ch
        cdef list kids = [[] for _ in range(n)]
        for v in range(n):
            self.pcolor[v] = 0
            self.used[v] = 0
            if self.parent[v] >= 0:
                kids[self.parent[v]].append(v)
        for root in range(n):
            if self.parent[root] >= 0:
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
                    i = <int> rng._bounded(len(avail))
                    c = avail.pop(i)
                    self.pcolor[w] = c
                    self.used[v] |= (<uint64_t> 1) << c
                    self.used[w] |= (<uint64_t> 1) << c
                    picked.append((w, c))
                for wc in reversed(picked):
                    stack.append(wc)

    # -- updates -----------------------------------------------------------

    cdef int _child_with_color(self, int v, int color):
        cdef int w
        for w in range(self.n):
            if self.parent[w] == v and self.pcolor[w] == color:
                return w
        return -1

    cdef int _draw_free(self, int v, KernelRng rng):
        cdef uint64_t mask = self.used[v]
        cdef int c, count = 0, idx, seen = 0
        for c in range(1, self.kappa + 1):
            if not (mask >> c) & 1:
                count += 1
        idx = <int> rng._bounded(count)
        for c in range(1, self.kappa + 1):
            if not (mask >> c) & 1:
                if seen == idx:
                    return c
                seen += 1
        return -1  # unreachable

    cdef int _fix_forbidden(self, int v, int a, int b):
        cdef int count = 0, x, tmp
        while True:
            x = self._child_with_color(v, b)
            if x < 0:
                return count
            self.pcolor[x] = a
            self.used[v] |= (<uint64_t> 1) << a
            self.used[x] = (self.used[x] & ~((<uint64_t> 1) << b)) | ((<uint64_t> 1) << a)
            self.last_recolored.append(x)
            count += 1
            v = x
            tmp = a
            a = b
            b = tmp

    def insert(self, int p, int r, KernelRng rng):
        cdef int beta, alpha, w
        self.last_recolored = []
        beta = self._draw_free(p, rng)
        self.parent[r] = p
        self.pcolor[r] = beta
        self.used[p] |= (<uint64_t> 1) << beta
        self.used[r] |= (<uint64_t> 1) << beta
        w = self._child_with_color(r, beta)
        if w < 0:
            return 0
        alpha = self._draw_free(r, rng)
        self.pcolor[w] = alpha
        self.used[r] |= (<uint64_t> 1) << alpha
        self.used[w] = (self.used[w] & ~((<uint64_t> 1) << beta)) | ((<uint64_t> 1) << alpha)
        self.last_recolored.append(w)
        return 1 + self._fix_forbidden(w, beta, alpha)

    def delete(self, int u, int v, KernelRng rng):
        cdef int alpha, beta, w, x, ell, t
        if self.parent[v] != u:
            raise ValueError(f"{v} is not a child of {u}")
        alpha = self.pcolor[v]
        self.parent[v] = -1
        self.pcolor[v] = 0
        self.used[u] &= ~((<uint64_t> 1) << alpha)
        self.used[v] &= ~((<uint64_t> 1) << alpha)
        self.last_recolored = []
        ell = 0
        for x in range(self.n):
            if self.parent[x] == v:
                ell += 1
        if ell == 0:
            return 0
        t = <int> rng._bounded(self.kappa)
        if t >= ell:
            return 0
        w = -1
        ell = 0
        for x in range(self.n):
            if self.parent[x] == v:
                if ell == t:
                    w = x
                    break
                ell += 1
        beta = self.pcolor[w]
        self.pcolor[w] = alpha
        self.used[v] = (self.used[v] & ~((<uint64_t> 1) << beta)) | ((<uint64_t> 1) << alpha)
        self.used[w] = (self.used[w] & ~((<uint64_t> 1) << beta)) | ((<uint64_t> 1) << alpha)
        self.last_recolored.append(w)
        return 1 + self._fix_forbidden(w, beta, alpha)
