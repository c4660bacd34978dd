"""Seedable, splittable pseudo-random stream (splitmix64).

All randomized code in this library draws from :class:`Rng`.  The generator
is a plain splitmix64 stream: 64-bit state advanced by the golden-ratio
increment, output mixed by the Stafford mix13 finalizer.  It is implemented
here (rather than wrapping ``random.Random``) because the compiled kernel
must reproduce the exact same stream with C integer arithmetic, so replay
traces agree bit-for-bit across backends.

Documented draw order used by every consumer:

* ``bounded(n)`` draws one or more raw 64-bit words (rejection sampling) and
  returns a uniform index in ``[0, n)``.
* uniform choice from a color set = sort the set ascending, index it with
  ``bounded(len)``.
* uniform choice of a child vertex = sort children by vertex id ascending,
  index with ``bounded``.
* a branch taken "with probability l/k" draws ``t = bounded(k)`` and takes
  the branch iff ``t < l``; when a uniform child must then be chosen among
  ``l`` candidates, the same ``t`` is reused as the index.
* ``split(index)`` derives an independent child stream; the harness derives
  per-repetition seeds as ``rep_seed = mix(seed, rep_index)``.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(seed: int, index: int) -> int:
    """Derive a child seed from (seed, index); used for stream splitting."""
    return _mix((seed ^ ((index + 1) * _GOLDEN)) & _MASK)


class Rng:
    """splitmix64 stream with uniform-int helpers."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def bounded(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (exact)."""
        if n <= 0:
            raise ValueError("bounded() needs n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        x = self.u64()
        while x >= limit:
            x = self.u64()
        return x % n

    def chance(self, num: int, den: int) -> bool:
        """True with probability exactly num/den."""
        return self.bounded(den) < num

    def choice(self, seq):
        """Uniform element of an (already ordered) sequence."""
        return seq[self.bounded(len(seq))]

    def split(self, index: int) -> "Rng":
        return Rng(mix_seed(self.state, index))
