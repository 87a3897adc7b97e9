"""Counter-based deterministic random stream for benchmark generators.

The generators have to be reproducible bit-for-bit from a single integer
seed, independent of library versions and platform, so the stream is spelled
out completely here instead of delegating to a library generator:

* raw 64-bit words come from SplitMix64 applied to ``seed + (i+1) * GOLDEN``
  where ``i`` is the draw counter and ``GOLDEN = 0x9E3779B97F4A7C15``;
* a uniform in [0, 1) is ``(raw >> 11) * 2**-53``;
* standard normals come from the Box-Muller transform applied to consecutive
  uniform pairs (the cosine variate is emitted first, then the sine one);
* an index in ``range(k)`` is ``raw % k`` (the modulo bias of at most
  ``k / 2**64`` is accepted and part of the stream definition);
* sampling ``k`` distinct indices from ``range(n)`` is a partial
  Fisher-Yates shuffle consuming one index draw per selected element.
"""

from __future__ import annotations

import math

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def splitmix64(seed: int, counter: int) -> int:
    """Return the 64-bit word of the stream at position ``counter``."""
    z = (seed + (counter + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class RngStream:
    """Seedable counter-based stream; every draw advances the counter by one."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self._i = 0
        self._spare_normal: float | None = None

    def u64(self) -> int:
        word = splitmix64(self.seed, self._i)
        self._i += 1
        return word

    def uniform(self) -> float:
        """Uniform draw in [0, 1)."""
        return (self.u64() >> 11) * 2.0**-53

    def normal(self) -> float:
        """Standard normal via Box-Muller on consecutive uniform pairs."""
        if self._spare_normal is not None:
            value = self._spare_normal
            self._spare_normal = None
            return value
        u1 = self.uniform()
        u2 = self.uniform()
        if u1 == 0.0:
            u1 = 2.0**-53
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = radius * math.sin(2.0 * math.pi * u2)
        return radius * math.cos(2.0 * math.pi * u2)

    def index(self, k: int) -> int:
        """Index in range(k) via modulo reduction of one raw word."""
        if k <= 0:
            raise ValueError("k must be positive")
        return self.u64() % k

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), partial Fisher-Yates order."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = list(range(n))
        out = []
        for j in range(k):
            pick = j + self.index(n - j)
            pool[j], pool[pick] = pool[pick], pool[j]
            out.append(pool[j])
        return out
