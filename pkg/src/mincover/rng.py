"""Seeded randomness on top of SplitMix64.

All generators in this package draw from SplitMix64 (Steele, Lea & Flood's
64-bit mixer) so that a seed pins down every sample bit-for-bit. The stream
is stateless: draw ``i`` of seed ``s`` is ``mix64(s + (i+1)*GAMMA)``, which
also lets bulk draws vectorize over numpy uint64 arrays. Uniform doubles are
``(x >> 11) * 2**-53`` in ``[0, 1)``; normals come from Box-Muller on
consecutive uniform pairs (the log argument uses ``(x >> 11) + 1`` scaled by
``2**-53`` so it never hits zero).
"""

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 2.0 ** -53


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * _M1 & _MASK
    z = (z ^ (z >> 27)) * _M2 & _MASK
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def raw_stream(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of the SplitMix64 stream for ``seed``."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return _mix_array(np.uint64(seed & _MASK) + idx * np.uint64(_GAMMA))


class SplitMix64:
    """Sequential view of the SplitMix64 stream for one seed."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self._pos = 0

    def next_u64(self) -> int:
        self._pos += 1
        return _mix((self.seed + self._pos * _GAMMA) & _MASK)

    def _take(self, count: int) -> np.ndarray:
        out = raw_stream(self.seed, self._pos, count)
        self._pos += count
        return out

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * _INV53

    def uniforms(self, count: int) -> np.ndarray:
        return (self._take(count) >> np.uint64(11)).astype(np.float64) * _INV53

    def normals(self, count: int) -> np.ndarray:
        pairs = (count + 1) // 2
        bits = self._take(2 * pairs)
        u1 = ((bits[:pairs] >> np.uint64(11)).astype(np.float64) + 1.0) * _INV53
        u2 = (bits[pairs:] >> np.uint64(11)).astype(np.float64) * _INV53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return z[:count]

    def below(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < threshold:
                return x % n

    def sample(self, n: int, k: int) -> np.ndarray:
        """k distinct indices from range(n), by partial Fisher-Yates; sorted output."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        pool = np.arange(n)
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.sort(pool[:k])
