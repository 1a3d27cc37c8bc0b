"""Counter-based randomness for reproducible, trial-parallel experiments.

Every random stream in a run is keyed by a path of small integers under one
master seed: (world, trial) selects a game, and a role constant selects one
of the independent streams inside that game. Both derivation and generation
are splitmix64 arithmetic (Steele/Lea/Vigna's SplittableRandom mixer), so
seeding a stream costs nothing, and results never depend on sampling order
or worker count. Millions of Monte Carlo trials seed fresh streams, which
rules out generators with heavyweight state initialization.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

# Stream roles inside one game instance.
ROLE_CIPHER = 1
ROLE_CRUCIAL_KEYS = 2
ROLE_WORLD2_PERM = 3
ROLE_ATTACK = 4


def splitmix64(x: int) -> int:
    x = (x + _GAMMA) & _MASK64
    z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *path: int) -> int:
    """Collapse (master, *path) into one well-mixed 64-bit seed."""
    state = splitmix64(master & _MASK64)
    for part in path:
        state = splitmix64(state ^ splitmix64(part & _MASK64))
    return state


class SplitStream:
    """Counter-based random stream: output i is splitmix64 of seed + i*gamma.

    Implements the slice of the `random.Random` draw API the simulator uses.
    `getrandbits` returns the top k bits of the next output; bounded draws
    use the same bit-length rejection `random.Random.randrange` performs, so
    the two are interchangeable for testing the sampling algorithms.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def getrandbits(self, k: int) -> int:
        s = self.state = (self.state + _GAMMA) & _MASK64
        z = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
        return (z ^ (z >> 31)) >> (64 - k)

    def randrange(self, n: int) -> int:
        if n & (n - 1) == 0:
            return self.getrandbits(n.bit_length() - 1) if n > 1 else 0
        k = n.bit_length()
        r = self.getrandbits(k)
        while r >= n:
            r = self.getrandbits(k)
        return r

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return self.getrandbits(53) * (2.0 ** -53)

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle."""
        randrange = self.randrange
        for i in range(len(seq) - 1, 0, -1):
            j = randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]


def derive_stream(master: int, *path: int) -> SplitStream:
    """A fresh stream keyed by the derived path."""
    return SplitStream(derive_seed(master, *path))


# Pre-mixed role constants: derive_seed(seed, role) on the trial hot path
# becomes splitmix64(splitmix64(seed) ^ MIXED_ROLE), one call per stream.
MIXED_CIPHER = splitmix64(ROLE_CIPHER)
MIXED_CRUCIAL_KEYS = splitmix64(ROLE_CRUCIAL_KEYS)
MIXED_WORLD2_PERM = splitmix64(ROLE_WORLD2_PERM)
MIXED_ATTACK = splitmix64(ROLE_ATTACK)
