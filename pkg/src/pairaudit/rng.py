"""SplitMix64, the generator behind every seeded workload.

The exact algorithm is fixed so that a (generator, size, seed) triple names
the same workload in any implementation:

* state advances by ``0x9E3779B97F4A7C15`` (mod 2**64) per draw and the
  output is the standard SplitMix64 finalizer of the new state;
* ``below(n)`` rejects raw draws smaller than ``2**64 mod n`` and returns the
  draw ``mod n``;
* ``random()`` is the top 53 bits scaled by ``2**-53``;
* ``split()`` seeds a child generator with the parent's next draw;
* ``shuffle`` is Fisher-Yates from the last index down, ``j = below(i + 1)``.

>>> r = SplitMix64(0)
>>> hex(r.next_u64())
'0xe220a8397b1dcdaf'
"""

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        floor = (1 << 64) % n
        r = self.next_u64()
        while r < floor:
            r = self.next_u64()
        return r % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def split(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())
