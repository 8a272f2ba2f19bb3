"""
Deterministic random stream used for template selection.

The generator is SplitMix64:

    state  <- (state + 0x9E3779B97F4A7C15) mod 2**64
    z      <- state
    z      <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z      <- (z XOR (z >> 27)) * 0x94D049BB133111EB mod 2**64
    output <- z XOR (z >> 31)

A uniform index in [0, n) is taken with the multiply-shift reduction
``(output * n) >> 64``. Streams are immutable values: every draw returns the
drawn number together with the advanced stream, so the same seed and call
sequence give the same choices on every platform.
"""
from dataclasses import dataclass
from typing import Tuple

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MULT_1 = 0xBF58476D1CE4E5B9
MIX_MULT_2 = 0x94D049BB133111EB

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX_MULT_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MULT_2) & MASK64
    return z ^ (z >> 31)


def _fnv1a(label: str) -> int:
    h = FNV_OFFSET
    for byte in label.encode("utf-8"):
        h = ((h ^ byte) * FNV_PRIME) & MASK64
    return h


@dataclass(frozen=True)
class RandomStream:
    """An immutable SplitMix64 state."""

    state: int

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStream":
        if seed < 0 or seed > MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        return cls(seed & MASK64)

    def next_u64(self) -> Tuple[int, "RandomStream"]:
        state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix64(state), RandomStream(state)

    def choice_index(self, n: int) -> Tuple[int, "RandomStream"]:
        """Draw a uniform index in [0, n)."""
        if n < 1:
            raise ValueError("cannot choose from an empty range")
        value, nxt = self.next_u64()
        return (value * n) >> 64, nxt

    def derive(self, label: str) -> "RandomStream":
        """Independent sub-stream keyed by a label (e.g. an article section)."""
        return RandomStream(_mix64(self.state ^ _fnv1a(label)))
