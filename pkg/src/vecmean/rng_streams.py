"""Seeded, splittable random streams on top of the Philox4x64 counter-based generator.

A substream is addressed by ``(master_seed, path)`` where ``path`` is a short tuple of
32-bit labels (trial index, algorithm stage, ...). The address is packed injectively
into the Philox key and the high words of its 256-bit counter:

    key     = (master_seed, len(path))
    counter = (0, labels[0] | labels[1] << 32, labels[2] | labels[3] << 32, ...)

Only counter word 0 advances as the stream is consumed, so two distinct addresses
can never share a (key, counter) block within 2**64 blocks of output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_DEPTH = 6
_U32 = 1 << 32
_U64 = 1 << 64


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not 0 <= self.master_seed < _U64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        path = tuple(int(x) for x in self.path)
        if len(path) > MAX_DEPTH:
            raise ValueError(f"substream paths are limited to {MAX_DEPTH} labels")
        if any(not 0 <= x < _U32 for x in path):
            raise ValueError("path labels must be 32-bit unsigned integers")
        object.__setattr__(self, "path", path)

    def child(self, *labels: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.path + labels)


class Stream:
    """A positioned substream. Single-owner: do not share across threads."""

    __slots__ = ("seed", "_gen")

    def __init__(self, seed: SeedSpec):
        self.seed = seed
        words = [0, 0, 0]
        for k, label in enumerate(seed.path):
            words[k // 2] |= label << (32 * (k % 2))
        bitgen = np.random.Philox(counter=[0, *words], key=[seed.master_seed, len(seed.path)])
        self._gen = np.random.Generator(bitgen)

    def uniform_index(self, n: int) -> int:
        """One uniform draw from {1..n}."""
        return int(self.uniform_indices(n, 1)[0])

    def uniform_indices(self, n: int, size) -> np.ndarray:
        """i.i.d. uniform draws from {1..n} (1-based), with replacement."""
        if n < 1:
            raise ValueError("uniform_index requires n >= 1")
        return self._gen.integers(1, n, size=size, endpoint=True, dtype=np.int64)

    def bernoulli_sign(self) -> int:
        return int(self.bernoulli_signs(1)[0])

    def bernoulli_signs(self, size) -> np.ndarray:
        """Fair +-1 signs as float64."""
        return 2.0 * self._gen.integers(0, 1, size=size, endpoint=True, dtype=np.int64) - 1.0

    def raw(self, size) -> np.ndarray:
        """Raw 64-bit outputs; mainly for determinism checks."""
        return self._gen.bit_generator.random_raw(size)

    def uniform01(self, size) -> np.ndarray:
        return self._gen.random(size)

    def __repr__(self) -> str:
        return f"Stream(master_seed={self.seed.master_seed}, path={self.seed.path})"


def derive(seed: SeedSpec | int, *path: int) -> Stream:
    """Stream for ``seed`` (a SeedSpec, or a master seed plus path labels)."""
    if not isinstance(seed, SeedSpec):
        seed = SeedSpec(int(seed), path)
    elif path:
        seed = seed.child(*path)
    return Stream(seed)


def uniform_index(s: Stream, n: int) -> int:
    return s.uniform_index(n)


def bernoulli_sign(s: Stream) -> int:
    return s.bernoulli_sign()
