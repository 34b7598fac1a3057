"""Adversarial input distributions on the unit ball of L_p^{N1 x N2}.

Four sign/spike families built on a partition of the columns into L equal blocks:

* ``mu1``: independent fair signs on every (row, block) cell, amplitude 1.
* ``mu2``: a single signed spike on one (row, block) cell, scaled to unit norm.
* ``mu3``: every row independently carries one signed block, scaled to unit norm.
* ``mu4``: one uniformly chosen row carries N1^(1/p) times a block-wise sign pattern.

``mu1``/``mu2`` use L = floor(4n/N1) + 1 blocks, ``mu3``/``mu4`` use
L = 4 ceil(4n/N1) + 1. All four require 1 <= n < N1 N2 / 21.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import ceil_div
from .rng_streams import Stream
from .tensor_space import DiscreteFunction, norm_witness, parse_exponent, read_matrix, recip

FAMILIES = ("mu1", "mu2", "mu3", "mu4", "witness", "custom", "constant")
HARD_FAMILIES = ("mu1", "mu2", "mu3", "mu4")


@dataclass(frozen=True)
class BlockPartition:
    """L disjoint blocks D_j = {(j-1)b+1, ..., jb} of {1..n2}, b = floor(n2/L)."""

    n2: int
    l: int

    def __post_init__(self):
        if not 1 <= self.l <= self.n2:
            raise ValueError(f"block count must satisfy 1 <= L <= N2, got L={self.l}, N2={self.n2}")

    @property
    def block_size(self) -> int:
        return self.n2 // self.l

    @property
    def covered(self) -> int:
        """Columns 1..covered are assigned; the tail is not."""
        return self.l * self.block_size

    def block(self, j: int) -> range:
        b = self.block_size
        return range((j - 1) * b + 1, j * b + 1)

    def block_of(self, column: int) -> int | None:
        if not 1 <= column <= self.n2:
            raise ValueError("column out of range")
        if column > self.covered:
            return None
        return (column - 1) // self.block_size + 1

    def labels(self) -> np.ndarray:
        """0-based block label per column, -1 on the unassigned tail."""
        lab = np.full(self.n2, -1, dtype=np.int64)
        lab[: self.covered] = np.arange(self.covered) // self.block_size
        return lab


def blocks(n2: int, l: int) -> BlockPartition:
    return BlockPartition(n2, l)


def block_count_additive(n: int, n1: int) -> int:
    return (4 * n) // n1 + 1


def block_count_product(n: int, n1: int) -> int:
    return 4 * ceil_div(4 * n, n1) + 1


@dataclass(frozen=True)
class InstanceSpec:
    """Which input family to draw, tuned against budget ``n``.

    ``value`` is the constant for ``constant``; ``path`` the matrix file for ``custom``.
    """

    family: str
    p: float
    n: int
    n1: int
    n2: int
    value: float = 1.0
    path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        if self.family not in FAMILIES:
            raise ValueError(f"unknown instance family {self.family!r}")
        if self.n < 1 or self.n1 < 1 or self.n2 < 1:
            raise ValueError("n, n1, n2 must be positive")
        if self.family in HARD_FAMILIES and not 21 * self.n < self.n1 * self.n2:
            raise ValueError(
                f"{self.family} needs n < N1*N2/21; got n={self.n}, N1={self.n1}, N2={self.n2}"
            )
        if self.family in ("mu3", "mu4") and self.n < self.n1:
            raise ValueError(f"{self.family} needs n >= N1")
        if self.family == "custom" and self.path is None:
            raise ValueError("custom instances need a matrix file")

    @property
    def random(self) -> bool:
        return self.family in HARD_FAMILIES


def _partition(spec: InstanceSpec) -> BlockPartition:
    if spec.family in ("mu1", "mu2"):
        return BlockPartition(spec.n2, block_count_additive(spec.n, spec.n1))
    return BlockPartition(spec.n2, block_count_product(spec.n, spec.n1))


def _expect(spec: InstanceSpec, family: str) -> None:
    if spec.family != family:
        raise ValueError(f"spec is for {spec.family}, not {family}")


def draw_mu1(spec: InstanceSpec, s: Stream) -> DiscreteFunction:
    _expect(spec, "mu1")
    part = _partition(spec)
    signs = s.bernoulli_signs((spec.n1, part.l))
    m = np.zeros((spec.n1, spec.n2))
    m[:, : part.covered] = np.repeat(signs, part.block_size, axis=1)
    return DiscreteFunction(m)


def draw_mu2(spec: InstanceSpec, s: Stream) -> DiscreteFunction:
    _expect(spec, "mu2")
    part = _partition(spec)
    i = s.uniform_index(spec.n1)
    j = s.uniform_index(part.l)
    alpha = s.bernoulli_sign()
    r = recip(spec.p)
    amp = (spec.n1 * spec.n2 / part.block_size) ** r
    m = np.zeros((spec.n1, spec.n2))
    blk = part.block(j)
    m[i - 1, blk.start - 1 : blk.stop - 1] = alpha * amp
    return DiscreteFunction(m)


def draw_mu3(spec: InstanceSpec, s: Stream) -> DiscreteFunction:
    _expect(spec, "mu3")
    part = _partition(spec)
    b = part.block_size
    js = s.uniform_indices(part.l, spec.n1)
    alphas = s.bernoulli_signs(spec.n1)
    amp = (spec.n2 / b) ** recip(spec.p)
    m = np.zeros((spec.n1, spec.n2))
    cols = (js[:, None] - 1) * b + np.arange(b)[None, :]
    m[np.arange(spec.n1)[:, None], cols] = (alphas * amp)[:, None]
    return DiscreteFunction(m)


def draw_mu4(spec: InstanceSpec, s: Stream) -> DiscreteFunction:
    _expect(spec, "mu4")
    part = _partition(spec)
    i = s.uniform_index(spec.n1)
    signs = s.bernoulli_signs(part.l)
    amp = spec.n1 ** recip(spec.p)
    m = np.zeros((spec.n1, spec.n2))
    m[i - 1, : part.covered] = amp * np.repeat(signs, part.block_size)
    return DiscreteFunction(m)


_DRAWS = {"mu1": draw_mu1, "mu2": draw_mu2, "mu3": draw_mu3, "mu4": draw_mu4}


def draw(spec: InstanceSpec, s: Stream | None = None) -> DiscreteFunction:
    """Draw from any family; deterministic families ignore the stream."""
    if spec.family in _DRAWS:
        if s is None:
            raise ValueError(f"{spec.family} needs a random stream")
        return _DRAWS[spec.family](spec, s)
    if spec.family == "witness":
        # q only enters through p <= q; the witness depends on p alone
        return norm_witness(spec.p, spec.p, spec.n1, spec.n2)
    if spec.family == "constant":
        return DiscreteFunction(np.full((spec.n1, spec.n2), float(spec.value)))
    f = read_matrix(spec.path)
    if (f.n1, f.n2) != (spec.n1, spec.n2):
        raise ValueError(f"matrix file is {f.n1}x{f.n2}, spec says {spec.n1}x{spec.n2}")
    return f
