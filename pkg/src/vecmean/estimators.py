"""Randomized norm estimation, non-adaptive and adaptive row-mean algorithms, median boosting.

Every algorithm returns ``(output, BudgetAudit)``. Oracle calls are counted from the
entries actually gathered out of ``f``, repeated reads included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rng_streams import Stream
from .tensor_space import INF, DiscreteFunction, parse_exponent, recip

DEFAULT_P1 = 3.0


@dataclass(frozen=True)
class BudgetAudit:
    stage1_calls: int = 0
    stage2_calls: int = 0
    nominal_n: int = 0
    repetitions_m: int = 1

    @property
    def total_calls(self) -> int:
        return self.stage1_calls + self.stage2_calls


@dataclass(frozen=True)
class AdaptiveConfig:
    n: int
    m: int = 1
    w: float = 1.0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive integers")
        if not self.w >= 1:
            raise ValueError("w must be >= 1")


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def holder_exponent_p1(p, q, default: float = DEFAULT_P1) -> float:
    """Moment order p1 for the norm-estimation error bound.

    Solves 1/p1 = 1 + 1/p - 1/q; when p = inf and q = 1 any p1 in (2, inf) is
    allowed and ``default`` is returned.
    """
    p, q = parse_exponent(p), parse_exponent(q)
    if q == INF or q >= p:
        raise ValueError("requires 1 <= q < p <= inf")
    if p == INF and q == 1.0:
        if not 2.0 < default < INF:
            raise ValueError("default p1 must lie in (2, inf)")
        return float(default)
    return 1.0 / (1.0 + recip(p) - 1.0 / q)


def a1_from_indices(row, q: float, indices) -> float:
    """``((1/n) sum |row[xi_i]|^q)^(1/q)`` for given 1-based sample positions."""
    row = np.asarray(row)
    if row.size == 0:
        raise ValueError("empty row")
    vals = np.abs(row[np.asarray(indices) - 1])
    if q == 2.0:
        return math.sqrt(float(np.mean(vals * vals)))
    return float(np.mean(vals**q)) ** (1.0 / q)


def a1_norm_estimate(row, q, n: int, s: Stream) -> float:
    """Sampled estimate of ``||row||_{L_q}`` from n uniform draws with replacement."""
    q = parse_exponent(q)
    if q == INF:
        raise ValueError("norm estimation needs q < inf")
    if n < 1:
        raise ValueError("n must be positive")
    row = np.asarray(row, dtype=float)
    if row.size == 0:
        raise ValueError("empty row")
    return a1_from_indices(row, q, s.uniform_indices(row.size, n))


def median_scalar(values):
    """Median of a nonempty list: middle order statistic for odd m, mean of the two
    middle ones for even m. Complex input takes real and imaginary medians separately."""
    z = np.asarray(values)
    if z.size == 0:
        raise ValueError("median of an empty list")
    if np.iscomplexobj(z):
        return complex(median_scalar(z.real), median_scalar(z.imag))
    zs = np.sort(z.ravel())
    m = zs.size
    if m % 2:
        return zs[(m - 1) // 2].item()
    return ((zs[m // 2 - 1] + zs[m // 2]) / 2).item()


def median_along(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """Vectorized ``median_scalar`` over one axis."""
    if np.iscomplexobj(z):
        return np.median(z.real, axis=axis) + 1j * np.median(z.imag, axis=axis)
    return np.median(z, axis=axis)


def zero_algorithm(f: DiscreteFunction):
    return np.zeros(f.n1), BudgetAudit()


def _check_regime(f: DiscreteFunction, n: int) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if n >= f.n1 * f.n2:
        raise ValueError(
            f"n={n} >= N1*N2={f.n1 * f.n2}: exact computation is cheaper than sampling"
        )


def a2_from_indices(f: DiscreteFunction, eta) -> tuple[np.ndarray, int]:
    """Row means over the shared 1-based column sample ``eta``; returns (output, calls)."""
    vals = f.matrix[:, np.asarray(eta) - 1]
    return vals.sum(axis=1) / vals.shape[1], vals.size


def a2_mean(f: DiscreteFunction, n: int, s: Stream):
    """Non-adaptive Monte Carlo: ceil(n/N1) shared uniform columns, averaged per row."""
    _check_regime(f, n)
    if n < f.n1:
        return np.zeros(f.n1), BudgetAudit(nominal_n=n)
    eta = s.uniform_indices(f.n2, ceil_div(n, f.n1))
    out, calls = a2_from_indices(f, eta)
    return out, BudgetAudit(stage2_calls=calls, nominal_n=n)


def first_stage_from_table(f: DiscreteFunction, xi) -> tuple[np.ndarray, int]:
    """Median over repetitions of per-row L2-norm estimates.

    ``xi`` has shape (m, k): repetition k reads columns ``xi[k]`` in every row.
    Returns (a_tilde, calls).
    """
    xi = np.atleast_2d(np.asarray(xi))
    vals = f.matrix[:, xi - 1]  # (N1, m, k)
    a = np.sqrt(np.mean(vals * vals, axis=2))
    return median_along(a, axis=1), vals.size


def a3_first_stage(f: DiscreteFunction, n: int, m: int, s: Stream) -> np.ndarray:
    if n < f.n1:
        raise ValueError("first stage needs n >= N1")
    xi = s.uniform_indices(f.n2, (m, ceil_div(n, f.n1)))
    return first_stage_from_table(f, xi)[0]


def a3_allocate(a_tilde, n: int) -> np.ndarray:
    """Per-row sample counts from estimated row L2 norms.

    Rows with a_i^2 at or below the mean square get ceil(n/N1); heavier rows get
    ceil(a_i^2 n / sum a_l^2). Both comparisons and ceilings are exact.
    """
    a = np.asarray(a_tilde, dtype=float)
    n1 = a.size
    if n1 < 1 or n < n1:
        raise ValueError("allocation needs n >= N1 >= 1")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError("norm estimates must be finite and nonnegative")
    sq = a * a
    total = math.fsum(sq)
    base = ceil_div(n, n1)
    counts = np.full(n1, base, dtype=np.int64)
    # n1 * sq[i] and fsum are both correctly rounded, so the branch test is exact
    heavy = np.flatnonzero(n1 * sq > total)
    if heavy.size:
        exact_total = Fraction(total)
        for i in heavy:
            counts[i] = math.ceil(Fraction(float(sq[i])) * n / exact_total)
    return counts


def second_stage_from_table(f: DiscreteFunction, counts, eta) -> tuple[np.ndarray, int]:
    """Median over repetitions of row means over the first ``counts[i]`` entries of
    ``eta[k]``. ``eta`` has shape (m, max(counts)). Returns (b_tilde, calls)."""
    eta = np.atleast_2d(np.asarray(eta)) - 1
    counts = np.asarray(counts)
    m = eta.shape[0]
    b = np.empty((f.n1, m))
    calls = 0
    for c in np.unique(counts):
        rows = np.flatnonzero(counts == c)
        vals = f.matrix[rows][:, eta[:, :c]]  # (|rows|, m, c)
        b[rows] = vals.sum(axis=2) / c
        calls += vals.size
    return median_along(b, axis=1), calls


def a3_mean(f: DiscreteFunction, cfg: AdaptiveConfig, s: Stream):
    """Adaptive two-stage Monte Carlo with median boosting.

    Stage 1 estimates each row's L2 norm from a shared (m, ceil(n/N1)) column
    table; stage 2 allocates samples proportionally to the squared estimates and
    takes a median over m repetitions of the row means. The stage-2 table is drawn
    only up to max_i n_i columns, which may be n + 1.
    """
    n, m = cfg.n, cfg.m
    _check_regime(f, n)
    if n < f.n1:
        return np.zeros(f.n1), BudgetAudit(nominal_n=n, repetitions_m=m)
    xi = s.uniform_indices(f.n2, (m, ceil_div(n, f.n1)))
    a_tilde, calls1 = first_stage_from_table(f, xi)
    counts = a3_allocate(a_tilde, n)
    eta = s.uniform_indices(f.n2, (m, int(counts.max())))
    out, calls2 = second_stage_from_table(f, counts, eta)
    return out, BudgetAudit(calls1, calls2, nominal_n=n, repetitions_m=m)


def default_m(n1: int, n2: int, w: float = 1.0) -> int:
    """Smallest odd m >= 8 (w + 1) / log2(e) * log2(n1 + n2)."""
    bound = 8.0 * (w + 1.0) / math.log2(math.e) * math.log2(n1 + n2)
    m = max(1, math.ceil(bound))
    return m if m % 2 else m + 1


def budget_bound(algo: str, n: int, n1: int, m: int = 1) -> int:
    """Worst-case oracle calls: 0 for zero, 2n for a2, 6mn for a3."""
    if algo == "zero":
        return 0
    if algo == "a2":
        return 2 * n
    if algo == "a3":
        return 6 * m * n
    raise ValueError(f"unknown algorithm {algo!r}")
