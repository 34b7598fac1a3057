"""Discrete L_p spaces over the normalized counting measure and the row-mean operator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

INF = math.inf


def parse_exponent(value) -> float:
    """Parse a norm exponent in [1, inf]; accepts numbers and the strings 'inf'/'infinity'."""
    if isinstance(value, str):
        token = value.strip().lower()
        if token in ("inf", "infinity", "+inf"):
            return INF
        value = float(token)
    p = float(value)
    if math.isnan(p) or p < 1:
        raise ValueError(f"norm exponent must lie in [1, inf], got {value!r}")
    return p


def recip(p: float) -> float:
    """1/p with 1/inf defined as exactly 0."""
    return 0.0 if p == INF else 1.0 / p


def format_exponent(p: float) -> str:
    if p == INF:
        return "inf"
    return repr(int(p)) if float(p).is_integer() else repr(float(p))


@dataclass(frozen=True)
class ExponentPair:
    """The pair (p, q): input norm exponent p, target norm exponent q."""

    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        object.__setattr__(self, "q", parse_exponent(self.q))

    @property
    def p_bar(self) -> float:
        return min(self.p, 2.0)

    @property
    def gap(self) -> float:
        """The clamped exponent (1/p - 1/q)_+."""
        return max(recip(self.p) - recip(self.q), 0.0)


class DiscreteFunction:
    """A function on {1..n1} x {1..n2}, stored as an immutable n1 x n2 float array.

    ``values`` is the flat row-major view; entry (i, j) (1-based) is
    ``values[(i - 1) * n2 + (j - 1)]``.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix):
        arr = np.array(matrix, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a nonempty 2-d array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("function values must be finite")
        arr.setflags(write=False)
        self._matrix = arr

    @classmethod
    def from_flat(cls, n1: int, n2: int, values) -> "DiscreteFunction":
        flat = np.asarray(values, dtype=float).ravel()
        if n1 < 1 or n2 < 1:
            raise ValueError("n1 and n2 must be positive")
        if flat.size != n1 * n2:
            raise ValueError(f"expected {n1 * n2} values, got {flat.size}")
        return cls(flat.reshape(n1, n2))

    @property
    def n1(self) -> int:
        return self._matrix.shape[0]

    @property
    def n2(self) -> int:
        return self._matrix.shape[1]

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def values(self) -> np.ndarray:
        return self._matrix.ravel()

    def row(self, i: int) -> np.ndarray:
        """Row slice f_i, 1-based."""
        return self._matrix[i - 1]

    def column(self, j: int) -> np.ndarray:
        """Column slice f_j = (f(i, j))_i, 1-based."""
        return self._matrix[:, j - 1]

    def __mul__(self, a) -> "DiscreteFunction":
        return DiscreteFunction(a * self._matrix)

    __rmul__ = __mul__

    def __add__(self, other: "DiscreteFunction") -> "DiscreteFunction":
        return DiscreteFunction(self._matrix + other._matrix)

    def __eq__(self, other) -> bool:
        return isinstance(other, DiscreteFunction) and np.array_equal(self._matrix, other._matrix)

    def __hash__(self):
        return hash((self._matrix.shape, self._matrix.tobytes()))

    def __repr__(self) -> str:
        return f"DiscreteFunction(n1={self.n1}, n2={self.n2})"


def _as_flat(f) -> np.ndarray:
    if isinstance(f, DiscreteFunction):
        return f.values
    return np.asarray(f, dtype=float).ravel()


def lp_norm(f, p, size: int | None = None) -> float:
    """Normalized-counting-measure p-norm: ``((1/size) sum |f|^p)^(1/p)``, or ``max |f|`` at p = inf.

    Sums are pairwise (numpy's contiguous reduction), so results are reproducible
    run to run. The vector is rescaled by its max before powering to avoid overflow.
    """
    p = parse_exponent(p)
    x = np.abs(_as_flat(f))
    if size is None:
        size = x.size
    if size != x.size:
        raise ValueError(f"size {size} does not match element count {x.size}")
    if size == 0:
        raise ValueError("empty vector")
    top = float(x.max())
    if p == INF or top == 0.0:
        return top
    if p == 1.0:
        return float(np.sum(x)) / size
    scaled = x / top
    s = float(np.sum(scaled * scaled)) if p == 2.0 else float(np.sum(scaled**p))
    return top * (s / size) ** (1.0 / p)


def mean_rows(f: DiscreteFunction) -> np.ndarray:
    """(Sf)(i) = (1/N2) sum_j f(i, j)."""
    return np.sum(f.matrix, axis=1) / f.n2


def operator_norm(p, q, n1: int) -> float:
    """Norm of the row-mean operator L_p^{n1 x n2} -> L_q^{n1}: n1^((1/p - 1/q)_+)."""
    if n1 < 1:
        raise ValueError("n1 must be positive")
    return float(n1) ** ExponentPair(p, q).gap


def norm_witness(p, q, n1: int, n2: int) -> DiscreteFunction:
    """Unit-norm input attaining the operator norm when p <= q: mass n1^(1/p) on row 1."""
    pair = ExponentPair(p, q)
    if pair.p > pair.q:
        raise ValueError("norm witness requires p <= q")
    m = np.zeros((n1, n2))
    m[0, :] = float(n1) ** recip(pair.p)
    return DiscreteFunction(m)


def read_matrix(path) -> DiscreteFunction:
    """Read the text format: a header line "N1 N2" followed by N1 rows of N2 numbers."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}: header must be 'N1 N2'")
    n1, n2 = int(header[0]), int(header[1])
    if len(lines) - 1 != n1:
        raise ValueError(f"{path}: expected {n1} rows, found {len(lines) - 1}")
    rows = []
    for k, ln in enumerate(lines[1:], start=2):
        row = [float(tok) for tok in ln.split()]
        if len(row) != n2:
            raise ValueError(f"{path}:{k}: expected {n2} values, found {len(row)}")
        rows.append(row)
    return DiscreteFunction.from_flat(n1, n2, rows)


def write_matrix(f: DiscreteFunction, path) -> None:
    out = [f"{f.n1} {f.n2}"]
    out += [" ".join(repr(float(v)) for v in row) for row in f.matrix]
    Path(path).write_text("\n".join(out) + "\n")
