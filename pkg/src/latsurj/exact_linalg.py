"""Arbitrary-precision integer matrix algebra.

Provides the immutable :class:`IntMatrix`, exact determinants (fraction-free
elimination and a CRT fast path sized by the Hadamard bound), Smith normal
form with unimodular transforms, and cokernel structure extraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from . import primes as _primes

_INT64_MAX = 2**62  # conservative bound for "fits in int64 safely"


@dataclass(frozen=True)
class IntMatrix:
    """Immutable dense matrix of arbitrary-precision integers, row-major."""

    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be positive")
        if not isinstance(self.entries, tuple):
            object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        r = len(rows)
        if r == 0:
            raise ValueError("no rows")
        c = len(rows[0])
        if any(len(row) != c for row in rows):
            raise ValueError("ragged rows")
        return cls(r, c, tuple(int(x) for row in rows for x in row))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def from_array(cls, a: np.ndarray) -> "IntMatrix":
        if a.ndim != 2:
            raise ValueError("need a 2-d array")
        return cls(a.shape[0], a.shape[1], tuple(int(x) for x in a.ravel()))

    # -- accessors ----------------------------------------------------

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Tuple[int, ...]:
        return self.entries[j :: self.cols]

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_array(self) -> np.ndarray:
        if self.max_abs() >= _INT64_MAX:
            raise OverflowError("entries do not fit in int64")
        return np.array(self.to_rows(), dtype=np.int64)

    def max_abs(self) -> int:
        return max(abs(x) for x in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def take_columns(self, indices: Sequence[int]) -> "IntMatrix":
        idx = list(indices)
        if any(j < 0 or j >= self.cols for j in idx):
            raise IndexError("column index out of range")
        return IntMatrix(
            self.rows,
            len(idx),
            tuple(self.at(i, j) for i in range(self.rows) for j in idx),
        )

    def append_columns(self, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        cols = [tuple(int(x) for x in c) for c in columns]
        if any(len(c) != self.rows for c in cols):
            raise ValueError("column length must equal row count")
        new = []
        for i in range(self.rows):
            new.extend(self.row(i))
            new.extend(c[i] for c in cols)
        return IntMatrix(self.rows, self.cols + len(cols), tuple(new))

    def __str__(self) -> str:
        return format_matrix(self)


# -- text format -------------------------------------------------------
# First line "rows cols", then one whitespace-separated row per line.


def format_matrix(m: IntMatrix) -> str:
    lines = [f"{m.rows} {m.cols}"]
    lines.extend(" ".join(str(x) for x in m.row(i)) for i in range(m.rows))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> IntMatrix:
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("matrix text must start with 'rows cols'")
    rows, cols = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(body)}")
    return IntMatrix(rows, cols, tuple(int(t) for t in body))


# -- determinants ------------------------------------------------------


def hadamard_bound(n: int, k0: int) -> int:
    """Ceiling of (k0*n)^(n/2).

    Exact when n is even; for odd n the square root is rounded up.  For
    k0 = 1 this is the Hadamard determinant bound.  Note it is NOT a valid
    determinant bound for k0 > 1 (n = 1 with a single entry k0 already
    exceeds sqrt(k0)); internal CRT sizing uses _det_bound instead.
    """
    if n < 1 or k0 < 1:
        raise ValueError("need n >= 1 and k0 >= 1")
    base = k0 * n
    if n % 2 == 0:
        return base ** (n // 2)
    power = base**n
    s = math.isqrt(power)
    return s if s * s == power else s + 1


def _det_bound(n: int, k0: int) -> int:
    """True Hadamard bound k0^n * n^(n/2) >= |det| for |entries| <= k0."""
    if n % 2 == 0:
        return k0**n * n ** (n // 2)
    power = n**n
    s = math.isqrt(power)
    if s * s < power:
        s += 1
    return k0**n * s


def det_bareiss(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if not m.is_square:
        raise ValueError("determinant requires a square matrix")
    n = m.rows
    a = m.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            row_i = a[i]
            row_k = a[k]
            aik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def _det_mod_word_prime(a: np.ndarray, p: int) -> int:
    """Determinant of an int64 residue matrix over F_p (p < 2^30)."""
    a = np.mod(a, p)
    n = a.shape[0]
    det = 1
    sign = 1
    for k in range(n):
        nz = np.nonzero(a[k:, k])[0]
        if nz.size == 0:
            return 0
        i = k + int(nz[0])
        if i != k:
            a[[k, i]] = a[[i, k]]
            sign = -sign
        pivot = int(a[k, k])
        det = det * pivot % p
        if k + 1 < n:
            inv = pow(pivot, -1, p)
            factors = a[k + 1 :, k] * inv % p
            block = a[k + 1 :, k + 1 :]
            block -= factors[:, None] * a[k, k + 1 :]
            block %= p
    return det * sign % p


def _residue_matrices(m: IntMatrix, primes_list) -> Iterable[np.ndarray]:
    """Residue matrix per prime; converts to int64 once when possible."""
    if m.max_abs() < _INT64_MAX:
        arr = m.to_array()
        for p in primes_list:
            yield np.mod(arr, p)
    else:
        for p in primes_list:
            yield np.array(
                [[x % p for x in m.row(i)] for i in range(m.rows)], dtype=np.int64
            )


def det_mod_crt(m: IntMatrix) -> int:
    """Exact determinant via CRT over word-size primes.

    The prime set is sized so its product exceeds twice the Hadamard bound
    for the matrix's actual maximum entry, which pins the signed value.
    """
    if not m.is_square:
        raise ValueError("determinant requires a square matrix")
    n = m.rows
    k0 = max(1, m.max_abs())
    bound = 2 * _det_bound(n, k0)
    count = max(1, bound.bit_length() // 29 + 1)
    primes = _primes.crt_primes(count)

    residue = 0
    modulus = 1
    for p, res_matrix in zip(primes, _residue_matrices(m, primes)):
        r = _det_mod_word_prime(res_matrix, p)
        if modulus == 1:
            residue, modulus = r, p
        else:
            # lift: x = residue (mod modulus), x = r (mod p)
            t = (r - residue) * pow(modulus % p, -1, p) % p
            residue += modulus * t
            modulus *= p
        if modulus > bound:
            break
    if residue > modulus // 2:
        residue -= modulus
    return residue


def det(m: IntMatrix) -> int:
    """Exact determinant.  Small matrices use Bareiss, larger ones CRT."""
    if not m.is_square:
        raise ValueError("determinant requires a square matrix")
    if m.rows <= 8:
        return det_bareiss(m)
    return det_mod_crt(m)


def det_is_zero(m: IntMatrix) -> bool:
    """Exact singularity test with early exit.

    Stops at the first nonzero modular residue; only a genuinely singular
    matrix pays for the full CRT prime set.
    """
    if not m.is_square:
        raise ValueError("singularity test requires a square matrix")
    if m.max_abs() < _INT64_MAX:
        return det_is_zero_array(m.to_array())
    bound = 2 * _det_bound(m.rows, max(1, m.max_abs()))
    count = max(1, bound.bit_length() // 29 + 1)
    primes = _primes.crt_primes(count)
    modulus = 1
    for p, res_matrix in zip(primes, _residue_matrices(m, primes)):
        if _det_mod_word_prime(res_matrix, p) != 0:
            return False
        modulus *= p
        if modulus > bound:
            break
    return True


def det_is_zero_array(arr: np.ndarray) -> bool:
    """det_is_zero on an int64 array, avoiding IntMatrix conversion."""
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("singularity test requires a square matrix")
    k0 = max(1, int(np.abs(arr).max()))
    bound = 2 * _det_bound(arr.shape[0], k0)
    count = max(1, bound.bit_length() // 29 + 1)
    modulus = 1
    for p in _primes.crt_primes(count):
        if _det_mod_word_prime(np.mod(arr, p), p) != 0:
            return False
        modulus *= p
        if modulus > bound:
            break
    return True


# -- Smith normal form -------------------------------------------------


@dataclass(frozen=True)
class SnfDecomposition:
    """left * M * right = diag with unimodular left/right transforms."""

    left: IntMatrix
    diag: IntMatrix
    right: IntMatrix

    def diagonal(self) -> Tuple[int, ...]:
        n = min(self.diag.rows, self.diag.cols)
        return tuple(self.diag.at(i, i) for i in range(n))


def _min_abs_pivot(a: List[List[int]], t: int, n: int, m: int):
    best = None
    pos = None
    for i in range(t, n):
        row = a[i]
        for j in range(t, m):
            v = row[j]
            if v != 0:
                av = abs(v)
                if best is None or av < best:
                    best = av
                    pos = (i, j)
                    if best == 1:
                        return pos
    return pos


def _snf_inplace(a: List[List[int]], u: List[List[int]] | None, v: List[List[int]] | None) -> None:
    """Reduce a to Smith form in place, accumulating row ops in u, column
    ops in v (either may be None when transforms are not needed).

    Pivoting picks the minimum-absolute-value nonzero entry each round,
    which keeps coefficient growth tolerable at desk scale.
    """
    n, m = len(a), len(a[0])
    t = 0
    while t < min(n, m):
        pos = _min_abs_pivot(a, t, n, m)
        if pos is None:
            break
        pi, pj = pos
        if pi != t:
            a[t], a[pi] = a[pi], a[t]
            if u is not None:
                u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for row in a:
                row[t], row[pj] = row[pj], row[t]
            if v is not None:
                for row in v:
                    row[t], row[pj] = row[pj], row[t]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]

        dirty = False
        pivot = a[t][t]
        for i in range(t + 1, n):
            q = a[i][t] // pivot
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if u is not None:
                    u[i] = [x - q * y for x, y in zip(u[i], u[t])]
            if a[i][t]:
                dirty = True
        for j in range(t + 1, m):
            q = a[t][j] // pivot
            if q:
                for row in a:
                    row[j] -= q * row[t]
                if v is not None:
                    for row in v:
                        row[j] -= q * row[t]
            if a[t][j]:
                dirty = True
        if dirty:
            continue  # smaller remainders appeared; re-pick the pivot

        # row and column t are clear; enforce divisibility on the rest
        fixed = True
        for i in range(t + 1, n):
            row = a[i]
            if any(x % pivot for x in row[t + 1 :]):
                a[t] = [x + y for x, y in zip(a[t], row)]
                if u is not None:
                    u[t] = [x + y for x, y in zip(u[t], u[i])]
                fixed = False
                break
        if fixed:
            t += 1


def smith_normal_form(m: IntMatrix) -> SnfDecomposition:
    """Smith normal form with unimodular transforms."""
    a = m.to_rows()
    u = [[1 if i == j else 0 for j in range(m.rows)] for i in range(m.rows)]
    v = [[1 if i == j else 0 for j in range(m.cols)] for i in range(m.cols)]
    _snf_inplace(a, u, v)
    return SnfDecomposition(
        IntMatrix.from_rows(u), IntMatrix.from_rows(a), IntMatrix.from_rows(v)
    )


def smith_diagonal(m: IntMatrix) -> Tuple[int, ...]:
    """Just the diagonal of the Smith form (no transforms; cheaper)."""
    a = m.to_rows()
    _snf_inplace(a, None, None)
    return tuple(a[i][i] for i in range(min(m.rows, m.cols)))


# -- cokernel ----------------------------------------------------------


@dataclass(frozen=True)
class CokernelStructure:
    """Invariant-factor chain plus free rank of Z^rows / M(Z^cols)."""

    invariant_factors: Tuple[int, ...]
    free_rank: int

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        fac = self.invariant_factors
        if any(d < 2 for d in fac):
            raise ValueError("invariant factors must be >= 2")
        if any(fac[i + 1] % fac[i] for i in range(len(fac) - 1)):
            raise ValueError("invariant factors must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors and self.free_rank == 0

    def order(self) -> int | None:
        """Group order, or None when the free rank is positive."""
        if self.free_rank:
            return None
        return math.prod(self.invariant_factors) if self.invariant_factors else 1


def cokernel(m: IntMatrix) -> CokernelStructure:
    """Cokernel structure from the Smith diagonal."""
    diag = smith_diagonal(m)
    rank = sum(1 for d in diag if d != 0)
    factors = tuple(d for d in diag if d > 1)
    return CokernelStructure(factors, m.rows - rank)


@dataclass(frozen=True)
class CokernelPPart:
    """Exponents of p in the invariant factors, plus the free rank."""

    p: int
    exponents: Tuple[int, ...]
    free_rank: int

    @property
    def corank_mod_p(self) -> int:
        return len(self.exponents) + self.free_rank


def cokernel_p_part(m: IntMatrix, p: int) -> CokernelPPart:
    """p-power exponents of each invariant factor (zeros dropped).

    The corank of M mod p equals the number of p-divisible invariant
    factors plus the free rank.
    """
    if not _primes.is_probable_prime(p):
        raise ValueError(f"{p} is not prime")
    structure = cokernel(m)
    exponents = []
    for d in structure.invariant_factors:
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if e:
            exponents.append(e)
    return CokernelPPart(p, tuple(exponents), structure.free_rank)
