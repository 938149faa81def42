"""Points of F_p^n, enumeration order, index arithmetic, affine maps.

A point is identified with its index in lexicographic coordinate order: the
point (x_1, ..., x_n) has index sum x_i * p^(n-i).  All exact expectations in
the package run over this order, so it is part of the file-format contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .config import MAX_PRIME, RETRY_CAP, check_budget
from .errors import RetryLimitError, ValidationError
from .rng import as_rng

_SMALL_PRIMES = {2, 3, 5, 7}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p in _SMALL_PRIMES:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def validate_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise ValidationError(f"p = {p} is not prime")
    if p > MAX_PRIME:
        raise ValidationError(f"p = {p} exceeds the supported cap {MAX_PRIME}")
    return p


def validate_dims(p: int, n: int) -> tuple[int, int]:
    p = validate_prime(p)
    n = int(n)
    if n < 1:
        raise ValidationError(f"n = {n} must be at least 1")
    return p, n


def space_size(p: int, n: int) -> int:
    return p**n


@lru_cache(maxsize=None)
def place_values(p: int, n: int) -> np.ndarray:
    v = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    v.setflags(write=False)
    return v


@lru_cache(maxsize=None)
def _digit_table(p: int, n: int) -> np.ndarray:
    idx = np.arange(p**n, dtype=np.int64)
    out = np.empty((p**n, n), dtype=np.int64)
    for i in range(n):
        out[:, i] = (idx // p ** (n - 1 - i)) % p
    out.setflags(write=False)
    return out


def digit_table(p: int, n: int, budget: int | None = None) -> np.ndarray:
    """All points of F_p^n as an (p^n, n) array, lexicographic order."""
    p, n = validate_dims(p, n)
    check_budget(space_size(p, n), budget, f"enumeration of F_{p}^{n}")
    return _digit_table(p, n)


def enumerate_vectors(p: int, n: int, budget: int | None = None) -> list[tuple[int, ...]]:
    """Every vector of F_p^n, lexicographically, as tuples."""
    table = digit_table(p, n, budget)
    return [tuple(int(v) for v in row) for row in table]


def index_of(p: int, vec) -> int:
    v = np.asarray(vec, dtype=np.int64) % p
    return int(v @ place_values(p, len(v)))


def vector_at(p: int, n: int, index: int) -> tuple[int, ...]:
    if not 0 <= index < p**n:
        raise ValidationError(f"index {index} out of range for F_{p}^{n}")
    out = []
    for i in range(n):
        out.append((index // p ** (n - 1 - i)) % p)
    return tuple(out)


def index_add(p: int, n: int, a, b):
    """Indices of x + y given index arrays of x and y (broadcasting)."""
    if p == 2:
        return np.bitwise_xor(a, b)
    d = _digit_table(p, n)
    return ((d[a] + d[b]) % p) @ place_values(p, n)


def index_scale(p: int, n: int, c: int, a):
    """Indices of c·x given an index array of x."""
    c = int(c) % p
    if c == 0:
        return np.zeros_like(np.asarray(a))
    if c == 1:
        return np.asarray(a)
    d = _digit_table(p, n)
    return ((d[a] * c) % p) @ place_values(p, n)


def index_neg(p: int, n: int, a):
    return index_scale(p, n, p - 1, a)


@dataclass
class AffineMap:
    """x ↦ matrix·x + offset over F_p, with an invertible matrix."""

    p: int
    n: int
    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        self.p, self.n = validate_dims(self.p, self.n)
        self.matrix = np.asarray(self.matrix, dtype=np.int64) % self.p
        self.offset = np.asarray(self.offset, dtype=np.int64).reshape(-1) % self.p
        if self.matrix.shape != (self.n, self.n) or self.offset.shape != (self.n,):
            raise ValidationError("affine map shape mismatch")
        if linalg.rank(self.matrix, self.p) != self.n:
            raise ValidationError("affine map matrix is singular")

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64).reshape(-1) % self.p
        if x.shape != (self.n,):
            raise ValidationError("point dimension mismatch")
        return (self.matrix @ x + self.offset) % self.p

    def apply_points(self, points: np.ndarray) -> np.ndarray:
        """Apply to an (m, n) array of points at once."""
        pts = np.asarray(points, dtype=np.int64) % self.p
        return (pts @ self.matrix.T + self.offset) % self.p

    def apply_index(self, idx):
        """Image indices for an array of point indices."""
        d = _digit_table(self.p, self.n)
        return self.apply_points(d[idx]) @ place_values(self.p, self.n)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self ∘ other, i.e. x ↦ self(other(x))."""
        if (self.p, self.n) != (other.p, other.n):
            raise ValidationError("cannot compose maps on different spaces")
        m = (self.matrix @ other.matrix) % self.p
        b = (self.matrix @ other.offset + self.offset) % self.p
        return AffineMap(self.p, self.n, m, b)


def identity_affine(p: int, n: int) -> AffineMap:
    return AffineMap(p, n, np.eye(n, dtype=np.int64), np.zeros(n, dtype=np.int64))


def random_affine(p: int, n: int, seed) -> AffineMap:
    """Uniform member of Aff(n, F_p) by rejection on the linear part."""
    p, n = validate_dims(p, n)
    rng = as_rng(seed)
    for _ in range(RETRY_CAP):
        m = rng.integers(0, p, size=(n, n))
        if linalg.rank(m, p) == n:
            offset = rng.integers(0, p, size=n)
            return AffineMap(p, n, m, offset)
    raise RetryLimitError(
        f"no invertible {n}x{n} matrix over F_{p} in {RETRY_CAP} draws"
    )


def _batch_invertible_mask(mats: np.ndarray, p: int) -> np.ndarray:
    """Which of the (count, n, n) matrices are invertible over F_p.

    Runs one Gaussian elimination across the whole batch at once; dead
    elements keep eliminating on garbage rows, which is harmless.
    """
    B = (np.asarray(mats, dtype=np.int64) % p).copy()
    count, n = B.shape[0], B.shape[1]
    alive = np.ones(count, dtype=bool)
    inv_table = np.array([0] + [pow(i, p - 2, p) for i in range(1, p)], dtype=np.int64)
    rows = np.arange(count)
    for col in range(n):
        nz = B[:, col:, col] != 0
        found = nz.any(axis=1)
        alive &= found
        piv = np.where(found, nz.argmax(axis=1), 0) + col
        cur = B[rows, col].copy()
        B[rows, col] = B[rows, piv]
        B[rows, piv] = cur
        pv = B[:, col, col].copy()
        pv[pv == 0] = 1
        B[:, col, :] = (B[:, col, :] * inv_table[pv][:, None]) % p
        if col + 1 < n:
            factor = B[:, col + 1 :, col]
            B[:, col + 1 :, :] = (
                B[:, col + 1 :, :] - factor[:, :, None] * B[:, col, :][:, None, :]
            ) % p
    return alive


def random_affine_batch(p: int, n: int, seed, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Linear parts (count, n, n) and offsets (count, n) of `count` uniform
    members of Aff(n, F_p), drawn by batched rejection."""
    p, n = validate_dims(p, n)
    if count < 1:
        raise ValidationError("need count >= 1")
    rng = as_rng(seed)
    mats = np.empty((count, n, n), dtype=np.int64)
    filled = 0
    for _ in range(RETRY_CAP):
        if filled == count:
            break
        # invertible fraction is prod_i (1 - p^-i) > 0.288 for every p
        need = count - filled
        batch = rng.integers(0, p, size=(4 * need + 8, n, n))
        good = batch[_batch_invertible_mask(batch, p)]
        take = min(len(good), need)
        mats[filled : filled + take] = good[:take]
        filled += take
    if filled < count:
        raise RetryLimitError(
            f"could not draw {count} invertible {n}x{n} matrices over F_{p}"
        )
    offsets = rng.integers(0, p, size=(count, n))
    return mats, offsets


def apply_map(a: AffineMap, x) -> tuple[int, ...]:
    return tuple(int(v) for v in a.apply(x))


def all_invertible_matrices(p: int, n: int, budget: int | None = None) -> np.ndarray:
    """All of GL(n, F_p), shape (count, n, n).  Exhaustive — small n only."""
    p, n = validate_dims(p, n)
    total = p ** (n * n)
    check_budget(total, budget, f"enumeration of GL({n}, F_{p})")
    mats = digit_table(p, n * n, budget).reshape(total, n, n)
    keep = [i for i in range(total) if linalg.rank(mats[i], p) == n]
    return mats[keep]
