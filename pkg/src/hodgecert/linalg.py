"""Exact linear algebra over Q and over word-size prime fields.

Three kinds of computation live here:

* ranks modulo a prime, by dense numpy elimination or sparse Markowitz
  elimination depending on the fill of the matrix;
* exact ranks over Q by sparse fraction-free elimination;
* exact reduced row echelon forms and kernels by a multi-modular method:
  row reduce modulo many primes, combine by CRT, rationally reconstruct and
  then *verify* the result against the original matrix, so the answer never
  depends on a prime being lucky.

:func:`certify_rank` combines them. A rank that is full modulo some prime is
full over Q; anything else needs either the exact path or exact kernel
witnesses to turn the modular lower bound into an equality.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heapify, heappop, heappush
from math import gcd, isqrt

import numpy as np
from sympy import isprime, prevprime

from .errors import TooLargeError

log = logging.getLogger(__name__)

EXACT_LIMIT = 2_000_000
PRIME_BITS = (20, 30)
# dense numpy elimination below this many cells, provided the matrix is not too sparse
DENSE_CELLS = 30_000_000
DENSE_MIN_FILL = 0.02


class MatExact:
    """Sparse matrix over Q: ``entries[(i, j)]`` holds the nonzero Fractions."""

    __slots__ = ("rows", "cols", "entries", "_scales", "_coo")

    def __init__(self, rows, cols, entries=None):
        self.rows = int(rows)
        self.cols = int(cols)
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")
            v = Fraction(v)
            if v:
                clean[(int(i), int(j))] = v
        self.entries = clean
        self._scales = None
        self._coo = None

    @classmethod
    def from_dense(cls, data):
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, {(i, j): v for i, r in enumerate(data) for j, v in enumerate(r) if v})

    @classmethod
    def from_row_dicts(cls, row_dicts, cols):
        entries = {(i, j): v for i, r in enumerate(row_dicts) for j, v in r.items()}
        return cls(len(row_dicts), cols, entries)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, MatExact):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __getitem__(self, ij):
        return self.entries.get(ij, Fraction(0))

    def to_dense(self):
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self):
        rows = [{} for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def transpose(self):
        return MatExact(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        entries = dict(self.entries)
        for k, v in other.entries.items():
            entries[k] = entries.get(k, 0) + v
        return MatExact(self.rows, self.cols, entries)

    def scale(self, c):
        c = Fraction(c)
        return MatExact(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        right = other.row_dicts()
        entries = {}
        for (i, k), v in self.entries.items():
            for j, w in right[k].items():
                entries[(i, j)] = entries.get((i, j), 0) + v * w
        return MatExact(self.rows, other.cols, entries)

    def matvec(self, vec):
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.cols} columns")
        out = [Fraction(0)] * self.rows
        for (i, j), v in self.entries.items():
            if vec[j]:
                out[i] += v * vec[j]
        return out

    apply_exact = matvec

    def exact(self):
        return self

    def row_scales(self):
        """Per-row lcm of denominators: multiplying row i by it gives integers."""
        if self._scales is None:
            scales = [1] * self.rows
            for (i, _), v in self.entries.items():
                q = v.denominator
                if q != 1:
                    scales[i] = scales[i] * q // gcd(scales[i], q)
            self._scales = scales
        return self._scales

    def bad_prime(self, p):
        return any(s % p == 0 for s in self.row_scales() if s != 1)

    def integer_rows(self):
        """Row dicts with denominators cleared row by row."""
        scales = self.row_scales()
        rows = [{} for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v.numerator * (scales[i] // v.denominator)
        return rows

    def _integer_coo(self):
        if self._coo is None:
            scales = self.row_scales()
            keys = list(self.entries)
            r = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
            c = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
            ints = [v.numerator * (scales[i] // v.denominator) for (i, _), v in self.entries.items()]
            small = None
            if all(-(1 << 62) < x < (1 << 62) for x in ints):
                small = np.array(ints, dtype=np.int64)
            self._coo = (r, c, ints, small)
        return self._coo

    def reduce(self, p):
        """Row-scaled integer matrix mod p; same rank and kernel as ``self``."""
        if self.bad_prime(p):
            raise ValueError(f"prime {p} divides a row denominator")
        r, c, ints, small = self._integer_coo()
        if small is not None:
            vals = small % p
        else:
            vals = np.array([x % p for x in ints], dtype=np.int64)
        return MatMod(self.rows, self.cols, p, r, c, vals)

    def __repr__(self):
        return f"MatExact({self.rows}x{self.cols}, nnz={self.nnz})"


class MatMod:
    """Sparse matrix over GF(p) in coordinate form, entries reduced to ``[0, p)``."""

    __slots__ = ("rows", "cols", "p", "r", "c", "vals")

    def __init__(self, rows, cols, p, r, c, vals):
        self.rows = int(rows)
        self.cols = int(cols)
        self.p = int(p)
        r = np.asarray(r, dtype=np.int64)
        c = np.asarray(c, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.int64) % p
        if r.size:
            if r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols:
                raise IndexError("entry outside matrix bounds")
            keys = r * cols + c
            uniq, inv = np.unique(keys, return_inverse=True)
            if uniq.size != keys.size:
                summed = np.zeros(uniq.size, dtype=np.int64)
                np.add.at(summed, inv, vals)
                vals = summed % p
                r, c = uniq // cols, uniq % cols
            keep = vals != 0
            r, c, vals = r[keep], c[keep], vals[keep]
        self.r, self.c, self.vals = r, c, vals

    @classmethod
    def from_dense(cls, data, p):
        a = np.asarray(data, dtype=object)
        a = np.array([[int(x) % p for x in row] for row in a], dtype=np.int64).reshape(a.shape)
        r, c = np.nonzero(a)
        return cls(a.shape[0], a.shape[1], p, r, c, a[r, c])

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return int(self.vals.size)

    def to_dense(self):
        a = np.zeros((self.rows, self.cols), dtype=np.int64)
        a[self.r, self.c] = self.vals
        return a

    def row_dicts(self):
        rows = [{} for _ in range(self.rows)]
        for i, j, v in zip(self.r.tolist(), self.c.tolist(), self.vals.tolist()):
            rows[i][j] = v
        return rows

    def transpose(self):
        return MatMod(self.cols, self.rows, self.p, self.c, self.r, self.vals)

    def matvec(self, vec):
        v = np.asarray([int(x) % self.p for x in vec], dtype=np.int64)
        out = np.zeros(self.rows, dtype=np.int64)
        np.add.at(out, self.r, (self.vals * v[self.c]) % self.p)
        return out % self.p

    def __repr__(self):
        return f"MatMod({self.rows}x{self.cols}, p={self.p}, nnz={self.nnz})"


class ImplicitMatrix:
    """A matrix known through its reductions mod p.

    Used for stacked criterion matrices whose exact entries are huge: the
    certifier only needs ``reduce(p)``; ``exact()`` is built on demand and is
    subject to the usual size limit.
    """

    def __init__(self, shape, reduce, exact=None, apply_exact=None, bad_prime=None, label=""):
        self.rows, self.cols = shape
        self._reduce = reduce
        self._exact = exact
        self._apply_exact = apply_exact
        self._bad_prime = bad_prime
        self.label = label

    @property
    def shape(self):
        return (self.rows, self.cols)

    def reduce(self, p):
        return self._reduce(p)

    def bad_prime(self, p):
        return bool(self._bad_prime and self._bad_prime(p))

    def exact(self):
        if self._exact is None:
            raise TooLargeError(f"no exact form available for {self.label or 'implicit matrix'}")
        return self._exact()

    def apply_exact(self, vec):
        if self._apply_exact is not None:
            return self._apply_exact(vec)
        return self.exact().matvec(vec)

    def __repr__(self):
        return f"ImplicitMatrix({self.rows}x{self.cols}, {self.label!r})"


# ---------------------------------------------------------------------------
# primes


def draw_primes(seed, bits=PRIME_BITS):
    """Endless stream of distinct primes drawn uniformly from ``[2^lo, 2^hi)``."""
    rng = random.Random(seed)
    lo, hi = 1 << bits[0], 1 << bits[1]
    seen = set()
    while True:
        n = rng.randrange(lo, hi) | 1
        if n not in seen and isprime(n):
            seen.add(n)
            yield n


def descending_primes(start=1 << 30):
    p = start
    while True:
        p = prevprime(p)
        yield p


# ---------------------------------------------------------------------------
# modular elimination


def _echelon_dense(a, p, stop_at=None):
    """Row echelon form of ``a`` (int64, entries in [0,p)) in place; returns pivot columns."""
    m, n = a.shape
    pivots = []
    r = 0
    limit = min(m, n) if stop_at is None else min(stop_at, m, n)
    for c in range(n):
        if r >= limit:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = (a[r, c:] * inv) % p
        below = r + 1 + np.flatnonzero(a[r + 1:, c])
        if below.size:
            a[below, c:] = (a[below, c:] - (a[below, c, None] * a[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return pivots


def rref_mod(a, p):
    """Reduced row echelon form over GF(p): ``(pivot columns, rank x n array)``."""
    a = np.array(a, dtype=np.int64) % p
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r, c:] = (a[r, c:] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            a[others, c:] = (a[others, c:] - (col[others, None] * a[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return pivots, a[:r]


def _sparse_rank(rows, p=None, stop_at=None):
    """Rank by sparse elimination with Markowitz pivot choice.

    ``rows`` are dicts ``col -> value``; values are residues when ``p`` is
    given, Python ints otherwise (fraction-free elimination with content
    removal). The input dicts are consumed.
    """
    rows = [r for r in rows if r]
    col_rows = {}
    for i, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(i)
    heap = [(len(row), i) for i, row in enumerate(rows)]
    heapify(heap)
    done = [False] * len(rows)
    rank = 0
    while heap:
        n, i = heappop(heap)
        row = rows[i]
        if done[i] or n != len(row):
            continue
        done[i] = True
        if not row:
            continue
        for c in row:
            col_rows[c].discard(i)
        c = min(row, key=lambda cc: (len(col_rows[cc]), cc))
        piv = row[c]
        inv = pow(piv, -1, p) if p else None
        for j in list(col_rows[c]):
            other = rows[j]
            if p:
                factor = other[c] * inv % p
                for cc, v in row.items():
                    nv = (other.get(cc, 0) - factor * v) % p
                    if nv:
                        if cc not in other:
                            col_rows[cc].add(j)
                        other[cc] = nv
                    elif cc in other:
                        del other[cc]
                        col_rows[cc].discard(j)
            else:
                oc = other[c]
                g = gcd(piv, oc)
                a, b = piv // g, oc // g
                for cc in list(other):
                    other[cc] *= a
                for cc, v in row.items():
                    nv = other.get(cc, 0) - b * v
                    if nv:
                        if cc not in other:
                            col_rows[cc].add(j)
                        other[cc] = nv
                    elif cc in other:
                        del other[cc]
                        col_rows[cc].discard(j)
                content = 0
                for v in other.values():
                    content = gcd(content, v)
                    if content == 1:
                        break
                if content > 1:
                    for cc in other:
                        other[cc] //= content
            heappush(heap, (len(other), j))
        rank += 1
        if stop_at is not None and rank >= stop_at:
            break
    return rank


def rank_mod(m: MatMod, stop_at=None):
    """Rank of ``m`` over GF(p)."""
    if m.nnz == 0:
        return 0
    cells = m.rows * m.cols
    fill = m.nnz / cells
    full = min(m.rows, m.cols)
    stop_at = full if stop_at is None else min(stop_at, full)
    if cells <= DENSE_CELLS and fill >= DENSE_MIN_FILL:
        a = m.to_dense()
        if a.shape[0] > 4 * a.shape[1]:
            return _tall_rank(a, m.p, stop_at)
        return len(_echelon_dense(a, m.p, stop_at))
    rows = m.row_dicts() if m.rows <= m.cols else m.transpose().row_dicts()
    return _sparse_rank(rows, m.p, stop_at)


def _modmul_float(a, b, p):
    """``a @ b mod p`` through float64 BLAS; 15-bit limbs keep every partial sum below 2^53."""
    if a.shape[1] >= 1 << 22:
        return _modmul(a, b, p)
    a_hi, a_lo = (a >> 15).astype(np.float64), (a & 0x7FFF).astype(np.float64)
    b_hi, b_lo = (b >> 15).astype(np.float64), (b & 0x7FFF).astype(np.float64)
    hh = (a_hi @ b_hi).astype(np.int64) % p
    mid = ((a_hi @ b_lo).astype(np.int64) + (a_lo @ b_hi).astype(np.int64)) % p
    ll = (a_lo @ b_lo).astype(np.int64) % p
    shift = (1 << 15) % p
    return ((hh * shift % p) * shift + mid * shift + ll) % p


def _tall_rank(a, p, stop_at):
    """Rank of a tall dense matrix: rows are fed in chunks against a reduced basis."""
    m, n = a.shape
    basis = np.zeros((0, n), dtype=np.int64)
    pivots = []
    chunk = max(n, 256)
    for start in range(0, m, chunk):
        block = a[start:start + chunk]
        if pivots:
            block = (block - _modmul_float(block[:, pivots], basis, p)) % p
        new, rows = rref_mod(block, p)
        if new:
            if pivots:
                basis = (basis - _modmul_float(basis[:, new], rows, p)) % p
            basis = np.vstack([basis, rows])
            pivots.extend(new)
        if len(pivots) >= stop_at:
            break
    return min(len(pivots), stop_at)


def rank_exact(m: MatExact, limit=EXACT_LIMIT):
    """Rank over Q by sparse fraction-free elimination."""
    if m.rows * m.cols > limit:
        raise TooLargeError(f"{m.rows}x{m.cols} exceeds the exact-path limit of {limit} entries")
    return _sparse_rank(m.integer_rows())


# ---------------------------------------------------------------------------
# multi-modular reduced row echelon form


def rational_reconstruction(u, m, bound=None):
    """Return ``(n, d)`` with ``n/d = u mod m``, ``|n|, d <= bound``, or ``None``."""
    if bound is None:
        bound = isqrt(m // 2)
    r0, r1 = m, u % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    if gcd(r1, s1) != 1:
        return None
    return r1, s1


def _reconstruct_common(residues, m):
    """Reconstruct all residues as ``numerators / D`` with a shared denominator ``D``."""
    bound = isqrt(m // 2)
    half = m // 2
    den = 1
    nums = []
    rescale = []
    for u in residues:
        w = (u * den) % m
        if w > half:
            w -= m
        if abs(w) <= bound:
            nums.append(w)
            rescale.append(den)
            continue
        rec = rational_reconstruction(w, m, bound)
        if rec is None:
            return None
        n, d = rec
        den *= d
        if den > bound:
            return None
        nums.append(n)
        rescale.append(den)
    # entry k was reconstructed as nums[k] / rescale[k]; bring everything over den
    return [n * (den // s) for n, s in zip(nums, rescale)], den


@dataclass
class RREF:
    """Exact reduced row echelon form with a common denominator.

    Row ``i`` has a 1 in column ``pivots[i]`` and ``numerators[i][k] / denominator``
    in column ``free[k]``.
    """

    cols: int
    pivots: list
    free: list
    numerators: list
    denominator: int
    primes_used: int = 0

    @property
    def rank(self):
        return len(self.pivots)

    def entry(self, i, k):
        return Fraction(self.numerators[i][k], self.denominator)

    def row_dicts(self):
        out = []
        for i, c in enumerate(self.pivots):
            row = {c: Fraction(1)}
            for k, f in enumerate(self.free):
                if self.numerators[i][k]:
                    row[f] = self.entry(i, k)
            out.append(row)
        return out

    def kernel_vectors(self):
        """Integer kernel basis, one vector per free column, content 1, first nonzero positive."""
        vecs = []
        for k, f in enumerate(self.free):
            v = [0] * self.cols
            v[f] = self.denominator
            for i, c in enumerate(self.pivots):
                v[c] = -self.numerators[i][k]
            vecs.append(normalize_integer_vector(v))
        return vecs


def normalize_integer_vector(v):
    """Scale a rational vector to integers with content 1 and first nonzero entry positive."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    content = 0
    for x in ints:
        content = gcd(content, x)
    if content == 0:
        return ints
    lead = next(x for x in ints if x)
    if lead < 0:
        content = -content
    return [x // content for x in ints]


def _verify_rref(rows, cols, rref):
    """Every input row lies in the span of the candidate RREF rows (exact integers)."""
    pos = {c: i for i, c in enumerate(rref.pivots)}
    free_pos = {f: k for k, f in enumerate(rref.free)}
    den = rref.denominator
    nums = rref.numerators
    for row in rows:
        residual = {}
        for c, v in row.items():
            if c in free_pos:
                residual[free_pos[c]] = residual.get(free_pos[c], 0) + v * den
        for c, v in row.items():
            i = pos.get(c)
            if i is None:
                continue
            numrow = nums[i]
            for k, n in enumerate(numrow):
                if n:
                    residual[k] = residual.get(k, 0) - v * n
        if any(residual.values()):
            return False
    return True


def _modmul(a, b, p):
    """``a @ b mod p`` for int64 arrays with entries in [0, p), p < 2^30, inner dimension < 2^18."""
    hi, lo = a >> 15, a & 0x7FFF
    return (((hi @ b) % p) * (1 << 15) + lo @ b) % p


def _rref_dixon(m, int_rows, max_steps=20000):
    """RREF by p-adic lifting from a single prime; ``None`` when not applicable."""
    r_idx, c_idx, ints, small = m._integer_coo()
    if small is None or (small.size and np.abs(small).max() >= 1 << 20) or m.rows * m.cols == 0:
        return None
    p = next(q for q in descending_primes() if not m.bad_prime(q))
    a = np.zeros((m.rows, m.cols), dtype=np.int64)
    a[r_idx, c_idx] = small
    pivots, _ = rref_mod(a % p, p)
    rank = len(pivots)
    if rank == 0:
        return RREF(m.cols, [], list(range(m.cols)), [], 1)
    indep_rows, _ = rref_mod(a.T % p, p)
    piv_set = set(pivots)
    free = [c for c in range(m.cols) if c not in piv_set]
    sub = a[indep_rows]
    b = sub[:, pivots]
    if not free:
        return RREF(m.cols, list(pivots), [], [[] for _ in pivots], 1)
    rhs = sub[:, free].copy()
    if np.abs(b).max() * rank * p >= 1 << 62:
        return None
    _, aug = rref_mod(np.hstack([b % p, np.eye(rank, dtype=np.int64)]), p)
    binv = aug[:, rank:]
    acc = [0] * (rank * len(free))
    modulus = 1
    next_try = 4
    for step in range(1, max_steps + 1):
        x = _modmul(binv, rhs % p, p)
        flat = x.ravel().tolist()
        acc = [u + modulus * v for u, v in zip(acc, flat)]
        modulus *= p
        rhs = (rhs - b @ x) // p
        if step < next_try:
            continue
        next_try = step + max(2, step // 4)
        rec = _reconstruct_common(acc, modulus)
        if rec is None:
            continue
        nums_flat, den = rec
        nf = len(free)
        cand = RREF(m.cols, list(pivots), free,
                    [nums_flat[i * nf:(i + 1) * nf] for i in range(rank)], den, step)
        if _verify_rref(int_rows, m.cols, cand):
            return cand
        if not any(rhs.ravel()):
            break
    return None


def rref_exact(m: MatExact, limit=EXACT_LIMIT, max_primes=4000):
    """Exact RREF over Q by multi-modular reduction, CRT, rational reconstruction and verification."""
    if m.rows * m.cols > limit:
        raise TooLargeError(f"{m.rows}x{m.cols} exceeds the exact-path limit of {limit} entries")
    int_rows = m.integer_rows()
    if m.nnz == 0:
        return RREF(m.cols, [], list(range(m.cols)), [], 1)
    cand = _rref_dixon(m, int_rows)
    if cand is not None:
        return cand
    best = None
    acc = None
    modulus = 1
    used = 0
    next_try = 1
    for tried, p in enumerate(descending_primes()):
        if tried >= max_primes:
            break
        if m.bad_prime(p):
            continue
        pivots, r = rref_mod(m.reduce(p).to_dense(), p)
        key = (len(pivots), [-c for c in pivots])
        if best is not None and key < best:
            continue
        if best is None or key > best:
            best = key
            acc = None
            modulus = 1
            used = 0
            next_try = 1
        piv_set = set(pivots)
        free = [c for c in range(m.cols) if c not in piv_set]
        vals = r[:, free].ravel().tolist() if free and pivots else []
        if acc is None:
            acc = vals
        else:
            inv = pow(modulus % p, -1, p)
            acc = [a + modulus * (((v - a) * inv) % p) for a, v in zip(acc, vals)]
        modulus *= p
        used += 1
        if used < next_try:
            continue
        next_try = used + max(1, used // 2)
        rec = _reconstruct_common(acc, modulus)
        if rec is None:
            continue
        nums_flat, den = rec
        nf = len(free)
        nums = [nums_flat[i * nf:(i + 1) * nf] for i in range(len(pivots))]
        cand = RREF(m.cols, list(pivots), free, nums, den, used)
        if _verify_rref(int_rows, m.cols, cand):
            log.debug("rref_exact %dx%d: rank %d after %d primes", m.rows, m.cols, cand.rank, used)
            return cand
    raise RuntimeError("multi-modular RREF did not converge")


def kernel_basis(m: MatExact, limit=EXACT_LIMIT):
    """Right kernel basis: integer vectors, content 1, first nonzero entry positive."""
    return rref_exact(m, limit).kernel_vectors()


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class CertPolicy:
    num_primes: int = 2
    exact_fallback: bool = True
    seed: int = 0
    exact_limit: int = EXACT_LIMIT
    threads: int = 1


@dataclass
class RankCertificate:
    """How a rank claim was established.

    ``mode == "exact"`` means ``rank_claimed`` is the rank over Q.
    ``mode == "modular-lower-bound"`` means only ``rank >= rank_claimed`` is proven.
    """

    rank_claimed: int
    mode: str
    primes_used: list
    agreement: bool
    method: str
    shape: tuple = (0, 0)
    rejected_primes: list = field(default_factory=list)
    label: str = ""

    @property
    def exact(self):
        return self.mode == "exact"

    def to_dict(self):
        return {
            "label": self.label,
            "shape": list(self.shape),
            "rank": self.rank_claimed,
            "mode": self.mode,
            "method": self.method,
            "primes": list(self.primes_used),
            "rejected_primes": list(self.rejected_primes),
            "agreement": self.agreement,
        }


def _witness_rank(m, witnesses):
    """Exactly verify that the witnesses lie in the kernel; return their rank."""
    if not witnesses:
        return 0
    for w in witnesses:
        if any(m.apply_exact(list(w))):
            raise ValueError("kernel witness is not in the kernel")
    return rank_exact(MatExact.from_dense(witnesses))


def certify_rank(m, policy=CertPolicy(), witnesses=(), label=""):
    """Certify the rank of ``m`` (a :class:`MatExact` or :class:`ImplicitMatrix`).

    Ranks modulo ``policy.num_primes`` random primes are lower bounds for the
    rank over Q. Primes where the rank drops below the best seen are recorded
    as rejected and replaced. A full modular rank is exact. Otherwise the
    bound is closed either by exact kernel ``witnesses`` (``rank + #witnesses
    == cols``) or by exact elimination when ``policy.exact_fallback`` is set.
    """
    rows, cols = m.shape
    full = min(rows, cols)
    if full == 0:
        return RankCertificate(0, "exact", [], True, "empty", (rows, cols), label=label)
    stream = draw_primes(policy.seed)
    ranks = {}
    rejected = []

    def one(p):
        return p, rank_mod(m.reduce(p))

    pending = policy.num_primes
    draws = 0
    pool = ThreadPoolExecutor(max_workers=policy.threads) if policy.threads > 1 else None
    try:
        while pending > 0 and draws < 8 * policy.num_primes + 8:
            batch = []
            while len(batch) < pending:
                p = next(stream)
                draws += 1
                if m.bad_prime(p):
                    rejected.append(p)
                    continue
                batch.append(p)
            results = list(pool.map(one, batch)) if pool else [one(p) for p in batch]
            ranks.update(results)
            best = max(ranks.values())
            good = [p for p in ranks if ranks[p] == best]
            pending = policy.num_primes - len(good)
    finally:
        if pool:
            pool.shutdown()
    best = max(ranks.values())
    used = [p for p in ranks if ranks[p] == best][:policy.num_primes]
    rejected += [p for p in ranks if ranks[p] != best]
    agreement = len(used) == policy.num_primes
    if best == full:
        return RankCertificate(best, "exact", used, agreement, "modular-full-rank",
                               (rows, cols), rejected, label)
    if witnesses:
        wr = _witness_rank(m, witnesses)
        if best + wr == cols:
            return RankCertificate(best, "exact", used, agreement, "modular-bound+kernel-witness",
                                   (rows, cols), rejected, label)
    if policy.exact_fallback:
        exact = m.exact()
        r = rank_exact(exact, policy.exact_limit)
        return RankCertificate(r, "exact", used, agreement, "exact-elimination",
                               (rows, cols), rejected, label)
    return RankCertificate(best, "modular-lower-bound", used, agreement, "modular",
                           (rows, cols), rejected, label)
