"""Graded pieces of the Jacobian ring R = Q[x_0..x_{N-1}] / (df/dx_0, ..., df/dx_{N-1}).

Each degree is handled on its own: the relation matrix of J_e has rows
``x^b * df/dx_i`` and columns the monomials of degree e in *descending*
grevlex order, so the pivots of its reduced echelon form are leading
monomials and the free columns are the standard monomials. When every
partial derivative is a monomial the quotient is a monomial algebra and no
elimination is needed at all.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegreeMismatchError, NonHomogeneousError, SingularError, TooLargeError
from .linalg import MatExact, descending_primes, rank_mod, rref_exact
from .poly import (Polynomial, count_monomials, grevlex_key, mono_divides, mono_mul,
                   monomials_of_degree, partials)

GENERIC_SIZE_CAP = 50_000


class GradedBasis:
    """Standard monomials of R^e and the normal form of every other monomial of degree e."""

    def __init__(self, degree, num_vars, standard, reductions=None):
        self.degree = degree
        self.num_vars = num_vars
        self.standard = tuple(sorted(standard, key=grevlex_key))
        self.index = {m: i for i, m in enumerate(self.standard)}
        # None: monomial algebra, every non-standard monomial is zero
        self._reductions = reductions

    def __len__(self):
        return len(self.standard)

    @property
    def dim(self):
        return len(self.standard)

    def nf_monomial(self, mono):
        i = self.index.get(mono)
        if i is not None:
            return {i: Fraction(1)}
        if self._reductions is None:
            return {}
        return self._reductions[mono]

    def reducer_matrix(self):
        """Matrix of the normal form map S^e -> R^e (columns in ascending grevlex order)."""
        entries = {}
        for j, mono in enumerate(monomials_of_degree(self.num_vars, self.degree)):
            for i, v in self.nf_monomial(mono).items():
                entries[(i, j)] = v
        return MatExact(self.dim, count_monomials(self.num_vars, self.degree), entries)

    def __repr__(self):
        return f"GradedBasis(degree={self.degree}, dim={self.dim})"


@dataclass(frozen=True)
class RingElement:
    ring: "JacobianRing"
    degree: int
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.ring.dim(self.degree):
            raise DegreeMismatchError(
                f"{len(self.coords)} coordinates for R^{self.degree} of dimension {self.ring.dim(self.degree)}")

    def is_zero(self):
        return not any(self.coords)

    def _same(self, other):
        if other.ring is not self.ring or other.degree != self.degree:
            raise DegreeMismatchError("elements of different graded pieces")

    def __add__(self, other):
        self._same(other)
        return RingElement(self.ring, self.degree, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._same(other)
        return RingElement(self.ring, self.degree, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, c):
        c = Fraction(c)
        return RingElement(self.ring, self.degree, tuple(c * a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self.ring.multiply(self, other)

    def to_polynomial(self):
        basis = self.ring.basis(self.degree)
        return Polynomial({m: c for m, c in zip(basis.standard, self.coords) if c}, self.ring.num_vars)

    def support(self):
        return [i for i, c in enumerate(self.coords) if c]


class JacobianRing:
    """Lazily computed graded pieces of the Jacobian ring of ``f``.

    Use :func:`build` for the checked constructor; the bare class skips the
    smoothness test so that :func:`smooth_check` can probe singular input.
    """

    def __init__(self, f, size_cap=GENERIC_SIZE_CAP, force=False):
        if f.is_zero() or not f.is_homogeneous():
            raise NonHomogeneousError("f must be a nonzero homogeneous polynomial")
        if f.degree < 3:
            raise DegreeMismatchError(f"f must have degree >= 3, got {f.degree}")
        self.f = f
        self.num_vars = f.num_vars
        self.d = f.degree
        self.socle_degree = self.num_vars * (self.d - 2)
        self.partials = partials(f)
        self.size_cap = size_cap
        self.force = force
        self.is_monomial_fastpath = all(len(g) <= 1 for g in self.partials)
        self._generators = [next(iter(g.terms)) for g in self.partials if len(g) == 1]
        self._bases = {}
        self._locks = {}
        self._lock = threading.Lock()
        self._prod_cache = {}
        # set once the socle test has passed; degrees above the socle are then known to vanish
        self.smooth = False

    @property
    def sigma(self):
        return self.socle_degree

    def basis(self, e):
        if e in self._bases:
            return self._bases[e]
        with self._lock:
            lock = self._locks.setdefault(e, threading.Lock())
        with lock:
            if e not in self._bases:
                self._bases[e] = self._build_basis(e)
        return self._bases[e]

    def dim(self, e):
        if e < 0:
            return 0
        return self.basis(e).dim

    def hilbert_vector(self, top=None):
        top = self.socle_degree if top is None else top
        return [self.dim(e) for e in range(top + 1)]

    def _build_basis(self, e):
        if e < 0 or (self.smooth and e > self.socle_degree):
            return GradedBasis(e, self.num_vars, ())
        if self.is_monomial_fastpath:
            return GradedBasis(e, self.num_vars, self._standard_monomials_fast(e))
        return self._build_generic(e)

    def _standard_monomials_fast(self, e):
        caps = [e] * self.num_vars
        others = []
        for g in self._generators:
            support = [i for i, x in enumerate(g) if x]
            if len(support) == 1:
                i = support[0]
                caps[i] = min(caps[i], g[i] - 1)
            else:
                others.append(g)
        out = []

        def rec(i, left, prefix):
            if i == self.num_vars - 1:
                if left <= caps[i]:
                    out.append(tuple(prefix + [left]))
                return
            for x in range(min(left, caps[i]), -1, -1):
                rec(i + 1, left - x, prefix + [x])

        rec(0, e, [])
        return [m for m in out if not any(mono_divides(g, m) for g in others)]

    def relation_matrix(self, e):
        """Rows ``x^b * df/dx_i`` over the monomials of degree e in descending grevlex order."""
        cols = monomials_of_degree(self.num_vars, e)[::-1]
        col_index = {m: j for j, m in enumerate(cols)}
        entries = {}
        r = 0
        for beta in monomials_of_degree(self.num_vars, e - self.d + 1):
            for g in self.partials:
                if g.is_zero():
                    continue
                for mono, c in g.terms.items():
                    entries[(r, col_index[mono_mul(beta, mono)])] = c
                r += 1
        return MatExact(r, len(cols), entries), cols

    def _build_generic(self, e):
        n_cols = count_monomials(self.num_vars, e)
        if e < self.d - 1:
            return GradedBasis(e, self.num_vars, monomials_of_degree(self.num_vars, e), {})
        if n_cols > self.size_cap and not self.force:
            raise TooLargeError(
                f"dim S^{e} = {n_cols} exceeds the generic-path cap {self.size_cap}; use force")
        rel, cols = self.relation_matrix(e)
        # full column rank modulo one prime already proves R^e = 0
        p = next(q for q in descending_primes() if not rel.bad_prime(q))
        if rank_mod(rel.reduce(p)) == n_cols:
            return GradedBasis(e, self.num_vars, (), {m: {} for m in cols})
        rref = rref_exact(rel, limit=max(rel.rows * rel.cols, 1))
        standard = [cols[c] for c in rref.free]
        basis_index = {m: i for i, m in enumerate(sorted(standard, key=grevlex_key))}
        reductions = {}
        for i, c in enumerate(rref.pivots):
            red = {}
            for k, fcol in enumerate(rref.free):
                n = rref.numerators[i][k]
                if n:
                    red[basis_index[cols[fcol]]] = Fraction(-n, rref.denominator)
            reductions[cols[c]] = red
        return GradedBasis(e, self.num_vars, standard, reductions)

    # -- elements -------------------------------------------------------

    def nf_monomial(self, mono):
        return self.basis(sum(mono)).nf_monomial(tuple(mono))

    def element(self, e, coords):
        return RingElement(self, e, tuple(Fraction(c) for c in coords))

    def zero(self, e):
        return RingElement(self, e, (Fraction(0),) * self.dim(e))

    def monomial_element(self, mono):
        e = sum(mono)
        coords = [Fraction(0)] * self.dim(e)
        for i, v in self.nf_monomial(tuple(mono)).items():
            coords[i] = v
        return RingElement(self, e, tuple(coords))

    def normal_form(self, x, degree=None):
        """Class of the homogeneous polynomial ``x`` in R^{deg x}."""
        if x.num_vars != self.num_vars:
            raise DegreeMismatchError(f"polynomial in {x.num_vars} variables, ring has {self.num_vars}")
        if not x.is_homogeneous():
            raise DegreeMismatchError("normal_form needs a homogeneous polynomial")
        e = x.degree if not x.is_zero() else degree
        if e is None:
            raise DegreeMismatchError("degree of the zero polynomial must be given")
        if degree is not None and degree != e:
            raise DegreeMismatchError(f"polynomial of degree {e}, expected {degree}")
        if e > self.socle_degree:
            raise DegreeMismatchError(f"degree {e} exceeds the socle degree {self.socle_degree}")
        coords = [Fraction(0)] * self.dim(e)
        basis = self.basis(e)
        for mono, c in x.terms.items():
            for i, v in basis.nf_monomial(mono).items():
                coords[i] += c * v
        return RingElement(self, e, tuple(coords))

    def product_nf(self, e1, i, e2, j):
        """Normal form of (standard monomial i of degree e1) * (standard monomial j of degree e2)."""
        key = (e1, i, e2, j)
        hit = self._prod_cache.get(key)
        if hit is None:
            m = mono_mul(self.basis(e1).standard[i], self.basis(e2).standard[j])
            hit = self.nf_monomial(m)
            self._prod_cache[key] = hit
        return hit

    def multiply(self, a, b):
        if a.ring is not self or b.ring is not self:
            raise DegreeMismatchError("elements of different rings")
        e = a.degree + b.degree
        coords = [Fraction(0)] * self.dim(e)
        for i, x in enumerate(a.coords):
            if not x:
                continue
            for j, y in enumerate(b.coords):
                if not y:
                    continue
                for k, v in self.product_nf(a.degree, i, b.degree, j).items():
                    coords[k] += x * y * v
        return RingElement(self, e, tuple(coords))

    def duality_pair(self, a, b):
        """Socle coefficient of ``a * b``; the socle generator is the first standard monomial of R^sigma."""
        if a.degree + b.degree != self.socle_degree:
            raise DegreeMismatchError(
                f"degrees {a.degree} + {b.degree} do not add up to the socle degree {self.socle_degree}")
        prod = self.multiply(a, b)
        return prod.coords[0] if prod.coords else Fraction(0)

    def pairing_matrix(self, e, rows=None, cols=None):
        """Gram matrix of the socle pairing between standard monomials of R^e and R^{sigma-e}."""
        f = self.socle_degree - e
        rows = range(self.dim(e)) if rows is None else rows
        cols = range(self.dim(f)) if cols is None else cols
        entries = {}
        for a, i in enumerate(rows):
            for b, j in enumerate(cols):
                v = self.product_nf(e, i, f, j).get(0)
                if v:
                    entries[(a, b)] = v
        return MatExact(len(rows), len(cols), entries)

    def __repr__(self):
        return f"JacobianRing(f={self.f}, sigma={self.socle_degree})"


def smooth_check(f, size_cap=GENERIC_SIZE_CAP, force=False):
    """True iff the Jacobian ideal is Artinian with a one-dimensional socle in degree N(d-2)."""
    ring = JacobianRing(f, size_cap=size_cap, force=force)
    s = ring.socle_degree
    return ring.dim(s + 1) == 0 and ring.dim(s) == 1


def build(f, size_cap=GENERIC_SIZE_CAP, force=False):
    """Jacobian ring of a smooth hypersurface; raises :class:`SingularError` otherwise."""
    ring = JacobianRing(f, size_cap=size_cap, force=force)
    s = ring.socle_degree
    if ring.dim(s + 1) != 0 or ring.dim(s) != 1:
        raise SingularError(f"{f} does not define a smooth hypersurface")
    ring.smooth = True
    return ring
