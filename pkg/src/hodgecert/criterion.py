"""The infinitesimal criterion: multiplication maps, K_lambda and the three conditions.

Tangent directions are the eigenpiece (R^t)_tc of the Jacobian ring (by
default t = d, tc = 0) and the map nabla_v is multiplication by v. Everything
is assembled from :class:`ProductTensor`, the table of products between two
sets of standard monomials, so the same data yields the exact matrices for
small cases and the reductions mod p that the certifier needs for large ones.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .equivariant import eigenbasis
from .errors import BadCharacterError, DegreeMismatchError, TooLargeError
from .hodge import ring_degree
from .jacobian import RingElement
from .linalg import (CertPolicy, ImplicitMatrix, MatExact, MatMod, certify_rank,
                     kernel_basis)
from .poly import mono_mul

log = logging.getLogger(__name__)

LAMBDA_RANGE = 10
COMMUTANT_UNKNOWN_CAP = 200_000
COMMUTANT_EQUATION_CAP = 1_000_000


def _vec_mod(vec, p):
    out = np.empty(len(vec), dtype=np.int64)
    for i, x in enumerate(vec):
        x = Fraction(x)
        if x.denominator % p == 0:
            raise ValueError(f"prime {p} divides a denominator")
        out[i] = x.numerator * pow(x.denominator, -1, p) % p
    return out


def _vec_bad_prime(vecs, p):
    return any(Fraction(x).denominator % p == 0 for v in vecs for x in v)


class ProductTensor:
    """Products ``left[i] * right[j]`` of standard monomials, expanded over ``out``.

    Stored as coordinate arrays ``(i, j, k)`` with Fraction values; on the
    monomial fast path all values are 1.
    """

    def __init__(self, ring, e1, left, e2, right, out=None):
        self.ring = ring
        self.e1, self.e2, self.e_out = e1, e2, e1 + e2
        self.left = list(left)
        self.right = list(right)
        self.out = list(range(ring.dim(self.e_out))) if out is None else list(out)
        out_pos = {c: k for k, c in enumerate(self.out)}
        b1, b2, bo = ring.basis(e1), ring.basis(e2), ring.basis(self.e_out)
        li, rj, ok, vals = [], [], [], []
        for i, a in enumerate(self.left):
            ma = b1.standard[a]
            for j, b in enumerate(self.right):
                for c, v in bo.nf_monomial(mono_mul(ma, b2.standard[b])).items():
                    k = out_pos.get(c)
                    if k is None:
                        raise BadCharacterError(
                            f"product of R^{e1}[{a}] and R^{e2}[{b}] leaves the target eigenpiece")
                    li.append(i)
                    rj.append(j)
                    ok.append(k)
                    vals.append(v)
        self.li = np.array(li, dtype=np.int64)
        self.rj = np.array(rj, dtype=np.int64)
        self.ok = np.array(ok, dtype=np.int64)
        self.vals = vals
        self.unit = all(v == 1 for v in vals)
        self._den = 1
        for v in vals:
            if v.denominator != 1:
                self._den = self._den * v.denominator
        self._mod_cache = {}

    @property
    def shape(self):
        return (len(self.left), len(self.right), len(self.out))

    def bad_prime(self, p):
        return self._den % p == 0

    def vals_mod(self, p):
        hit = self._mod_cache.get(p)
        if hit is None:
            if self.unit:
                hit = np.ones(len(self.vals), dtype=np.int64)
            else:
                hit = _vec_mod(self.vals, p)
            self._mod_cache = {p: hit}
        return hit

    # exact contractions

    def contract_left(self, u):
        """Matrix of ``y -> u * y`` (rows: out, columns: right) for ``u`` over ``left``."""
        entries = {}
        for i, j, k, v in zip(self.li.tolist(), self.rj.tolist(), self.ok.tolist(), self.vals):
            if u[i]:
                entries[(k, j)] = entries.get((k, j), 0) + u[i] * v
        return MatExact(len(self.out), len(self.right), entries)

    def contract_right(self, w):
        """Matrix of ``x -> x * w`` (rows: out, columns: left) for ``w`` over ``right``."""
        entries = {}
        for i, j, k, v in zip(self.li.tolist(), self.rj.tolist(), self.ok.tolist(), self.vals):
            if w[j]:
                entries[(k, i)] = entries.get((k, i), 0) + w[j] * v
        return MatExact(len(self.out), len(self.left), entries)

    def flatten(self):
        """Matrix of ``x (x) y -> x * y`` with column ``i * len(right) + j``."""
        nr = len(self.right)
        entries = {}
        for i, j, k, v in zip(self.li.tolist(), self.rj.tolist(), self.ok.tolist(), self.vals):
            entries[(k, i * nr + j)] = v
        return MatExact(len(self.out), len(self.left) * nr, entries)

    # modular contractions

    def stacked_left_mod(self, us, p):
        """Rows grouped by multiplier, then by output index; columns over ``right``."""
        vals = self.vals_mod(p)
        n_out = len(self.out)
        rows, cols, data = [], [], []
        for blk, u in enumerate(us):
            up = _vec_mod(u, p)
            contrib = (up[self.li] * vals) % p
            keep = contrib != 0
            rows.append(self.ok[keep] + blk * n_out)
            cols.append(self.rj[keep])
            data.append(contrib[keep])
        if not rows:
            return MatMod(0, len(self.right), p, [], [], [])
        return MatMod(n_out * len(us), len(self.right), p,
                      np.concatenate(rows), np.concatenate(cols), np.concatenate(data))

    def flatten_mod(self, p):
        return MatMod(len(self.out), len(self.left) * len(self.right), p,
                      self.ok, self.li * len(self.right) + self.rj, self.vals_mod(p))


# ---------------------------------------------------------------------------
# data types


@dataclass
class Eigenpiece:
    """Indices of standard monomials of R^e with a given ring character."""

    degree: int
    ring_character: int
    indices: list
    label: str = ""

    @property
    def dim(self):
        return len(self.indices)


def _eigenpiece(spec, e, ring_chi, label=""):
    ring = spec.ring
    if e < 0 or e > ring.socle_degree:
        return Eigenpiece(e, ring_chi % spec.action.order, [], label)
    return Eigenpiece(e, ring_chi % spec.action.order,
                      eigenbasis(ring, e, spec.action, ring_chi), label)


def tangent_piece(spec):
    return _eigenpiece(spec, spec.tangent_degree, spec.tangent_character, "T")


def hodge_eigenpiece(spec, p, q, chi=None):
    chi = spec.character if chi is None else chi
    a = ring_degree(q, spec.d, spec.num_vars)
    return _eigenpiece(spec, a, spec.ring_character(chi), f"H^{p},{q}")


def _shifted(spec, piece, label=""):
    """Target of multiplication by tangent vectors."""
    return _eigenpiece(spec, piece.degree + spec.tangent_degree,
                       piece.ring_character + spec.tangent_character, label)


@dataclass
class MulMap:
    multiplier: object
    domain: Eigenpiece
    codomain: Eigenpiece
    matrix: MatExact


@dataclass
class KLambda:
    """Kernel of mu_lambda: integer coordinate vectors over the tangent eigenpiece."""

    lam: object
    tangent: Eigenpiece
    basis: list

    @property
    def dim(self):
        return len(self.basis)

    def elements(self, ring):
        out = []
        for v in self.basis:
            coords = [Fraction(0)] * ring.dim(self.tangent.degree)
            for c, x in zip(self.tangent.indices, v):
                coords[c] = Fraction(x)
            out.append(RingElement(ring, self.tangent.degree, tuple(coords)))
        return out


@dataclass
class CriterionReport:
    cond1: dict
    k_lambda_dim: int
    cond2: list
    cond3: dict
    verdict: bool
    certification: list
    lambda_provenance: dict
    warnings: list = field(default_factory=list)
    k_lambda: KLambda | None = field(default=None, repr=False)

    def to_dict(self):
        return {
            "lambda": self.lambda_provenance,
            "cond1": self.cond1,
            "k_lambda_dim": self.k_lambda_dim,
            "cond2": self.cond2,
            "cond3": self.cond3,
            "verdict": self.verdict,
            "warnings": list(self.warnings),
            "certification": [c.to_dict() for c in self.certification],
        }


# ---------------------------------------------------------------------------
# lambda


def lambda_piece(spec):
    if spec.k is None:
        raise DegreeMismatchError("the criterion needs an even-dimensional hypersurface (2k = n)")
    return hodge_eigenpiece(spec, spec.k, spec.k)


def lambda_coords(spec, lam):
    """Coordinates of ``lam`` (RingElement) over the (k,k) eigenpiece basis."""
    piece = lambda_piece(spec)
    if lam.ring is not spec.ring:
        raise DegreeMismatchError("lambda belongs to a different ring")
    if lam.degree != piece.degree:
        raise DegreeMismatchError(f"lambda has degree {lam.degree}, the (k,k) piece lives in degree {piece.degree}")
    inside = set(piece.indices)
    if any(c and i not in inside for i, c in enumerate(lam.coords)):
        raise BadCharacterError("lambda has components outside the studied eigencomponent")
    return [lam.coords[i] for i in piece.indices]


def element_from_coords(spec, piece, coords):
    ring = spec.ring
    full = [Fraction(0)] * ring.dim(piece.degree)
    for i, c in zip(piece.indices, coords):
        full[i] = Fraction(c)
    return RingElement(ring, piece.degree, tuple(full))


def random_lambda(spec, seed):
    """Uniform integer coordinates in [-10, 10] on the (k,k) eigenpiece, never the zero vector."""
    piece = lambda_piece(spec)
    rng = random.Random(seed)
    if piece.dim == 0:
        return element_from_coords(spec, piece, [])
    while True:
        coords = [rng.randint(-LAMBDA_RANGE, LAMBDA_RANGE) for _ in range(piece.dim)]
        if any(coords):
            return element_from_coords(spec, piece, coords)


# ---------------------------------------------------------------------------
# maps


def mul_map(ring, u, domain_degree, domain=None, codomain=None):
    """Exact matrix of ``y -> u * y`` from (a subset of) R^domain_degree to R^(deg u + domain_degree)."""
    domain = list(range(ring.dim(domain_degree))) if domain is None else list(domain)
    support = u.support()
    tensor = ProductTensor(ring, u.degree, support, domain_degree, domain, codomain)
    return tensor.contract_left([u.coords[i] for i in support])


def mu_lambda(spec, lam):
    """Matrix of v -> v * lambda from the tangent eigenpiece to the (k-1, k+1) eigenpiece."""
    coords = lambda_coords(spec, lam)
    tangent = tangent_piece(spec)
    source = lambda_piece(spec)
    target = _shifted(spec, source, f"H^{spec.k - 1},{spec.k + 1}")
    tensor = ProductTensor(spec.ring, tangent.degree, tangent.indices,
                           source.degree, source.indices, target.indices)
    return MulMap(lam, tangent, target, tensor.contract_right(coords))


def _stacked(spec, tangent, source, target, kvecs, label, limit):
    """``x -> (v_1 x, ..., v_s x)`` as an implicit matrix, rows grouped by kernel vector."""
    tensor = ProductTensor(spec.ring, tangent.degree, tangent.indices,
                           source.degree, source.indices, target.indices)
    shape = (target.dim * len(kvecs), source.dim)

    def reduce(p):
        return tensor.stacked_left_mod(kvecs, p)

    def exact():
        if shape[0] * shape[1] > limit:
            raise TooLargeError(f"{label}: {shape[0]}x{shape[1]} exceeds the exact-path limit")
        entries = {}
        for blk, v in enumerate(kvecs):
            block = tensor.contract_left(v)
            for (k, j), x in block.entries.items():
                entries[(blk * target.dim + k, j)] = x
        return MatExact(shape[0], shape[1], entries)

    memo = {}

    def apply_exact(x):
        key = tuple(Fraction(c) for c in x)
        if key not in memo:
            w = tensor.contract_right(x)  # rows: target, columns: tangent
            out = []
            for v in kvecs:
                out.extend(w.matvec(v))
            memo.clear()
            memo[key] = out
        return list(memo[key])

    def bad(p):
        return tensor.bad_prime(p) or _vec_bad_prime(kvecs, p)

    return ImplicitMatrix(shape, reduce, exact, apply_exact, bad, label)


# ---------------------------------------------------------------------------
# the three conditions


def check_condition1(spec, lam, policy=CertPolicy()):
    """Surjectivity of mu_lambda and its kernel K_lambda."""
    mu = mu_lambda(spec, lam)
    m = mu.matrix
    cert = certify_rank(m, policy, label="cond1:mu_lambda")
    rows, cols = m.shape
    surjective = cert.exact and cert.rank_claimed == rows
    kvecs = kernel_basis(m, limit=policy.exact_limit) if cols else []
    if cert.exact and cert.rank_claimed + len(kvecs) != cols:
        raise RuntimeError("rank-nullity violated for mu_lambda")
    k_lambda = KLambda(lam, mu.domain, kvecs)
    report = {"surjective": surjective, "rank": cert.rank_claimed, "target_dim": rows,
              "domain_dim": cols, "certified": cert.exact}
    return report, k_lambda, cert


def check_condition2(spec, k_lambda, policy=CertPolicy()):
    """Injectivity of H^{p,q} -> H^{p-1,q+1} (x) K_lambda^* for every p > k."""
    out, certs, warnings = [], [], []
    tangent = k_lambda.tangent
    for p in range(spec.k + 1, spec.n + 1):
        q = spec.n - p
        source = hodge_eigenpiece(spec, p, q)
        target = _shifted(spec, source)
        entry = {"p": p, "q": q, "domain_dim": source.dim, "target_dim": target.dim}
        if source.dim == 0:
            entry.update(injective=True, rank=0, status="vacuous", certified=True)
        elif k_lambda.dim == 0:
            msg = f"K_lambda = 0: injectivity at (p,q)=({p},{q}) holds vacuously"
            warnings.append(msg)
            log.warning(msg)
            entry.update(injective=True, rank=0, status="vacuous-k-lambda", certified=True)
        else:
            mat = _stacked(spec, tangent, source, target, k_lambda.basis,
                           f"cond2:p={p}", policy.exact_limit)
            cert = _certify_or_bound(mat, policy)
            certs.append(cert)
            injective = cert.exact and cert.rank_claimed == source.dim
            entry.update(injective=injective, rank=cert.rank_claimed,
                         status="injective" if injective else "not-injective",
                         certified=cert.exact)
        out.append(entry)
    return out, certs, warnings


def check_condition3(spec, lam, k_lambda, policy=CertPolicy()):
    """Kernel of H^{k,k} -> H^{k-1,k+1} (x) K_lambda^* is the line through lambda."""
    source = lambda_piece(spec)
    target = _shifted(spec, source)
    coords = lambda_coords(spec, lam)
    lam_nonzero = any(coords)
    if k_lambda.dim == 0:
        holds = source.dim == 1 and lam_nonzero
        return ({"kernel_dim": source.dim, "kernel_is_lambda_line": holds, "rank": 0,
                 "domain_dim": source.dim, "status": "vacuous-k-lambda", "certified": True}, [])
    mat = _stacked(spec, k_lambda.tangent, source, target, k_lambda.basis, "cond3", policy.exact_limit)
    witnesses = [coords] if lam_nonzero else []
    cert = _certify_or_bound(mat, policy, witnesses)
    kernel_dim = source.dim - cert.rank_claimed
    lam_in_kernel = lam_nonzero and not any(mat.apply_exact(coords))
    holds = cert.exact and kernel_dim == 1 and lam_in_kernel
    if cert.exact and lam_nonzero and not lam_in_kernel:
        raise RuntimeError("lambda is not in the kernel of its own condition-3 map")
    report = {"kernel_dim": kernel_dim if cert.exact else None, "kernel_dim_upper_bound": kernel_dim,
              "kernel_is_lambda_line": holds, "rank": cert.rank_claimed,
              "domain_dim": source.dim, "status": "line" if holds else "not-line",
              "certified": cert.exact}
    return report, [cert]


def _certify_or_bound(mat, policy, witnesses=(), label=None):
    label = getattr(mat, "label", "") if label is None else label
    try:
        return certify_rank(mat, policy, witnesses, label=label)
    except TooLargeError:
        log.warning("%s: exact fallback too large, keeping the modular bound", label)
        return certify_rank(mat, CertPolicy(policy.num_primes, False, policy.seed,
                                            policy.exact_limit, policy.threads),
                            witnesses, label=label)


def run_criterion(spec, lam=None, seed=0, policy=None):
    """Evaluate conditions 1-3 at ``lam`` (or at a seeded random class)."""
    policy = policy or CertPolicy(seed=seed)
    if lam is None:
        lam = random_lambda(spec, seed)
        provenance = {"kind": "seeded_random", "seed": seed, "range": [-LAMBDA_RANGE, LAMBDA_RANGE]}
    else:
        provenance = {"kind": "given", "polynomial": str(lam.to_polynomial())}
    c1, k_lambda, cert1 = check_condition1(spec, lam, policy)
    c2, certs2, warnings = check_condition2(spec, k_lambda, policy)
    c3, certs3 = check_condition3(spec, lam, k_lambda, policy)
    verdict = c1["surjective"] and all(x["injective"] for x in c2) and c3["kernel_is_lambda_line"]
    return CriterionReport(c1, k_lambda.dim, c2, c3, verdict, [cert1, *certs2, *certs3],
                           provenance, warnings, k_lambda)


# ---------------------------------------------------------------------------
# Torelli-type surjectivity and the commutant


def check_torelli_hypothesis(spec, policy=CertPolicy()):
    """Surjectivity of H^{p,q} (x) T -> H^{p-1,q+1} at every nonzero piece of the eigencomponent."""
    tangent = tangent_piece(spec)
    out, certs = [], []
    for q in range(spec.n):
        p = spec.n - q
        source = hodge_eigenpiece(spec, p, q)
        target = _shifted(spec, source)
        entry = {"p": p, "q": q, "domain_dim": source.dim, "target_dim": target.dim}
        if source.dim == 0:
            entry.update(surjective=None, status="vacuous", rank=0, certified=True)
            out.append(entry)
            continue
        tensor = ProductTensor(spec.ring, tangent.degree, tangent.indices,
                               source.degree, source.indices, target.indices)
        shape = (target.dim, tangent.dim * source.dim)
        mat = ImplicitMatrix(shape, tensor.flatten_mod, tensor.flatten,
                             bad_prime=tensor.bad_prime, label=f"torelli:p={p}")
        cert = _certify_or_bound(mat, policy)
        certs.append(cert)
        surjective = cert.exact and cert.rank_claimed == target.dim
        entry.update(surjective=surjective, rank=cert.rank_claimed,
                     status="surjective" if surjective else "not-surjective", certified=cert.exact)
        out.append(entry)
    return out, certs


@dataclass
class CommutantResult:
    shift: int
    dim: int | None
    unknowns: int
    equations: int
    certificate: object
    basis: list | None = field(default=None, repr=False)
    status: str = "computed"

    def to_dict(self):
        return {"shift": self.shift, "dim": self.dim, "unknowns": self.unknowns,
                "equations": self.equations, "status": self.status,
                "certificate": self.certificate.to_dict() if self.certificate else None}


def commutant(spec, r, policy=CertPolicy(), unknown_cap=COMMUTANT_UNKNOWN_CAP):
    """Graded maps A: H^{p,q} -> H^{p+r,q-r} commuting with multiplication by every tangent vector.

    Unknowns are the entries of the blocks ``A_q`` laid out by (q, domain
    index, codomain index); each equation is one coefficient of
    ``v * A_q(phi) - A_{q+1}(v * phi)``.
    """
    if not 0 <= r <= spec.n:
        raise ValueError(f"shift must lie in 0..{spec.n}")
    if spec.tangent_degree != spec.d:
        raise ValueError("the commutant needs tangent vectors of degree d")
    n = spec.n
    tangent = tangent_piece(spec)
    tc = spec.tangent_character
    chi = spec.character

    pieces = {}
    for q in range(n + 1):
        pieces[q] = hodge_eigenpiece(spec, n - q, q, chi + q * tc)

    def dim(q):
        return pieces[q].dim if 0 <= q <= n else 0

    offsets = {}
    total = 0
    for q in range(n + 1):
        if q - r >= 0 and dim(q) and dim(q - r):
            offsets[q] = total
            total += dim(q) * dim(q - r)
    if total > unknown_cap:
        raise TooLargeError(f"commutant with shift {r} has {total} unknowns (cap {unknown_cap})")
    rows_bound = sum(tangent.dim * dim(q) * dim(q + 1 - r) for q in range(n + 1))
    if rows_bound > COMMUTANT_EQUATION_CAP:
        raise TooLargeError(f"commutant with shift {r} has up to {rows_bound} equations")

    def var(q, s, t):
        # A_q maps basis s of piece q to basis t of piece q - r
        return offsets[q] + s * dim(q - r) + t

    tensors = {}

    def tensor(q):
        if q not in tensors:
            tensors[q] = ProductTensor(spec.ring, tangent.degree, tangent.indices,
                                       pieces[q].degree, pieces[q].indices, pieces[q + 1].indices)
        return tensors[q]

    entries = {}
    n_eq = 0
    for q in range(n + 1):
        u_piece = q + 1 - r
        if not (0 <= u_piece <= n) or not dim(q) or not dim(u_piece):
            continue
        rows = {}
        # v * A_q(phi_s): sum_t T^{q-r}[a, t, u] A_q[t, s]
        if q in offsets and q - r + 1 <= n:
            tq = tensor(q - r)
            for a, t, u, val in zip(tq.li.tolist(), tq.rj.tolist(), tq.ok.tolist(), tq.vals):
                for s in range(dim(q)):
                    key = (a, s, u)
                    row = rows.setdefault(key, {})
                    c = var(q, s, t)
                    row[c] = row.get(c, 0) + val
        # - A_{q+1}(v * phi_s): sum_w T^q[a, s, w] A_{q+1}[u, w]
        if q + 1 in offsets and q + 1 <= n:
            tq = tensor(q)
            for a, s, w, val in zip(tq.li.tolist(), tq.rj.tolist(), tq.ok.tolist(), tq.vals):
                for u in range(dim(u_piece)):
                    key = (a, s, u)
                    row = rows.setdefault(key, {})
                    c = var(q + 1, w, u)
                    row[c] = row.get(c, 0) - val
        for key in sorted(rows):
            row = {c: v for c, v in rows[key].items() if v}
            if row:
                for c, v in row.items():
                    entries[(n_eq, c)] = v
                n_eq += 1
    mat = MatExact(n_eq, total, entries)
    if total == 0:
        return CommutantResult(r, 0, 0, n_eq, None, [], "no-unknowns")
    witnesses = []
    if r == 0:
        ident = [0] * total
        for q in offsets:
            for s in range(dim(q)):
                ident[var(q, s, s)] = 1
        witnesses.append(ident)
    cert = _certify_or_bound(mat, policy, witnesses, label=f"commutant:r={r}")
    dimension = total - cert.rank_claimed if cert.exact else None
    basis = None
    if cert.exact and dimension and mat.rows * mat.cols <= policy.exact_limit:
        basis = kernel_basis(mat, policy.exact_limit)
    return CommutantResult(r, dimension, total, n_eq, cert, basis)
