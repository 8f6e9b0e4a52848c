"""Primitive middle Hodge pieces of a hypersurface as graded pieces of its Jacobian ring.

For a smooth hypersurface of degree d in N = n + 2 variables, the primitive
piece H^{p,q} with p + q = n corresponds to R^a with a = (q + 1) d - N. Under
a diagonal action the Hodge character of a piece is the character of its ring
representative plus a global ``residue_twist``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .equivariant import DiagonalAction, check_invariant, eigenbasis
from .errors import NotInvariantError
from .jacobian import GENERIC_SIZE_CAP, build


def ring_degree(q, d, num_vars):
    return (q + 1) * d - num_vars


@dataclass
class FamilySpec:
    """A hypersurface with an optional cyclic diagonal symmetry and the eigencomponent under study."""

    f: object
    action: DiagonalAction | None = None
    character: int = 0
    k: int | None = None
    residue_twist: int = 0
    tangent_degree: int | None = None
    tangent_character: int = 0
    size_cap: int = GENERIC_SIZE_CAP
    force: bool = False
    name: str = ""

    def __post_init__(self):
        if self.action is None:
            self.action = DiagonalAction.trivial(self.f.num_vars)
        if len(self.action.weights) != self.f.num_vars:
            raise ValueError("action weights do not match the number of variables")
        m = self.action.order
        self.character %= m
        self.residue_twist %= m
        self.tangent_character %= m
        if self.tangent_degree is None:
            self.tangent_degree = self.f.degree
        if self.k is None and self.n % 2 == 0:
            self.k = self.n // 2
        if self.k is not None and 2 * self.k != self.n:
            raise ValueError(f"k = {self.k} but the middle dimension is n = {self.n}")

    @property
    def num_vars(self):
        return self.f.num_vars

    @property
    def d(self):
        return self.f.degree

    @property
    def n(self):
        return self.f.num_vars - 2

    @cached_property
    def ring(self):
        if not check_invariant(self.f, self.action):
            raise NotInvariantError(
                f"{self.f} is not invariant under weights {self.action.weights} mod {self.action.order}")
        return build(self.f, size_cap=self.size_cap, force=self.force)

    def ring_character(self, hodge_chi):
        return (hodge_chi - self.residue_twist) % self.action.order

    def piece(self, p, q, chi=None):
        chi = self.character if chi is None else chi % self.action.order
        a = ring_degree(q, self.d, self.num_vars)
        if p < 0 or q < 0 or p + q != self.n or a < 0 or a > self.ring.socle_degree:
            return HodgePiece(p, q, a, chi, self.ring_character(chi), ())
        idx = eigenbasis(self.ring, a, self.action, self.ring_character(chi))
        return HodgePiece(p, q, a, chi, self.ring_character(chi), tuple(idx))

    def tangent_indices(self):
        return eigenbasis(self.ring, self.tangent_degree, self.action, self.tangent_character)

    @property
    def dim_T(self):
        return len(self.tangent_indices())


@dataclass(frozen=True)
class HodgePiece:
    p: int
    q: int
    ring_degree: int
    character: int
    ring_character: int
    indices: tuple = field(repr=False)

    @property
    def dim(self):
        return len(self.indices)

    def to_dict(self):
        return {"p": self.p, "q": self.q, "chi": self.character, "ring_degree": self.ring_degree,
                "dim": self.dim}


@dataclass
class HodgeDiamondRow:
    n: int
    order: int
    pieces: list

    def get(self, p, q, chi):
        for piece in self.pieces:
            if (piece.p, piece.q, piece.character) == (p, q, chi % self.order):
                return piece
        raise KeyError((p, q, chi))

    def dim(self, p, q, chi=0):
        return self.get(p, q, chi).dim

    def row(self, chi):
        return [x for x in self.pieces if x.character == chi % self.order]

    def untwisted_total(self, p, q):
        return sum(x.dim for x in self.pieces if (x.p, x.q) == (p, q))

    def to_list(self):
        return [piece.to_dict() for piece in self.pieces]


def hodge_numbers(spec):
    """Every primitive middle Hodge number h^{p,q}_chi, all characters included."""
    pieces = [spec.piece(spec.n - q, q, chi)
              for chi in range(spec.action.order) for q in range(spec.n + 1)]
    return HodgeDiamondRow(spec.n, spec.action.order, pieces)


def level_two_predicate(spec):
    """True iff the studied eigencomponent has h^{p,q} = 0 for every p >= k + 2."""
    if spec.k is None:
        raise ValueError("level predicate needs a middle degree 2k = n")
    return all(spec.piece(p, spec.n - p).dim == 0 for p in range(spec.k + 2, spec.n + 1))


def positivity_predicate(spec, dim_T=None):
    """True iff h^{k-1,k+1} of the studied eigencomponent is smaller than dim T."""
    if spec.k is None:
        raise ValueError("positivity predicate needs a middle degree 2k = n")
    dim_T = spec.dim_T if dim_T is None else dim_T
    return spec.piece(spec.k - 1, spec.k + 1).dim < dim_T
