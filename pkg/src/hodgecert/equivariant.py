"""Cyclic diagonal group actions on graded pieces of the Jacobian ring.

An action of Z/m on the coordinates is a weight vector ``w``; the generator
multiplies ``x_i`` by ``zeta^{w_i}``, so the monomial ``x^a`` spans the
character ``sum(w_i * a_i) mod m``. For an invariant ``f`` the Jacobian ideal
is stable and every standard monomial is a character vector, on either the
monomial or the generic path (the reduced echelon form of a matrix whose rows
are character-homogeneous is itself character-homogeneous).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInvariantError


@dataclass(frozen=True)
class DiagonalAction:
    order: int
    weights: tuple

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("group order must be at least 1")
        object.__setattr__(self, "weights", tuple(int(w) % self.order for w in self.weights))

    @classmethod
    def trivial(cls, num_vars):
        return cls(1, (0,) * num_vars)

    @property
    def is_trivial(self):
        return self.order == 1 or not any(self.weights)

    def character(self, mono):
        return sum(w * a for w, a in zip(self.weights, mono)) % self.order


def monomial_character(mono, act):
    return act.character(mono)


def check_invariant(f, act):
    if len(act.weights) != f.num_vars:
        raise ValueError(f"action has {len(act.weights)} weights, polynomial has {f.num_vars} variables")
    return all(act.character(m) == 0 for m in f.terms)


def _require_invariant(ring, act):
    if not check_invariant(ring.f, act):
        raise NotInvariantError(f"{ring.f} is not invariant under weights {act.weights} mod {act.order}")


def eigenbasis(ring, e, act, chi):
    """Indices of the standard monomials of R^e spanning the ``chi`` eigenspace."""
    _require_invariant(ring, act)
    chi %= act.order
    return [i for i, m in enumerate(ring.basis(e).standard) if act.character(m) == chi]


def equivariant_hilbert_series(num_vars, d, act, top):
    """Coefficients ``[e][chi]`` of prod_i (1 - t^(d-1) z^(-w_i)) / (1 - t z^(w_i)) up to t^top.

    This is the character-refined Hilbert series of any complete intersection
    generated by the partials of an invariant form of degree d; it never looks
    at a basis.
    """
    m = act.order
    series = np.zeros((top + 1, m), dtype=object)
    series[0, 0] = 1
    for w in act.weights:
        # multiply by the geometric series sum_k t^k z^(w k)
        out = np.zeros_like(series)
        for k in range(top + 1):
            shift = np.roll(series[:top + 1 - k], (w * k) % m, axis=1)
            out[k:] += shift
        # multiply by 1 - t^(d-1) z^(-w)
        g = d - 1
        if g <= top:
            out[g:] -= np.roll(out[:top + 1 - g], (-w) % m, axis=1).copy()
        series = out
    return [[int(x) for x in row] for row in series]


def signed_series(table, order):
    """Evaluate a character table at z = -1 (only meaningful for even order)."""
    return [sum(((-1) ** chi) * row[chi] for chi in range(order)) for row in table]


@dataclass
class CharacterTable:
    order: int
    counts: list
    series: list

    @property
    def agree(self):
        return self.counts == self.series

    def dim(self, e, chi):
        if e < 0 or e >= len(self.counts):
            return 0
        return self.counts[e][chi % self.order]

    def to_rows(self):
        return [{"degree": e, "chi": chi, "dim": self.counts[e][chi], "series": self.series[e][chi]}
                for e in range(len(self.counts)) for chi in range(self.order)]


def character_hilbert(ring, act, top=None):
    """Dimensions of every (degree, character) eigenspace by basis counting and by generating function."""
    _require_invariant(ring, act)
    top = ring.socle_degree if top is None else top
    counts = []
    for e in range(top + 1):
        row = [0] * act.order
        for mono in ring.basis(e).standard:
            row[act.character(mono)] += 1
        counts.append(row)
    series = equivariant_hilbert_series(ring.num_vars, ring.d, act, top)
    return CharacterTable(act.order, counts, series)
