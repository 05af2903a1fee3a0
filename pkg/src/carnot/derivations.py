"""Strata-preserving derivations and the constrained degree-zero algebra.

A degree-zero map sends each layer to itself, so it is a tuple of square
blocks.  Derivations are found as the exact nullspace of the linear
system D[S,T] = [DS,T] + [S,DT] over all block entries jointly; the
degree-zero algebra g0 is the part of that space whose first-layer block
satisfies an additional linear constraint (conformal by default).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .exact_linalg import Matrix, Subspace, nullspace, vec_zero
from .graded_lie import GradedLieAlgebra


class DegreeZeroMap:
    """Layer-preserving linear map given by one square block per layer."""

    __slots__ = ("algebra", "blocks", "_full")

    def __init__(self, algebra: GradedLieAlgebra, blocks: Sequence[Matrix]):
        self.algebra = algebra
        dims = algebra.layer_dims
        if len(blocks) != len(dims):
            raise ValueError("one block per layer required")
        for blk, d in zip(blocks, dims):
            if blk.rows != d or blk.cols != d:
                raise ValueError("block shape does not match layer dimension")
        self.blocks = tuple(blocks)
        self._full = None

    def full_matrix(self) -> Matrix:
        if self._full is None:
            n = self.algebra.dim
            ent = [[Fraction(0)] * n for _ in range(n)]
            for depth, blk in enumerate(self.blocks, start=1):
                idx = self.algebra.layer_indices(depth)
                for r, gi in enumerate(idx):
                    for c, gj in enumerate(idx):
                        ent[gi][gj] = blk.entries[r][c]
            self._full = Matrix(ent)
        return self._full

    def apply(self, v: Sequence) -> list:
        """Matrix action on a coefficient vector (Fraction or polynomial entries)."""
        full = self.full_matrix()
        n = self.algebra.dim
        out = []
        for i in range(n):
            acc = Fraction(0)
            for j in range(n):
                c = full.entries[i][j]
                if c:
                    acc = acc + c * v[j]
            out.append(acc)
        return out

    def packed(self) -> list[Fraction]:
        out: list[Fraction] = []
        for blk in self.blocks:
            for row in blk.entries:
                out.extend(row)
        return out

    @classmethod
    def from_packed(cls, algebra: GradedLieAlgebra, v: Sequence[Fraction]) -> "DegreeZeroMap":
        blocks = []
        pos = 0
        for d in algebra.layer_dims:
            blocks.append(Matrix([[v[pos + r * d + c] for c in range(d)] for r in range(d)],
                                 cols=d))
            pos += d * d
        if pos != len(v):
            raise ValueError("packed vector has wrong length")
        return cls(algebra, blocks)

    def commutator(self, other: "DegreeZeroMap") -> "DegreeZeroMap":
        blocks = [a.mul(b) for a, b in zip(self.blocks, other.blocks)]
        back = [b.mul(a) for a, b in zip(self.blocks, other.blocks)]
        diff = [Matrix([[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(p.entries, q.entries)],
                       cols=p.cols)
                for p, q in zip(blocks, back)]
        return DegreeZeroMap(self.algebra, diff)

    def __eq__(self, other) -> bool:
        return (isinstance(other, DegreeZeroMap) and self.algebra is other.algebra
                and self.blocks == other.blocks)

    def __repr__(self) -> str:
        return f"DegreeZeroMap({self.full_matrix().entries!r})"


def packed_dim(algebra: GradedLieAlgebra) -> int:
    return sum(d * d for d in algebra.layer_dims)


@dataclass(frozen=True)
class GZeroConstraint:
    """Linear constraint on the first-layer block of a derivation.

    kinds: ``conformal`` (block in co(m): B + B^t = k I), ``full_derivations``
    (no constraint), ``explicit`` (user-supplied rows over block entries).
    """

    kind: str
    conditions: tuple = field(default=())

    @classmethod
    def conformal(cls) -> "GZeroConstraint":
        return cls("conformal")

    @classmethod
    def full_derivations(cls) -> "GZeroConstraint":
        return cls("full_derivations")

    @classmethod
    def explicit(cls, rows: Sequence[dict]) -> "GZeroConstraint":
        return cls("explicit", tuple(dict(r) for r in rows))

    def first_layer_rows(self, m: int) -> list[dict]:
        """Condition rows as {(r,c): coeff} maps over the m x m block; each row sums to zero."""
        if self.kind == "full_derivations":
            return []
        if self.kind == "conformal":
            # B + B^t = k I for some scalar k: off-diagonal pairs cancel,
            # all diagonal entries agree.  Vacuous for m = 1.
            rows: list[dict] = []
            for i in range(m):
                for j in range(i + 1, m):
                    rows.append({(i, j): Fraction(1), (j, i): Fraction(1)})
            for i in range(1, m):
                rows.append({(i, i): Fraction(1), (0, 0): Fraction(-1)})
            return rows
        if self.kind == "explicit":
            for row in self.conditions:
                for (r, c) in row:
                    if not (0 <= r < m and 0 <= c < m):
                        raise ValueError(f"condition entry ({r},{c}) outside {m}x{m} block")
            return [dict(r) for r in self.conditions]
        raise ValueError(f"unknown constraint kind {self.kind!r}")


class DegreeZeroSpace:
    """A subspace of degree-zero maps, canonical in packed block coordinates."""

    def __init__(self, algebra: GradedLieAlgebra, subspace: Subspace):
        if subspace.ambient_dim != packed_dim(algebra):
            raise ValueError("subspace ambient does not match packed block layout")
        self.algebra = algebra
        self.subspace = subspace

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @cached_property
    def maps(self) -> tuple[DegreeZeroMap, ...]:
        return tuple(DegreeZeroMap.from_packed(self.algebra, v) for v in self.subspace.basis)

    def contains(self, m: DegreeZeroMap) -> bool:
        return self.subspace.contains(m.packed())

    def __repr__(self) -> str:
        return f"DegreeZeroSpace(dim={self.dim})"


def _derivation_residual(g: GradedLieAlgebra, dmap: DegreeZeroMap,
                         i: int, j: int) -> list[Fraction]:
    lhs = dmap.apply(g.bracket_basis(i, j))
    rhs1 = g.bracket(dmap.apply(g.basis_vector(i)), g.basis_vector(j))
    rhs2 = g.bracket(g.basis_vector(i), dmap.apply(g.basis_vector(j)))
    return [a - b - c for a, b, c in zip(lhs, rhs1, rhs2)]


def strata_derivations(g: GradedLieAlgebra) -> DegreeZeroSpace:
    """All layer-preserving maps D with D[S,T] = [DS,T] + [S,DT].

    The unknowns are all block entries jointly; generation by layer -1
    makes the lower blocks consistent with the first-layer block
    automatically, the solver just returns the joint nullspace.
    """
    total = packed_dim(g)
    elementary = []
    for u in range(total):
        v = vec_zero(total)
        v[u] = Fraction(1)
        elementary.append(DegreeZeroMap.from_packed(g, v))
    rows: list[list[Fraction]] = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            cols = [_derivation_residual(g, e, i, j) for e in elementary]
            for comp in range(g.dim):
                row = [cols[u][comp] for u in range(total)]
                if any(row):
                    rows.append(row)
    return DegreeZeroSpace(g, nullspace(Matrix(rows, cols=total)))


def constrain_g0(ders: DegreeZeroSpace, constraint: GZeroConstraint) -> DegreeZeroSpace:
    """Intersect a derivation space with a first-layer-block constraint."""
    if constraint.kind == "full_derivations":
        return ders
    g = ders.algebra
    m = g.layer_dims[0]
    cond_rows = constraint.first_layer_rows(m)
    if not cond_rows or ders.dim == 0:
        return ders
    basis_maps = ders.maps
    rows = []
    for cond in cond_rows:
        rows.append([sum((coeff * bm.blocks[0].entries[r][c] for (r, c), coeff in cond.items()),
                         Fraction(0))
                     for bm in basis_maps])
    coeffs = nullspace(Matrix(rows, cols=ders.dim))
    vectors = []
    for combo in coeffs.basis:
        v = vec_zero(ders.subspace.ambient_dim)
        for t, bvec in zip(combo, ders.subspace.basis):
            if t:
                v = [x + t * y for x, y in zip(v, bvec)]
        vectors.append(v)
    return DegreeZeroSpace(g, Subspace.from_vectors(vectors, ders.subspace.ambient_dim))
