"""Stratified nilpotent Lie algebras presented by structure constants.

A :class:`GradedLieAlgebra` carries an ordered basis, a negative integer
weight per basis element (the layer), and the full antisymmetric table of
brackets.  Elements are plain coefficient vectors in the fixed basis; the
bracket extends bilinearly and also accepts polynomial coefficients, which
the group-realization code relies on.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .exact_linalg import Subspace, vec_is_zero


class InvalidAlgebra(ValueError):
    """Base for structural rejections of an algebra presentation."""


class AntisymmetryViolation(InvalidAlgebra):
    pass


class GradingViolation(InvalidAlgebra):
    pass


class JacobiViolation(InvalidAlgebra):
    pass


class GenerationFailure(InvalidAlgebra):
    pass


class DuplicateBracket(InvalidAlgebra):
    pass


class GradedLieAlgebra:
    """Immutable stratified Lie algebra over the rationals.

    ``structure[i][j]`` is the coefficient vector of ``[e_i, e_j]``.
    Construction verifies antisymmetry, the grading and the Jacobi
    identity; generation of the lower layers by layer -1 is enforced by
    :func:`build_algebra` and queried via :func:`check_generation`.
    """

    __slots__ = ("names", "weights", "structure", "dim", "step", "_index", "_nonzero")

    def __init__(self, names: Sequence[str], weights: Sequence[int],
                 structure: Sequence[Sequence[Sequence]]):
        self.names = tuple(names)
        self.weights = tuple(int(w) for w in weights)
        n = len(self.names)
        self.dim = n
        if len(self.weights) != n:
            raise InvalidAlgebra("weights must match basis length")
        if len(set(self.names)) != n:
            raise InvalidAlgebra("duplicate basis names")
        if any(w >= 0 for w in self.weights):
            raise InvalidAlgebra("weights must be negative integers")
        self.step = -min(self.weights)
        for d in range(1, self.step + 1):
            if not any(w == -d for w in self.weights):
                raise InvalidAlgebra(f"layer -{d} is empty")
        self.structure = tuple(
            tuple(tuple(Fraction(c) for c in structure[i][j]) for j in range(n))
            for i in range(n))
        for i in range(n):
            for j in range(n):
                if len(self.structure[i][j]) != n:
                    raise InvalidAlgebra("structure vectors must have basis length")
        self._index = {name: i for i, name in enumerate(self.names)}
        self._check_antisymmetry()
        self._check_grading()
        self._nonzero = [(i, j, self.structure[i][j])
                         for i in range(n) for j in range(i + 1, n)
                         if not vec_is_zero(self.structure[i][j])]
        self._check_jacobi()

    def _check_antisymmetry(self) -> None:
        for i in range(self.dim):
            if not vec_is_zero(self.structure[i][i]):
                raise AntisymmetryViolation(f"[{self.names[i]},{self.names[i]}] != 0")
            for j in range(i + 1, self.dim):
                if any(a != -b for a, b in zip(self.structure[i][j], self.structure[j][i])):
                    raise AntisymmetryViolation(
                        f"[{self.names[i]},{self.names[j]}] != -[{self.names[j]},{self.names[i]}]")

    def _check_grading(self) -> None:
        for i in range(self.dim):
            for j in range(self.dim):
                target = self.weights[i] + self.weights[j]
                for k, c in enumerate(self.structure[i][j]):
                    if c != 0 and self.weights[k] != target:
                        raise GradingViolation(
                            f"[{self.names[i]},{self.names[j]}] has component "
                            f"{self.names[k]} of weight {self.weights[k]}, expected {target}")

    def _check_jacobi(self) -> None:
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    s = self.bracket(self.basis_vector(i), self.bracket_basis(j, k))
                    t = self.bracket(self.basis_vector(j), self.bracket_basis(k, i))
                    u = self.bracket(self.basis_vector(k), self.bracket_basis(i, j))
                    total = [a + b + c for a, b, c in zip(s, t, u)]
                    if not all(x == 0 for x in total):
                        raise JacobiViolation(
                            f"Jacobi fails on ({self.names[i]},{self.names[j]},{self.names[k]})")

    # -- queries ------------------------------------------------------

    def index(self, name: str) -> int:
        return self._index[name]

    def layer_indices(self, depth: int) -> list[int]:
        """Basis indices of layer ``-depth`` in declaration order."""
        return [i for i, w in enumerate(self.weights) if w == -depth]

    @property
    def layer_dims(self) -> list[int]:
        return [len(self.layer_indices(d)) for d in range(1, self.step + 1)]

    def basis_vector(self, i: int) -> list[Fraction]:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return v

    def bracket_basis(self, i: int, j: int) -> list:
        return list(self.structure[i][j])

    def bracket(self, a: Sequence, b: Sequence) -> list:
        """Bilinear bracket of coefficient vectors.

        Coefficients may be Fractions or any ring elements supporting
        addition and multiplication by Fractions (e.g. polynomials).
        """
        out = [Fraction(0)] * self.dim
        for i, j, cvec in self._nonzero:
            term = a[i] * b[j] - a[j] * b[i]
            for k, c in enumerate(cvec):
                if c:
                    out[k] = out[k] + c * term
        return out

    def __repr__(self) -> str:
        return f"GradedLieAlgebra({'|'.join(self.names)}, step={self.step})"


def build_algebra(layers: Sequence[Sequence[str]],
                  brackets: Mapping[tuple[str, str], Sequence[tuple[Fraction, str]]]
                  ) -> GradedLieAlgebra:
    """Construct and fully validate an algebra from layers and bracket relations.

    ``layers[d]`` lists the generators of layer ``-(d+1)``; ``brackets``
    maps ordered pairs of names to coefficient/name term lists.  Only one
    orientation of each pair may appear, unlisted brackets are zero, and
    the result must be generated by layer -1.
    """
    names: list[str] = []
    weights: list[int] = []
    for d, layer in enumerate(layers, start=1):
        for name in layer:
            names.append(name)
            weights.append(-d)
    index = {name: i for i, name in enumerate(names)}
    n = len(names)
    structure = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    seen: set[tuple[int, int]] = set()
    for (a, b), terms in brackets.items():
        if a not in index or b not in index:
            missing = a if a not in index else b
            raise InvalidAlgebra(f"unknown basis name {missing!r} in bracket [{a},{b}]")
        i, j = index[a], index[b]
        if i == j:
            raise AntisymmetryViolation(f"bracket [{a},{b}] of an element with itself")
        if (i, j) in seen or (j, i) in seen:
            raise DuplicateBracket(f"bracket [{a},{b}] listed twice (or in both orientations)")
        seen.add((i, j))
        for coeff, name in terms:
            if name not in index:
                raise InvalidAlgebra(f"unknown basis name {name!r} in bracket [{a},{b}]")
            k = index[name]
            structure[i][j][k] += Fraction(coeff)
        for k in range(n):
            structure[j][i][k] = -structure[i][j][k]
    g = GradedLieAlgebra(names, weights, structure)
    if not check_generation(g):
        raise GenerationFailure("layer -1 does not generate the lower layers")
    return g


def check_generation(g: GradedLieAlgebra) -> bool:
    """True iff brackets of layer -1 with layer -(k-1) span layer -k for all k >= 2."""
    for depth in range(2, g.step + 1):
        targets = g.layer_indices(depth)
        position = {idx: r for r, idx in enumerate(targets)}
        produced = []
        for i in g.layer_indices(1):
            for j in g.layer_indices(depth - 1):
                full = g.bracket_basis(i, j)
                produced.append([full[idx] for idx in targets])
        span = Subspace.from_vectors(produced, len(position))
        if span.dim != len(targets):
            return False
    return True
