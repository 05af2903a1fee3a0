"""Contact and conformality conditions as exact polynomial residuals.

A vector field V is contact when [V, X] stays horizontal for every
horizontal frame field X, and conformal when additionally the matrix of
first horizontal derivatives of its horizontal coefficients is a
trace-plus-skew matrix.  Residuals are kept as full polynomials, never
point samples, so every verdict is an identity check.  The bounded-degree
ansatz solver at the end is the brute-force cross-check for prolongation
dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_linalg import Matrix, Subspace, nullspace, vec_zero
from .graded_lie import GradedLieAlgebra
from .derivations import DegreeZeroMap
from .polynomials import Poly
from .group_realization import Frame, PolyVectorField


class NotContact(ValueError):
    pass


@dataclass(frozen=True)
class DefectReport:
    """Labelled residual polynomials of one of the PDE systems."""

    residuals: tuple[tuple[str, Poly], ...]

    @property
    def all_zero(self) -> bool:
        return all(p.is_zero() for _, p in self.residuals)

    def nonzero(self) -> list[tuple[str, Poly]]:
        return [(label, p) for label, p in self.residuals if not p.is_zero()]


def vf_bracket(a: Sequence[Poly], b: Sequence[Poly]) -> list[Poly]:
    """Commutator of coordinate vector fields: a(b_c) - b(a_c) per component."""
    n = len(a)
    out = []
    for c in range(n):
        acc = None
        for d in range(n):
            if not a[d].is_zero():
                term = a[d] * b[c].diff(d)
                acc = term if acc is None else acc + term
            if not b[d].is_zero():
                term = b[d] * a[c].diff(d)
                acc = -term if acc is None else acc - term
        out.append(acc if acc is not None else a[c].ring.zero())
    return out


def _frame_components(V: PolyVectorField, frame: Frame) -> list[Poly]:
    if V.basis == "frame":
        return list(V.components)
    return frame.to_frame(list(V.components))


def contact_defect(V: PolyVectorField, frame: Frame) -> DefectReport:
    """Non-horizontal frame components of [V, X] for each horizontal X."""
    g = frame.algebra
    m = frame.horizontal
    comps = _frame_components(V, frame)
    coords = frame.to_coords(comps)
    residuals = []
    for i in range(m):
        br = vf_bracket(coords, list(frame.columns[i]))
        br_frame = frame.to_frame(br)
        for j in range(m, len(frame)):
            residuals.append((f"[V,~{g.names[i]}]@~{g.names[j]}", br_frame[j]))
    return DefectReport(tuple(residuals))


def _horizontal_derivative_matrix(comps: Sequence[Poly], frame: Frame) -> list[list[Poly]]:
    m = frame.horizontal
    return [[frame.apply(j, comps[i]) for j in range(m)] for i in range(m)]


def conformal_defect(V: PolyVectorField, frame: Frame) -> DefectReport:
    """Residuals of M + M^t = (2/m) tr(M) I on the horizontal derivative matrix."""
    if not contact_defect(V, frame).all_zero:
        raise NotContact("conformality is only defined for contact fields")
    g = frame.algebra
    m = frame.horizontal
    comps = _frame_components(V, frame)
    mat = _horizontal_derivative_matrix(comps, frame)
    trace = frame.ring.zero()
    for i in range(m):
        trace = trace + mat[i][i]
    residuals = []
    for i in range(m):
        for j in range(i, m):
            r = mat[i][j] + mat[j][i]
            if i == j:
                r = r - Fraction(2, m) * trace
            residuals.append((f"co({g.names[i]},{g.names[j]})", r))
    return DefectReport(tuple(residuals))


def conformal_system_residuals(comps: Sequence[Poly], frame: Frame) -> list[Poly]:
    """Joint contact + conformal residual list, linear in the field."""
    g = frame.algebra
    m = frame.horizontal
    coords = frame.to_coords(list(comps))
    out = []
    for i in range(m):
        br = vf_bracket(coords, list(frame.columns[i]))
        br_frame = frame.to_frame(br)
        out.extend(br_frame[m:])
    mat = _horizontal_derivative_matrix(comps, frame)
    trace = frame.ring.zero()
    for i in range(m):
        trace = trace + mat[i][i]
    for i in range(m):
        for j in range(i, m):
            r = mat[i][j] + mat[j][i]
            if i == j:
                r = r - Fraction(2, m) * trace
            out.append(r)
    return out


# -- pointwise jets ----------------------------------------------------


@dataclass(frozen=True)
class JetOnePart:
    """Degree-one jet data: a full matrix on layer -1 sources, vectors deeper."""

    matrices: tuple[tuple[int, Matrix], ...]
    vectors: tuple[tuple[int, tuple[Fraction, ...]], ...]

    def is_zero(self) -> bool:
        return (all(all(x == 0 for row in m.entries for x in row) for _, m in self.matrices)
                and all(all(x == 0 for x in v) for _, v in self.vectors))


@dataclass(frozen=True)
class ContactJet:
    point: tuple[Fraction, ...]
    minus_parts: tuple[tuple[int, tuple[Fraction, ...]], ...]
    zero_part: DegreeZeroMap
    one_part: JetOnePart | None


def _zero_part_entries(comps: Sequence[Poly], frame: Frame) -> list[list[Poly]]:
    """Symbolic entries of the degree-zero jet: block (r,c) is X_c applied
    to the coefficient of basis element r, within each layer."""
    g = frame.algebra
    n = g.dim
    ent = [[frame.ring.zero() for _ in range(n)] for _ in range(n)]
    for depth in range(1, g.step + 1):
        idx = g.layer_indices(depth)
        for r in idx:
            for c in idx:
                ent[r][c] = frame.apply(c, comps[r])
    return ent


def jet(V: PolyVectorField, frame: Frame, point: Sequence[Fraction],
        order: int = 1) -> ContactJet:
    """Layered derivative data of a contact field at a rational point."""
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    if not contact_defect(V, frame).all_zero:
        raise NotContact("jets are only defined for contact fields")
    g = frame.algebra
    pt = [Fraction(x) for x in point]
    comps = _frame_components(V, frame)
    minus = []
    for depth in range(1, g.step + 1):
        full = vec_zero(g.dim)
        for i in g.layer_indices(depth):
            full[i] = comps[i].eval(pt)
        minus.append((depth, tuple(full)))
    sym = _zero_part_entries(comps, frame)
    blocks = []
    for depth in range(1, g.step + 1):
        idx = g.layer_indices(depth)
        blocks.append(Matrix([[sym[r][c].eval(pt) for c in idx] for r in idx],
                             cols=len(idx)))
    zero_part = DegreeZeroMap(g, blocks)
    one_part = None
    if order == 1:
        matrices = []
        for c1 in g.layer_indices(1):
            ent = [[frame.apply(c1, sym[r][c]).eval(pt) for c in range(g.dim)]
                   for r in range(g.dim)]
            matrices.append((c1, Matrix(ent, cols=g.dim)))
        vectors = []
        for depth in range(2, g.step + 1):
            for src in g.layer_indices(depth):
                full = vec_zero(g.dim)
                for i in g.layer_indices(depth - 1):
                    full[i] = frame.apply(src, comps[i]).eval(pt)
                vectors.append((src, tuple(full)))
        one_part = JetOnePart(tuple(matrices), tuple(vectors))
    return ContactJet(tuple(pt), tuple(minus), zero_part, one_part)


def jet_jacobi_check(j: ContactJet, g: GradedLieAlgebra) -> bool:
    """Check [D,[S,T]] = [D(S),T] - [D(T),S] for the zero-part on all basis pairs.

    Passing certifies that the degree-zero jet is a strata-preserving
    derivation.
    """
    d = j.zero_part
    for a in range(g.dim):
        for b in range(a + 1, g.dim):
            lhs = d.apply(g.bracket_basis(a, b))
            rhs1 = g.bracket(d.apply(g.basis_vector(a)), g.basis_vector(b))
            rhs2 = g.bracket(d.apply(g.basis_vector(b)), g.basis_vector(a))
            if any(x != y - z for x, y, z in zip(lhs, rhs1, rhs2)):
                return False
    return True


# -- the Engel h-system ------------------------------------------------


def _is_engel_pattern(g: GradedLieAlgebra) -> bool:
    if g.layer_dims != [2, 1, 1]:
        return False
    expect = {
        (0, 1): [0, 0, 1, 0],
        (0, 2): [0, 0, 0, 1],
        (1, 2): [0, 0, 0, 0],
        (0, 3): [0, 0, 0, 0],
        (1, 3): [0, 0, 0, 0],
        (2, 3): [0, 0, 0, 0],
    }
    for (i, j), v in expect.items():
        if g.bracket_basis(i, j) != [Fraction(x) for x in v]:
            return False
    return True


@dataclass(frozen=True)
class HSystemSolution:
    subspace: Subspace
    h_basis: tuple[Poly, ...]
    fields: tuple[PolyVectorField, ...]

    @property
    def dim(self) -> int:
        return len(self.h_basis)


def reconstruct_from_h(frame: Frame, h: Poly) -> PolyVectorField:
    """The contact field determined by its vertical coefficient h."""
    x1 = 0
    y = 2
    g_coeff = -frame.apply(x1, h)
    f1 = frame.apply(y, h)
    f2 = frame.apply(x1, frame.apply(x1, h))
    return PolyVectorField((f1, f2, g_coeff, h), "frame")


def solve_h_system(frame: Frame, max_weighted_degree: int = 6,
                   conformality: bool = True) -> HSystemSolution:
    """Solutions h of the reduced vertical-coefficient system, with V(h).

    The headline equations are X1^3 h = X2 h = Y^2 h = Z^2 h = 0.  On
    their own they admit contact fields that are not conformal (a
    7-dimensional polynomial space); ``conformality`` adds the two
    horizontal-derivative symmetry conditions of the reconstructed field,
    cutting the space to the conformal one.
    """
    if not _is_engel_pattern(frame.algebra):
        raise ValueError("the h-system is specific to the Engel bracket pattern")
    ring = frame.ring
    monos = ring.monomials_upto(max_weighted_degree)

    def ops(p: Poly) -> list[Poly]:
        x1, x2, y, z = 0, 1, 2, 3
        out = [
            frame.apply(x1, frame.apply(x1, frame.apply(x1, p))),
            frame.apply(x2, p),
            frame.apply(y, frame.apply(y, p)),
            frame.apply(z, frame.apply(z, p)),
        ]
        if conformality:
            f1 = frame.apply(y, p)
            f2 = frame.apply(x1, frame.apply(x1, p))
            out.append(frame.apply(x1, f1) - frame.apply(x2, f2))
            out.append(frame.apply(x2, f1) + frame.apply(x1, f2))
        return out

    columns = []
    slots: set = set()
    residuals_per_mono = []
    for exp in monos:
        p = Poly(ring, {exp: Fraction(1)})
        res = ops(p)
        residuals_per_mono.append(res)
        for eq, r in enumerate(res):
            for term in r.terms:
                slots.add((eq, term))
    slot_list = sorted(slots)
    slot_index = {s: i for i, s in enumerate(slot_list)}
    rows = [vec_zero(len(monos)) for _ in slot_list]
    for col, res in enumerate(residuals_per_mono):
        for eq, r in enumerate(res):
            for term, c in r.terms.items():
                rows[slot_index[(eq, term)]][col] = c
    space = nullspace(Matrix(rows, cols=len(monos)))
    h_basis = []
    for v in space.basis:
        h_basis.append(Poly(ring, {exp: c for exp, c in zip(monos, v) if c}))
    fields = tuple(reconstruct_from_h(frame, h) for h in h_basis)
    return HSystemSolution(space, tuple(h_basis), fields)


# -- bounded-degree conformal ansatz solver -----------------------------


class AnsatzLayout:
    """Index bookkeeping for fields with per-component degree bounds.

    The component along the frame field of weight w may use monomials of
    weighted degree up to ``degree + |w|``.
    """

    def __init__(self, frame: Frame, degree: int):
        self.frame = frame
        self.degree = degree
        g = frame.algebra
        ring = frame.ring
        self.monomials: list[list[tuple[int, ...]]] = []
        self.offsets: list[int] = []
        pos = 0
        for i in range(g.dim):
            monos = ring.monomials_upto(degree + (-g.weights[i]))
            self.monomials.append(monos)
            self.offsets.append(pos)
            pos += len(monos)
        self.total = pos
        self._index = {}
        for i, monos in enumerate(self.monomials):
            for k, exp in enumerate(monos):
                self._index[(i, exp)] = self.offsets[i] + k

    def embed(self, field: PolyVectorField) -> list[Fraction] | None:
        comps = field.components if field.basis == "frame" else tuple(
            self.frame.to_frame(list(field.components)))
        v = vec_zero(self.total)
        for i, comp in enumerate(comps):
            for exp, c in comp.terms.items():
                key = (i, exp)
                if key not in self._index:
                    return None
                v[self._index[key]] = c
        return v

    def field(self, v: Sequence[Fraction]) -> PolyVectorField:
        ring = self.frame.ring
        comps = []
        for i, monos in enumerate(self.monomials):
            terms = {}
            for k, exp in enumerate(monos):
                c = v[self.offsets[i] + k]
                if c:
                    terms[exp] = c
            comps.append(Poly(ring, terms))
        return PolyVectorField(tuple(comps), "frame")


def conformal_fields_of_degree(frame: Frame, delta: int) -> list[PolyVectorField]:
    """Homogeneous conformal fields of graded degree ``delta`` (exact nullspace).

    The PDE system commutes with the weighted grading, so the full
    bounded-degree problem splits into these homogeneous blocks.
    """
    g = frame.algebra
    ring = frame.ring
    basis: list[tuple[int, tuple[int, ...]]] = []
    for i in range(g.dim):
        d = delta + (-g.weights[i])
        for exp in ring.monomials_exact(d):
            basis.append((i, exp))
    if not basis:
        return []
    residual_cols = []
    slots: set = set()
    for i, exp in basis:
        comps = [ring.zero()] * g.dim
        comps[i] = Poly(ring, {exp: Fraction(1)})
        res = conformal_system_residuals(comps, frame)
        residual_cols.append(res)
        for eq, r in enumerate(res):
            for term in r.terms:
                slots.add((eq, term))
    slot_list = sorted(slots)
    slot_index = {s: k for k, s in enumerate(slot_list)}
    rows = [vec_zero(len(basis)) for _ in slot_list]
    for col, res in enumerate(residual_cols):
        for eq, r in enumerate(res):
            for term, c in r.terms.items():
                rows[slot_index[(eq, term)]][col] = c
    space = nullspace(Matrix(rows, cols=len(basis)))
    fields = []
    for v in space.basis:
        comps = [dict() for _ in range(g.dim)]
        for (i, exp), c in zip(basis, v):
            if c:
                comps[i][exp] = c
        fields.append(PolyVectorField(tuple(Poly(ring, t) for t in comps), "frame"))
    return fields


@dataclass(frozen=True)
class ConformalSolution:
    layout: AnsatzLayout
    subspace: Subspace
    fields: tuple[PolyVectorField, ...]

    @property
    def dim(self) -> int:
        return self.subspace.dim


def solve_polynomial_conformal(frame: Frame, max_weighted_degree: int = 6) -> ConformalSolution:
    """All conformal fields within the bounded polynomial ansatz.

    Solved block-by-block in the graded degree and re-canonicalized in the
    global ansatz coordinates, so reruns give identical bases.  If the
    cutoff is too small the result only bounds the true dimension from
    below; stability under raising the cutoff is the sanity check.
    """
    g = frame.algebra
    layout = AnsatzLayout(frame, max_weighted_degree)
    vectors = []
    for delta in range(-g.step, max_weighted_degree + 1):
        for field in conformal_fields_of_degree(frame, delta):
            v = layout.embed(field)
            if v is None:
                raise AssertionError("homogeneous block escaped the ansatz layout")
            vectors.append(v)
    space = Subspace.from_vectors(vectors, layout.total)
    fields = tuple(layout.field(v) for v in space.basis)
    return ConformalSolution(layout, space, fields)
