from fractions import Fraction

import pytest

from carnot.graded_lie import GenerationFailure, GradedLieAlgebra
from carnot.prolongation import (JacobiAssemblyFailure, Level, PriorLevelsMissing,
                                 full_prolongation, prolong_step, termination_valid)
from carnot.group_realization import CoordinateRecipe, left_invariant_frame
from carnot.contact_pde import conformal_fields_of_degree
from .conftest import conformal_g0, make_abelian, make_engel, make_heisenberg


def test_engel_first_level_vanishes(engel):
    lvl0 = Level.from_degree_zero(conformal_g0(engel))
    assert prolong_step(engel, [lvl0], 1).dim == 0


def test_abelian_r3_first_level():
    g = make_abelian(3)
    lvl0 = Level.from_degree_zero(conformal_g0(g))
    lvl1 = prolong_step(g, [lvl0], 1)
    assert lvl1.dim == 3
    # oracle: homogeneous conformal fields of matching graded degree
    frame = left_invariant_frame(g, CoordinateRecipe.single_factor(g))
    assert len(conformal_fields_of_degree(frame, 1)) == 3


def test_abelian_r1_levels_never_die():
    g = make_abelian(1)
    levels = [Level.from_degree_zero(conformal_g0(g))]
    for k in range(1, 5):
        lvl = prolong_step(g, levels, k)
        assert lvl.dim == 1
        levels.append(lvl)


def test_prior_levels_missing():
    g = make_engel()
    lvl0 = Level.from_degree_zero(conformal_g0(g))
    with pytest.raises(PriorLevelsMissing):
        prolong_step(g, [lvl0], 2)


def test_leibniz_law_on_computed_levels():
    g = make_heisenberg()
    levels = [Level.from_degree_zero(conformal_g0(g))]
    for k in (1, 2):
        lvl = prolong_step(g, levels, k)
        from carnot.prolongation import _bracket_local
        for b in range(lvl.dim):
            for j1 in range(g.dim):
                for j2 in range(j1 + 1, g.dim):
                    lhs_target = g.weights[j1] + g.weights[j2] + k
                    lhs = None
                    br = g.bracket_basis(j1, j2)
                    for r, c in enumerate(br):
                        if c:
                            term = [c * x for x in lvl.action(b, r)]
                            lhs = term if lhs is None else [p + q for p, q in zip(lhs, term)]
                    rhs1 = _bracket_local(g, levels, lvl.action(b, j1),
                                          g.weights[j1] + k, j2)
                    rhs2 = _bracket_local(g, levels, lvl.action(b, j2),
                                          g.weights[j2] + k, j1)
                    rhs = [p - q for p, q in zip(rhs1, rhs2)]
                    if lhs is None:
                        lhs = [Fraction(0)] * len(rhs)
                    assert lhs == rhs
        levels.append(lvl)


def test_full_prolongation_engel(engel):
    s, rep = full_prolongation(engel, conformal_g0(engel))
    assert rep.status == "terminated"
    assert rep.terminated_at == 1
    assert rep.level_dims == (1, 0)
    assert rep.total_dim == 5
    assert s.dim == 5
    assert s.labels == ("Z", "Y", "X1", "X2", "D1")
    s.verify()


def test_full_prolongation_heisenberg():
    g = make_heisenberg()
    s, rep = full_prolongation(g, conformal_g0(g))
    assert rep.terminated_at == 3
    assert rep.level_dims == (2, 2, 1, 0)
    assert rep.total_dim == 8
    s.verify()
    # oracle: level dims equal homogeneous conformal field counts
    frame = left_invariant_frame(g, CoordinateRecipe.single_factor(g))
    for k, d in enumerate(rep.level_dims):
        assert len(conformal_fields_of_degree(frame, k)) == d


def test_full_prolongation_r3():
    g = make_abelian(3)
    s, rep = full_prolongation(g, conformal_g0(g))
    assert rep.terminated_at == 2
    assert rep.level_dims == (4, 3, 0)
    assert rep.total_dim == 10
    s.verify()


def test_full_prolongation_r2_cutoff():
    g = make_abelian(2)
    s, rep = full_prolongation(g, conformal_g0(g), max_k=6)
    assert rep.status == "cutoff_reached"
    assert rep.terminated_at is None
    assert rep.level_dims == (2,) * 7
    assert s.bracket_table is None


def test_engel_jacobi_all_triples(engel):
    s, _ = full_prolongation(engel, conformal_g0(engel))
    n = s.dim
    triples = [(a, b, c) for a in range(n) for b in range(a + 1, n) for c in range(b + 1, n)]
    assert len(triples) == 10
    for a, b, c in triples:
        j1 = s.bracket_vec(s._unit(a), s.bracket(b, c))
        j2 = s.bracket_vec(s._unit(b), s.bracket(c, a))
        j3 = s.bracket_vec(s._unit(c), s.bracket(a, b))
        assert all(x + y + z == 0 for x, y, z in zip(j1, j2, j3))


def test_action_consistency_mixed_pairs(engel):
    s, _ = full_prolongation(engel, conformal_g0(engel))
    g = engel
    for a, key in enumerate(s.sbasis):
        if key[0] != "lev":
            continue
        _, k, p = key
        for b, bkey in enumerate(s.sbasis):
            if bkey[0] != "neg":
                continue
            j = bkey[1]
            expected = s._embed_value(s.levels[k].action(p, j), g.weights[j] + k)
            assert s.bracket(a, b) == expected
            assert s.bracket(b, a) == [-x for x in expected]


def test_engel_bracket_table_values(engel):
    s, _ = full_prolongation(engel, conformal_g0(engel))
    iD = s.index_of_name("D1")
    for name, scale in (("X1", 1), ("X2", 1), ("Y", 2), ("Z", 3)):
        i = s.index_of_name(name)
        expect = [Fraction(0)] * s.dim
        expect[i] = Fraction(scale)
        assert s.bracket(iD, i) == expect


def test_termination_valid():
    assert termination_valid(make_engel())
    assert termination_valid(make_heisenberg())
    structure = [[[Fraction(0)] * 2 for _ in range(2)] for _ in range(2)]
    bad = GradedLieAlgebra(["A", "B"], [-1, -2], structure)
    assert not termination_valid(bad)
    with pytest.raises(GenerationFailure):
        full_prolongation(bad, conformal_g0(make_abelian(1)))


def test_determinism_of_levels():
    g = make_heisenberg()
    s1, r1 = full_prolongation(g, conformal_g0(g))
    s2, r2 = full_prolongation(g, conformal_g0(g))
    assert r1 == r2
    for l1, l2 in zip(s1.levels, s2.levels):
        assert l1.subspace == l2.subspace
        assert l1.actions == l2.actions
    assert s1.bracket_table == s2.bracket_table


def test_closed_g0_required_for_assembly():
    # a degree-zero space that is not closed under commutators must be
    # detected while the bracket table is assembled
    from carnot.derivations import DegreeZeroSpace
    from carnot.exact_linalg import Subspace
    from carnot.prolongation import ProlongationAlgebra
    g = make_abelian(2)
    # span{E12, E21}: the commutator diag(1,-1) leaves the span
    vectors = [[0, 1, 0, 0], [0, 0, 1, 0]]
    lvl0 = Level.from_degree_zero(DegreeZeroSpace(g, Subspace.from_vectors(vectors, 4)))
    with pytest.raises(JacobiAssemblyFailure):
        ProlongationAlgebra(g, [lvl0], build_table=True)
