import itertools

import pytest

from gel import (
    AlgebraElement,
    BlockPermutation,
    Classification,
    CompositeAut,
    GraphAut,
    PreconditionError,
    classify,
    conjugate,
    cycles_str,
    enumerate_unitaries,
    find_inner_witness,
    graph_automorphisms,
    invert,
    lambda_apply,
    parse_cycles,
    relabel_element,
    shift_commutation_degree,
)
from gel.weyl import level1_unitary_of


def barbell_flip(barbell):
    return next(a for a in graph_automorphisms(barbell) if not a.is_identity)


# -- conjugation -----------------------------------------------------------


def test_conjugate_by_identity(fib):
    p = parse_cycles(fib, 2, "(11 32)")
    assert conjugate(GraphAut.identity(fib), p) == p


def test_conjugate_sigma_by_flip(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    flip = barbell_flip(barbell)
    conj = conjugate(flip, sigma)
    # relabelling 2->6, 5->3, 6->2, 3->5 carries the transposition to itself
    assert conj == sigma
    tau = parse_cycles(barbell, 2, "(11 52)")
    conj_tau = conjugate(flip, tau)
    assert cycles_str(conj_tau) == "(36 44)"


def test_conjugate_of_identity_perm(barbell):
    flip = barbell_flip(barbell)
    assert conjugate(flip, BlockPermutation.identity(barbell, 2)).is_identity


def test_conjugate_realizes_relabelled_endomorphism(barbell):
    sigma = parse_cycles(barbell, 2, "(11 52)")
    flip = barbell_flip(barbell)
    conj = conjugate(flip, sigma)
    flip_inv = flip.inverse()
    for e in barbell.edges:
        s = AlgebraElement.edge_isometry(barbell, e.name)
        lhs = lambda_apply(conj.to_unitary(), s)
        rhs = relabel_element(
            flip, lambda_apply(sigma.to_unitary(), relabel_element(flip_inv, s))
        )
        assert lhs.equals(rhs)


def test_conjugate_preserves_classification(barbell):
    flip = barbell_flip(barbell)
    for p in enumerate_unitaries(barbell, 2):
        assert classify(conjugate(flip, p)) is classify(p)


# -- composites ------------------------------------------------------------------


def test_vertex_fixing_aut_is_absorbed(pair_graph):
    auts = graph_automorphisms(pair_graph)
    vertex_fixing = [a for a in auts if a.fixes_all_vertices and not a.is_identity]
    assert vertex_fixing
    a = vertex_fixing[0]
    composite = CompositeAut(BlockPermutation.identity(pair_graph, 1), a)
    assert composite.aut.is_identity
    assert composite.perm == level1_unitary_of(a)
    direct = CompositeAut(level1_unitary_of(a), GraphAut.identity(pair_graph))
    assert composite == direct


def test_composite_group_law_on_barbell(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    elements = [
        CompositeAut(p, a)
        for p in (BlockPermutation.identity(barbell, 1), sigma)
        for a in graph_automorphisms(barbell)
    ]
    assert len(set(elements)) == 4
    ident = CompositeAut.identity(barbell)
    for x in elements:
        assert x.compose(x.inverse()) == ident
        assert x.inverse().compose(x) == ident
        assert x.compose(ident) == x
    for x, y, z in itertools.product(elements, repeat=3):
        assert x.compose(y.compose(z)) == x.compose(y).compose(z)


def test_composite_agrees_with_direct_action(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    flip = barbell_flip(barbell)
    x = CompositeAut(sigma, flip)
    y = CompositeAut(sigma, GraphAut.identity(barbell))
    z = x.compose(y)
    for e in barbell.edges:
        s = AlgebraElement.edge_isometry(barbell, e.name)
        assert z.apply(s).equals(x.apply(y.apply(s)))


def test_composite_rejects_proper_parts(fib):
    with pytest.raises(PreconditionError):
        CompositeAut(parse_cycles(fib, 2, "(11 32)"), GraphAut.identity(fib))


# -- inner witnesses -----------------------------------------------------------------


def test_identity_is_inner_with_trivial_witness(fib):
    p = BlockPermutation.identity(fib, 1)
    w = find_inner_witness(p, 2)
    assert w is not None and w.is_identity


def test_round_trip_inner_witness(pair_graph):
    from gel.permutations import permutation_from_element

    for w in enumerate_unitaries(pair_graph, 1):
        u_elem = w.to_unitary() * w.to_unitary().adjoint().shift()
        p = permutation_from_element(u_elem)
        got = find_inner_witness(p, 2)
        assert got is not None
        got_elem = got.to_unitary()
        assert (got_elem * got_elem.adjoint().shift()).equals(u_elem)


def test_sigma_has_no_witness_up_to_level_three(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    assert find_inner_witness(sigma, 3) is None


# -- eventual shift commutation ----------------------------------------------------------


def test_identity_commutes_immediately(fib):
    assert shift_commutation_degree(BlockPermutation.identity(fib, 2)) == 0


def test_quasifree_degree_zero(pair_graph):
    for p in enumerate_unitaries(pair_graph, 1):
        assert shift_commutation_degree(p, test_depth=3) == 0


def test_sigma_needs_one_shift(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    assert shift_commutation_degree(sigma, test_depth=4) == 1


def test_degree_bounded_for_fixture_automorphisms(fib, barbell):
    for g, k in ((fib, 2), (fib, 3), (barbell, 2)):
        for p in enumerate_unitaries(g, k):
            if classify(p) is not Classification.AUTOMORPHISM:
                continue
            for q in (p, invert(p)):
                m = shift_commutation_degree(q, test_depth=4)
                assert m <= max(q.level - 1, 0)
