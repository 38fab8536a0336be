import itertools
import random

import pytest

from gel import (
    AlgebraElement,
    BlockPermutation,
    CapExceededError,
    InputParseError,
    PreconditionError,
    ValidationError,
    cycles_str,
    enumerate_unitaries,
    invert,
    lambda_apply,
    order_up_to,
    parse_cycles,
    reduce_level,
    star_compose,
    unitary_count,
)
from gel.permutations import permutation_from_element
from gel.scalars import ONE, Scalar


# -- enumeration -------------------------------------------------------------


def test_counts(fib, barbell):
    assert unitary_count(fib, 2) == 2
    assert unitary_count(fib, 3) == 24
    assert unitary_count(barbell, 2) == 8
    assert unitary_count(fib, 1) == 1
    assert unitary_count(barbell, 1) == 1
    # barbell level 3 blocks have sizes 3,3,2 / 3,2,3 / 2,3,3
    assert unitary_count(barbell, 3) == 6**6 * 2**3


def test_count_is_product_of_block_factorials(fib, barbell):
    import math

    for g, k in ((fib, 2), (fib, 3), (barbell, 2), (barbell, 3)):
        expected = 1
        for v in g.vertices:
            for w in g.vertices:
                expected *= math.factorial(len(g.block(v, w, k)))
        assert unitary_count(g, k) == expected


def test_enumeration_matches_count_and_starts_at_identity(fib, barbell):
    for g, k in ((fib, 2), (fib, 3), (barbell, 2)):
        perms = list(enumerate_unitaries(g, k))
        assert len(perms) == unitary_count(g, k)
        assert perms[0].is_identity
        assert len(set(perms)) == len(perms)


def test_enumeration_cap(fib):
    with pytest.raises(CapExceededError):
        list(enumerate_unitaries(fib, 3, cap=10))


def test_enumeration_requires_no_sinks():
    from gel import parse_graph

    g = parse_graph("vertex A\nvertex B\nedge e A B\nedge f B B\n")
    # A emits, B emits: fine; now a genuine sink
    g2 = parse_graph("vertex A\nvertex B\nedge e A B\n")
    with pytest.raises(ValidationError):
        list(enumerate_unitaries(g2, 1))


def test_rose_counts():
    from gel import parse_graph
    from tests.conftest import rose_text

    g = parse_graph(rose_text(3))
    assert unitary_count(g, 1) == 6


# -- cycle notation ---------------------------------------------------------------


def test_parse_transposition(fib):
    p = parse_cycles(fib, 2, "(11 32)")
    assert p(fib.make_path(["1", "1"])) == fib.make_path(["3", "2"])
    assert cycles_str(p) == "(11 32)"


def test_parse_accepts_commas_and_dots(fib):
    a = parse_cycles(fib, 2, "(11,32)")
    b = parse_cycles(fib, 2, "(1.1 3.2)")
    assert a == b == parse_cycles(fib, 2, "(11 32)")


def test_parse_identity_forms(fib):
    for text in ("id", "", "()"):
        assert parse_cycles(fib, 2, text).is_identity


def test_product_applies_right_cycle_first(fib):
    # with the rightmost-first rule this is the composite whose edge maps
    # reproduce the known diagram: 111 -> 132 under tau after upsilon
    p = parse_cycles(fib, 3, "(111 132 321)(113 323)")
    assert p(fib.make_path(["1", "1", "1"])) == fib.make_path(["1", "3", "2"])
    assert p(fib.make_path(["3", "2", "3"])) == fib.make_path(["1", "1", "3"])


def test_nondisjoint_cycles_compose(fib):
    p = parse_cycles(fib, 2, "(11 32)(11 32)")
    assert p.is_identity


def test_parse_block_crossing_rejected(fib, barbell):
    with pytest.raises(InputParseError):
        parse_cycles(fib, 2, "(11 13)")  # ranges differ
    assert parse_cycles(barbell, 2, "(25 63)") is not None
    with pytest.raises(InputParseError):
        parse_cycles(barbell, 2, "(11 25)")


def test_parse_unknown_and_repeated_paths(fib):
    with pytest.raises(InputParseError):
        parse_cycles(fib, 2, "(11 99)")
    with pytest.raises(InputParseError):
        parse_cycles(fib, 2, "(11 11)")
    with pytest.raises(InputParseError):
        parse_cycles(fib, 2, "(11)")


def test_block_permutation_rejects_block_crossing(fib):
    paths = {p: p for p in fib.paths(2)}
    a = fib.make_path(["1", "1"])
    b = fib.make_path(["1", "3"])
    paths[a], paths[b] = b, a
    with pytest.raises(ValueError):
        BlockPermutation(fib, 2, paths)


# -- unitaries -----------------------------------------------------------------------


def test_identity_to_unitary_is_one(fib):
    p = BlockPermutation.identity(fib, 2)
    assert p.to_unitary().equals(AlgebraElement.identity(fib))


def test_transposition_unitary_expansion(fib):
    u = parse_cycles(fib, 2, "(11 32)").to_unitary()
    expected = {}
    for a, b in (("11", "32"), ("32", "11"), ("13", "13"), ("21", "21"), ("23", "23")):
        expected[(fib.make_path(list(a)), fib.make_path(list(b)))] = ONE
    assert u.coeffs == expected


def test_unitary_times_adjoint_is_identity(barbell):
    for p in enumerate_unitaries(barbell, 2):
        u = p.to_unitary()
        assert (u * u.adjoint()).equals(AlgebraElement.identity(barbell))


def test_permutation_from_element_round_trip(fib):
    p = parse_cycles(fib, 2, "(11 32)")
    assert permutation_from_element(p.to_unitary()) == p
    with pytest.raises(PreconditionError):
        permutation_from_element(p.to_unitary().scale(Scalar(im=ONE.re)))


# -- star composition ---------------------------------------------------------------


def test_star_with_identity_embeds(fib):
    p = parse_cycles(fib, 2, "(11 32)")
    ident = BlockPermutation.identity(fib, 2)
    prod = star_compose(p, ident)
    assert prod.level == 3
    assert reduce_level(prod) == p
    prod2 = star_compose(ident, p)
    assert reduce_level(prod2) == p
    one_level = BlockPermutation.identity(fib, 1)
    assert star_compose(p, one_level) == p
    assert star_compose(one_level, p) == p


def test_sigma_squared_is_identity(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    sq = star_compose(sigma, sigma)
    assert sq.level == 3
    red = reduce_level(sq)
    assert red.level == 1 and red.is_identity


def test_star_encodes_composition_of_endomorphisms(fib):
    rng = random.Random(3)
    perms = list(enumerate_unitaries(fib, 2))
    edges = [AlgebraElement.edge_isometry(fib, e.name) for e in fib.edges]
    for u, w in itertools.product(perms, perms):
        z = star_compose(u, w)
        for s in edges:
            lhs = lambda_apply(u.to_unitary(), lambda_apply(w.to_unitary(), s))
            rhs = lambda_apply(z.to_unitary(), s)
            assert lhs.equals(rhs)


def test_star_associative_on_samples(fib):
    rng = random.Random(5)
    perms = list(enumerate_unitaries(fib, 2))
    for _ in range(4):
        a, b, c = (rng.choice(perms) for _ in range(3))
        left = star_compose(star_compose(a, b), c)
        right = star_compose(a, star_compose(b, c))
        assert reduce_level(left) == reduce_level(right)


def test_star_preserves_blocks(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    tau = parse_cycles(barbell, 2, "(11 52)")
    z = star_compose(sigma, tau)
    for a, b in z.mapping.items():
        assert a.source == b.source and a.range == b.range


# -- level reduction -------------------------------------------------------------------


def test_embed_then_reduce_round_trip(fib):
    p = parse_cycles(fib, 2, "(11 32)")
    assert reduce_level(p.embed(4)) == p


def test_transposition_is_minimal(fib):
    p = parse_cycles(fib, 2, "(11 32)")
    assert reduce_level(p) == p


def test_identity_reduces_to_level_one(fib):
    p = BlockPermutation.identity(fib, 3)
    red = reduce_level(p)
    assert red.level == 1 and red.is_identity


# -- order ------------------------------------------------------------------------------


def test_order_identity(fib):
    assert order_up_to(BlockPermutation.identity(fib, 2), 5) == 1


def test_order_sigma(barbell):
    assert order_up_to(parse_cycles(barbell, 2, "(25 63)"), 10) == 2


def test_order_proper_endomorphism_never_identity(fib):
    tu = parse_cycles(fib, 3, "(111 132 321)(113 323)")
    assert order_up_to(tu, 3) is None


def test_order_budget_guard(fib):
    tu = parse_cycles(fib, 3, "(111 132 321)(113 323)")
    with pytest.raises(CapExceededError):
        order_up_to(tu, 64, max_paths=500)


# -- inversion ----------------------------------------------------------------------------


def test_invert_identity(fib):
    p = BlockPermutation.identity(fib, 2)
    assert invert(p).is_identity


def test_invert_sigma_is_itself(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    assert invert(sigma) == sigma


def test_invert_quasifree_is_pointwise_inverse(pair_graph):
    for p in enumerate_unitaries(pair_graph, 1):
        assert invert(p) == p.inverse_pointwise()


def test_invert_round_trips(barbell):
    sigma = parse_cycles(barbell, 2, "(25 63)")
    q = invert(sigma)
    assert reduce_level(star_compose(sigma, q)).is_identity
    assert reduce_level(star_compose(q, sigma)).is_identity
    assert invert(invert(sigma)) == sigma


def test_invert_raises_for_proper_endomorphism(fib):
    with pytest.raises(CapExceededError):
        invert(parse_cycles(fib, 2, "(11 32)"))
