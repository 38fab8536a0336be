"""Acceptance suite: one test per criterion, each printing a verdict line.

Criterion 2 ships in two parts.  The reference counts it quotes for the
Fibonacci level-3 sweep (one automorphism, one diagonal-only, 22 proper,
with only the two long cycles passing the diagonal test) are inconsistent
with the criteria themselves: for the transposition (211 232) the induced
maps are 1: {11>11, 13>11, 32>13}, 2: {11>23, 13>21, 32>21},
3: {21>32, 23>32}, every composition of length three along a path word
already has a one-element range, and the exact linear-algebra chain
computed from raw word arithmetic confirms the diagonal restriction is an
automorphism.  Composing it with the two long cycles even gives a full
automorphism whose inverse this suite exhibits and verifies exactly.  So
the quoted counts are kept as a strict expected failure, and a companion
test pins the verified classification (two automorphisms, two
diagonal-only, twenty proper), cross-checked by three independent routes.
"""

import random
import time

import pytest

from gel import (
    AlgebraElement,
    Classification,
    ad_apply,
    brute_force_annihilation,
    brute_force_synchronization,
    classify,
    classify_detail,
    cocycle,
    cycles_str,
    decide_annihilation,
    decide_diagonal_invertible,
    decide_invertible,
    decide_synchronization,
    edge_maps,
    enumerate_unitaries,
    invert,
    k_groups,
    lambda_apply,
    order_up_to,
    parse_cycles,
    parse_graph,
    reduce_level,
    ring_nilpotent,
    shift_commutation_degree,
    stabilize_inverse,
    star_compose,
    unitary_count,
)
from gel.ktheory import AbelianGroup
from gel.scalars import ONE, gaussian
from gel.synchronization import _rooted_tree_root
from tests.conftest import rose_text

TAU_UPSILON = "(111 132 321)(113 323)"
OMEGA = "(211 232)"
TAU_UPSILON_OMEGA = "(111 132 321)(113 323)(211 232)"


def announce(num, status, detail=""):
    tail = f"  {detail}" if detail else ""
    print(f"ACCEPTANCE {num:02d}: {status}{tail}")


def full_sweep(fib, barbell):
    return (
        [("fib", p) for p in enumerate_unitaries(fib, 2)]
        + [("fib", p) for p in enumerate_unitaries(fib, 3)]
        + [("barbell", p) for p in enumerate_unitaries(barbell, 2)]
    )


def test_criterion_01_fibonacci_level_two(fib):
    start = time.perf_counter()
    perms = list(enumerate_unitaries(fib, 2))
    assert len(perms) == 2
    trans = parse_cycles(fib, 2, "(11 32)")
    assert trans in perms
    assert decide_synchronization(trans).verdict is False
    assert classify(trans) is Classification.PROPER
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    announce(1, "PASS", f"2 unitaries, (11 32) proper, {elapsed:.2f}s")


@pytest.mark.xfail(
    strict=True,
    reason="the quoted reference counts contradict the criteria applied to"
    " (211 232); the companion test carries the verified classification",
)
def test_criterion_02_reference_counts(fib):
    announce(2, "EXPECTED FAIL", "quoted reference counts, see module docstring")
    passers = [
        p for p in enumerate_unitaries(fib, 3) if decide_synchronization(p).verdict
    ]
    assert {cycles_str(p) for p in passers} == {"id", TAU_UPSILON}
    counts = {c: 0 for c in ("automorphism", "diagonal_automorphism_only", "proper")}
    for p in enumerate_unitaries(fib, 3):
        counts[str(classify(p))] += 1
    assert counts == {
        "automorphism": 1,
        "diagonal_automorphism_only": 1,
        "proper": 22,
    }


def test_criterion_02_verified_level_three(fib):
    start = time.perf_counter()
    perms = list(enumerate_unitaries(fib, 3))
    assert len(perms) == 24

    passers = set()
    counts = {c: 0 for c in ("automorphism", "diagonal_automorphism_only", "proper")}
    for p in perms:
        cert = decide_synchronization(p)
        # every verdict re-checked by the literal word oracle and the chain
        assert cert.verdict == brute_force_synchronization(p, cert.pair_count + 1)
        assert cert.verdict == decide_diagonal_invertible(p.to_unitary())[0]
        if cert.verdict:
            passers.add(cycles_str(p))
        counts[str(classify(p))] += 1

    assert passers == {"id", TAU_UPSILON, OMEGA, TAU_UPSILON_OMEGA}

    tu = parse_cycles(fib, 3, TAU_UPSILON)
    assert decide_synchronization(tu).verdict is True
    assert decide_annihilation(tu).verdict is False
    assert classify(tu) is Classification.DIAGONAL_AUTOMORPHISM_ONLY

    tuo = parse_cycles(fib, 3, TAU_UPSILON_OMEGA)
    assert classify(tuo) is Classification.AUTOMORPHISM
    inverse = invert(tuo)
    assert reduce_level(star_compose(tuo, inverse)).is_identity
    assert reduce_level(star_compose(inverse, tuo)).is_identity

    assert counts == {
        "automorphism": 2,
        "diagonal_automorphism_only": 2,
        "proper": 20,
    }
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    announce(
        2,
        "PASS (verified values)",
        f"passers {{id, tau.ups, omega, tau.ups.omega}}, 2/2/20, {elapsed:.2f}s",
    )


def test_criterion_03_edge_map_tables(fib):
    tu = parse_cycles(fib, 3, TAU_UPSILON)
    fam = edge_maps(tu)
    assert fam.table() == {
        "1": {"11": "13", "13": "32", "32": "32"},
        "2": {"11": "21", "13": "21", "32": "23"},
        "3": {"21": "11", "23": "11"},
    }
    root = _rooted_tree_root(fam, "1")
    assert root is not None and fib.path_str(root) == "32"
    announce(3, "PASS", "tables match the worked diagram, root 32 flagged")


def test_criterion_04_barbell_level_two(barbell):
    start = time.perf_counter()
    perms = list(enumerate_unitaries(barbell, 2))
    assert len(perms) == 8
    autos = {cycles_str(p) for p in perms if classify(p) is Classification.AUTOMORPHISM}
    assert autos == {"id", "(25 63)"}

    sigma = parse_cycles(barbell, 2, "(25 63)")
    u = sigma.to_unitary()
    image2 = lambda_apply(u, AlgebraElement.edge_isometry(barbell, "2"))
    expected2 = {
        (barbell.make_path(["6", "3"]), barbell.make_path(["5"])): ONE,
        (barbell.make_path(["2", "1"]), barbell.make_path(["1"])): ONE,
    }
    assert image2.coeffs == expected2
    image6 = lambda_apply(u, AlgebraElement.edge_isometry(barbell, "6"))
    expected6 = {
        (barbell.make_path(["2", "5"]), barbell.make_path(["3"])): ONE,
        (barbell.make_path(["6", "4"]), barbell.make_path(["4"])): ONE,
    }
    assert image6.coeffs == expected6

    assert order_up_to(sigma, 10) == 2
    assert invert(sigma) == sigma
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    announce(4, "PASS", f"8 unitaries, images exact, order 2, {elapsed:.2f}s")


def test_criterion_05_k_groups(barbell):
    k0, k1 = k_groups(barbell)
    assert k0 == AbelianGroup((), 1) and k1 == AbelianGroup((), 1)
    for n in range(2, 6):
        rk0, rk1 = k_groups(parse_graph(rose_text(n)))
        expected = AbelianGroup((), 0) if n == 2 else AbelianGroup((n - 1,), 0)
        assert rk0 == expected and rk1.is_trivial
    announce(5, "PASS", "barbell (Z, Z); roses Z/(n-1), 0 for n=2..5")


def test_criterion_06_invertibility_equivalence(fib, barbell):
    start = time.perf_counter()
    sweep = full_sweep(fib, barbell)
    assert len(sweep) == 34
    disagreements = 0
    for _, p in sweep:
        u = p.to_unitary()
        chain = decide_invertible(u)[0]
        nilpotent = ring_nilpotent(u)
        stabilized = stabilize_inverse(u) is not None
        combinatorial = (
            decide_synchronization(p).verdict and decide_annihilation(p).verdict
        )
        if not (chain == nilpotent == stabilized == combinatorial):
            disagreements += 1
    elapsed = time.perf_counter() - start
    assert disagreements == 0
    assert elapsed < 60.0
    announce(6, "PASS", f"34 unitaries, four routes agree, {elapsed:.1f}s")


def test_criterion_07_diagonal_equivalence(fib, barbell):
    disagreements = 0
    for _, p in full_sweep(fib, barbell):
        if decide_diagonal_invertible(p.to_unitary())[0] != decide_synchronization(p).verdict:
            disagreements += 1
    assert disagreements == 0
    announce(7, "PASS", "diagonal chain matches the synchronization test, 34/34")


def test_criterion_08_oracle_equivalence(fib, barbell):
    disagreements = 0
    for _, p in full_sweep(fib, barbell):
        cert_b = decide_synchronization(p)
        if cert_b.verdict != brute_force_synchronization(p, cert_b.pair_count + 1):
            disagreements += 1
        cert_d = decide_annihilation(p)
        if cert_d.verdict != brute_force_annihilation(p, max(cert_d.pair_count, 1) + 1):
            disagreements += 1
    assert disagreements == 0
    announce(8, "PASS", "word-iteration oracles agree, 34/34")


def _random_element(g, rng, m, n):
    paths_m = g.paths(m)
    paths_n = g.paths(n)
    coeffs = {}
    for _ in range(rng.randint(1, 4)):
        mu = rng.choice(paths_m)
        matches = [nu for nu in paths_n if nu.range == mu.range]
        if not matches:
            continue
        nu = rng.choice(matches)
        coeffs[(mu, nu)] = gaussian(
            rng.randint(-3, 3), rng.randint(1, 4),
            rng.randint(-3, 3), rng.randint(1, 4),
        )
    return AlgebraElement(g, m, n, coeffs)


def test_criterion_09_algebra_identities(fib, barbell):
    rng = random.Random(20260809)
    produced = 0

    for g in (fib, barbell):
        for _ in range(130):
            x = _random_element(g, rng, rng.randint(0, 2), rng.randint(0, 2))
            y = _random_element(g, rng, rng.randint(0, 2), rng.randint(0, 2))
            z = _random_element(g, rng, rng.randint(0, 2), rng.randint(0, 2))
            produced += 3
            assert ((x * y) * z).equals(x * (y * z))
            assert (x * y).adjoint().equals(y.adjoint() * x.adjoint())

    for g in (fib, barbell):
        for _ in range(60):
            raw = _random_element(g, rng, 2, 2)
            x = AlgebraElement(
                g, 2, 2,
                {k: c for k, c in raw.coeffs.items() if k[0].source == k[1].source},
            )
            produced += 1
            for alpha in g.paths(2):
                s = AlgebraElement.path_isometry(g, alpha)
                assert (s * x).equals(x.shift().shift() * s)

    units = {
        "fib": parse_cycles(fib, 2, "(11 32)").to_unitary(),
        "barbell": parse_cycles(barbell, 2, "(25 63)").to_unitary(),
    }
    for g, u in ((fib, units["fib"]), (barbell, units["barbell"])):
        inner = u * u.adjoint().shift()
        for _ in range(80):
            x = _random_element(g, rng, rng.randint(0, 2), rng.randint(0, 2))
            produced += 1
            assert ad_apply(u, x).equals(lambda_apply(inner, x))
        for r in (1, 2, 3):
            assert cocycle(u, r + 1).equals(u * cocycle(u, r).shift())

    for g, k in ((fib, 2), (barbell, 2)):
        perms = list(enumerate_unitaries(g, k))
        for a in perms:
            for b in perms:
                star = star_compose(a, b)
                for e in g.edges:
                    s = AlgebraElement.edge_isometry(g, e.name)
                    lhs = lambda_apply(a.to_unitary(), lambda_apply(b.to_unitary(), s))
                    assert lhs.equals(lambda_apply(star.to_unitary(), s))

    assert produced >= 1000
    announce(9, "PASS", f"{produced} randomized elements, all identities exact")


def test_criterion_10_quasifree_completeness(fib, barbell, pair_graph):
    checked = 0
    for g in (fib, barbell, pair_graph):
        for p in enumerate_unitaries(g, 1):
            assert classify(p) is Classification.AUTOMORPHISM
            assert invert(p) == p.inverse_pointwise()
            checked += 1
    g3 = parse_graph(rose_text(3))
    for p in enumerate_unitaries(g3, 1):
        assert classify(p) is Classification.AUTOMORPHISM
        assert invert(p) == p.inverse_pointwise()
        checked += 1
    announce(10, "PASS", f"{checked} level-1 unitaries, all automorphisms")


def test_criterion_11_shift_commutation(fib, barbell):
    automorphisms = [
        p
        for _, p in full_sweep(fib, barbell)
        if classify(p) is Classification.AUTOMORPHISM
    ]
    assert automorphisms
    for p in automorphisms:
        for q in (p, invert(p)):
            q = reduce_level(q)
            degree = shift_commutation_degree(q, test_depth=4)
            assert degree <= max(q.level - 1, 0)
    announce(11, "PASS", f"{len(automorphisms)} automorphisms certified with inverses")
