"""Pair annihilation test: the complementary half of invertibility.

For every ordered edge pair (e, g) there is a partial map on ordered pairs
of distinct level-(k-1) paths: it is defined where the images of the two
extended paths under the permutation end in the same edge, and it returns
the two leading parts.  The endomorphism is an automorphism exactly when
the synchronization test passes and additionally every long enough chain
of these partial maps has empty domain, i.e. the transition graph on the
live pairs is acyclic.
"""

from __future__ import annotations

from enum import Enum

from .graphs import Graph, Path, require_analysis_hypotheses
from .permutations import BlockPermutation, invert, reduce_level
from .synchronization import (
    DecisionCertificate,
    _certify_dag,
    _find_cycle,
    decide_synchronization,
)

Pair = tuple[Path, Path]


class PairMaps:
    """Partial pair maps indexed by ordered edge pairs.

    Only pairs with matching word ranges are materialized: a mismatched
    pair indexes a zero word, sits outside every domain and can never
    participate in a chain.
    """

    def __init__(self, graph: Graph, level: int, maps: dict, delta: tuple):
        self.graph = graph
        self.level = level
        self.maps = maps
        self.delta = delta

    def table(self) -> dict:
        g = self.graph
        out = {}
        for (e, f), m in self.maps.items():
            key = f"{e},{f}"
            out[key] = {
                f"{g.path_str(a)},{g.path_str(b)}": [g.path_str(c), g.path_str(d)]
                for (a, b), (c, d) in m.items()
            }
        return out


def pair_maps(p: BlockPermutation) -> PairMaps:
    g = p.graph
    k = p.level
    short = g.paths(k - 1)
    candidates = [
        (a, b)
        for a in short
        for b in short
        if a != b and a.range == b.range
    ]
    maps: dict[tuple[str, str], dict[Pair, Pair]] = {}
    in_some_domain = set()
    for e in g.edges:
        for f in g.edges:
            table: dict[Pair, Pair] = {}
            for a, b in candidates:
                if a.source != e.range or b.source != f.range:
                    continue
                ia = p(g.prepend(e, a))
                ib = p(g.prepend(f, b))
                if ia.edges[-1] != ib.edges[-1]:
                    continue
                image = (g.prefix(ia, k - 1), g.prefix(ib, k - 1))
                table[(a, b)] = image
                in_some_domain.add((a, b))
            if table:
                maps[(e.name, f.name)] = table
    delta = tuple(pq for pq in candidates if pq in in_some_domain)
    return PairMaps(g, k, maps, delta)


def decide_annihilation(p: BlockPermutation) -> DecisionCertificate:
    """Acyclicity of the transition graph on the live pairs.

    The permutation is level-reduced before analysis, so embedded copies
    of the same endomorphism always get the certificate of their minimal
    representative; in particular the identity reduces to level 1, where
    no pair is live and the verdict is vacuously positive.
    """
    require_analysis_hypotheses(p.graph)
    p = reduce_level(p)
    pm = pair_maps(p)
    nodes = list(pm.delta)
    node_set = set(nodes)
    adj = {n: [] for n in nodes}
    for (e, f), table in sorted(pm.maps.items()):
        for pair, image in table.items():
            if image in node_set:
                adj[pair].append(((e, f), image))
    for n in nodes:
        adj[n].sort(key=lambda step: step[0])
    cycle = _find_cycle(nodes, adj)
    if cycle is not None:
        pairs, labels = cycle
        return DecisionCertificate(
            verdict=False,
            cycle_pairs=pairs,
            cycle_labels=labels,
            pair_count=len(nodes),
        )
    return _certify_dag(nodes, adj, len(nodes))


def brute_force_annihilation(p: BlockPermutation, max_m: int) -> bool:
    """Literal word test: some m <= max_m empties every length-m chain.

    Chains whose edge words fail to compose are empty from the start, so
    the walk runs over pairs of genuine paths of length m.
    """
    if max_m < 1:
        raise ValueError("max_m must be at least 1")
    p = reduce_level(p)
    g = p.graph
    pm = pair_maps(p)
    empty: dict[tuple[str, str], dict] = {}
    for m in range(1, max_m + 1):
        ok = True
        words = g.paths(m)
        for rho in words:
            for theta in words:
                alive = set(
                    pm.maps.get((rho.edges[-1], theta.edges[-1]), empty)
                )
                if not alive:
                    continue
                # rightmost edge pair acts first; its table was the seed
                for i in range(m - 1, -1, -1):
                    table = pm.maps.get((rho.edges[i], theta.edges[i]), empty)
                    if i == m - 1:
                        alive = {table[q] for q in alive}
                    else:
                        alive = {table[q] for q in alive if q in table}
                    if not alive:
                        break
                if alive:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


class Classification(str, Enum):
    AUTOMORPHISM = "automorphism"
    DIAGONAL_AUTOMORPHISM_ONLY = "diagonal_automorphism_only"
    PROPER = "proper"

    def __str__(self):
        return self.value


def classify(p: BlockPermutation) -> Classification:
    return classify_detail(p)[0]


def classify_detail(
    p: BlockPermutation,
) -> tuple[Classification, DecisionCertificate, DecisionCertificate]:
    """Full classification with both certificates.

    The induced endomorphism is always injective; it is an automorphism
    when both tests pass, restricts to a diagonal automorphism without
    being surjective when only the synchronization test passes, and is a
    proper endomorphism otherwise.
    """
    cert_b = decide_synchronization(p)
    cert_d = decide_annihilation(p)
    if cert_b.verdict and cert_d.verdict:
        cls = Classification.AUTOMORPHISM
    elif cert_b.verdict:
        cls = Classification.DIAGONAL_AUTOMORPHISM_ONLY
    else:
        cls = Classification.PROPER
    return cls, cert_b, cert_d


def inverse_if_automorphism(p: BlockPermutation):
    """Inverse permutation when the classification allows one, else None."""
    if classify(p) is Classification.AUTOMORPHISM:
        return invert(p)
    return None
