"""Group calculus for concrete diagonal-preserving automorphisms.

The representable automorphisms split as a permutative part composed with
a graph automorphism.  Vertex-fixing graph automorphisms coincide with
level-1 permutative unitaries, so normal forms absorb them into the
permutative factor; that makes equality of composites a plain comparison.
Also provided: a bounded search for an inner-conjugation witness and the
bounded certificate that the restriction to the diagonal eventually
commutes with the one-sided shift.
"""

from __future__ import annotations

from .algebra import AlgebraElement, lambda_apply
from .annihilation import Classification, classify
from .errors import GelError, PreconditionError
from .graphs import Graph, GraphAut, Path, graph_automorphisms, validate
from .permutations import (
    BlockPermutation,
    enumerate_unitaries,
    invert,
    reduce_level,
    shift_perm,
    star_compose,
)


def relabel_element(a: GraphAut, x: AlgebraElement) -> AlgebraElement:
    """Push an algebra element through the graph automorphism."""
    coeffs = {
        (a.apply_path(mu), a.apply_path(nu)): c for (mu, nu), c in x.coeffs.items()
    }
    return AlgebraElement(x.graph, x.m, x.n, coeffs)


def conjugate(a: GraphAut, p: BlockPermutation) -> BlockPermutation:
    """Relabel a block permutation by a graph automorphism.

    The result represents the conjugated endomorphism: apply the inverse
    relabelling, then p, then the relabelling.
    """
    g = p.graph
    mapping = {
        a.apply_path(alpha): a.apply_path(beta) for alpha, beta in p.mapping.items()
    }
    return BlockPermutation(g, p.level, mapping)


def _all_graph_auts(g: Graph) -> tuple[GraphAut, ...]:
    cached = getattr(g, "_graph_auts", None)
    if cached is None:
        cached = graph_automorphisms(g)
        g._graph_auts = cached
    return cached


def level1_unitary_of(a: GraphAut) -> BlockPermutation:
    """The level-1 block permutation realizing a vertex-fixing graph
    automorphism."""
    if not a.fixes_all_vertices:
        raise PreconditionError("only vertex-fixing graph automorphisms are level-1 unitaries")
    g = a.graph
    mapping = {p: a.apply_path(p) for p in g.paths(1)}
    return BlockPermutation(g, 1, mapping)


class CompositeAut:
    """Normal form (permutative part, graph part) of a composite
    automorphism; the permutative part acts first from the left.

    The graph part is the canonical representative of its coset modulo
    vertex-fixing automorphisms; the vertex-fixing discrepancy is folded
    into the permutative part, which is kept level-reduced.  Two composites
    are equal exactly when their normal forms coincide.
    """

    def __init__(self, perm: BlockPermutation, aut: GraphAut, *, check: bool = True):
        g = perm.graph
        if check and classify(perm) is not Classification.AUTOMORPHISM:
            raise PreconditionError(
                "permutative part is not an invertible endomorphism"
            )
        coset = [b for b in _all_graph_auts(g) if b.vertex_map == aut.vertex_map]
        rep = min(coset, key=lambda b: b.key)
        leftover = aut.compose(rep.inverse())
        if leftover.is_identity:
            perm_part = reduce_level(perm)
        else:
            perm_part = reduce_level(
                star_compose(perm, level1_unitary_of(leftover))
            )
        self.graph = g
        self.perm = perm_part
        self.aut = rep

    @classmethod
    def identity(cls, g: Graph) -> "CompositeAut":
        return cls(BlockPermutation.identity(g, 1), GraphAut.identity(g), check=False)

    def __eq__(self, other):
        return (
            isinstance(other, CompositeAut)
            and self.perm == other.perm
            and self.aut == other.aut
        )

    def __hash__(self):
        return hash((self.perm, self.aut.key))

    def __repr__(self):
        from .permutations import cycles_str

        return f"CompositeAut({cycles_str(self.perm)}, {self.aut.key})"

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        """Evaluate the automorphism on an algebra element."""
        return lambda_apply(self.perm.to_unitary(), relabel_element(self.aut, x))

    def compose(self, other: "CompositeAut") -> "CompositeAut":
        """self after other, renormalized."""
        perm = star_compose(self.perm, conjugate(self.aut, other.perm))
        return CompositeAut(perm, self.aut.compose(other.aut), check=False)

    def inverse(self) -> "CompositeAut":
        ainv = self.aut.inverse()
        return CompositeAut(conjugate(ainv, invert(self.perm)), ainv, check=False)


# -- inner witnesses ------------------------------------------------------------


def _last_edge_refined_candidates(g: Graph, level: int):
    """Block permutations preserving range, source and the last edge.

    For a candidate witness at a level at or above the unitary's own, the
    defining equation forces the last edge of every image to survive, so
    the search may be restricted to this refined class.
    """
    import itertools

    classes: dict[tuple, list[Path]] = {}
    for p in g.paths(level):
        classes.setdefault((p.range, p.source, p.edges[-1]), []).append(p)
    keys = sorted(
        classes,
        key=lambda key: (g.vertex_index[key[0]], g.vertex_index[key[1]], key[2]),
    )
    pools = [itertools.permutations(classes[key]) for key in keys]
    for choice in itertools.product(*pools):
        mapping = {}
        for key, image in zip(keys, choice):
            for a, b in zip(classes[key], image):
                mapping[a] = b
        yield BlockPermutation(g, level, mapping)




def find_inner_witness(
    p: BlockPermutation, max_level: int, cap: int = 10_000_000
):
    """Search for w with u = w phi(w^*) among permutative unitaries of
    level at most max_level; None is evidence (not proof) of outerness.

    Candidates at levels at or above p's own level are pruned to the
    last-edge-preserving class; every candidate equality is checked at the
    permutation level and survivors are confirmed exactly in the algebra.
    """
    g = p.graph
    rep = validate(g)
    u_elem = p.to_unitary()
    for level in range(1, max_level + 1):
        big = max(p.level, level + 1)
        target = p.embed(big)
        if level >= p.level and rep.no_sources:
            candidates = _last_edge_refined_candidates(g, level)
        else:
            candidates = enumerate_unitaries(g, level, cap)
        for w in candidates:
            cand = w.embed(big).after(shift_perm(w).embed(big).inverse_pointwise())
            if cand == target:
                w_elem = w.to_unitary()
                if (w_elem * w_elem.adjoint().shift()).equals(u_elem):
                    return w
    return None


# -- eventual shift commutation ---------------------------------------------------


def shift_commutation_degree(p: BlockPermutation, test_depth: int = 4) -> int:
    """Least m such that conjugating the (m+1)-fold shift of every range
    projection up to the test depth equals the (m+1)-fold shift itself.

    This is a bounded certificate on generators: it witnesses that the
    restriction to the diagonal, composed with the m-fold shift, commutes
    with the shift on all tested projections.  For a level-k permutative
    automorphism a degree at most k-1 always exists; finding none up to k
    means a bug, not a negative result, and raises.
    """
    p = reduce_level(p)
    g = p.graph
    u = p.to_unitary()
    lam_edges = [lambda_apply(u, AlgebraElement.edge_isometry(g, e.name)) for e in g.edges]

    def phi_map(x: AlgebraElement) -> AlgebraElement:
        out = AlgebraElement.zero(g, x.m + 1, x.n + 1)
        for le in lam_edges:
            out = out + le * x * le.adjoint()
        return out

    projections = []
    for length in range(test_depth + 1):
        for q in g.paths(length):
            projections.append(AlgebraElement.range_projection(g, q))

    levels = [projections]

    def shifted(m):
        while len(levels) <= m:
            levels.append([x.shift() for x in levels[-1]])
        return levels[m]

    for m in range(p.level + 1):
        if all(
            phi_map(x).equals(y) for x, y in zip(shifted(m), shifted(m + 1))
        ):
            return m
    raise GelError(
        "no shift-commutation degree up to the level; this contradicts the"
        " certified bound and indicates a bug"
    )
