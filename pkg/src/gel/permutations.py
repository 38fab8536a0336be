"""Block permutations of level-k paths and their star calculus.

A block permutation fixes the range and source of every path it moves, so
the unitary sum of S_{sigma(alpha)} S_alpha^* commutes with all vertex
projections.  Composition of the induced endomorphisms is realized by the
star product u * w = lambda_u(w) u, whose result is again permutative one
level up; inversion follows the stabilizing sequence Ad(u_m^*)(u^*).
"""

from __future__ import annotations

import itertools
from math import factorial

from .algebra import AlgebraElement, cocycle, core_dimension
from .errors import CapExceededError, InputParseError, PreconditionError
from .graphs import Graph, Path, require_no_sinks
from .scalars import ONE

ENUMERATION_CAP = 10_000_000


class BlockPermutation:
    __slots__ = ("graph", "level", "mapping", "_key")

    def __init__(self, graph: Graph, level: int, mapping: dict):
        if level < 1:
            raise ValueError("block permutations live at level >= 1")
        domain = graph.paths(level)
        if set(mapping) != set(domain) or set(mapping.values()) != set(domain):
            raise ValueError("mapping is not a permutation of the level's paths")
        for a, b in mapping.items():
            if a.source != b.source or a.range != b.range:
                raise ValueError(
                    f"mapping moves {graph.path_str(a)} across blocks to {graph.path_str(b)}"
                )
        self.graph = graph
        self.level = level
        self.mapping = dict(mapping)
        self._key = (level, tuple(graph.path_rank(mapping[p]) for p in domain))

    @classmethod
    def identity(cls, graph: Graph, level: int) -> "BlockPermutation":
        return cls(graph, level, {p: p for p in graph.paths(level)})

    def __call__(self, p: Path) -> Path:
        return self.mapping[p]

    def __eq__(self, other):
        return (
            isinstance(other, BlockPermutation)
            and self.graph.digest == other.graph.digest
            and self._key == other._key
        )

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"BlockPermutation(level={self.level}, {cycles_str(self)})"

    @property
    def is_identity(self) -> bool:
        return all(a == b for a, b in self.mapping.items())

    def inverse_pointwise(self) -> "BlockPermutation":
        return BlockPermutation(
            self.graph, self.level, {b: a for a, b in self.mapping.items()}
        )

    def after(self, other: "BlockPermutation") -> "BlockPermutation":
        """Pointwise composition at a shared level; other acts first."""
        if self.level != other.level:
            raise ValueError("pointwise composition needs equal levels")
        return BlockPermutation(
            self.graph,
            self.level,
            {p: self.mapping[other.mapping[p]] for p in self.graph.paths(self.level)},
        )

    def embed(self, level: int) -> "BlockPermutation":
        """The same endomorphism one or more levels up: suffixes ride along."""
        if level < self.level:
            raise ValueError("can only embed upward")
        cur = self
        g = self.graph
        while cur.level < level:
            nxt = {}
            for p in g.paths(cur.level + 1):
                head = g.prefix(p, cur.level)
                tail = g.edge(p.edges[-1])
                nxt[p] = g.extend(cur.mapping[head], tail)
            cur = BlockPermutation(g, cur.level + 1, nxt)
        return cur

    def to_unitary(self) -> AlgebraElement:
        coeffs = {(b, a): ONE for a, b in self.mapping.items()}
        return AlgebraElement(self.graph, self.level, self.level, coeffs)


def to_unitary(p: BlockPermutation) -> AlgebraElement:
    return p.to_unitary()


# -- enumeration ---------------------------------------------------------------


def _blocks_in_order(g: Graph, k: int) -> list[tuple[Path, ...]]:
    out = []
    for v in g.vertices:
        for w in g.vertices:
            b = g.block(v, w, k)
            if b:
                out.append(b)
    return out


def unitary_count(g: Graph, k: int) -> int:
    """Product of the factorials of all block sizes."""
    count = 1
    for b in _blocks_in_order(g, k):
        count *= factorial(len(b))
    return count


def enumerate_unitaries(g: Graph, k: int, cap: int = ENUMERATION_CAP):
    """Stream every level-k block permutation.

    Blocks are ordered by (range, source) vertex declaration order and each
    block runs through its permutations in lexicographic rank, so the
    stream order is reproducible and the identity always comes first.
    """
    require_no_sinks(g)
    total = unitary_count(g, k)
    if total > cap:
        raise CapExceededError(
            f"{total} block permutations at level {k} exceed the cap {cap}"
        )
    blocks = _blocks_in_order(g, k)
    per_block = [itertools.permutations(b) for b in blocks]
    for choice in itertools.product(*per_block):
        mapping = {}
        for block, image in zip(blocks, choice):
            for a, b in zip(block, image):
                mapping[a] = b
        yield BlockPermutation(g, k, mapping)


# -- cycle notation --------------------------------------------------------------


def parse_cycles(g: Graph, k: int, text: str) -> BlockPermutation:
    """Build a block permutation from cycle notation.

    Cycles multiply right to left (the rightmost cycle acts first) and any
    path not listed stays fixed.  Paths are edge names joined by dots; the
    dots may be dropped when every edge name is a single character.
    """
    require_no_sinks(g)
    s = text.strip()
    if s in ("", "id", "()"):
        return BlockPermutation.identity(g, k)
    if s.count("(") != s.count(")"):
        raise InputParseError(f"unbalanced parentheses in {text!r}")
    cycles: list[list[Path]] = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch.isspace():
            i += 1
            continue
        if ch != "(":
            raise InputParseError(f"expected '(' at position {i} in {text!r}")
        j = s.index(")", i)
        body = s[i + 1 : j].replace(",", " ")
        tokens = body.split()
        if len(tokens) < 2:
            raise InputParseError(f"cycle {s[i:j+1]!r} needs at least two paths")
        paths = [g.parse_path_token(t, k) for t in tokens]
        if len(set(paths)) != len(paths):
            raise InputParseError(f"repeated path inside cycle {s[i:j+1]!r}")
        blocks = {(p.range, p.source) for p in paths}
        if len(blocks) != 1:
            raise InputParseError(
                f"cycle {s[i:j+1]!r} crosses blocks; range and source must be preserved"
            )
        cycles.append(paths)
        i = j + 1
    perm = BlockPermutation.identity(g, k)
    for paths in reversed(cycles):
        mapping = {p: p for p in g.paths(k)}
        for a, b in zip(paths, paths[1:] + paths[:1]):
            mapping[a] = b
        perm = BlockPermutation(g, k, mapping).after(perm)
    return perm


def cycles_str(p: BlockPermutation) -> str:
    """Canonical cycle notation: each cycle starts at its least path,
    cycles sorted by that path, fixed points dropped."""
    g = p.graph
    seen = set()
    cycles = []
    for start in g.paths(p.level):
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        cur = p(start)
        while cur != start:
            orbit.append(cur)
            seen.add(cur)
            cur = p(cur)
        if len(orbit) > 1:
            cycles.append(orbit)
    if not cycles:
        return "id"
    parts = []
    for orbit in cycles:
        parts.append("(" + " ".join(g.path_str(q) for q in orbit) + ")")
    return "".join(parts)


# -- star calculus -----------------------------------------------------------------


def permutation_from_element(x: AlgebraElement) -> BlockPermutation:
    """Read a block permutation off a 0/1 permutation-matrix element."""
    if not x.is_balanced:
        raise PreconditionError("permutative elements are balanced")
    mapping = {}
    for (mu, nu), c in x.coeffs.items():
        if c != ONE:
            raise PreconditionError("element has a coefficient other than 0/1")
        if nu in mapping:
            raise PreconditionError("element is not a permutation matrix")
        mapping[nu] = mu
    return BlockPermutation(x.graph, x.m, mapping)


def star_compose(u: BlockPermutation, w: BlockPermutation) -> BlockPermutation:
    """The block permutation whose endomorphism is (that of u) after (that of w).

    Its unitary is lambda_u(W) U at level k + l - 1; permutativity of the
    product is a closure fact, so a non-permutation result is asserted
    away as an internal error.
    """
    U = u.to_unitary()
    W = w.to_unitary()
    carrier = cocycle(U, w.level)
    z = carrier * W * carrier.adjoint() * U
    return permutation_from_element(z)


def shift_perm(q: BlockPermutation) -> BlockPermutation:
    """Permutation of the shifted unitary: the first edge rides in front."""
    g = q.graph
    mapping = {}
    for r in g.paths(q.level + 1):
        e = g.edge(r.edges[0])
        rest = g.subpath(r, 1, len(r.edges))
        mapping[r] = g.prepend(e, q(rest))
    return BlockPermutation(g, q.level + 1, mapping)


def _tables(g: Graph, level: int):
    """Split/join tables turning level transitions into integer lookups.

    For each path at the level: the first edge and the rank of the rest,
    the last edge and the rank of the prefix, plus the inverse joins.
    Cached on the graph; permutations become plain int arrays indexed by
    path rank, which keeps the inverse iteration affordable at the high
    levels it climbs to.
    """
    cache = getattr(g, "_perm_tables", None)
    if cache is None:
        cache = {}
        g._perm_tables = cache
    if level not in cache:
        n_prev = len(g.paths(level - 1))
        n_e = len(g.edges)
        fe, rr, le, pr = [], [], [], []
        join_first, join_last = {}, {}
        for i, p in enumerate(g.paths(level)):
            f = g.edge_index[p.edges[0]]
            l = g.edge_index[p.edges[-1]]
            r = g.path_rank(g.subpath(p, 1, len(p.edges)))
            q = g.path_rank(g.subpath(p, 0, len(p.edges) - 1))
            fe.append(f)
            rr.append(r)
            le.append(l)
            pr.append(q)
            join_first[f * n_prev + r] = i
            join_last[q * n_e + l] = i
        cache[level] = (fe, rr, le, pr, join_first, join_last, n_prev, n_e)
    return cache[level]


def _arr_inverse(arr: list) -> list:
    out = [0] * len(arr)
    for i, v in enumerate(arr):
        out[v] = i
    return out


def _arr_embed_once(g: Graph, arr: list, level: int) -> list:
    """Image one level up: the last edge rides along."""
    _, _, le, pr, _, join_last, _, n_e = _tables(g, level + 1)
    return [join_last[arr[pr[i]] * n_e + le[i]] for i in range(len(le))]


def _arr_shift(g: Graph, arr: list, level: int) -> list:
    """Permutation of the shifted unitary, one level up."""
    fe, rr, _, _, join_first, _, n_prev, _ = _tables(g, level + 1)
    return [join_first[fe[i] * n_prev + arr[rr[i]]] for i in range(len(fe))]


def _perm_to_array(p: BlockPermutation) -> list:
    return list(p._key[1])


def _array_to_perm(g: Graph, level: int, arr: list) -> BlockPermutation:
    paths = g.paths(level)
    return BlockPermutation(g, level, {paths[i]: paths[v] for i, v in enumerate(arr)})


def _inverse_iteration(p: BlockPermutation, cap: int):
    """Iterate w_m = Ad(u_m^*)(u^*) until two consecutive values agree and
    the exact inverse identity is confirmed; None when the cap runs out,
    which happens exactly for non-invertible inputs."""
    g = p.graph
    u = _perm_to_array(p)
    inv_emb = _arr_inverse(u)
    u_m = list(u)
    phi = list(u)
    level = p.level

    def w_of(um, inv_e):
        ium = _arr_inverse(um)
        return [ium[inv_e[x]] for x in um]

    w_prev = w_of(u_m, inv_emb)
    for _ in range(2, cap + 2):
        phi = _arr_shift(g, phi, level)
        u_m = _arr_embed_once(g, u_m, level)
        inv_emb = _arr_embed_once(g, inv_emb, level)
        level += 1
        u_m = [u_m[x] for x in phi]
        w_cur = w_of(u_m, inv_emb)
        w_prev = _arr_embed_once(g, w_prev, level - 1)
        if w_cur == w_prev and _confirm_inverse(p, w_cur, level):
            return _array_to_perm(g, level, w_cur)
        w_prev = w_cur
    return None


def _confirm_inverse(p: BlockPermutation, w: list, w_level: int) -> bool:
    """Exact check that the endomorphism of w undoes that of p: the
    carrier conjugate of w times the unitary of p is the identity."""
    g = p.graph
    u = _perm_to_array(p)
    u_j = list(u)
    phi = list(u)
    u_emb = list(u)
    level = p.level
    for _ in range(w_level - 1):
        phi = _arr_shift(g, phi, level)
        u_j = _arr_embed_once(g, u_j, level)
        u_emb = _arr_embed_once(g, u_emb, level)
        level += 1
        u_j = [u_j[x] for x in phi]
    w_emb = list(w)
    for lev in range(w_level, level):
        w_emb = _arr_embed_once(g, w_emb, lev)
    iuj = _arr_inverse(u_j)
    return all(u_j[w_emb[iuj[u_emb[i]]]] == i for i in range(len(u_emb)))


def reduce_level(p: BlockPermutation) -> BlockPermutation:
    """Smallest-level representative whose embedding gives back p."""
    cur = p
    while cur.level > 1:
        nxt = _reduce_once(cur)
        if nxt is None:
            break
        cur = nxt
    return cur


def _reduce_once(p: BlockPermutation):
    g = p.graph
    mapping = {}
    for alpha in g.paths(p.level - 1):
        image = None
        outs = g.out_edges(alpha.range)
        if not outs:
            return None
        for e in outs:
            full = p(g.extend(alpha, e))
            if full.edges[-1] != e.name:
                return None
            head = g.prefix(full, p.level - 1)
            if image is None:
                image = head
            elif image != head:
                return None
        mapping[alpha] = image
    return BlockPermutation(g, p.level - 1, mapping)


def order_up_to(
    p: BlockPermutation, cap: int, max_paths: int = 100_000
) -> int | None:
    """Least n <= cap whose star power reduces to the identity, else None.

    Star powers climb one level per factor, so the admissible path count
    at the working level is bounded by ``max_paths``; crossing the budget
    raises rather than thrashing memory.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    g = p.graph
    base = reduce_level(p)
    if base.is_identity:
        return 1
    power = base
    for n in range(2, cap + 1):
        next_level = power.level + base.level - 1
        if g.path_count(next_level) > max_paths:
            raise CapExceededError(
                f"star power {n} would act on more than {max_paths} paths"
            )
        power = reduce_level(star_compose(power, base))
        if power.is_identity:
            return n
    return None


def invert(p: BlockPermutation) -> BlockPermutation:
    """Inverse of an invertible permutative endomorphism.

    Iterates w_m = Ad(u_m^*)(u^*) until two consecutive values agree and
    the exact inverse identity holds; for an invertible input this
    stabilizes no later than dim + 2 where dim is the linear dimension one
    level below, so running past the cap means the invertibility
    preconditions were never checked by the caller.
    """
    cap = core_dimension(p.graph, p.level - 1) + 2
    w = _inverse_iteration(p, cap)
    if w is None:
        raise CapExceededError(
            "inverse iteration did not stabilize; the input is not an"
            " invertible endomorphism (check the classification first)"
        )
    return reduce_level(w)
