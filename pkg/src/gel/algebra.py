"""Exact arithmetic in the span of words S_mu S_nu^*.

An element lives at a fixed bidegree (m, n): a finitely supported linear
combination of words S_mu S_nu^* with |mu| = m, |nu| = n and matching word
ranges.  Products and comparisons embed operands to a common level using
the defining relation S_mu S_nu^* = sum over e emitted by the common range
of S_{mu e} S_{nu e}^*, so the same algebra element can be handled at any
sufficiently high level.

Key maps implemented here:

* the shift ``phi(x) = sum_e S_e x S_e^*``
* the cocycle powers ``u_k = u phi(u) ... phi^{k-1}(u)``
* the unitary-induced endomorphism ``lambda_u`` acting by
  ``S_mu S_nu^* -> u_{|mu|} S_mu S_nu^* u_{|nu|}^*``
* inner conjugation ``Ad(u) = lambda_{u phi(u^*)}``
"""

from __future__ import annotations

import json

from .errors import GradeMismatchError, InputParseError, PreconditionError
from .graphs import Graph, Path
from .scalars import ONE, ZERO, Scalar, format_scalar, parse_scalar


class AlgebraElement:
    __slots__ = ("graph", "m", "n", "coeffs")

    def __init__(self, graph: Graph, m: int, n: int, coeffs=None):
        if m < 0 or n < 0:
            raise ValueError("bidegree must be nonnegative")
        clean: dict[tuple[Path, Path], Scalar] = {}
        for (mu, nu), c in (coeffs or {}).items():
            if c.is_zero:
                continue
            if len(mu) != m or len(nu) != n:
                raise ValueError(f"word ({mu!r},{nu!r}) has wrong bidegree for ({m},{n})")
            if mu.range != nu.range:
                raise ValueError(
                    f"word S_{graph.path_str(mu)} S_{graph.path_str(nu)}^* is zero: ranges differ"
                )
            clean[(mu, nu)] = c
        self.graph = graph
        self.m = m
        self.n = n
        self.coeffs = clean

    @classmethod
    def _make(cls, graph: Graph, m: int, n: int, coeffs) -> "AlgebraElement":
        # fast path for internally produced, already valid coefficient maps
        el = cls.__new__(cls)
        el.graph = graph
        el.m = m
        el.n = n
        el.coeffs = coeffs
        return el

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, graph: Graph, m: int = 0, n: int = 0) -> "AlgebraElement":
        return cls(graph, m, n, {})

    @classmethod
    def word(cls, graph: Graph, mu: Path, nu: Path, c: Scalar = ONE) -> "AlgebraElement":
        return cls(graph, len(mu), len(nu), {(mu, nu): c})

    @classmethod
    def vertex_projection(cls, graph: Graph, v: str) -> "AlgebraElement":
        p = graph.vertex_path(v)
        return cls.word(graph, p, p)

    @classmethod
    def identity(cls, graph: Graph) -> "AlgebraElement":
        coeffs = {}
        for v in graph.vertices:
            p = graph.vertex_path(v)
            coeffs[(p, p)] = ONE
        return cls(graph, 0, 0, coeffs)

    @classmethod
    def path_isometry(cls, graph: Graph, p: Path) -> "AlgebraElement":
        """S_mu, at bidegree (|mu|, 0)."""
        return cls.word(graph, p, graph.vertex_path(p.range))

    @classmethod
    def edge_isometry(cls, graph: Graph, name: str) -> "AlgebraElement":
        e = graph.edge(name)
        return cls.path_isometry(graph, Path((e.name,), e.source, e.range))

    @classmethod
    def range_projection(cls, graph: Graph, p: Path) -> "AlgebraElement":
        """P_mu = S_mu S_mu^*."""
        return cls.word(graph, p, p)

    # -- structure ----------------------------------------------------------

    @property
    def grade(self) -> int:
        return self.m - self.n

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_balanced(self) -> bool:
        return self.m == self.n

    def _check_graph(self, other: "AlgebraElement") -> None:
        if self.graph is not other.graph and self.graph.digest != other.graph.digest:
            raise ValueError("elements live over different graphs")

    # -- linear operations ----------------------------------------------------

    def scale(self, c: Scalar) -> "AlgebraElement":
        if c.is_zero:
            return AlgebraElement._make(self.graph, self.m, self.n, {})
        return AlgebraElement._make(
            self.graph, self.m, self.n, {k: c * v for k, v in self.coeffs.items()}
        )

    def __neg__(self) -> "AlgebraElement":
        return self.scale(Scalar(-1))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_graph(other)
        if self.grade != other.grade:
            raise GradeMismatchError("cannot add elements of different gauge grade")
        m = max(self.m, other.m)
        n = m - self.grade
        x = self.embed(m, n)
        y = other.embed(m, n)
        out = dict(x.coeffs)
        for k, c in y.coeffs.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s.is_zero:
                out.pop(k, None)
            else:
                out[k] = s
        return AlgebraElement._make(self.graph, m, n, out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    # -- multiplicative structure ---------------------------------------------

    def embed(self, m: int, n: int) -> "AlgebraElement":
        """Rewrite at bidegree (m, n); both sides grow by the same amount."""
        dm = m - self.m
        if dm != n - self.n or dm < 0:
            raise GradeMismatchError(
                f"cannot embed bidegree ({self.m},{self.n}) into ({m},{n})"
            )
        g = self.graph
        coeffs = self.coeffs
        for _ in range(dm):
            nxt: dict[tuple[Path, Path], Scalar] = {}
            for (mu, nu), c in coeffs.items():
                # extensions of distinct words stay distinct, so plain stores
                for e in g.out_edges(mu.range):
                    nxt[(g.extend(mu, e), g.extend(nu, e))] = c
            coeffs = nxt
        return AlgebraElement._make(g, m, n, coeffs)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_graph(other)
        inner = max(self.n, other.m)
        x = self.embed(self.m + inner - self.n, inner)
        y = other.embed(inner, other.n + inner - other.m)
        by_mu: dict[Path, list] = {}
        for (mu, nu), c in y.coeffs.items():
            by_mu.setdefault(mu, []).append((nu, c))
        out: dict[tuple[Path, Path], Scalar] = {}
        for (mu, nu), c in x.coeffs.items():
            hits = by_mu.get(nu)
            if hits is None:
                continue
            for beta, d in hits:
                key = (mu, beta)
                s = out.get(key)
                cd = c * d
                s = cd if s is None else s + cd
                if s.is_zero:
                    out.pop(key, None)
                else:
                    out[key] = s
        return AlgebraElement._make(self.graph, x.m, y.n, out)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement._make(
            self.graph,
            self.n,
            self.m,
            {(nu, mu): c.conjugate() for (mu, nu), c in self.coeffs.items()},
        )

    def shift(self) -> "AlgebraElement":
        """phi(x) = sum_e S_e x S_e^*; words with mismatched sources die."""
        g = self.graph
        out: dict[tuple[Path, Path], Scalar] = {}
        for (mu, nu), c in self.coeffs.items():
            if mu.source != nu.source:
                continue
            for e in g.in_edges(mu.source):
                out[(g.prepend(e, mu), g.prepend(e, nu))] = c
        return AlgebraElement._make(g, self.m + 1, self.n + 1, out)

    # -- comparisons ------------------------------------------------------------

    def equals(self, other: "AlgebraElement") -> bool:
        """Exact equality after embedding to a common bidegree.

        Comparing different gauge grades is a caller bug, not inequality,
        and raises.
        """
        self._check_graph(other)
        if self.grade != other.grade:
            raise GradeMismatchError("cannot compare elements of different gauge grade")
        m = max(self.m, other.m)
        n = m - self.grade
        return self.embed(m, n).coeffs == other.embed(m, n).coeffs

    # -- predicates ---------------------------------------------------------------

    def commutes_with_vertex_projections(self) -> bool:
        """True iff no coefficient sits off the source diagonal."""
        if self.m != self.n:
            raise GradeMismatchError("commutant membership only checked at balanced bidegree")
        return all(mu.source == nu.source for (mu, nu) in self.coeffs)

    def is_diagonal(self) -> bool:
        return all(mu == nu for (mu, nu) in self.coeffs)

    def is_unitary(self) -> bool:
        if self.m != self.n:
            return False
        ident = AlgebraElement.identity(self.graph)
        return (self * self.adjoint()).equals(ident) and (
            self.adjoint() * self
        ).equals(ident)

    def __repr__(self) -> str:
        return f"AlgebraElement({self.m},{self.n}; {format_element(self)})"


def core_dimension(g: Graph, k: int) -> int:
    """Linear dimension of the span of balanced level-k words."""
    by_range: dict[str, int] = {v: 0 for v in g.vertices}
    for p in g.paths(k):
        by_range[p.range] += 1
    return sum(c * c for c in by_range.values())


def cocycle(u: AlgebraElement, r: int) -> AlgebraElement:
    """u_r = u phi(u) ... phi^{r-1}(u) for u balanced in the commutant."""
    if r < 1:
        raise ValueError("cocycle power needs r >= 1")
    if not u.is_balanced:
        raise PreconditionError("cocycle needs a balanced element")
    if not u.commutes_with_vertex_projections():
        raise PreconditionError("cocycle needs u in the commutant of the vertex projections")
    acc = u
    cur = u
    for _ in range(r - 1):
        cur = cur.shift()
        acc = acc * cur
    return acc


def _check_endomorphism_unitary(u: AlgebraElement) -> None:
    if not u.is_balanced or not u.commutes_with_vertex_projections():
        raise PreconditionError(
            "endomorphism unitaries must be balanced and commute with vertex projections"
        )
    if not u.is_unitary():
        raise PreconditionError("element is not unitary")


def lambda_apply(u: AlgebraElement, x: AlgebraElement, *, checked: bool = True) -> AlgebraElement:
    """Apply the endomorphism induced by u to x, term level by term level."""
    if checked:
        _check_endomorphism_unitary(u)
    left = cocycle(u, x.m) if x.m >= 1 else AlgebraElement.identity(u.graph)
    right = cocycle(u, x.n) if x.n >= 1 else AlgebraElement.identity(u.graph)
    return left * x * right.adjoint()


def ad_apply(u: AlgebraElement, x: AlgebraElement, *, checked: bool = True) -> AlgebraElement:
    """u x u^*; equal to lambda applied for the unitary u phi(u^*)."""
    if checked:
        _check_endomorphism_unitary(u)
    return u * x * u.adjoint()


# -- formatting ---------------------------------------------------------------


def _word_str(g: Graph, mu: Path, nu: Path) -> str:
    if not mu.edges and not nu.edges:
        return f"P_{mu.source}"
    parts = [f"S_{e}" for e in mu.edges]
    parts += [f"S_{e}*" for e in reversed(nu.edges)]
    return ".".join(parts)


def format_element(x: AlgebraElement) -> str:
    if x.is_zero:
        return "0"
    g = x.graph
    items = sorted(
        x.coeffs.items(),
        key=lambda kv: (g.path_rank(kv[0][0]), g.path_rank(kv[0][1])),
    )
    pieces = []
    for (mu, nu), c in items:
        body = _word_str(g, mu, nu)
        if c == ONE:
            pieces.append(body)
        elif c == Scalar(-1):
            pieces.append(f"-{body}")
        else:
            pieces.append(f"({format_scalar(c)}){body}")
    return " + ".join(pieces)


# -- localized-unitary JSON interface ------------------------------------------


def unitary_from_json(g: Graph, text: str) -> AlgebraElement:
    """Read a localized unitary from its JSON block-matrix description.

    The document carries ``level`` and a list of ``blocks``; each block
    names a range and source vertex and gives a square matrix over the
    block's paths in path order, entries as exact scalar strings.  Blocks
    not listed default to the identity.  The result is checked to be
    unitary and to commute with the vertex projections.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputParseError(f"bad unitary JSON: {exc}") from None
    if not isinstance(doc, dict) or "level" not in doc:
        raise InputParseError("unitary JSON needs a top-level 'level' field")
    k = doc["level"]
    if not isinstance(k, int) or k < 1:
        raise InputParseError("'level' must be a positive integer")
    seen = set()
    coeffs: dict[tuple[Path, Path], Scalar] = {}
    for blk in doc.get("blocks", []):
        try:
            v, w, matrix = blk["range"], blk["source"], blk["matrix"]
        except (TypeError, KeyError):
            raise InputParseError("each block needs 'range', 'source' and 'matrix'") from None
        paths = g.block(v, w, k)
        if (v, w) in seen:
            raise InputParseError(f"duplicate block ({v}, {w})")
        seen.add((v, w))
        if len(matrix) != len(paths) or any(len(row) != len(paths) for row in matrix):
            raise InputParseError(
                f"block ({v}, {w}) needs a {len(paths)}x{len(paths)} matrix"
            )
        for i, row in enumerate(matrix):
            for j, entry in enumerate(row):
                c = parse_scalar(str(entry))
                if not c.is_zero:
                    coeffs[(paths[i], paths[j])] = c
    for v in g.vertices:
        for w in g.vertices:
            if (v, w) in seen:
                continue
            for p in g.block(v, w, k):
                coeffs[(p, p)] = ONE
    u = AlgebraElement(g, k, k, coeffs)
    if not u.commutes_with_vertex_projections():
        raise PreconditionError("matrix does not commute with the vertex projections")
    if not u.is_unitary():
        raise PreconditionError("matrix is not unitary")
    return u


def unitary_to_json(u: AlgebraElement) -> str:
    g = u.graph
    k = u.m
    blocks = []
    for v in g.vertices:
        for w in g.vertices:
            paths = g.block(v, w, k)
            if not paths:
                continue
            mat = [
                [format_scalar(u.coeffs.get((pi, pj), ZERO)) for pj in paths]
                for pi in paths
            ]
            blocks.append({"range": v, "source": w, "matrix": mat})
    return json.dumps({"level": k, "blocks": blocks}, indent=2)
