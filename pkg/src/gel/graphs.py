"""Finite directed multigraphs, path enumeration and structural predicates.

Conventions: an edge is emitted by its source vertex and received by its
range vertex.  A path is a sequence of edges where the range of each edge
equals the source of the next; a length-0 path is a vertex.  Declaration
order in the graph file is the canonical order used by every enumeration
downstream, so reports and permutation indices are reproducible.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from math import gcd

from .errors import GraphParseError, ValidationError


@dataclass(frozen=True)
class Edge:
    name: str
    source: str
    range: str


class Path:
    """Composable edge sequence; ``edges`` empty means the vertex itself.

    Immutable by convention; the hash is precomputed because paths are
    used as dictionary keys throughout the word algebra.
    """

    __slots__ = ("edges", "source", "range", "_hash")

    def __init__(self, edges: tuple[str, ...], source: str, range: str):
        self.edges = edges
        self.source = source
        self.range = range
        self._hash = hash((edges, source))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Path)
            and self._hash == other._hash
            and self.edges == other.edges
            and self.source == other.source
        )

    def __getstate__(self):
        return (self.edges, self.source, self.range)

    def __setstate__(self, state):
        self.__init__(*state)

    def __len__(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        if not self.edges:
            return f"Path<{self.source}>"
        return f"Path<{'.'.join(self.edges)}>"


class Graph:
    """Immutable finite directed multigraph with named vertices and edges."""

    def __init__(self, vertices, edges):
        vs = tuple(vertices)
        if len(set(vs)) != len(vs):
            raise GraphParseError("duplicate vertex name")
        es = []
        names = set()
        for name, src, rng in edges:
            if name in names:
                raise GraphParseError(f"duplicate edge name {name!r}")
            names.add(name)
            if src not in vs:
                raise GraphParseError(f"edge {name!r}: unknown source vertex {src!r}")
            if rng not in vs:
                raise GraphParseError(f"edge {name!r}: unknown range vertex {rng!r}")
            es.append(Edge(name, src, rng))
        if names & set(vs):
            # shared names would make cycle notation and reports ambiguous
            raise GraphParseError("edge names must not repeat vertex names")
        self.vertices: tuple[str, ...] = vs
        self.edges: tuple[Edge, ...] = tuple(es)
        self.vertex_index = {v: i for i, v in enumerate(vs)}
        self.edge_index = {e.name: i for i, e in enumerate(self.edges)}
        self._edge_by_name = {e.name: e for e in self.edges}
        self._out = {v: tuple(e for e in self.edges if e.source == v) for v in vs}
        self._in = {v: tuple(e for e in self.edges if e.range == v) for v in vs}
        self._paths: dict[int, tuple[Path, ...]] = {}
        self._ranks: dict[int, dict[Path, int]] = {}
        self._report = None

    # -- basic queries -----------------------------------------------------

    def edge(self, name: str) -> Edge:
        try:
            return self._edge_by_name[name]
        except KeyError:
            raise GraphParseError(f"unknown edge {name!r}") from None

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out[v]

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        return self._in[v]

    @property
    def single_char_edge_names(self) -> bool:
        return all(len(e.name) == 1 for e in self.edges)

    @property
    def digest(self) -> str:
        canon = "\n".join(
            [f"vertex {v}" for v in self.vertices]
            + [f"edge {e.name} {e.source} {e.range}" for e in self.edges]
        )
        return hashlib.sha256(canon.encode()).hexdigest()

    # -- path construction -------------------------------------------------

    def vertex_path(self, v: str) -> Path:
        if v not in self.vertex_index:
            raise GraphParseError(f"unknown vertex {v!r}")
        return Path((), v, v)

    def make_path(self, edge_names) -> Path:
        names = tuple(edge_names)
        if not names:
            raise ValueError("make_path needs at least one edge; use vertex_path")
        es = [self.edge(n) for n in names]
        for a, b in zip(es, es[1:]):
            if a.range != b.source:
                raise GraphParseError(
                    f"edges {a.name!r} and {b.name!r} do not compose"
                )
        return Path(names, es[0].source, es[-1].range)

    def extend(self, p: Path, e: Edge) -> Path:
        # internal fast path, assumes e.source == p.range
        return Path(p.edges + (e.name,), p.source, e.range)

    def prepend(self, e: Edge, p: Path) -> Path:
        # assumes e.range == p.source
        return Path((e.name,) + p.edges, e.source, p.range)

    def concat(self, p: Path, q: Path) -> Path:
        if p.range != q.source:
            raise ValueError("paths do not compose")
        if not p.edges:
            return q
        if not q.edges:
            return p
        return Path(p.edges + q.edges, p.source, q.range)

    def prefix(self, p: Path, length: int) -> Path:
        return self.subpath(p, 0, length)

    def subpath(self, p: Path, start: int, stop: int) -> Path:
        """Slice of an already valid path; skips composability rechecks."""
        edges = p.edges[start:stop]
        if not edges:
            if start < len(p.edges):
                return self.vertex_path(self._edge_by_name[p.edges[start]].source)
            return self.vertex_path(p.range)
        return Path(
            edges,
            self._edge_by_name[edges[0]].source,
            self._edge_by_name[edges[-1]].range,
        )

    # -- enumeration -------------------------------------------------------

    def paths(self, k: int) -> tuple[Path, ...]:
        """All length-k paths, lexicographic in edge declaration order."""
        if k < 0:
            raise ValueError("path length must be nonnegative")
        if k not in self._paths:
            if k == 0:
                out = tuple(self.vertex_path(v) for v in self.vertices)
            elif k == 1:
                out = tuple(Path((e.name,), e.source, e.range) for e in self.edges)
            else:
                prev = self.paths(k - 1)
                out = tuple(
                    Path((e.name,) + p.edges, e.source, p.range)
                    for e in self.edges
                    for p in prev
                    if p.source == e.range
                )
            self._paths[k] = out
            self._ranks[k] = {p: i for i, p in enumerate(out)}
        return self._paths[k]

    def path_rank(self, p: Path) -> int:
        self.paths(len(p))
        return self._ranks[len(p)][p]

    def path_count(self, k: int) -> int:
        """Number of length-k paths, computed without materializing them."""
        counts = {v: 1 for v in self.vertices}  # paths of length 0 by source
        for _ in range(k):
            nxt = {v: 0 for v in self.vertices}
            for e in self.edges:
                nxt[e.source] += counts[e.range]
            counts = nxt
        return sum(counts.values())

    def block(self, v: str, w: str, k: int) -> tuple[Path, ...]:
        """Length-k paths with range v and source w, in path order."""
        for x in (v, w):
            if x not in self.vertex_index:
                raise GraphParseError(f"unknown vertex {x!r}")
        if k < 1:
            raise ValueError("blocks are defined for k >= 1")
        return tuple(p for p in self.paths(k) if p.range == v and p.source == w)

    def adjacency(self) -> list[list[int]]:
        """A[v][w] = number of edges with source v and range w."""
        n = len(self.vertices)
        mat = [[0] * n for _ in range(n)]
        for e in self.edges:
            mat[self.vertex_index[e.source]][self.vertex_index[e.range]] += 1
        return mat

    def path_str(self, p: Path) -> str:
        if not p.edges:
            return p.source
        if self.single_char_edge_names:
            return "".join(p.edges)
        return ".".join(p.edges)

    def parse_path_token(self, token: str, k: int) -> Path:
        """Parse a path literal of length k (dotted, or condensed when all
        edge names are single characters)."""
        if k == 0:
            return self.vertex_path(token)
        if "." in token:
            names = token.split(".")
        elif token in self.edge_index and k == 1:
            names = [token]
        elif self.single_char_edge_names:
            names = list(token)
        else:
            names = [token]
        if len(names) != k:
            raise GraphParseError(f"path {token!r} does not have length {k}")
        return self.make_path(names)


# -- parsing ---------------------------------------------------------------


def parse_graph(text: str) -> Graph:
    """Parse the line-based graph file format.

    ``#`` starts a comment, ``vertex NAME`` declares a vertex and
    ``edge NAME SRC RNG`` declares an edge emitted by SRC and received by
    RNG.  Names are nonempty and contain no whitespace.
    """
    vertices: list[str] = []
    edges: list[tuple[str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "vertex":
            if len(parts) != 2:
                raise GraphParseError("vertex line needs exactly one name", lineno)
            if parts[1] in vertices:
                raise GraphParseError(f"duplicate vertex {parts[1]!r}", lineno)
            vertices.append(parts[1])
        elif kind == "edge":
            if len(parts) != 4:
                raise GraphParseError("edge line needs NAME SRC RNG", lineno)
            name, src, rng = parts[1:]
            if any(name == n for n, _, _ in edges):
                raise GraphParseError(f"duplicate edge {name!r}", lineno)
            if src not in vertices:
                raise GraphParseError(f"unknown source vertex {src!r}", lineno)
            if rng not in vertices:
                raise GraphParseError(f"unknown range vertex {rng!r}", lineno)
            edges.append((name, src, rng))
        else:
            raise GraphParseError(f"unknown directive {kind!r}", lineno)
    return Graph(vertices, edges)


# -- structural predicates ---------------------------------------------------


@dataclass(frozen=True)
class StructuralReport:
    no_sinks: bool
    no_sources: bool
    every_loop_has_exit: bool
    strongly_connected: bool
    period: int | None
    indecomposable: bool
    hypotheses: dict

    def to_dict(self) -> dict:
        return {
            "no_sinks": self.no_sinks,
            "no_sources": self.no_sources,
            "every_loop_has_exit": self.every_loop_has_exit,
            "strongly_connected": self.strongly_connected,
            "period": self.period,
            "indecomposable": self.indecomposable,
            "hypotheses": dict(self.hypotheses),
        }


def _strongly_connected_components(g: Graph) -> list[list[str]]:
    """Tarjan, iterative so deep graphs cannot blow the recursion limit."""
    index = {}
    low = {}
    on_stack = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = itertools.count()
    for root in g.vertices:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                index[v] = low[v] = next(counter)
                stack.append(v)
                on_stack.add(v)
            advanced = False
            outs = g.out_edges(v)
            while ei < len(outs):
                w = outs[ei].range
                ei += 1
                if w not in index:
                    work[-1] = (v, ei)
                    work.append((w, 0))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return sccs


def _period(g: Graph) -> int | None:
    """gcd of all closed-path lengths, or None when the graph is acyclic."""
    overall = 0
    for comp in _strongly_connected_components(g):
        comp_set = set(comp)
        internal = [
            e for e in g.edges if e.source in comp_set and e.range in comp_set
        ]
        if not internal:
            continue
        root = comp[0]
        level = {root: 0}
        queue = [root]
        while queue:
            v = queue.pop(0)
            for e in g.out_edges(v):
                if e.range in comp_set and e.range not in level:
                    level[e.range] = level[v] + 1
                    queue.append(e.range)
        p = 0
        for e in internal:
            p = gcd(p, level[e.source] + 1 - level[e.range])
        overall = gcd(overall, abs(p))
    return overall if overall else None


def _reachable(g: Graph, start: str) -> set[str]:
    seen = {start}
    queue = [start]
    while queue:
        v = queue.pop()
        for e in g.out_edges(v):
            if e.range not in seen:
                seen.add(e.range)
                queue.append(e.range)
    return seen


def _loop_vertices(g: Graph) -> set[str]:
    """Vertices lying on some closed path of positive length."""
    out = set()
    for comp in _strongly_connected_components(g):
        if len(comp) > 1:
            out.update(comp)
        else:
            v = comp[0]
            if any(e.range == v for e in g.out_edges(v)):
                out.add(v)
    return out


def _hereditary_saturated_subsets(g: Graph) -> list[frozenset]:
    """All nonempty hereditary and saturated vertex subsets.

    Exponential in the vertex count; the tool targets desk-scale graphs
    (around a dozen vertices), where 2^|E^0| is perfectly affordable.
    """
    result = []
    verts = g.vertices
    for bits in range(1, 1 << len(verts)):
        sub = frozenset(v for i, v in enumerate(verts) if bits >> i & 1)
        hereditary = all(
            e.range in sub for v in sub for e in g.out_edges(v)
        )
        if not hereditary:
            continue
        saturated = True
        for v in verts:
            if v in sub:
                continue
            outs = g.out_edges(v)
            if outs and all(e.range in sub for e in outs):
                saturated = False
                break
        if saturated:
            result.append(sub)
    return result


def _indecomposable(g: Graph) -> bool:
    """No witness pair of disjoint hereditary saturated sets exists such
    that every vertex outside the pair avoids loops and reaches both."""
    subsets = _hereditary_saturated_subsets(g)
    loops = _loop_vertices(g)
    reach = {v: _reachable(g, v) for v in g.vertices}
    for x, y in itertools.combinations(subsets, 2):
        if x & y:
            continue
        outside = [v for v in g.vertices if v not in x and v not in y]
        ok = True
        for v in outside:
            if v in loops or not (reach[v] & x) or not (reach[v] & y):
                ok = False
                break
        if ok:
            return False
    return True


def validate(g: Graph) -> StructuralReport:
    """Compute every structural flag; failures are reported, never raised."""
    if g._report is not None:
        return g._report
    no_sinks = all(g.out_edges(v) for v in g.vertices)
    no_sources = all(g.in_edges(v) for v in g.vertices)

    # a loop without exit is exactly a cycle inside the out-degree-1 subgraph
    every_loop_has_exit = True
    succ = {
        v: g.out_edges(v)[0].range for v in g.vertices if len(g.out_edges(v)) == 1
    }
    for start in succ:
        slow = start
        seen = set()
        while slow in succ and slow not in seen:
            seen.add(slow)
            slow = succ[slow]
        if slow in seen:
            every_loop_has_exit = False
            break

    sccs = _strongly_connected_components(g)
    strongly_connected = len(sccs) == 1
    period = _period(g)
    indecomposable = _indecomposable(g)

    af_center_trivial = strongly_connected and period == 1
    hypotheses = {
        "diagonal_is_masa": no_sinks and every_loop_has_exit,
        "endomorphism_calculus": no_sinks,
        "combinatorial_invertibility_tests": no_sinks and every_loop_has_exit,
        "af_core_center_trivial": af_center_trivial,
        "outerness_evidence": (
            no_sinks and no_sources and every_loop_has_exit and af_center_trivial
        ),
    }
    report = StructuralReport(
        no_sinks=no_sinks,
        no_sources=no_sources,
        every_loop_has_exit=every_loop_has_exit,
        strongly_connected=strongly_connected,
        period=period,
        indecomposable=indecomposable,
        hypotheses=hypotheses,
    )
    g._report = report
    return report


def require_no_sinks(g: Graph) -> None:
    if not validate(g).no_sinks:
        raise ValidationError("graph has a sink; endomorphism analysis needs none")


def require_analysis_hypotheses(g: Graph) -> None:
    rep = validate(g)
    if not rep.no_sinks:
        raise ValidationError("graph has a sink; endomorphism analysis needs none")
    if not rep.every_loop_has_exit:
        raise ValidationError("some loop has no exit; the diagonal tests need one")


# -- graph automorphisms -----------------------------------------------------


class GraphAut:
    """A pair of vertex and edge permutations preserving source and range."""

    def __init__(self, graph: Graph, vertex_map: dict, edge_map: dict):
        self.graph = graph
        self.vertex_map = dict(vertex_map)
        self.edge_map = dict(edge_map)
        if sorted(self.vertex_map) != sorted(self.vertex_map.values()) or set(
            self.vertex_map
        ) != set(graph.vertices):
            raise ValueError("vertex map is not a permutation of the vertices")
        if set(self.edge_map) != set(graph.edge_index) or set(
            self.edge_map.values()
        ) != set(graph.edge_index):
            raise ValueError("edge map is not a permutation of the edges")
        for e in graph.edges:
            img = graph.edge(self.edge_map[e.name])
            if img.source != self.vertex_map[e.source] or img.range != self.vertex_map[e.range]:
                raise ValueError("maps are not source/range equivariant")
        self._key = (
            tuple(self.vertex_map[v] for v in graph.vertices),
            tuple(self.edge_map[e.name] for e in graph.edges),
        )

    @classmethod
    def identity(cls, graph: Graph) -> "GraphAut":
        return cls(graph, {v: v for v in graph.vertices}, {e.name: e.name for e in graph.edges})

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, GraphAut) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"GraphAut{self._key}"

    @property
    def is_identity(self) -> bool:
        return all(v == w for v, w in self.vertex_map.items()) and all(
            e == f for e, f in self.edge_map.items()
        )

    @property
    def fixes_all_vertices(self) -> bool:
        return all(v == w for v, w in self.vertex_map.items())

    def apply_path(self, p: Path) -> Path:
        if not p.edges:
            return self.graph.vertex_path(self.vertex_map[p.source])
        return self.graph.make_path(tuple(self.edge_map[e] for e in p.edges))

    def compose(self, other: "GraphAut") -> "GraphAut":
        """self after other."""
        return GraphAut(
            self.graph,
            {v: self.vertex_map[other.vertex_map[v]] for v in self.graph.vertices},
            {e: self.edge_map[other.edge_map[e]] for e in self.graph.edge_index},
        )

    def inverse(self) -> "GraphAut":
        return GraphAut(
            self.graph,
            {w: v for v, w in self.vertex_map.items()},
            {f: e for e, f in self.edge_map.items()},
        )


def graph_automorphisms(g: Graph) -> tuple[GraphAut, ...]:
    """All source/range equivariant (vertex, edge) permutation pairs.

    Backtracks over vertex images with degree pruning, then multiplies out
    the independent bijections between parallel-edge classes.
    """
    verts = g.vertices
    profile = {
        v: (
            len(g.out_edges(v)),
            len(g.in_edges(v)),
            sum(1 for e in g.out_edges(v) if e.range == v),
        )
        for v in verts
    }
    # parallel-edge classes keyed by endpoint pair
    classes: dict[tuple[str, str], list[str]] = {}
    for e in g.edges:
        classes.setdefault((e.source, e.range), []).append(e.name)

    results = []

    def classes_match(vmap):
        for (s, r), names in classes.items():
            if len(classes.get((vmap[s], vmap[r]), ())) != len(names):
                return False
        return True

    def backtrack(i, vmap, used):
        if i == len(verts):
            if not classes_match(vmap):
                return
            per_class = []
            keys = sorted(classes, key=lambda sr: (g.vertex_index[sr[0]], g.vertex_index[sr[1]]))
            for s, r in keys:
                src = classes[(s, r)]
                dst = classes[(vmap[s], vmap[r])]
                per_class.append([(src, perm) for perm in itertools.permutations(dst)])
            for choice in itertools.product(*per_class):
                emap = {}
                for src, perm in choice:
                    for name, img in zip(src, perm):
                        emap[name] = img
                results.append(GraphAut(g, dict(vmap), emap))
            return
        v = verts[i]
        for w in verts:
            if w in used or profile[v] != profile[w]:
                continue
            vmap[v] = w
            used.add(w)
            backtrack(i + 1, vmap, used)
            used.discard(w)
            del vmap[v]

    backtrack(0, {}, set())
    results.sort(key=lambda a: a.key)
    return tuple(results)
