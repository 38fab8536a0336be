"""Synchronization test: does the endomorphism restrict to a diagonal
automorphism?

Every edge e induces a map on level-(k-1) paths: follow e into the
permutation and keep the leading k-1 edges of the image.  The family of
these maps is a deterministic automaton labelled by edges, and the
restriction of the endomorphism to the diagonal is an automorphism exactly
when all long enough label words are synchronizing, which in turn happens
exactly when the induced dynamics on ordered pairs of distinct same-source
paths has no cycle.  Both directions come with replayable witnesses.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .graphs import Graph, Path, require_analysis_hypotheses
from .permutations import BlockPermutation, cycles_str, reduce_level

Pair = tuple[Path, Path]


@dataclass(frozen=True)
class EdgeMaps:
    """For each edge e, the induced total map on level-(k-1) paths whose
    source is the range of e."""

    graph: Graph
    level: int
    maps: dict

    def domain(self, edge_name: str) -> tuple[Path, ...]:
        e = self.graph.edge(edge_name)
        return tuple(
            p for p in self.graph.paths(self.level - 1) if p.source == e.range
        )

    def table(self) -> dict:
        """String form {edge: {path: path}} for reports and fixtures."""
        g = self.graph
        return {
            e: {g.path_str(a): g.path_str(b) for a, b in m.items()}
            for e, m in self.maps.items()
        }


def edge_maps(p: BlockPermutation) -> EdgeMaps:
    g = p.graph
    k = p.level
    maps: dict[str, dict[Path, Path]] = {}
    for e in g.edges:
        table = {}
        for alpha in g.paths(k - 1):
            if alpha.source != e.range:
                continue
            image = p(g.prepend(e, alpha))
            table[alpha] = g.prefix(image, k - 1)
        maps[e.name] = table
    return EdgeMaps(g, k, maps)


@dataclass(frozen=True)
class DecisionCertificate:
    """Outcome of a cycle test together with a machine-checkable witness.

    A positive verdict carries a topological order of the pair graph and
    the word length m from which every composition collapses; a negative
    verdict carries one cycle, as the visited pairs plus the labels that
    realize each step.
    """

    verdict: bool
    sync_length: int | None = None
    topo_order: tuple = ()
    cycle_pairs: tuple = ()
    cycle_labels: tuple = ()
    pair_count: int = 0

    def to_dict(self, g: Graph) -> dict:
        def pair_strs(pairs):
            return [[g.path_str(a), g.path_str(b)] for a, b in pairs]

        out: dict = {"verdict": self.verdict, "pair_count": self.pair_count}
        if self.verdict:
            out["synchronization_length"] = self.sync_length
            out["topological_order"] = pair_strs(self.topo_order)
        else:
            out["cycle"] = {
                "pairs": pair_strs(self.cycle_pairs),
                "labels": [
                    list(l) if isinstance(l, tuple) else l for l in self.cycle_labels
                ],
            }
        return out


def _find_cycle(nodes, adj):
    """First cycle in DFS order, or None; adjacency lists are ordered, so
    the witness is deterministic.  Returns (pairs, labels)."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    for root in nodes:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(adj[root]))]
        trail = [root]
        labels = []
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            step = next(it, None)
            if step is None:
                stack.pop()
                trail.pop()
                if labels:
                    labels.pop()
                color[node] = BLACK
                continue
            label, nxt = step
            if color[nxt] == GREY:
                start = trail.index(nxt)
                return tuple(trail[start:]), tuple(labels[start:] + [label])
            if color[nxt] == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(adj[nxt])))
                trail.append(nxt)
                labels.append(label)
    return None


def _certify_dag(nodes, adj, pair_count) -> DecisionCertificate:
    indeg = {n: 0 for n in nodes}
    for n in nodes:
        for _, m in adj[n]:
            indeg[m] += 1
    queue = [n for n in nodes if indeg[n] == 0]
    topo = []
    while queue:
        n = queue.pop(0)
        topo.append(n)
        for _, m in adj[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    longest = {n: 0 for n in nodes}
    for n in reversed(topo):
        for _, m in adj[n]:
            longest[n] = max(longest[n], 1 + longest[m])
    depth = max(longest.values(), default=0)
    return DecisionCertificate(
        verdict=True,
        sync_length=depth + 1,
        topo_order=tuple(topo),
        pair_count=pair_count,
    )


def decide_synchronization(p: BlockPermutation) -> DecisionCertificate:
    """Acyclicity of the pair graph of the edge maps.

    The permutation is level-reduced first so that a higher-level copy of
    the same endomorphism always receives the same certificate.  At level 1
    the pair graph is empty (distinct vertices never share a source) and
    the verdict is trivially positive with synchronization length 1.
    """
    require_analysis_hypotheses(p.graph)
    p = reduce_level(p)
    g = p.graph
    fam = edge_maps(p)
    nodes: list[Pair] = []
    for alpha in g.paths(p.level - 1):
        for beta in g.paths(p.level - 1):
            if alpha != beta and alpha.source == beta.source:
                nodes.append((alpha, beta))
    adj: dict[Pair, list] = {n: [] for n in nodes}
    for alpha, beta in nodes:
        for e in g.edges:
            if e.range != alpha.source:
                continue
            fa = fam.maps[e.name][alpha]
            fb = fam.maps[e.name][beta]
            if fa != fb:
                adj[(alpha, beta)].append((e.name, (fa, fb)))
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


def replay_cycle(fam: EdgeMaps, pairs, labels) -> bool:
    """Check that applying the labelled maps walks the cycle back to its
    start; used to validate negative witnesses independently."""
    n = len(pairs)
    for i in range(n):
        a, b = pairs[i]
        e = labels[i]
        table = fam.maps[e]
        if a not in table or b not in table:
            return False
        if (table[a], table[b]) != pairs[(i + 1) % n]:
            return False
    return True


def brute_force_synchronization(p: BlockPermutation, max_m: int) -> bool:
    """Literal word test: some m <= max_m makes every length-m composition
    collapse to at most one value.

    Compositions along non-composable words have empty domains and pass
    vacuously, so only genuine label words (paths) are walked.
    """
    if max_m < 1:
        raise ValueError("max_m must be at least 1")
    p = reduce_level(p)
    g = p.graph
    fam = edge_maps(p)
    for m in range(1, max_m + 1):
        ok = True
        for word in g.paths(m):
            # rightmost edge acts first
            last = g.edge(word.edges[-1])
            alive = {
                q for q in g.paths(p.level - 1) if q.source == last.range
            }
            for name in reversed(word.edges):
                table = fam.maps[name]
                alive = {table[q] for q in alive}
            if len(alive) > 1:
                ok = False
                break
        if ok:
            return True
    return False


# -- diagram export -----------------------------------------------------------


def _rooted_tree_root(fam: EdgeMaps, edge_name: str):
    """For a loop edge, the unique fixed point when the map's functional
    graph is a rooted tree, else None."""
    g = fam.graph
    e = g.edge(edge_name)
    if e.source != e.range:
        return None
    table = fam.maps[edge_name]
    fixed = [a for a, b in table.items() if a == b]
    if len(fixed) != 1:
        return None
    root = fixed[0]
    for start in table:
        cur = start
        for _ in range(len(table) + 1):
            if cur == root:
                break
            cur = table[cur]
        else:
            return None
    return root


def edge_maps_dot(p: BlockPermutation) -> str:
    """DOT rendering of all edge maps; vertices are the level-(k-1) paths,
    arrows are labelled by the inducing edge, and the root of each
    rooted-tree loop-edge map is drawn with a double border."""
    g = p.graph
    fam = edge_maps(p)
    roots = {}
    for e in g.edges:
        r = _rooted_tree_root(fam, e.name)
        if r is not None:
            roots.setdefault(r, []).append(e.name)
    lines = ["digraph fmaps {", "  rankdir=LR;", '  node [shape=circle];']
    for q in g.paths(p.level - 1):
        name = g.path_str(q)
        if q in roots:
            tags = ",".join(roots[q])
            lines.append(
                f'  "{name}" [shape=doublecircle]; // root of the rooted-tree map for loop edge {tags}'
            )
        else:
            lines.append(f'  "{name}";')
    for e in g.edges:
        for a, b in fam.maps[e.name].items():
            lines.append(
                f'  "{g.path_str(a)}" -> "{g.path_str(b)}" [label="{e.name}"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_filename(graph_name: str, p: BlockPermutation) -> str:
    tag = hashlib.sha256(cycles_str(p).encode()).hexdigest()[:8]
    return f"{graph_name}_{p.level}_{tag}_fmaps.dot"
