"""Command line front end.

Exit codes: 0 success, 2 validation failure (also argparse usage errors),
3 parse error, 4 cap exceeded, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .algebra import AlgebraElement, format_element, lambda_apply, unitary_from_json
from .annihilation import classify_detail
from .errors import GelError
from .graphs import graph_automorphisms, parse_graph, validate
from .ktheory import k_groups, smith_normal_form
from .localized import (
    decide_diagonal_invertible,
    decide_invertible,
    normalizes_diagonal,
    ring_nilpotent,
    stabilize_inverse,
)
from .permutations import (
    ENUMERATION_CAP,
    cycles_str,
    enumerate_unitaries,
    invert,
    order_up_to,
    parse_cycles,
    reduce_level,
    star_compose,
    unitary_count,
)
from .report import render_report, run_sweep, write_dot_files
from .synchronization import dot_filename, edge_maps_dot


def _load_graph(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def _graph_name(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _parse_word(g, token: str):
    if token in g.vertex_index:
        return g.vertex_path(token)
    if "." in token:
        names = token.split(".")
    elif token in g.edge_index:
        names = [token]
    elif g.single_char_edge_names:
        names = list(token)
    else:
        names = [token]
    return g.make_path(names)


def cmd_validate(args) -> int:
    g = _load_graph(args.graph)
    rep = validate(g)
    print(f"vertices: {len(g.vertices)}  edges: {len(g.edges)}")
    for key, val in rep.to_dict().items():
        if key == "hypotheses":
            continue
        print(f"{key}: {val}")
    print("hypotheses:")
    for key, val in rep.hypotheses.items():
        print(f"  {key}: {val}")
    if not (rep.no_sinks and rep.every_loop_has_exit):
        return 2
    return 0


def cmd_paths(args) -> int:
    g = _load_graph(args.graph)
    ps = g.paths(args.level)
    print(f"{len(ps)} paths of length {args.level}")
    for p in ps:
        print(g.path_str(p))
    return 0


def cmd_enumerate(args) -> int:
    g = _load_graph(args.graph)
    count = unitary_count(g, args.level)
    print(f"count: {count}")
    limit = args.limit if args.limit is not None else 100
    for i, p in enumerate(enumerate_unitaries(g, args.level, args.cap)):
        if i >= limit:
            print(f"... ({count - limit} more)")
            break
        print(cycles_str(p))
    return 0


def cmd_classify(args) -> int:
    g = _load_graph(args.graph)
    report = run_sweep(
        g,
        args.level,
        workers=args.workers,
        enum_cap=args.cap,
        order_cap=args.order_cap,
        test_depth=args.test_depth,
        extras=not args.no_extras,
    )
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(render_report(report, "json") + "\n")
    if args.dot:
        write_dot_files(g, _graph_name(args.graph), args.level, args.dot)
    print(render_report(report, args.format), end="")
    return 0


def cmd_check(args) -> int:
    g = _load_graph(args.graph)
    p = parse_cycles(g, args.level, args.perm)
    cls, cert_b, cert_d = classify_detail(p)
    out = {
        "cycles": cycles_str(p),
        "reduced_cycles": cycles_str(reduce_level(p)),
        "reduced_level": reduce_level(p).level,
        "diagonal_certificate": cert_b.to_dict(g),
        "offdiagonal_certificate": cert_d.to_dict(g),
        "classification": str(cls),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_invert(args) -> int:
    g = _load_graph(args.graph)
    p = parse_cycles(g, args.level, args.perm)
    from .annihilation import Classification, classify

    if classify(p) is not Classification.AUTOMORPHISM:
        print("not an automorphism; no inverse", file=sys.stderr)
        return 1
    q = invert(p)
    print(f"inverse: {cycles_str(q)} (level {q.level})")
    return 0


def cmd_order(args) -> int:
    g = _load_graph(args.graph)
    p = parse_cycles(g, args.level, args.perm)
    n = order_up_to(p, args.cap, max_paths=args.max_paths)
    if n is None:
        print(f"order > {args.cap}")
    else:
        print(f"order: {n}")
    return 0


def cmd_apply(args) -> int:
    g = _load_graph(args.graph)
    p = parse_cycles(g, args.level, args.perm)
    word = _parse_word(g, args.word)
    x = AlgebraElement.path_isometry(g, word)
    print(format_element(lambda_apply(p.to_unitary(), x)))
    return 0


def cmd_compose(args) -> int:
    g = _load_graph(args.graph)
    perms = [parse_cycles(g, args.level, text) for text in args.perm]
    if not perms:
        print("nothing to compose", file=sys.stderr)
        return 1
    acc = perms[0]
    for q in perms[1:]:
        acc = star_compose(acc, q)
    red = reduce_level(acc)
    print(f"product: {cycles_str(acc)} (level {acc.level})")
    print(f"reduced: {cycles_str(red)} (level {red.level})")
    return 0


def cmd_autos(args) -> int:
    g = _load_graph(args.graph)
    auts = graph_automorphisms(g)
    print(f"{len(auts)} graph automorphisms")
    for a in auts:
        vparts = _cycles_of_mapping(a.vertex_map)
        eparts = _cycles_of_mapping(a.edge_map)
        print(f"vertices {vparts} | edges {eparts}")
    return 0


def _cycles_of_mapping(mapping: dict) -> str:
    seen = set()
    parts = []
    for start in mapping:
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        cur = mapping[start]
        while cur != start:
            orbit.append(cur)
            seen.add(cur)
            cur = mapping[cur]
        if len(orbit) > 1:
            parts.append("(" + " ".join(orbit) + ")")
    return "".join(parts) if parts else "id"


def cmd_ktheory(args) -> int:
    g = _load_graph(args.graph)
    adj = g.adjacency()
    n = len(g.vertices)
    M = [[(1 if i == j else 0) - adj[j][i] for j in range(n)] for i in range(n)]
    snf = smith_normal_form(M)
    k0, k1 = k_groups(g)
    print(f"K0 = {k0}")
    print(f"K1 = {k1}")
    print(f"invariant factors: {list(snf.diag)}")
    return 0


def cmd_localized(args) -> int:
    g = _load_graph(args.graph)
    with open(args.unitary, encoding="utf-8") as fh:
        u = unitary_from_json(g, fh.read())
    invertible, dims = decide_invertible(u)
    nilpotent = ring_nilpotent(u)
    out = {
        "level": u.m,
        "invertible_with_localized_inverse": invertible,
        "chain_dimensions": dims,
        "quotient_ring_nilpotent": nilpotent,
    }
    if normalizes_diagonal(u):
        d_ok, d_dims = decide_diagonal_invertible(u)
        out["diagonal_restriction_automorphism"] = d_ok
        out["diagonal_chain_dimensions"] = d_dims
    else:
        out["diagonal_restriction_automorphism"] = None
        out["note"] = "unitary does not normalize the diagonal; no diagonal verdict"
    w = stabilize_inverse(u)
    out["inverse_found"] = w is not None
    if w is not None:
        out["inverse_level"] = w.m
        out["inverse"] = format_element(w)
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_diagram(args) -> int:
    g = _load_graph(args.graph)
    p = parse_cycles(g, args.level, args.perm)
    text = edge_maps_dot(p)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        name = dot_filename(_graph_name(args.graph), p)
        with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
            fh.write(text)
        print(name)
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gel",
        description="invertibility analysis of permutative and localized"
        " endomorphisms of graph C*-algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("graph", help="graph file")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "structural report for a graph file")

    sp = add("paths", cmd_paths, "list paths at a level")
    sp.add_argument("-k", "--level", type=int, required=True)

    sp = add("enumerate", cmd_enumerate, "list block permutations at a level")
    sp.add_argument("-k", "--level", type=int, required=True)
    sp.add_argument("--cap", type=int, default=ENUMERATION_CAP)
    sp.add_argument("--limit", type=int, default=None)

    sp = add("classify", cmd_classify, "classify every unitary at a level")
    sp.add_argument("-k", "--level", type=int, required=True)
    sp.add_argument("--json", help="write the JSON report here")
    sp.add_argument("--dot", help="write edge-map diagrams into this directory")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--cap", type=int, default=ENUMERATION_CAP)
    sp.add_argument("--order-cap", type=int, default=64)
    sp.add_argument("--test-depth", type=int, default=4)
    sp.add_argument("--no-extras", action="store_true", help="skip inverse/order/shift data")
    sp.add_argument("--format", choices=("table", "json"), default="table")

    sp = add("check", cmd_check, "certificates for one permutation")
    sp.add_argument("-k", "--level", type=int, required=True)
    sp.add_argument("--perm", required=True, help="cycle notation")

    sp = add("invert", cmd_invert, "inverse of an invertible permutation")
    sp.add_argument("-k", "--level", type=int, required=True)
    sp.add_argument("--perm", required=True)

    sp = add("order", cmd_order, "order of a permutation under composition")
    sp.add_argument("-k", "--level", type=int, required=True)
    sp.add_argument("--perm", required=True)
    sp.add_argument("--cap", type=int, default=64)
    sp.add_argument("--max-paths", type=int, default=100_000)

    sp = add("apply", cmd_apply, "apply the endomorphism to a word S_mu")
    sp.add_argument("-k", "--level", type=int, required=True)
    sp.add_argument("--perm", required=True)
    sp.add_argument("--word", required=True, help="path literal")

    sp = add("compose", cmd_compose, "star product of permutations, left to right")
    sp.add_argument("-k", "--level", type=int, required=True)
    sp.add_argument("--perm", action="append", required=True)

    add("autos", cmd_autos, "graph automorphism group")

    add("ktheory", cmd_ktheory, "K-groups from the adjacency matrix")

    sp = add("localized", cmd_localized, "analyze a localized unitary from JSON")
    sp.add_argument("--unitary", required=True, help="JSON block-matrix file")

    sp = add("diagram", cmd_diagram, "edge-map diagram in DOT form")
    sp.add_argument("-k", "--level", type=int, required=True)
    sp.add_argument("--perm", required=True)
    sp.add_argument("--out", help="directory for the .dot file")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
