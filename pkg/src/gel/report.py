"""Classification sweeps, deterministic reports and diagram files.

A sweep enumerates every block permutation at a level, classifies each
one and assembles a JSON-ready report.  Reports are byte-stable for fixed
inputs and engine version: volatile fields (timestamp, wall clock) live
under ``meta`` and are excluded from the content digest.  Workers only
parallelize across independent permutations and aggregation preserves the
enumeration order, so the parallel sweep is record-for-record identical
to the serial one.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import multiprocessing
import os
import time

from . import __version__
from .annihilation import Classification, classify_detail
from .errors import CapExceededError
from .graphs import Graph, parse_graph, validate
from .permutations import (
    ENUMERATION_CAP,
    BlockPermutation,
    cycles_str,
    enumerate_unitaries,
    invert,
    order_up_to,
    unitary_count,
)
from .synchronization import dot_filename, edge_maps_dot
from .weyl import find_inner_witness, shift_commutation_degree

SCHEMA_VERSION = 1


def build_record(
    rank: int,
    p: BlockPermutation,
    *,
    order_cap: int = 64,
    test_depth: int = 4,
    inner_level: int = 3,
    extras: bool = True,
) -> dict:
    cls, cert_b, cert_d = classify_detail(p)
    g = p.graph
    record = {
        "rank": rank,
        "cycles": cycles_str(p),
        "level": p.level,
        "classification": str(cls),
        "diagonal_certificate": cert_b.to_dict(g),
        "offdiagonal_certificate": cert_d.to_dict(g),
        "inverse": None,
        "order": None,
        "shift_commutation": None,
        "inner_search": None,
    }
    if extras and cls is Classification.AUTOMORPHISM:
        record["inverse"] = cycles_str(invert(p))
        try:
            order = order_up_to(p, order_cap)
        except CapExceededError:
            record["order_note"] = "level budget exceeded"
        else:
            if order is None:
                record["order_note"] = f"exceeds cap {order_cap}"
            else:
                record["order"] = order
        record["shift_commutation"] = {
            "degree": shift_commutation_degree(p, test_depth),
            "test_depth": test_depth,
        }
        witness = find_inner_witness(p, inner_level)
        # a missing witness is evidence of outerness, a theorem only when
        # the structural hypotheses hold; both facts ride along
        record["inner_search"] = {
            "max_level": inner_level,
            "witness": cycles_str(witness) if witness is not None else None,
            "outerness_hypotheses_hold": validate(g).hypotheses[
                "outerness_evidence"
            ],
        }
    return record


_WORKER: dict = {}


def _init_worker(graph_text: str, level: int, opts: dict) -> None:
    _WORKER["graph"] = parse_graph(graph_text)
    _WORKER["level"] = level
    _WORKER["opts"] = opts


def _run_worker(item) -> dict:
    rank, image_ranks = item
    g = _WORKER["graph"]
    paths = g.paths(_WORKER["level"])
    mapping = {paths[i]: paths[r] for i, r in enumerate(image_ranks)}
    p = BlockPermutation(g, _WORKER["level"], mapping)
    return build_record(rank, p, **_WORKER["opts"])


def summary_line(total: int, counts: dict, automorphism_names) -> str:
    parts = []
    a = counts.get("automorphism", 0)
    if a:
        word = "automorphism" if a == 1 else "automorphisms"
        piece = f"{a} {word}"
        if 2 <= a <= 8:
            piece += " (" + ", ".join(automorphism_names) + ")"
        parts.append(piece)
    d = counts.get("diagonal_automorphism_only", 0)
    if d:
        parts.append(f"{d} diagonal-automorphism-only")
    p = counts.get("proper", 0)
    if p:
        parts.append(f"{p} proper")
    body = ", ".join(parts) if parts else "none"
    return f"{total} unitaries: {body}"


def run_sweep(
    g: Graph,
    level: int,
    *,
    workers: int = 1,
    enum_cap: int = ENUMERATION_CAP,
    order_cap: int = 64,
    test_depth: int = 4,
    extras: bool = True,
) -> dict:
    started = time.perf_counter()
    opts = {"order_cap": order_cap, "test_depth": test_depth, "extras": extras}
    total = unitary_count(g, level)
    perms = enumerate_unitaries(g, level, enum_cap)
    if workers > 1:
        items = [(i, p._key[1]) for i, p in enumerate(perms)]
        with multiprocessing.Pool(
            workers, initializer=_init_worker, initargs=(canonical_text(g), level, opts)
        ) as pool:
            records = pool.map(_run_worker, items)
    else:
        records = [build_record(i, p, **opts) for i, p in enumerate(perms)]
    counts: dict[str, int] = {}
    aut_names = []
    for rec in records:
        counts[rec["classification"]] = counts.get(rec["classification"], 0) + 1
        if rec["classification"] == "automorphism":
            aut_names.append(rec["cycles"])
    report = {
        "schema_version": SCHEMA_VERSION,
        "engine_version": __version__,
        "graph": {
            "digest": g.digest,
            "vertices": len(g.vertices),
            "edges": len(g.edges),
        },
        "level": level,
        "unitary_count": total,
        "records": records,
        "summary": {
            "unitaries": total,
            "automorphism": counts.get("automorphism", 0),
            "diagonal_automorphism_only": counts.get("diagonal_automorphism_only", 0),
            "proper": counts.get("proper", 0),
        },
        "summary_line": summary_line(total, counts, aut_names),
    }
    report["digest"] = report_digest(report)
    report["meta"] = {
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "wall_clock_seconds": time.perf_counter() - started,
        "workers": workers,
    }
    return report


def canonical_text(g: Graph) -> str:
    return "\n".join(
        [f"vertex {v}" for v in g.vertices]
        + [f"edge {e.name} {e.source} {e.range}" for e in g.edges]
    )


def canonical_json(report: dict) -> str:
    """Deterministic byte form: the volatile meta block is dropped."""
    body = {k: v for k, v in report.items() if k != "meta"}
    return json.dumps(body, sort_keys=True, separators=(",", ":"))


def report_digest(report: dict) -> str:
    body = {k: v for k, v in report.items() if k not in ("meta", "digest")}
    return hashlib.sha256(
        json.dumps(body, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def render_report(report: dict, fmt: str = "table") -> str:
    """Human table or canonical JSON of the same records."""
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    if fmt != "table":
        raise ValueError(f"unknown report format {fmt!r}")
    headers = ["#", "cycles", "diagonal", "offdiagonal", "class", "order", "inverse"]
    rows = []
    for rec in report["records"]:
        order = rec.get("order")
        if order is None:
            order = rec.get("order_note", "")
        rows.append(
            [
                str(rec["rank"]),
                rec["cycles"],
                "pass" if rec["diagonal_certificate"]["verdict"] else "fail",
                "pass" if rec["offdiagonal_certificate"]["verdict"] else "fail",
                rec["classification"],
                str(order) if order is not None else "",
                rec["inverse"] or "",
            ]
        )
    widths = [
        max(len(headers[i]), max((len(r[i]) for r in rows), default=0))
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * widths[i] for i in range(len(headers))).rstrip(),
    ]
    for r in rows:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(headers))).rstrip())
    lines.append(report["summary_line"])
    return "\n".join(lines) + "\n"


def write_dot_files(g: Graph, graph_name: str, level: int, out_dir: str) -> list[str]:
    """One labelled edge-map diagram per permutation of the sweep."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for p in enumerate_unitaries(g, level):
        name = dot_filename(graph_name, p)
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(edge_maps_dot(p))
        written.append(name)
    return written
