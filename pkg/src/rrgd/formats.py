"""Graph readers, the drawing JSON document, and SVG export."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .model import BoundingBox, Drawing, Graph, GraphError

SCHEMA = "rrgd-drawing"
SCHEMA_VERSION = 1


class FormatError(ValueError):
    pass


def parse_edge_list(text: str) -> Graph:
    """Graph from ``u v`` lines; ``#`` starts a comment, blank lines are skipped.

    Vertices are ``0..max id``, so ids that never appear become isolated
    vertices.
    """
    edges = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise FormatError(f"line {lineno}: expected two non-negative integers, got {raw!r}")
        u, w = int(parts[0]), int(parts[1])
        if u == w:
            raise FormatError(f"line {lineno}: self-loop on vertex {u}")
        key = (min(u, w), max(u, w))
        if key in seen:
            raise FormatError(f"line {lineno}: duplicate edge {key} (first on line {seen[key]})")
        seen[key] = lineno
        edges.append((u, w))
    return Graph.from_edges(edges)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_graphml_subset(xml_text: str) -> Graph:
    """Undirected graph from the ``node``/``edge`` elements of a GraphML document.

    Keys, data and every other attribute are ignored. Node ids are mapped to
    ``0..n-1`` in document order; the original ids become ``Graph.labels``.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise FormatError(f"malformed GraphML: {exc}") from None
    graph_el = next((el for el in root.iter() if _local(el.tag) == "graph"), None)
    if graph_el is None:
        raise FormatError("no <graph> element")
    if graph_el.get("edgedefault", "undirected") == "directed":
        raise FormatError("directed graphs are not supported")
    index: dict[str, int] = {}
    labels: list[str] = []
    edges = []
    for el in graph_el:
        tag = _local(el.tag)
        if tag == "node":
            nid = el.get("id")
            if nid is None:
                raise FormatError("node without id")
            if nid in index:
                raise FormatError(f"duplicate node id {nid!r}")
            index[nid] = len(labels)
            labels.append(nid)
        elif tag == "edge":
            if el.get("directed") == "true":
                raise FormatError("directed edges are not supported")
            edges.append((el.get("source"), el.get("target")))
    mapped = []
    for s, t in edges:
        if s not in index or t not in index:
            raise FormatError(f"edge ({s}, {t}) references an undeclared node")
        mapped.append((index[s], index[t]))
    try:
        return Graph(len(labels), tuple(mapped), labels=tuple(labels))
    except GraphError as exc:
        raise FormatError(str(exc)) from None


def read_graph(path) -> Graph:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".graphml", ".xml"):
        return parse_graphml_subset(text)
    return parse_edge_list(text)


@dataclass
class DrawingDocument:
    drawing: Drawing
    metadata: dict[str, Any] = field(default_factory=dict)


def write_drawing(doc: DrawingDocument) -> str:
    d = doc.drawing
    g = d.graph
    nodes = []
    for v in range(g.vertex_count):
        rec = {"id": v, "x": float(d.positions[v, 0]), "y": float(d.positions[v, 1])}
        if g.labels is not None:
            rec["label"] = g.labels[v]
        nodes.append(rec)
    box = d.box
    payload = {
        "schema": SCHEMA,
        "version": SCHEMA_VERSION,
        "box": {"xmin": box.xmin, "ymin": box.ymin, "xmax": box.xmax, "ymax": box.ymax, "margin": box.margin},
        "nodes": nodes,
        "edges": [list(e) for e in g.edges],
        "metadata": doc.metadata,
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def read_drawing(text: str) -> DrawingDocument:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not JSON: {exc}") from None
    if payload.get("schema") != SCHEMA:
        raise FormatError("not a drawing document")
    if payload.get("version") != SCHEMA_VERSION:
        raise FormatError(f"unsupported version {payload.get('version')!r}")
    nodes = sorted(payload["nodes"], key=lambda r: r["id"])
    ids = [r["id"] for r in nodes]
    if ids != list(range(len(ids))):
        raise FormatError("node ids must be unique and cover 0..n-1")
    labels = None
    if nodes and all("label" in r for r in nodes):
        labels = tuple(r["label"] for r in nodes)
    try:
        graph = Graph(len(nodes), tuple(tuple(e) for e in payload["edges"]), labels=labels)
    except GraphError as exc:
        raise FormatError(str(exc)) from None
    b = payload["box"]
    box = BoundingBox(b["xmin"], b["ymin"], b["xmax"], b["ymax"], b["margin"])
    drawing = Drawing(graph, [(r["x"], r["y"]) for r in nodes], box)
    return DrawingDocument(drawing, payload.get("metadata", {}))


def write_svg(drawing: Drawing, vertex_radius: Optional[float] = None) -> str:
    """Straight-line SVG of ``drawing``; the viewport is the bounding box, y points up."""
    box = drawing.box
    diag = box.diagonal
    r = vertex_radius if vertex_radius is not None else 0.006 * diag
    stroke = 0.002 * diag
    flip = box.ymin + box.ymax
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{box.xmin!r} {box.ymin!r} {box.width!r} {box.height!r}">',
        f'<rect x="{box.xmin!r}" y="{box.ymin!r}" width="{box.width!r}" height="{box.height!r}" '
        f'fill="none" stroke="#bbbbbb" stroke-dasharray="{4 * stroke!r}" stroke-width="{stroke!r}"/>',
        f'<g transform="matrix(1 0 0 -1 0 {flip!r})">',
        f'<g stroke="#333333" stroke-width="{stroke!r}">',
    ]
    pos = drawing.positions.tolist()
    for u, w in drawing.graph.edges:
        (x1, y1), (x2, y2) = pos[u], pos[w]
        out.append(f'<line x1="{x1!r}" y1="{y1!r}" x2="{x2!r}" y2="{y2!r}"/>')
    out.append("</g>")
    out.append('<g fill="#1f77b4">')
    for x, y in pos:
        out.append(f'<circle cx="{x!r}" cy="{y!r}" r="{r!r}"/>')
    out.append("</g>")
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
