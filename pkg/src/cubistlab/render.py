"""Planar drawings of Cubist sets.

Points are projected onto the hyperplane sum(x) = 0 and then placed in the
drawing plane.  In rank 3 every facet is a rhombus with unit edges and the
facets tile the plane; in rank 2 they are unit segments on a line.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Iterable, Mapping, Sequence

from .cubist import Box, CubistSet, Point, facet_points

__all__ = ["project", "facet_polygon", "tiling_polygons", "svg_tiling", "svg_filename", "MARKERS"]

_S3 = math.sqrt(3.0) / 2.0
_DIRECTIONS = {
    2: ((1.0, 0.0), (-1.0, 0.0)),
    3: ((0.0, 1.0), (-_S3, -0.5), (_S3, -0.5)),
}

MARKERS = {"pyramid": "square", "flippable": "ring"}
_DEFAULT_MARKER = "disc"
_PALETTE = {"square": "#222222", "disc": "#1f5fa8", "ring": "#c0392b"}


def project(x: Sequence[int], r: int | None = None) -> tuple[float, float]:
    """Drawing-plane position of a lattice point.

    Rank 3: e_1, e_2, e_3 go to unit vectors at 90, 210 and 330 degrees.
    Rank 2: e_1 and e_2 go to (1, 0) and (-1, 0).  Both maps kill (1, ..., 1),
    so they factor through the projection onto the zero-sum hyperplane.
    """
    rank = len(x) if r is None else r
    if rank not in _DIRECTIONS or len(x) != rank:
        raise ValueError(f"rendering supports ranks 2 and 3, got {rank}")
    px = sum(c * d[0] for c, d in zip(x, _DIRECTIONS[rank]))
    py = sum(c * d[1] for c, d in zip(x, _DIRECTIONS[rank]))
    return (px, py)


def facet_polygon(s: CubistSet, x: Point) -> list[Point]:
    """Corners of the facet attached to x, in boundary order."""
    pts = facet_points(s.facet_of(x))
    if s.rank == 3:
        return [pts[0], pts[2], pts[3], pts[1]]
    return pts


def tiling_polygons(s: CubistSet, window: Box) -> list[tuple[Point, list[tuple[float, float]]]]:
    """(vertex, projected polygon) for every vertex of X in the window."""
    if s.rank not in _DIRECTIONS:
        raise ValueError(f"rendering supports ranks 2 and 3, got {s.rank}")
    return [(x, [project(c) for c in facet_polygon(s, x)]) for x in s.points_in_window(window)]


def _fmt(v: float) -> str:
    out = "%.4f" % v
    return "0.0000" if out == "-0.0000" else out


def _marker(kind: str, cx: float, cy: float) -> str:
    colour = _PALETTE[kind]
    if kind == "square":
        h = 0.09
        return (
            f'<rect class="marker-square" x="{_fmt(cx - h)}" y="{_fmt(cy - h)}" '
            f'width="{_fmt(2 * h)}" height="{_fmt(2 * h)}" fill="{colour}"/>'
        )
    if kind == "ring":
        return (
            f'<circle class="marker-ring" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="0.1400" '
            f'fill="none" stroke="{colour}" stroke-width="0.0400"/>'
        )
    return f'<circle class="marker-disc" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="0.0800" fill="{colour}"/>'


def svg_tiling(
    s: CubistSet,
    window: Box,
    highlights: Mapping[str, Iterable[Sequence[int]]] | None = None,
) -> str:
    """An SVG 1.1 document with one polygon per facet attached to a window vertex.

    Highlight classes named ``pyramid`` and ``flippable`` are drawn as squares
    and rings; any other class is drawn as discs.  Output is byte-identical for
    identical input.
    """
    polys = tiling_polygons(s, window)
    marks: list[tuple[str, str, tuple[float, float]]] = []
    for name in sorted(highlights or {}):
        kind = MARKERS.get(name, _DEFAULT_MARKER)
        for p in sorted(tuple(v) for v in (highlights or {})[name]):
            marks.append((name, kind, project(p, s.rank)))
    coords = [c for _, poly in polys for c in poly] + [m[2] for m in marks]
    if coords:
        xs = [c[0] for c in coords]
        ys = [-c[1] for c in coords]
        x0, y0 = min(xs) - 0.5, min(ys) - 0.5
        w, h = max(xs) - min(xs) + 1.0, max(ys) - min(ys) + 1.0
    else:
        x0 = y0 = 0.0
        w = h = 1.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}" '
        f'width="{_fmt(w * 40)}" height="{_fmt(h * 40)}">',
        '<g class="facets" fill="#f4efe1" stroke="#555555" stroke-width="0.0300">',
    ]
    for x, poly in polys:
        pts = " ".join(f"{_fmt(px)},{_fmt(-py)}" for px, py in poly)
        tag = "polygon" if s.rank == 3 else "polyline"
        lines.append(f'<{tag} data-vertex="{",".join(map(str, x))}" points="{pts}"/>')
    lines.append("</g>")
    if marks:
        lines.append('<g class="highlights">')
        for name, kind, (px, py) in marks:
            lines.append(_marker(kind, px, -py).replace("/>", f' data-class="{name}"/>'))
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def svg_filename(s: CubistSet, window: Box) -> str:
    """<first 12 hex digits of the set's canonical JSON hash>-<window label>.svg"""
    canon = json.dumps(s.to_json(), sort_keys=True, separators=(",", ":"))
    return f"{hashlib.sha256(canon.encode()).hexdigest()[:12]}-{window.label()}.svg"
