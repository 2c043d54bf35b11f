"""SVG pictures of surfaces with segment, point and cylinder overlays.

Faces are placed by the first non-overlapping choice among builder offsets,
native coordinates and a development along a spanning tree of the gluing
graph.  When all of these overlap, the faces are drawn side by side in a row.
Edge pairs that are not drawn touching get matching letter labels.  Exact
coordinates become floats (rounded to 1e-3 px) for display only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .cylinders import Decomposition
from .holonomy import face_offsets
from .surface import VERTEX, Surface, SurfacePoint
from .tracer import Segment

PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3",
    "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd",
)
LINE_COLORS = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666")
WIDTH = 480.0
MARGIN = 24.0
EPS = 1e-9


@dataclass
class Overlays:
    segments: Sequence[Segment] = ()
    points: Sequence[SurfacePoint] = ()
    decomposition: Decomposition | None = None
    face_colors: dict[int, str] = field(default_factory=dict)


def _float_faces(surface: Surface, offsets) -> list[list[tuple[float, float]]]:
    return [[(v + offsets[f]).to_float() for v in face] for f, face in enumerate(surface.faces)]


def _separated(a, b) -> bool:
    """Whether two convex polygons have disjoint interiors (separating axis test)."""
    for poly in (a, b):
        n = len(poly)
        for i in range(n):
            x0, y0 = poly[i]
            x1, y1 = poly[(i + 1) % n]
            nx, ny = y0 - y1, x1 - x0
            pa = [nx * x + ny * y for x, y in a]
            pb = [nx * x + ny * y for x, y in b]
            if max(pa) <= min(pb) + EPS or max(pb) <= min(pa) + EPS:
                return True
    return False


def _overlapping(faces) -> bool:
    return any(
        not _separated(faces[i], faces[j]) for i in range(len(faces)) for j in range(i + 1, len(faces))
    )


def layout(surface: Surface) -> tuple[list[list[tuple[float, float]]], bool]:
    """Planar face positions and whether a glued (non side-by-side) layout was found.

    Tried in order: the cover offsets recorded by a builder, the face
    coordinates as given, the development along a spanning tree.
    """
    zero = surface.faces[0][0] - surface.faces[0][0]
    candidates = []
    if surface.cover is not None:
        candidates.append(list(surface.cover.offsets))
    candidates.append([zero] * len(surface.faces))
    candidates.append(face_offsets(surface)[0])
    for offsets in candidates:
        faces = _float_faces(surface, offsets)
        if not _overlapping(faces):
            return faces, True
    row = []
    cursor = 0.0
    for f, face in enumerate(surface.faces):
        pts = [v.to_float() for v in face]
        x0 = min(p[0] for p in pts)
        y0 = min(p[1] for p in pts)
        row.append([(x - x0 + cursor, y - y0) for x, y in pts])
        cursor += max(p[0] for p in pts) - x0 + 0.25 * max(1e-6, max(p[1] for p in pts) - y0)
    return row, False


def _num(v: float) -> str:
    r = round(v, 3)
    return repr(r + 0.0)


class _Canvas:
    def __init__(self, placed: list[list[tuple[float, float]]]):
        xs = [x for face in placed for x, _ in face]
        ys = [y for face in placed for _, y in face]
        self.x0, self.y1 = min(xs), max(ys)
        span = max(max(xs) - self.x0, max(ys) - min(ys), 1e-9)
        self.scale = WIDTH / span
        self.width = (max(xs) - self.x0) * self.scale + 2 * MARGIN
        self.height = (self.y1 - min(ys)) * self.scale + 2 * MARGIN

    def xy(self, p: tuple[float, float]) -> str:
        x = (p[0] - self.x0) * self.scale + MARGIN
        y = (self.y1 - p[1]) * self.scale + MARGIN
        return f"{_num(x)},{_num(y)}"

    def pair(self, p: tuple[float, float]) -> tuple[str, str]:
        a, b = self.xy(p).split(",")
        return a, b


def _placement(surface: Surface, placed) -> list[tuple[float, float]]:
    """Translation taking face coordinates to layout coordinates, per face."""
    out = []
    for f, face in enumerate(surface.faces):
        fx, fy = face[0].to_float()
        px, py = placed[f][0]
        out.append((px - fx, py - fy))
    return out


def _local(shift, v) -> tuple[float, float]:
    x, y = v.to_float()
    return x + shift[0], y + shift[1]


def _edge_labels(surface: Surface, placed) -> list[tuple[tuple[float, float], str]]:
    labels = []
    name = 0
    for e, p in surface.canonical_gluings():
        (f, i), (g, j) = e, p
        nf, ng = len(placed[f]), len(placed[g])
        a0, a1 = placed[f][i], placed[f][(i + 1) % nf]
        b0, b1 = placed[g][j], placed[g][(j + 1) % ng]
        if max(abs(a0[0] - b1[0]), abs(a0[1] - b1[1]), abs(a1[0] - b0[0]), abs(a1[1] - b0[1])) < EPS:
            continue  # drawn glued already
        tag = _label(name)
        name += 1
        for (u, w) in ((a0, a1), (b0, b1)):
            labels.append((((u[0] + w[0]) / 2, (u[1] + w[1]) / 2), tag))
    return labels


def _label(k: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    out = ""
    k += 1
    while k:
        k, r = divmod(k - 1, 26)
        out = letters[r] + out
    return out


def deck_colors(surface: Surface) -> dict[int, str]:
    """Colour faces by their orbit under the recorded deck permutation."""
    info = surface.cover.info if surface.cover is not None else {}
    perm = info.get("deck")
    if perm is None:
        return {}
    colors = {}
    orbit = 0
    for f in range(len(perm)):
        if f in colors:
            continue
        g = f
        while g not in colors:
            colors[g] = PALETTE[orbit % len(PALETTE)]
            g = perm[g]
        orbit += 1
    return colors


def _polyline(canvas, shift, piece_start, piece_end, color: str, width: float = 1.5) -> str:
    a = canvas.xy(_local(shift, piece_start))
    b = canvas.xy(_local(shift, piece_end))
    return f'<polyline points="{a} {b}" fill="none" stroke="{color}" stroke-width="{width}"/>'


def render_svg(surface: Surface, overlays: Overlays | None = None) -> str:
    """SVG 1.1 document text; deterministic for identical inputs."""
    ov = overlays or Overlays()
    placed, developed = layout(surface)
    canvas = _Canvas(placed)
    shifts = _placement(surface, placed)
    colors = ov.face_colors or deck_colors(surface)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(canvas.width)}" '
        f'height="{_num(canvas.height)}">',
        f"<title>{escape(surface.name or 'surface')}</title>",
        '<g class="faces">',
    ]
    for f, face in enumerate(placed):
        pts = " ".join(canvas.xy(p) for p in face)
        fill = colors.get(f, "#f4f4f4")
        out.append(f'<polygon class="face" data-face="{f}" points="{pts}" fill="{fill}" stroke="#333" stroke-width="1"/>')
    out.append("</g>")
    out.append('<g class="gluings" font-family="sans-serif" font-size="11" fill="#333">')
    for pos, tag in _edge_labels(surface, placed):
        x, y = canvas.pair(pos)
        out.append(f'<text x="{x}" y="{y}" text-anchor="middle">{tag}</text>')
    out.append("</g>")
    if ov.decomposition is not None and ov.decomposition.complete:
        out.append('<g class="cylinders">')
        for k, cyl in enumerate(ov.decomposition.cylinders):
            color = LINE_COLORS[k % len(LINE_COLORS)]
            out.append(f'<g class="cylinder" data-index="{k}">')
            for seg in cyl.bottom:
                for piece in seg.pieces:
                    out.append(_polyline(canvas, shifts[piece.face], piece.start, piece.end, color, 3.0))
            out.append("</g>")
        out.append("</g>")
    if ov.segments:
        out.append('<g class="segments">')
        for k, seg in enumerate(ov.segments):
            color = LINE_COLORS[k % len(LINE_COLORS)]
            out.append(f'<g class="segment" data-index="{k}">')
            for piece in seg.pieces:
                out.append(_polyline(canvas, shifts[piece.face], piece.start, piece.end, color))
            out.append("</g>")
        out.append("</g>")
    out.append('<g class="singularities" fill="#000">')
    seen = set()
    for c in surface.singular_classes():
        for f, i in surface.classes[c]:
            x, y = canvas.pair(_local(shifts[f], surface.faces[f][i]))
            if (x, y) in seen:
                continue
            seen.add((x, y))
            out.append(f'<rect x="{_num(float(x) - 3.5)}" y="{_num(float(y) - 3.5)}" width="7" height="7"/>')
    out.append("</g>")
    if ov.points:
        out.append('<g class="points" fill="#c00" stroke="#fff">')
        for p in ov.points:
            if p.kind == VERTEX:
                f, i = surface.classes[p.vertex_class][0]
                pos = surface.faces[f][i]
            else:
                f, pos = p.face, p.pos
            x, y = canvas.pair(_local(shifts[f], pos))
            out.append(f'<circle cx="{x}" cy="{y}" r="4.5"/>')
        out.append("</g>")
    out.append(f"<desc>{'glued' if developed else 'side-by-side'} layout</desc>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, surface: Surface, overlays: Overlays | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(surface, overlays))


def count_elements(svg: str, tag: str, cls: str | None = None) -> int:
    """Number of ``<tag ...>`` elements, optionally restricted to one class attribute."""
    needle = f"<{tag} "
    if cls is None:
        return svg.count(needle)
    return svg.count(f'{needle}class="{cls}"')


def points_overlay(points: Iterable[SurfacePoint]) -> Overlays:
    return Overlays(points=tuple(points))
