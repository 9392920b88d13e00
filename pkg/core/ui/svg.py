"""Static SVG figure of a solved run.

Every layer is a ``<g>`` group; output only depends on the run, so equal runs
render byte-identical files.
"""

import colorsys
import logging
from typing import TYPE_CHECKING

import numpy as np

from core.geometry.obstacle import DiskObstacle, PolygonObstacle

if TYPE_CHECKING:
    from core.runner import PipelineResult

logger = logging.getLogger(__name__)

WIDTH = 800
MARGIN = 20
MAX_G_EDGES = 5000
GOLDEN = 0.618033988749895


def class_color(k: int) -> str:
    r, g, b = colorsys.hsv_to_rgb((k * GOLDEN) % 1.0, 0.65, 0.85)
    return f'#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}'


class Frame:
    """World to page coordinates; y grows upwards in the world and downwards on the page."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        span = np.maximum(hi - lo, 1e-9)
        self.lo = lo
        self.scale = (WIDTH - 2 * MARGIN) / float(span.max())
        self.height = int(np.ceil(span[1] * self.scale)) + 2 * MARGIN
        self.hi_y = float(hi[1])

    def xy(self, p) -> tuple[float, float]:
        return (
            MARGIN + (float(p[0]) - float(self.lo[0])) * self.scale,
            MARGIN + (self.hi_y - float(p[1])) * self.scale,
        )

    def points(self, pts) -> str:
        return ' '.join(f'{x:.3f},{y:.3f}' for x, y in (self.xy(p) for p in pts))


def _frame(result: 'PipelineResult') -> Frame:
    obstacle = result.obstacle
    pts = np.vstack([result.mu.atoms, result.nu.atoms])
    lo = np.minimum(pts.min(axis=0), obstacle.center - obstacle.radius_bound)
    hi = np.maximum(pts.max(axis=0), obstacle.center + obstacle.radius_bound)
    pad = 0.05 * float((hi - lo).max())
    return Frame(lo - pad, hi + pad)


def _obstacle(result: 'PipelineResult', frame: Frame) -> list[str]:
    match result.obstacle:
        case DiskObstacle(center_point=c, radius=r):
            x, y = frame.xy((c.x, c.y))
            return [
                f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r * frame.scale:.3f}" '
                'fill="#bbbbbb" stroke="#555555"/>'
            ]
        case PolygonObstacle(vertices=vs):
            pts = frame.points([(v.x, v.y) for v in vs])
            return [f'<polygon points="{pts}" fill="#bbbbbb" stroke="#555555"/>']
    return []


def _atoms(result: 'PipelineResult', frame: Frame) -> list[str]:
    out = []
    for pts, color in ((result.mu.atoms, '#1f5fbf'), (result.nu.atoms, '#c8372d')):
        for p in pts:
            x, y = frame.xy(p)
            out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2.5" fill="{color}"/>')
    return out


def _polyline(path, frame: Frame, stroke: str, width: float = 1.0) -> str:
    return (
        f'<polyline points="{frame.points(path.sample())}" fill="none" '
        f'stroke="{stroke}" stroke-width="{width}"/>'
    )


def _geodesics(result: 'PipelineResult', frame: Frame) -> list[str]:
    return [
        _polyline(path, frame, '#777777', 0.6)
        for path in result.nodes.paths
        if path.total_length > 0
    ]


def _g_edges(result: 'PipelineResult', frame: Frame) -> list[str]:
    edges = result.relation.edges()
    if len(edges) > MAX_G_EDGES:
        logger.info('drawing %d of %d G edges', MAX_G_EDGES, len(edges))
        edges = edges[:MAX_G_EDGES]
    pts = result.nodes.points
    out = []
    for u, v in edges:
        (x1, y1), (x2, y2) = frame.xy(pts[u]), frame.xy(pts[v])
        out.append(
            f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
            'stroke="#2a9d8f" stroke-width="0.3" stroke-opacity="0.4"/>'
        )
    return out


def _classes(result: 'PipelineResult', frame: Frame) -> list[str]:
    out = []
    for k, cls in enumerate(result.classes):
        color = class_color(k)
        out.extend(_polyline(result.nodes.paths[g], frame, color, 1.5) for g in cls.geodesics)
    return out


def _map(result: 'PipelineResult', frame: Frame) -> list[str]:
    out = []
    for i, j in enumerate(result.monge.assignment):
        src, tgt = result.mu.atoms[i], result.nu.atoms[j]
        if np.array_equal(src, tgt):
            continue
        (x1, y1), (x2, y2) = frame.xy(src), frame.xy(tgt)
        out.append(
            f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
            'stroke="#222222" stroke-width="0.8" marker-end="url(#arrow)"/>'
        )
    return out


LAYER_DRAWERS = {
    'obstacle': _obstacle,
    'atoms': _atoms,
    'geodesics': _geodesics,
    'g-edges': _g_edges,
    'classes': _classes,
    'map': _map,
}
# drawing order, bottom to top
LAYER_ORDER = ('obstacle', 'g-edges', 'geodesics', 'classes', 'map', 'atoms')


def render_svg(result: 'PipelineResult', layers) -> str:
    frame = _frame(result)
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{frame.height}" viewBox="0 0 {WIDTH} {frame.height}">',
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" '
        'markerWidth="6" markerHeight="6" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="#222222"/></marker></defs>',
    ]
    wanted = set(layers)
    for name in LAYER_ORDER:
        if name not in wanted:
            continue
        lines.append(f'<g id="{name}">')
        lines.extend(LAYER_DRAWERS[name](result, frame))
        lines.append('</g>')
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'
