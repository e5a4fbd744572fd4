"""SVG figures of earthquakes (Poincare disc) and circle maps (flat torus) using drawsvg."""

import colorsys
import math
from pathlib import Path
from typing import List, Tuple, Union

import drawsvg as draw
import numpy as np

from .circlemap import PiecewiseMobiusCircleMap, evaluate_many
from .earthquake import inverse_earthquake
from .mobius import TWO_PI, RP1Point, boundary_angle, boundary_angles, ccw_length
from .models import EarthquakeMap, Stratum

DIAMETER_EPS = 1e-9
STROKE = "#1f2933"


class DiscCanvas:
    """Screen geometry of the disc model: angle 0 on the right, counterclockwise upwards"""

    def __init__(self, size: int = 600, margin: int = 20):
        self.size = size
        self.centre = size / 2.0
        self.radius = size / 2.0 - margin

    def point(self, x: RP1Point) -> Tuple[float, float]:
        theta = boundary_angle(x)
        return (self.centre + self.radius * math.cos(theta), self.centre - self.radius * math.sin(theta))

    def geodesic_to(self, path: draw.Path, u: RP1Point, v: RP1Point):
        """Append the geodesic from u to v, assuming the pen sits at u"""
        x1, y1 = self.point(u)
        x2, y2 = self.point(v)
        delta = abs(boundary_angle(v) - boundary_angle(u)) % TWO_PI
        delta = min(delta, TWO_PI - delta)
        if abs(delta - math.pi) <= DIAMETER_EPS:
            path.L(x2, y2)
            return
        r = self.radius * math.tan(0.5 * delta)
        cross = (x2 - x1) * (self.centre - y1) - (y2 - y1) * (self.centre - x1)
        path.A(r, r, 0, 0, 0 if cross > 0 else 1, x2, y2)

    def boundary_to(self, path: draw.Path, u: RP1Point, v: RP1Point):
        """Append the counterclockwise boundary arc from u to v"""
        x2, y2 = self.point(v)
        span = ccw_length(boundary_angle(u), boundary_angle(v))
        path.A(self.radius, self.radius, 0, 1 if span > math.pi else 0, 0, x2, y2)


def _palette(count: int, seed: int) -> List[str]:
    order = np.random.default_rng(seed).permutation(max(count, 1))
    colours = []
    for k in order[:count]:
        r, g, b = colorsys.hls_to_rgb((k / max(count, 1)) % 1.0, 0.82, 0.55)
        colours.append(f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}")
    return colours


def _stratum_path(canvas: DiscCanvas, stratum: Stratum, fill: str) -> draw.Path:
    path = draw.Path(fill=fill, stroke="none")
    vertices = stratum.ideal_vertices
    path.M(*canvas.point(vertices[0]))
    n = len(vertices)
    for k in range(n):
        u, v = vertices[k], vertices[(k + 1) % n]
        if stratum.boundary_arcs[k]:
            canvas.boundary_to(path, u, v)
        else:
            canvas.geodesic_to(path, u, v)
    path.Z()
    return path


def _leaf_path(canvas: DiscCanvas, u: RP1Point, v: RP1Point, **style) -> draw.Path:
    path = draw.Path(fill="none", **style)
    path.M(*canvas.point(u))
    canvas.geodesic_to(path, u, v)
    return path


def render_earthquake(E: EarthquakeMap, size: int = 600, overlay: bool = False, seed: int = 0) -> draw.Drawing:
    """Shaded strata and leaves in the disc, optionally with the image lamination dashed on top"""
    canvas = DiscCanvas(size)
    d = draw.Drawing(size, size)
    d.append(draw.Rectangle(0, 0, size, size, fill="white"))
    gaps = [s for s in E.strata if s.ideal_vertices]
    for stratum, colour in zip(gaps, _palette(len(gaps), seed)):
        d.append(_stratum_path(canvas, stratum, colour))
    if any(s.is_whole_plane for s in E.strata):
        d.append(draw.Circle(canvas.centre, canvas.centre, canvas.radius, fill=_palette(1, seed)[0]))
    d.append(draw.Circle(canvas.centre, canvas.centre, canvas.radius, fill="none", stroke=STROKE, stroke_width=1.5))
    for leaf in E.lamination.leaves:
        d.append(_leaf_path(canvas, leaf.p, leaf.q, stroke=STROKE, stroke_width=1.5))
    if overlay and E.strata:
        for leaf in inverse_earthquake(E).lamination.leaves:
            d.append(_leaf_path(canvas, leaf.p, leaf.q, stroke="#c0392b", stroke_width=1, stroke_dasharray="4,3"))
    return d


def render_circle_map(f: PiecewiseMobiusCircleMap, size: int = 600, samples: int = 2000) -> draw.Drawing:
    """Graph of f on the square [0, 2 pi)^2, broken where the image wraps, with the diagonal"""
    margin = 20
    side = size - 2 * margin
    d = draw.Drawing(size, size)
    d.append(draw.Rectangle(0, 0, size, size, fill="white"))
    d.append(draw.Rectangle(margin, margin, side, side, fill="none", stroke=STROKE, stroke_width=1))
    d.append(draw.Line(margin, margin + side, margin + side, margin, stroke="#9aa5b1", stroke_dasharray="4,3"))

    angles = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    xs = np.column_stack([np.cos(0.5 * angles), -np.sin(0.5 * angles)])
    images = boundary_angles(evaluate_many(f, xs))
    screen_x = margin + angles / TWO_PI * side
    screen_y = margin + side - images / TWO_PI * side
    breaks = np.nonzero(np.abs(np.diff(images)) > math.pi)[0] + 1
    for chunk in np.split(np.arange(samples), breaks):
        if len(chunk) < 2:
            continue
        coords = np.column_stack([screen_x[chunk], screen_y[chunk]]).ravel()
        d.append(draw.Lines(*coords.tolist(), close=False, fill="none", stroke=STROKE, stroke_width=1.5))
    for b in f.breakpoints:
        theta = boundary_angle(b)
        image = boundary_angles(evaluate_many(f, np.array([[b.u, b.v]])))[0]
        d.append(draw.Circle(margin + theta / TWO_PI * side, margin + side - image / TWO_PI * side, 3, fill="#c0392b"))
    return d


def save_svg(drawing: draw.Drawing, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(drawing.as_svg(), encoding="utf-8")
    return path
