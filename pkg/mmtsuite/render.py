"""
Deterministic SVG pictures of planar networks and of two-dimensional unit balls.
"""
import math
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from .errors import PreconditionError
from .model import Boundary, _Current, boundary_of
from .norm import NormBall

NS_SVG = "http://www.w3.org/2000/svg"


class RenderStyle(NamedTuple):
    size: int = 400
    margin: int = 30
    stroke: str = "#1f2937"
    stroke_width: float = 2.0
    atom_radius: float = 5.0
    source_fill: str = "#b91c1c"
    sink_fill: str = "#1d4ed8"
    ball_fill: str = "#fde68a"
    axis_stroke: str = "#9ca3af"
    font_size: int = 11
    labels: bool = True


def _num(x: float) -> str:
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def _props(**attrs: Any) -> str:
    return " ".join(f'{k.replace("_", "-")}="{_num(v) if isinstance(v, float) else v}"' for k, v in attrs.items())


def _tag(name: str, text: Optional[str] = None, **attrs: Any) -> str:
    if text is None:
        return f"<{name} {_props(**attrs)}/>"
    return f"<{name} {_props(**attrs)}>{escape(text)}</{name}>"


def _multiplicity(theta: Sequence[int]) -> str:
    return "(" + ",".join(str(c) for c in theta) + ")"


class _Frame:
    """Maps a bounding box onto the square canvas, y axis pointing up."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray, style: RenderStyle) -> None:
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
        self.lo, self.span, self.style = lo, span, style
        self.inner = style.size - 2 * style.margin

    def __call__(self, p: Sequence[float]) -> Tuple[float, float]:
        x = self.style.margin + (p[0] - self.lo[0]) / self.span * self.inner
        y = self.style.size - self.style.margin - (p[1] - self.lo[1]) / self.span * self.inner
        return float(x), float(y)


def _document(body: List[str], style: RenderStyle) -> str:
    view = f"0 0 {style.size} {style.size}"
    head = f"<svg {_props(xmlns=NS_SVG, width=style.size, height=style.size, viewBox=view)}>"
    return "\n".join([head] + ["  " + line for line in body] + ["</svg>"]) + "\n"


def _axes(frame: _Frame, lo: np.ndarray, hi: np.ndarray, style: RenderStyle) -> List[str]:
    out = []
    if lo[0] <= 0 <= hi[0]:
        (x1, y1), (x2, y2) = frame((0.0, lo[1])), frame((0.0, hi[1]))
        out.append(_tag("line", x1=x1, y1=y1, x2=x2, y2=y2, stroke=style.axis_stroke, stroke_width=1.0))
    if lo[1] <= 0 <= hi[1]:
        (x1, y1), (x2, y2) = frame((lo[0], 0.0)), frame((hi[0], 0.0))
        out.append(_tag("line", x1=x1, y1=y1, x2=x2, y2=y2, stroke=style.axis_stroke, stroke_width=1.0))
    return out


def render_network_svg(net: _Current, style: RenderStyle = RenderStyle(),
                       boundary: Optional[Boundary] = None) -> str:
    """
    Draw a planar network: edges as segments labelled with their multiplicity, boundary atoms as
    filled circles labelled with their weight (red when the first nonzero weight is negative).

    :param net:      Network or labeled network in R^2.
    :param style:    Drawing options.
    :param boundary: Atoms to draw; defaults to the network's own boundary.
    """
    if net.vertices and net.dimension != 2:
        raise PreconditionError(f"render_network_svg: cannot draw a network in R^{net.dimension}")
    atoms = (boundary if boundary is not None else boundary_of(net)).atoms
    pts = np.array(list(net.vertices) + [a.point for a in atoms], dtype=float).reshape(-1, 2)
    if not len(pts):
        lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
        frame = _Frame(lo, hi, style)
        return _document(_axes(frame, lo, hi, style), style)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    frame = _Frame(lo, hi, style)

    body: List[str] = []
    for e in net.edges:
        (x1, y1), (x2, y2) = frame(net.vertices[e.tail]), frame(net.vertices[e.head])
        body.append(_tag("line", x1=x1, y1=y1, x2=x2, y2=y2, stroke=style.stroke,
                         stroke_width=float(style.stroke_width)))
        if style.labels:
            body.append(_tag("text", _multiplicity(e.multiplicity), x=(x1 + x2) / 2, y=(y1 + y2) / 2 - 4.0,
                             font_size=style.font_size, text_anchor="middle"))
    for a in atoms:
        x, y = frame(a.point)
        negative = next(c for c in a.weight if c) < 0
        body.append(_tag("circle", cx=x, cy=y, r=float(style.atom_radius),
                         fill=style.source_fill if negative else style.sink_fill))
        if style.labels:
            body.append(_tag("text", _multiplicity(a.weight), x=x + style.atom_radius + 2.0, y=y + 12.0,
                             font_size=style.font_size))
    return _document(body, style)


def render_ball_svg(ball: NormBall, style: RenderStyle = RenderStyle()) -> str:
    """
    Draw a unit ball on R^2 as the polygon through its extreme points, with coordinate axes.

    :raises PreconditionError: when the ball is not two-dimensional.
    """
    if ball.dimension != 2:
        raise PreconditionError(f"render_ball_svg: cannot draw a ball in R^{ball.dimension}")
    ext = ball.extreme_points()
    order = sorted(range(len(ext)), key=lambda k: (math.atan2(ext[k][1], ext[k][0]), k))
    polygon = [ext[k] for k in order]
    r = max(1.0, float(np.abs(ext).max())) * 1.1 if len(ext) else 1.0
    lo, hi = np.array([-r, -r]), np.array([r, r])
    frame = _Frame(lo, hi, style)
    points = " ".join(f"{_num(x)},{_num(y)}" for x, y in (frame(p) for p in polygon))
    body = [_tag("polygon", points=points, fill=style.ball_fill, stroke=style.stroke,
                 stroke_width=float(style.stroke_width))]
    body += _axes(frame, lo, hi, style)
    if style.labels:
        for p in polygon:
            x, y = frame(p)
            body.append(_tag("text", f"({_num(p[0])},{_num(p[1])})", x=x + 4.0, y=y - 4.0,
                             font_size=style.font_size))
    return _document(body, style)
