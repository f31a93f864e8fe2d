"""Deterministic trajectory-sketch rasterization and round-trip decoding.

A sketch is an RGB raster on black: the projected EE curve drawn as straight
segments whose red channel encodes normalized time and whose green channel
encodes normalized height (2.5D mode only), plus filled interaction-marker
discs painted last. Marker colors are exact: Close=(0,255,0), Open=(0,0,255).
Curve pixels always carry R >= 1 (any nonzero time value rounds up to at
least 1), so the marker and curve color predicates never overlap.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import EmptySpec, InvalidIndex, InvalidRange
from .geometry import PixelPath
from .interaction import EventKind, InteractionEvent

DEFAULT_WIDTH = 320
DEFAULT_HEIGHT = 256

CLOSE_COLOR = (0, 255, 0)
OPEN_COLOR = (0, 0, 255)


class SketchMode(str, Enum):
    TWO_D = "2d"
    TWO_POINT_FIVE_D = "2.5d"


@dataclass(frozen=True)
class RenderConfig:
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    line_thickness: int = 3
    marker_radius: int = 6

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise InvalidRange("canvas must be at least 16x16")
        if self.line_thickness < 1:
            raise InvalidRange("line_thickness must be at least 1")
        # Markers must be able to cover the stroke they sit on.
        if self.marker_radius <= self.line_thickness / 2:
            raise InvalidRange("marker_radius must exceed line_thickness/2")


@dataclass(frozen=True)
class SketchSpec:
    """Vector form of a sketch: projected path, marker events, and mode."""

    path: PixelPath
    events: tuple[InteractionEvent, ...] = ()
    mode: SketchMode = SketchMode.TWO_POINT_FIVE_D

    def __post_init__(self):
        events = tuple(sorted(self.events, key=lambda e: (e.step, e.kind.value)))
        object.__setattr__(self, "events", events)
        known = {v.step for v in self.path.vertices}
        for ev in events:
            if ev.step not in known:
                raise InvalidIndex(f"event at step {ev.step} has no path vertex")


@dataclass(frozen=True)
class SketchImage:
    """8-bit RGB raster, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8 or px.ndim != 3 or px.shape[2] != 3:
            raise InvalidRange("pixels must be a (H, W, 3) uint8 array")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def to_png(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, mode="RGB").save(buf, format="PNG")
        return buf.getvalue()

    @classmethod
    def from_png(cls, data: bytes) -> "SketchImage":
        img = Image.open(io.BytesIO(data)).convert("RGB")
        return cls(pixels=np.array(img, dtype=np.uint8))


class DecodedMarker(NamedTuple):
    u: float
    v: float
    kind: EventKind


def round_half_away(x: float) -> int:
    """Round to the nearest integer, halves away from zero."""
    if x >= 0:
        return int(math.floor(x + 0.5))
    return int(math.ceil(x - 0.5))


def _channel_value(norm: float) -> int:
    value = min(255, max(0, round_half_away(255.0 * norm)))
    if norm > 0.0 and value == 0:
        # Keep curve pixels distinguishable from marker/background (R >= 1).
        value = 1
    return value


def _line_pixels(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Endpoint-inclusive integer line walk from (x0,y0) to (x1,y1), in order."""
    pixels = []
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        pixels.append((x, y))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy
    return pixels


def rasterize(spec: SketchSpec, cfg: RenderConfig = RenderConfig()) -> SketchImage:
    """Draw a sketch spec onto a black canvas.

    Segments are walked in drawing order with an integer line walk; a square
    brush of side line_thickness is stamped at every walk pixel, later writes
    winning. Red encodes time, green encodes height (2.5D only), both
    linearly interpolated along each segment. Marker discs paint last and
    override curve pixels. The output is bit-identical for identical inputs.
    """
    verts = spec.path.vertices
    if not verts:
        raise EmptySpec("sketch path has no vertices")

    img = np.zeros((cfg.height, cfg.width, 3), dtype=np.uint8)
    pts = [(round_half_away(v.u), round_half_away(v.v)) for v in verts]
    shaded = spec.mode is SketchMode.TWO_POINT_FIVE_D
    half = cfg.line_thickness // 2
    offsets = range(-half, -half + cfg.line_thickness)

    def stamp(x: int, y: int, r: int, g: int) -> None:
        for dv in offsets:
            yy = y + dv
            if yy < 0 or yy >= cfg.height:
                continue
            for du in offsets:
                xx = x + du
                if xx < 0 or xx >= cfg.width:
                    continue
                img[yy, xx, 0] = r
                img[yy, xx, 1] = g
                img[yy, xx, 2] = 0

    def values_at(i: int, frac: float) -> tuple[int, int]:
        t0, t1 = verts[i].time_norm, verts[i + 1].time_norm
        h0, h1 = verts[i].height_norm, verts[i + 1].height_norm
        t = t0 + (t1 - t0) * frac
        h = h0 + (h1 - h0) * frac
        return _channel_value(t), _channel_value(h) if shaded else 0

    if len(verts) == 1:
        r = _channel_value(verts[0].time_norm)
        g = _channel_value(verts[0].height_norm) if shaded else 0
        stamp(pts[0][0], pts[0][1], r, g)
    else:
        for i in range(len(verts) - 1):
            walk = _line_pixels(*pts[i], *pts[i + 1])
            last = len(walk) - 1
            for k, (x, y) in enumerate(walk):
                frac = k / last if last > 0 else 1.0
                r, g = values_at(i, frac)
                stamp(x, y, r, g)

    step_to_pixel = {verts[i].step: pts[i] for i in range(len(verts))}
    rr = cfg.marker_radius
    for ev in spec.events:
        x, y = step_to_pixel[ev.step]
        color = CLOSE_COLOR if ev.kind is EventKind.CLOSE else OPEN_COLOR
        for dy in range(-rr, rr + 1):
            yy = y + dy
            if yy < 0 or yy >= cfg.height:
                continue
            for dx in range(-rr, rr + 1):
                if dx * dx + dy * dy > rr * rr:
                    continue
                xx = x + dx
                if 0 <= xx < cfg.width:
                    img[yy, xx] = color

    return SketchImage(pixels=img)


_EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


def decode_markers(img: SketchImage) -> list[DecodedMarker]:
    """Recover interaction markers as (centroid, kind) from exact-color discs."""
    px = img.pixels.astype(np.int32)
    out = []
    for color, kind in ((CLOSE_COLOR, EventKind.CLOSE), (OPEN_COLOR, EventKind.OPEN)):
        mask = np.all(px == np.array(color), axis=2)
        labels, count = ndimage.label(mask, structure=_EIGHT_CONNECTED)
        for lab in range(1, count + 1):
            ys, xs = np.nonzero(labels == lab)
            out.append(DecodedMarker(u=float(xs.mean()), v=float(ys.mean()), kind=kind))
    out.sort(key=lambda m: (m.u, m.v, m.kind.value))
    return out


def read_curve_time(img: SketchImage, pixel: tuple[int, int]) -> float | None:
    """time_norm encoded at a pixel, or None for background/marker pixels.

    Marker pixels have R = 0 by construction, so R >= 1 alone identifies
    curve pixels.
    """
    u, v = pixel
    if not (0 <= u < img.width and 0 <= v < img.height):
        return None
    r = int(img.pixels[v, u, 0])
    if r >= 1:
        return r / 255.0
    return None
