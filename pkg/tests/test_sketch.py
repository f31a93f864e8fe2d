from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trajsketch.errors import InvalidIndex, InvalidRange
from trajsketch.geometry import PathVertex, PixelPath
from trajsketch.interaction import EventKind, InteractionEvent
from trajsketch.sketch import (
    CLOSE_COLOR,
    OPEN_COLOR,
    DecodedMarker,
    RenderConfig,
    SketchImage,
    SketchMode,
    SketchSpec,
    decode_markers,
    rasterize,
    read_curve_time,
    round_half_away,
)


def path_of(*verts: tuple[float, float, float, float]) -> PixelPath:
    """Vertices as (u, v, time, height) with steps assigned in order."""
    return PixelPath(
        vertices=tuple(
            PathVertex(u=u, v=v, time_norm=t, height_norm=h, step=i)
            for i, (u, v, t, h) in enumerate(verts)
        )
    )


def test_round_half_away_moves_halves_away_from_zero() -> None:
    assert round_half_away(0.5) == 1
    assert round_half_away(-0.5) == -1
    assert round_half_away(1.5) == 2
    assert round_half_away(2.5) == 3
    assert round_half_away(-2.5) == -3
    assert round_half_away(1.25) == 1


def test_render_config_validation() -> None:
    with pytest.raises(InvalidRange):
        RenderConfig(width=8, height=256)
    with pytest.raises(InvalidRange):
        RenderConfig(line_thickness=0)
    with pytest.raises(InvalidRange):
        RenderConfig(line_thickness=13, marker_radius=6)
    cfg = RenderConfig()
    assert (cfg.width, cfg.height) == (320, 256)


def test_sketch_spec_sorts_events_and_checks_steps() -> None:
    p = path_of((10, 10, 0.5, 0.0), (20, 10, 1.0, 1.0))
    spec = SketchSpec(
        path=p,
        events=(
            InteractionEvent(step=1, kind=EventKind.OPEN),
            InteractionEvent(step=0, kind=EventKind.CLOSE),
        ),
    )
    assert [e.step for e in spec.events] == [0, 1]
    with pytest.raises(InvalidIndex):
        SketchSpec(path=p, events=(InteractionEvent(step=5, kind=EventKind.CLOSE),))


def test_sketch_image_requires_uint8_rgb() -> None:
    with pytest.raises(InvalidRange):
        SketchImage(pixels=np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(InvalidRange):
        SketchImage(pixels=np.zeros((4, 4, 3), dtype=np.float32))
    img = SketchImage(pixels=np.zeros((4, 6, 3), dtype=np.uint8))
    assert (img.width, img.height) == (6, 4)


def test_png_round_trip_is_lossless() -> None:
    spec = SketchSpec(path=path_of((5, 5, 0.5, 0.2), (40, 30, 1.0, 0.9)))
    img = rasterize(spec, RenderConfig(width=64, height=64))
    again = SketchImage.from_png(img.to_png())
    assert np.array_equal(img.pixels, again.pixels)


def test_hand_computed_horizontal_segment() -> None:
    # 4-pixel walk (2,8)..(5,8); time 0.5 -> 1.0, height 0 -> 0.5.
    spec = SketchSpec(path=path_of((2, 8, 0.5, 0.0), (5, 8, 1.0, 0.5)))
    img = rasterize(spec, RenderConfig(width=16, height=16, line_thickness=1))
    px = img.pixels
    # Walk fractions 0, 1/3, 2/3, 1 lerp both channels; values are the
    # float64 lerp rounded half away from zero (hence 212, not 213: the
    # lerp at 2/3 lands a hair below 212.5).
    assert px[8, 2].tolist() == [128, 0, 0]
    assert px[8, 3].tolist() == [170, 43, 0]
    assert px[8, 4].tolist() == [212, 85, 0]
    assert px[8, 5].tolist() == [255, 128, 0]
    for x in range(2, 6):
        ideal_r = 255 * (0.5 + 0.5 * (x - 2) / 3)
        ideal_g = 255 * (0.5 * (x - 2) / 3)
        assert abs(px[8, x, 0] - ideal_r) <= 0.5 + 1e-9
        assert abs(px[8, x, 1] - ideal_g) <= 0.5 + 1e-9
    # Nothing else is painted.
    assert int((px.sum(axis=2) > 0).sum()) == 4


def test_two_d_mode_never_writes_green_on_the_curve() -> None:
    spec = SketchSpec(
        path=path_of((2, 8, 0.5, 0.3), (5, 8, 1.0, 0.9)), mode=SketchMode.TWO_D
    )
    img = rasterize(spec, RenderConfig(width=16, height=16, line_thickness=1))
    assert int(img.pixels[:, :, 1].sum()) == 0
    assert img.pixels[8, 5].tolist() == [255, 0, 0]


def test_faint_early_curve_is_still_visible() -> None:
    # A time value near zero must not round down to an unreadable pixel.
    spec = SketchSpec(path=path_of((2, 2, 0.001, 0.0), (6, 2, 1.0, 0.0)))
    img = rasterize(spec, RenderConfig(width=16, height=16, line_thickness=1))
    assert img.pixels[2, 2, 0] == 1


def test_rasterize_is_deterministic() -> None:
    rng = np.random.default_rng(7)
    verts = []
    t = 0.0
    for i in range(6):
        t += float(rng.uniform(0.05, 0.15))
        verts.append((float(rng.uniform(5, 120)), float(rng.uniform(5, 120)), t, float(rng.uniform(0, 1))))
    spec = SketchSpec(
        path=path_of(*verts),
        events=(InteractionEvent(step=2, kind=EventKind.CLOSE),),
    )
    cfg = RenderConfig(width=128, height=128)
    a = rasterize(spec, cfg)
    b = rasterize(spec, cfg)
    assert np.array_equal(a.pixels, b.pixels)


def test_single_vertex_paints_one_stamp() -> None:
    spec = SketchSpec(path=path_of((8, 8, 1.0, 1.0)))
    img = rasterize(spec, RenderConfig(width=16, height=16, line_thickness=1))
    assert img.pixels[8, 8].tolist() == [255, 255, 0]
    assert int((img.pixels.sum(axis=2) > 0).sum()) == 1


def test_thick_stroke_is_the_thin_walk_dilated_by_the_brush() -> None:
    from scipy.ndimage import binary_dilation

    spec = SketchSpec(path=path_of((4, 8, 0.5, 0.0), (12, 11, 1.0, 0.0)))
    thin = rasterize(spec, RenderConfig(width=24, height=24, line_thickness=1))
    thick = rasterize(spec, RenderConfig(width=24, height=24, line_thickness=3))
    grown = binary_dilation(thin.pixels[:, :, 0] > 0, structure=np.ones((3, 3)))
    assert np.array_equal(thick.pixels[:, :, 0] > 0, grown)


def test_off_canvas_vertices_clip_without_error() -> None:
    spec = SketchSpec(path=path_of((-30, -30, 0.5, 0.0), (30, 30, 1.0, 1.0)))
    img = rasterize(spec, RenderConfig(width=16, height=16, line_thickness=1))
    drawn = np.argwhere(img.pixels[:, :, 0] > 0)
    assert len(drawn) > 0
    assert drawn.min() >= 0 and drawn.max() < 16


def test_markers_paint_last_and_decode_back() -> None:
    spec = SketchSpec(
        path=path_of((20, 20, 0.4, 0.1), (60, 40, 0.7, 0.5), (100, 90, 1.0, 0.9)),
        events=(
            InteractionEvent(step=0, kind=EventKind.CLOSE),
            InteractionEvent(step=2, kind=EventKind.OPEN),
        ),
    )
    cfg = RenderConfig(width=128, height=128)
    img = rasterize(spec, cfg)
    # Marker interiors are exact colors, so they carry no curve channel.
    assert img.pixels[20, 20].tolist() == list(CLOSE_COLOR)
    assert img.pixels[90, 100].tolist() == list(OPEN_COLOR)
    decoded = decode_markers(img)
    assert [m.kind for m in decoded] == [EventKind.CLOSE, EventKind.OPEN]
    close, open_ = decoded
    assert np.hypot(close.u - 20, close.v - 20) <= cfg.marker_radius
    assert np.hypot(open_.u - 100, open_.v - 90) <= cfg.marker_radius


def test_decode_markers_on_hand_painted_discs() -> None:
    # Independent of the rasterizer: centroids of full discs are their centers.
    px = np.zeros((64, 64, 3), dtype=np.uint8)
    yy, xx = np.mgrid[0:64, 0:64]
    for (cx, cy), color in [((15, 20), CLOSE_COLOR), ((45, 38), OPEN_COLOR)]:
        mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= 5 ** 2
        px[mask] = color
    decoded = decode_markers(SketchImage(pixels=px))
    assert decoded == [
        DecodedMarker(u=15.0, v=20.0, kind=EventKind.CLOSE),
        DecodedMarker(u=45.0, v=38.0, kind=EventKind.OPEN),
    ]


def test_decode_markers_ignores_curve_pixels() -> None:
    spec = SketchSpec(path=path_of((5, 5, 0.5, 1.0), (50, 50, 1.0, 1.0)))
    img = rasterize(spec, RenderConfig(width=64, height=64))
    assert decode_markers(img) == []


def test_marker_and_curve_pixels_are_disjoint_classes() -> None:
    spec = SketchSpec(
        path=path_of((10, 10, 0.5, 0.5), (50, 50, 1.0, 1.0)),
        events=(InteractionEvent(step=0, kind=EventKind.CLOSE),),
    )
    img = rasterize(spec, RenderConfig(width=64, height=64))
    px = img.pixels.reshape(-1, 3)
    is_close = np.all(px == CLOSE_COLOR, axis=1)
    is_open = np.all(px == OPEN_COLOR, axis=1)
    is_curve = px[:, 0] >= 1
    assert not np.any(is_curve & (is_close | is_open))
    assert int(is_close.sum()) > 0
    # Curve pixels never use the blue channel.
    assert int(px[is_curve, 2].sum()) == 0


def test_read_curve_time_recovers_normalized_time() -> None:
    spec = SketchSpec(
        path=path_of((2, 8, 0.5, 0.0), (5, 8, 1.0, 0.5)),
        events=(InteractionEvent(step=0, kind=EventKind.CLOSE),),
    )
    img = rasterize(spec, RenderConfig(width=32, height=32, line_thickness=1, marker_radius=2))
    assert read_curve_time(img, (5, 8)) == pytest.approx(1.0)
    # The marker disc (radius 2 around pixel (2, 8)) hides curve pixels
    # underneath it, and background reads as no-curve too.
    assert read_curve_time(img, (4, 8)) is None
    assert read_curve_time(img, (2, 8)) is None
    assert read_curve_time(img, (20, 20)) is None
    # Out-of-bounds probes are just "no curve here", not an error.
    assert read_curve_time(img, (99, 0)) is None
    assert read_curve_time(img, (-1, 8)) is None


def test_curve_brightness_tracks_drawing_order_on_monotone_strokes() -> None:
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(2, 7))
        us = np.sort(rng.choice(np.arange(2, 126), size=n, replace=False)).astype(float)
        vs = [float(rng.integers(30, 90))]
        for du in np.diff(us):
            dv = int(rng.integers(-int(du), int(du) + 1))
            vs.append(float(np.clip(vs[-1] + dv, 2, 125)))
        t = np.sort(rng.uniform(0.05, 1.0, size=n))
        t[-1] = 1.0
        while len(set(t.tolist())) < n:
            t = np.sort(rng.uniform(0.05, 1.0, size=n))
            t[-1] = 1.0
        spec = SketchSpec(
            path=path_of(*[(us[i], vs[i], float(t[i]), 0.0) for i in range(n)])
        )
        img = rasterize(spec, RenderConfig(width=128, height=128, line_thickness=1))
        red = img.pixels[:, :, 0]
        per_column = [
            int(red[:, x].max())
            for x in range(int(us[0]), int(us[-1]) + 1)
            if red[:, x].max() > 0
        ]
        assert per_column == sorted(per_column)


def test_overlapping_strokes_keep_the_later_time() -> None:
    # The path doubles back over itself; revisited pixels show the later pass.
    spec = SketchSpec(
        path=path_of((2, 8, 0.2, 0.0), (10, 8, 0.5, 0.0), (2, 8, 1.0, 0.0))
    )
    img = rasterize(spec, RenderConfig(width=16, height=16, line_thickness=1))
    assert img.pixels[8, 2, 0] == 255
    assert img.pixels[8, 10, 0] == round_half_away(255 * 0.5)


def test_mode_changes_only_the_green_channel() -> None:
    spec = SketchSpec(
        path=path_of((10, 10, 0.3, 0.2), (60, 40, 0.6, 0.8), (110, 100, 1.0, 0.4)),
        events=(InteractionEvent(step=1, kind=EventKind.OPEN),),
    )
    cfg = RenderConfig(width=128, height=128)
    flat = rasterize(
        SketchSpec(path=spec.path, events=spec.events, mode=SketchMode.TWO_D), cfg
    )
    tall = rasterize(spec, cfg)
    assert np.array_equal(flat.pixels[:, :, 0], tall.pixels[:, :, 0])
    assert np.array_equal(flat.pixels[:, :, 2], tall.pixels[:, :, 2])
    diff = np.argwhere(flat.pixels[:, :, 1] != tall.pixels[:, :, 1])
    assert len(diff) > 0
    for y, x in diff:
        assert flat.pixels[y, x, 0] >= 1
