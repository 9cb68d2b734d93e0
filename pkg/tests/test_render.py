from __future__ import annotations

import math
import random
import re
import xml.etree.ElementTree as ET

import pytest

from cubistlab.cubist import Box, Corner, CubistSet, Flat, Weight2
from cubistlab.flips import flippable_vertices, random_flips
from cubistlab.render import facet_polygon, project, svg_filename, svg_tiling, tiling_polygons

C3 = CubistSet(3, Corner((0, 0, 0)))
SVG_NS = "{http://www.w3.org/2000/svg}"


def _close(a, b, tol=1e-9):
    return abs(a[0] - b[0]) < tol and abs(a[1] - b[1]) < tol


def test_projection_kernel_and_origin():
    assert _close(project((0, 0, 0)), (0.0, 0.0))
    assert _close(project((1, 1, 1)), (0.0, 0.0))
    assert _close(project((3, 3)), (0.0, 0.0))


def test_projection_of_axis_difference():
    a, b = project((1, 0, 0)), project((0, 1, 0))
    dx, dy = a[0] - b[0], a[1] - b[1]
    assert math.hypot(dx, dy) == pytest.approx(math.sqrt(3))
    assert math.degrees(math.atan2(abs(dx), dy)) == pytest.approx(30.0)


def test_projection_unit_vectors():
    for i, angle in enumerate((90, 210, 330)):
        e = tuple(1 if k == i else 0 for k in range(3))
        x, y = project(e)
        assert (x, y) == pytest.approx((math.cos(math.radians(angle)), math.sin(math.radians(angle))))


def test_projection_rejects_other_ranks():
    with pytest.raises(ValueError):
        project((0, 0, 0, 0))
    with pytest.raises(ValueError):
        project((0, 0), 3)
    with pytest.raises(ValueError):
        tiling_polygons(CubistSet(4, Flat(1)), Box.cube(4, 1))


@pytest.mark.parametrize(
    "s",
    [CubistSet(3, Flat(2)), C3, random_flips(C3, 6, random.Random(2), Box.cube(3, 2)), CubistSet(3, Weight2(5))],
    ids=["flat", "corner", "corner-flipped", "weight2"],
)
def test_projection_is_injective_on_the_set(s):
    seen = {}
    for x in s.points_in_window(Box.cube(3, 4)):
        key = tuple(round(c, 6) for c in project(x))
        assert key not in seen, (x, seen.get(key))
        seen[key] = x


def _inside_convex(pt, poly):
    sign = 0
    for (ax, ay), (bx, by) in zip(poly, poly[1:] + poly[:1]):
        cross = (bx - ax) * (pt[1] - ay) - (by - ay) * (pt[0] - ax)
        if abs(cross) < 1e-12:
            return None
        s = 1 if cross > 0 else -1
        if sign and s != sign:
            return False
        sign = s
    return True


def _polygon_area(poly):
    return abs(sum(a[0] * b[1] - b[0] * a[1] for a, b in zip(poly, poly[1:] + poly[:1]))) / 2


@pytest.mark.parametrize(
    "s",
    [CubistSet(3, Flat(1)), C3, random_flips(C3, 8, random.Random(5), Box.cube(3, 2))],
    ids=["flat", "corner", "corner-flipped"],
)
def test_rhombi_tile_without_overlap(s):
    polys = [p for _, p in tiling_polygons(s, Box.cube(3, 7))]
    rng = random.Random(0)
    for _ in range(300):
        r, t = 2.5 * math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi)
        pt = (r * math.cos(t), r * math.sin(t))
        hits = [_inside_convex(pt, p) for p in polys]
        if None in hits:
            continue
        assert hits.count(True) == 1, pt


def test_tiling_area_matches_disc():
    polys = [p for _, p in tiling_polygons(C3, Box.cube(3, 8))]
    radius = 5.0
    area = sum(_polygon_area(p) for p in polys if all(math.hypot(*c) <= radius for c in p))
    assert all(_polygon_area(p) == pytest.approx(math.sqrt(3) / 2) for p in polys)
    # the rhombi fully inside the disc fill it up to a boundary layer of width one edge
    assert math.pi * (radius - 1.1) ** 2 <= area <= math.pi * radius**2


def test_flat_tiling_is_translates_of_one_rhombus():
    s = CubistSet(3, Flat(2))
    shapes = set()
    for x, poly in tiling_polygons(s, Box.cube(3, 3)):
        ox, oy = project(x)
        shapes.add(tuple((round(a - ox, 6), round(b - oy, 6)) for a, b in poly))
    assert len(shapes) == 1


def test_three_rhombi_meet_at_a_flippable_vertex():
    s = random_flips(C3, 4, random.Random(9), Box.cube(3, 2))
    for z in flippable_vertices(s, Box.cube(3, 2)):
        pz = project(z)
        meeting = [x for x, poly in tiling_polygons(s, Box.around(z, 3)) if any(_close(c, pz) for c in poly)]
        assert len(meeting) == 3


def test_facet_polygon_is_a_cycle():
    poly = facet_polygon(C3, (0, 0, -1))
    for a, b in zip(poly, poly[1:] + poly[:1]):
        assert sum(abs(u - v) for u, v in zip(a, b)) == 1


def test_svg_is_deterministic_and_well_formed():
    s = random_flips(C3, 3, random.Random(1), Box.cube(3, 2))
    window = Box.cube(3, 2)
    hl = {"flippable": flippable_vertices(s, window), "mine": [(0, 0, -1)]}
    a = svg_tiling(s, window, hl)
    assert a == svg_tiling(s, window, hl)
    root = ET.fromstring(a.split("\n", 1)[1])
    polys = root.findall(f".//{SVG_NS}polygon")
    assert len(polys) == len(s.points_in_window(window))
    assert root.findall(f".//{SVG_NS}circle[@class='marker-disc']")
    assert len(root.findall(f".//{SVG_NS}circle[@class='marker-ring']")) == len(hl["flippable"])
    assert "-0.0000" not in a


def test_pyramid_highlight_uses_squares():
    s = CubistSet(3, Weight2(7, frozenset({(0, 1), (0, 2), (1, 2)})))
    doc = svg_tiling(s, Box.cube(3, 3), {"pyramid": [(0, 2, 1)]})
    assert doc.count('class="marker-square"') == 1


def test_rank2_uses_polylines():
    doc = svg_tiling(CubistSet(2, Corner((0, 0))), Box.cube(2, 2))
    assert "<polyline" in doc and "<polygon" not in doc


def test_empty_window_gives_valid_svg():
    doc = svg_tiling(C3, Box((0, 0, 0), (-1, -1, -1)))
    root = ET.fromstring(doc.split("\n", 1)[1])
    assert root.tag == f"{SVG_NS}svg"
    assert not root.findall(f".//{SVG_NS}polygon")


def test_filename():
    name = svg_filename(C3, Box.cube(3, 2))
    assert re.fullmatch(r"[0-9a-f]{12}-.+\.svg", name)
    assert name != svg_filename(CubistSet(3, Flat(1)), Box.cube(3, 2))
    assert name == svg_filename(CubistSet(3, Corner((0, 0, 0))), Box.cube(3, 2))
