from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cubistlab.cubist import (
    Box,
    Corner,
    CubistSet,
    Facet,
    Flat,
    OrderAnswer,
    Weight2,
    distance,
    facet_points,
    shift,
)
from cubistlab.flips import random_flips

C3 = CubistSet(3, Corner((0, 0, 0)))
C2 = CubistSet(2, Corner((0, 0)))


def _m(x):
    return min(i + 1 for i, c in enumerate(x) if c == 0)


def flat_geq(j, x, y):
    r = len(x)
    return all(x[i] <= y[i] for i in range(j - 1)) and all(x[i] >= y[i] for i in range(j, r))


def corner_geq(x, y):
    mx, my = _m(x), _m(y)
    r = len(x)
    return mx >= my and all(x[i] <= y[i] for i in range(my)) and all(x[i] >= y[i] for i in range(mx - 1, r))


def sample_sets():
    rng = random.Random(11)
    out = [
        CubistSet(1, Corner((2,))),
        CubistSet(2, Flat(1)),
        C2,
        CubistSet(3, Flat(2)),
        C3,
        CubistSet(3, Weight2(7, frozenset({(0, 1), (0, 2), (1, 2)}))),
        random_flips(C3, 5, rng, Box.cube(3, 2)),
        CubistSet(4, Corner((0, 0, 0, 0))),
    ]
    return out


# membership and validation ---------------------------------------------------


def test_ideal_membership_examples():
    assert C3.contains_ideal((-3, 0, -1))
    assert not C3.contains_ideal((1, -5, -5))
    assert not C3.with_removal((0, 0, 0)).contains_ideal((0, 0, 0))


def test_membership_examples():
    assert C3.contains((0, -2, -5))
    assert not C3.contains((-1, -1, -1))
    assert CubistSet(3, Flat(2)).contains((7, 0, -4))


def test_rank_mismatch_raises():
    with pytest.raises(ValueError):
        C3.contains((0, 0))


def test_validation_examples():
    assert C3.with_removal((0, 0, 0)).validate().ok
    bad = C3.with_removal((-1, 0, 0)).validate()
    assert not bad.ok and bad.index == 0
    assert CubistSet(3, Corner((0, 0, 0)), ((0, 0, 0), (-1, 0, 0))).validate().ok
    assert not CubistSet(2, Flat(1), ((0, 0),)).validate().ok


def test_validation_pinpoints_first_bad_removal():
    s = CubistSet(3, Corner((0, 0, 0)), ((0, 0, 0), (-1, 0, 0), (-3, 0, 0)))
    v = s.validate()
    assert not v.ok and v.index == 2


def test_distance_examples():
    assert distance((0, 0), (2, -1)) == 3
    assert distance((4, 4), (4, 4)) == 0
    assert distance((1, 2, 3), (0, 0, 0)) == 6


@pytest.mark.parametrize("s", sample_sets(), ids=lambda s: f"r{s.rank}-{type(s.base).__name__}-{len(s.removals)}")
def test_fiber_property(s):
    rng = random.Random(5)
    for _ in range(60):
        w = tuple(rng.randint(-6, 6) for _ in range(s.rank))
        hits = [t for t in range(-30, 31) if s.contains(shift(w, t))]
        assert len(hits) == 1
        assert s.fiber_point(w) == shift(w, hits[0])


def test_points_in_window_examples():
    assert C2.points_in_window(Box((-1, -1), (0, 0))) == [(-1, 0), (0, -1), (0, 0)]
    assert C2.points_in_window(Box((0, 0), (-1, -1))) == []
    r1 = CubistSet(1, Corner((2,)))
    assert r1.points_in_window(Box((-5,), (5,))) == [(2,)]


def test_points_in_window_matches_scan():
    for s in sample_sets():
        if s.rank > 3:
            continue
        box = Box.cube(s.rank, 3)
        assert s.points_in_window(box) == [x for x in sorted(box.points()) if s.contains(x)]


# facets -------------------------------------------------------------------------


def test_facet_points_examples():
    assert facet_points(Facet((0, 0), 1)) == [(0, 0), (0, -1)]
    assert sorted(facet_points(Facet((0, 0, 0), 2))) == sorted([(0, 0, 0), (1, 0, 0), (0, 0, -1), (1, 0, -1)])
    for r in range(1, 5):
        pts = facet_points(Facet((0,) * r, r))
        assert sorted(pts) == sorted(
            tuple(a) + (0,) for a in itertools.product((0, 1), repeat=r - 1)
        )


def test_lambda_examples():
    assert C3.facet_of((-2, 0, -1)) == Facet((-2, 0, -1), 2)
    flat = CubistSet(3, Flat(2))
    for x in flat.points_in_window(Box.cube(3, 2)):
        assert flat.facet_of(x).axis == 2
    r1 = CubistSet(1, Corner((4,)))
    assert facet_points(r1.facet_of((4,))) == [(4,)]


def test_lambda_outside_raises():
    with pytest.raises(ValueError):
        C3.facet_of((-1, -1, -1))


@pytest.mark.parametrize("s", sample_sets(), ids=lambda s: f"r{s.rank}-{type(s.base).__name__}-{len(s.removals)}")
def test_lambda_well_formed_and_injective(s):
    box = Box.cube(s.rank, 3 if s.rank < 4 else 2)
    facets = set()
    for x in s.points_in_window(box):
        f = s.facet_of(x)
        assert all(s.contains(y) for y in facet_points(f))
        assert s.facet_by_containment(x) == f
        facets.add((f.anchor, f.axis))
    assert len(facets) == len(s.points_in_window(box))


def test_lambda_under_axis_order():
    perm = (3, 1, 2)
    for x in C3.points_in_window(Box.cube(3, 2)):
        f = C3.facet_of(x, perm)
        assert all(C3.contains(y) for y in facet_points(f))
        assert C3.facet_by_containment(x, perm) == f


def test_mu_examples():
    x = (-2, 0, -1)
    assert C3.in_mu(x, x)
    assert C3.in_mu(x, (-2, 5, -1))
    flat = CubistSet(3, Flat(2))
    base = (1, 0, -1)
    for y in Box.cube(3, 2).points():
        assert flat.in_mu(base, y) == (y[0] <= base[0] and y[2] >= base[2])


def test_flat_classification_examples():
    flat = CubistSet(3, Flat(2))
    assert flat.is_flat((3, 0, 1)) and flat.flat_axis((3, 0, 1)) == 2
    assert not C2.is_flat((0, 0))
    assert C3.flat_axis((0, -5, -5)) == 1


def test_i_set_examples():
    assert C3.i_set((0, 0, 0)) == [(0, 0, 0)]
    flat = CubistSet(3, Flat(2))
    x = (1, 0, 2)
    want = sorted(tuple(x[k] + (a[k] if k != 1 else 0) for k in range(3)) for a in itertools.product((0, 1), repeat=3) if a[1] == 0)
    assert sorted(flat.i_set(x)) == want
    for s in sample_sets():
        for x in s.points_in_window(Box.cube(s.rank, 2)):
            pts = s.i_set(x)
            assert x in pts and shift(x, 1) not in pts and len(pts) <= 2**s.rank


def test_facets_containing_examples():
    r1 = CubistSet(1, Corner((0,)))
    assert len(r1.facets_containing((0,))) == 1
    # a flat set is a square grid made of translates of one face, so four faces meet at each vertex
    flat = CubistSet(3, Flat(2))
    assert len(flat.facets_containing((2, 0, -3))) == 4
    for x in C3.points_in_window(Box.cube(3, 3)):
        fs = C3.facets_containing(x)
        assert 3 <= len(fs) <= 6
        for f in fs:
            pts = facet_points(f)
            assert x in pts and all(C3.contains(y) for y in pts)


def test_facets_containing_against_brute_force():
    s = random_flips(C3, 4, random.Random(2), Box.cube(3, 2))
    for x in s.points_in_window(Box.cube(3, 2)):
        brute = set()
        for axis in range(1, 4):
            # any facet through x has anchor within one step of x
            for d in itertools.product((-1, 0, 1), repeat=3):
                anchor = tuple(a + b for a, b in zip(x, d))
                pts = facet_points(Facet(anchor, axis))
                if x in pts and all(s.contains(y) for y in pts):
                    brute.add((anchor, axis))
        got = {(f.anchor, f.axis) for f in s.facets_containing(x)}
        assert got == brute


def test_no_unit_cube_inside():
    rng = random.Random(9)
    for s in sample_sets():
        pts = s.points_in_window(Box.cube(s.rank, 3))
        for x in rng.sample(pts, min(30, len(pts))):
            cube = [tuple(a + b for a, b in zip(x, bits)) for bits in itertools.product((0, 1), repeat=s.rank)]
            assert not all(s.contains(y) for y in cube) or s.rank == 0


def test_opposite_examples_and_injectivity():
    r1 = CubistSet(1, Corner((3,)))
    assert r1.opposite((3,)) == (3,)
    flat = CubistSet(3, Flat(2))
    assert flat.opposite((4, 0, 1)) == (5, 0, 0)
    for s in sample_sets():
        pts = s.points_in_window(Box.cube(s.rank, 3 if s.rank < 4 else 2))
        ops = [s.opposite(x) for x in pts]
        assert len(set(ops)) == len(ops)
        assert all(s.contains(y) for y in ops)


# the partial order ---------------------------------------------------------------


def test_order_generating_relation():
    for x in C3.points_in_window(Box.cube(3, 2)):
        for y in facet_points(C3.facet_of(x)):
            assert C3.order_geq(x, y) is OrderAnswer.GEQ


@pytest.mark.parametrize("r", [2, 3, 4])
def test_order_matches_flat_closed_form(r):
    s = CubistSet(r, Flat(2))
    pts = s.points_in_window(Box.cube(r, 2))
    for x in pts:
        for y in pts[:: max(1, len(pts) // 15)]:
            assert bool(s.order_geq(x, y, Box.bounding([x, y]).inflate(3))) == flat_geq(2, x, y)


@pytest.mark.parametrize("r", [2, 3])
def test_order_matches_corner_closed_form(r):
    s = CubistSet(r, Corner((0,) * r))
    pts = s.points_in_window(Box.cube(r, 2))
    for x in pts:
        for y in pts:
            assert bool(s.order_geq(x, y, Box.bounding([x, y]).inflate(3))) == corner_geq(x, y)


def test_order_antisymmetric_and_mu_implies_geq():
    s = random_flips(C3, 3, random.Random(4), Box.cube(3, 2))
    pts = s.points_in_window(Box.cube(3, 2))
    for x in pts:
        for y in pts:
            if x != y and s.order_geq(x, y):
                assert not s.order_geq(y, x)
            if s.in_mu(y, x):
                assert s.order_geq(x, y)


def test_order_not_found_is_box_relative():
    x, y = (0, 0, -3), (-3, 0, 0)
    assert C3.order_geq(x, y, Box((0, 0, -3), (0, 0, -3))) is OrderAnswer.NOT_FOUND
    assert corner_geq(x, y) == bool(C3.order_geq(x, y))


# slices and serialisation ------------------------------------------------------


@pytest.mark.parametrize(
    "s, nonempty",
    [
        (C3, {-2, -1, 0}),
        (CubistSet(3, Weight2(5, frozenset({(1, 2), (1, 3), (2, 3)}))), {1}),
        (CubistSet(4, Corner((0, 0, 0, 0))), {-2, -1, 0}),
    ],
    ids=["corner3", "weight2", "corner4"],
)
def test_slice_is_cubist(s, nonempty):
    for level in range(-2, 3):
        sl = s.slice_at(level)
        box = Box.cube(s.rank - 1, 3)
        for x in box.points():
            assert sl.contains(x) == (s.contains(x + (level,)) and s.contains(x + (level - 1,)))
        # a slice is either empty or meets every diagonal line exactly once
        rng = random.Random(level)
        counts = set()
        for _ in range(20):
            w = tuple(rng.randint(-3, 3) for _ in range(s.rank - 1))
            counts.add(len([t for t in range(-20, 21) if sl.contains(shift(w, t))]))
        assert counts == ({1} if level in nonempty else {0})


def test_json_round_trip():
    for s in sample_sets():
        assert CubistSet.from_json(s.to_json()) == s


def test_weight2_rejects_non_richards_pyramid():
    with pytest.raises(ValueError):
        Weight2(7, frozenset({(0, 2)}))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 6))
def test_random_flips_always_validate(seed, count):
    s = random_flips(C3, count, random.Random(seed), Box.cube(3, 2))
    assert s.validate().ok
    for x in s.points_in_window(Box.cube(3, 2)):
        assert all(s.contains(y) for y in facet_points(s.facet_of(x)))
