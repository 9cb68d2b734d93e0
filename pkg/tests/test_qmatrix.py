from __future__ import annotations

import random

import pytest

from cubistlab import qmatrix
from cubistlab.cubist import Box, Corner, CubistSet, Flat, Weight2, distance, facet_points
from cubistlab.flips import random_flips
from cubistlab.laurent import LaurentPoly, TruncSeries, q, quantum_integer
from cubistlab.qmatrix import (
    CHECK_NAMES,
    QMatrix,
    c_u_brauer,
    c_u_local,
    c_v,
    cu_local_row,
    d_u,
    d_v,
    verify_identities,
)

C2 = CubistSet(2, Corner((0, 0)))
C3 = CubistSet(3, Corner((0, 0, 0)))


def test_rank_one_matrices_are_identity():
    s = CubistSet(1, Corner((0,)))
    w = Box.cube(1, 3)
    for m in (d_u(s, w), d_v(s, w), c_u_local(s, w)):
        assert m.rows == [(0,)] and m.get((0,), (0,)) == 1
    assert c_v(s, w, 6).get((0,), (0,)) == TruncSeries({0: 1}, 6)


@pytest.mark.parametrize("s", [C2, C3, CubistSet(3, Flat(1)), CubistSet(4, Corner((0, 0, 0, 0)))], ids=str)
def test_du_rows(s):
    box = Box.cube(s.rank, 2)
    m = d_u(s, box.inflate(s.rank))
    for x in s.points_in_window(box):
        assert m.get(x, x) == 1
        row = {y: v for (a, y, v) in m.items() if a == x}
        assert len(row) == 2 ** (s.rank - 1)
        assert sum(v.evaluate(1) for v in row.values()) == 2 ** (s.rank - 1)


def test_dv_flat_rank2_quadrant():
    s = CubistSet(2, Flat(1))
    box = Box.cube(2, 3)
    m = d_v(s, box)
    for x in m.rows:
        assert m.get(x, x) == 1
        for y in m.cols:
            want = q ** distance(x, y) if y[1] >= x[1] else 0
            assert m.get(x, y) == want


def test_cu_rank2_values():
    m = c_u_local(C2, Box.cube(2, 3))
    for x in m.rows:
        assert m.get(x, x) == 1 + q**2
        for y in m.cols:
            if distance(x, y) == 1:
                assert m.get(x, y) == q


def test_cu_diagonal_at_flippable_vertex():
    assert cu_local_row(C3, (0, 0, 0))[(0, 0, 0)] == quantum_integer(3).shift(2)


def test_cu_weight2_empty_pyramid_diagonal():
    s = CubistSet(3, Weight2(7))
    assert cu_local_row(s, (0, 3, 0))[(0, 3, 0)] == 1 + 2 * q**2 + q**4
    assert cu_local_row(s, (0, 1, 0))[(0, 1, 0)] == 1 + 3 * q**2 + q**4
    assert cu_local_row(s, (-2, 2, 0))[(-2, 2, 0)] == 1 + q**2 + q**4


def test_cv_values():
    assert c_v(C2, Box.cube(2, 1), 4).get((0, 0), (0, 0)) == TruncSeries({0: 1, 2: 1, 4: 1}, 4)
    assert c_v(C3, Box.cube(3, 1), 3).get((0, 0, 0), (0, 0, -1)) == TruncSeries({1: 1, 3: 2}, 3)


def _cu_naive(s, x, y):
    # C_U = D^T D summed over every vertex z whose facet meets both x and y
    total = LaurentPoly()
    for z in Box.around(x, s.rank).points():
        if not s.contains(z):
            continue
        pts = facet_points(s.facet_of(z))
        if x in pts and y in pts:
            total = total + q ** (distance(x, z) + distance(y, z))
    return total


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_cu_routes_agree_with_naive_product(seed):
    s = random_flips(C3, 4, random.Random(seed), Box.cube(3, 2))
    box = Box.cube(3, 2)
    local = c_u_local(s, box)
    brauer = c_u_brauer(s, box)
    assert local == brauer
    for x in local.rows:
        for y in local.cols:
            if distance(x, y) <= 4:
                assert (local.get(x, y) or LaurentPoly()) == _cu_naive(s, x, y)


def test_cu_support_and_row_sum_cross_count():
    s = random_flips(C3, 3, random.Random(7), Box.cube(3, 2))
    r = s.rank
    for x in s.points_in_window(Box.cube(3, 2)):
        row = cu_local_row(s, x)
        for y, v in row.items():
            assert distance(x, y) <= 2 * r - 2
            assert 0 <= v.min_exponent() and v.max_exponent() <= 2 * r - 2
        assert sum(v.evaluate(1) for v in row.values()) == len(s.facets_containing(x)) * 2 ** (r - 1)


def test_du_unitriangular_for_the_order():
    s = random_flips(C3, 3, random.Random(3), Box.cube(3, 2))
    m = d_u(s, Box.cube(3, 2))
    for x, y, _ in m.items():
        if x != y:
            assert s.order_geq(x, y)


def test_qmatrix_json_round_trip():
    m = c_u_local(C3, Box.cube(3, 1))
    assert QMatrix.from_json(m.to_json()) == m
    v = c_v(C2, Box.cube(2, 1), 5)
    assert QMatrix.from_json(v.to_json()) == v


def test_verify_rank_one():
    rep = verify_identities(CubistSet(1, Corner((0,))), Box.cube(1, 2), 4)
    assert rep.passed and rep.window_size == 1
    assert set(CHECK_NAMES) <= set(rep.checks)


def test_verify_rank2_flat():
    rep = verify_identities(CubistSet(2, Flat(1)), Box.cube(2, 5), 8)
    assert rep.passed, rep.failing()


def test_verify_rank3_corner_with_removals():
    s = random_flips(C3, 3, random.Random(1), Box.cube(3, 2))
    assert len(s.removals) == 3
    rep = verify_identities(s, Box.cube(3, 4), 8)
    assert rep.passed, rep.failing()
    assert "hexagon" in rep.checks


def test_verify_rejects_small_cutoff():
    with pytest.raises(ValueError):
        verify_identities(C3, Box.cube(3, 1), 5)


def test_verify_detects_a_corrupted_cartan_row(monkeypatch):
    real = qmatrix.cu_local_row

    def corrupted(s, x):
        row = dict(real(s, x))
        if x == (0, 0, 0):
            row[x] = row[x] + q**3
        return row

    monkeypatch.setattr(qmatrix, "cu_local_row", corrupted)
    rep = verify_identities(C3, Box.cube(3, 2), 8)
    failing = set(rep.failing())
    assert {"cu_local_equals_brauer", "cu_bar_symmetry", "cu_cv_inverse"} <= failing
