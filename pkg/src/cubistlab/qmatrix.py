"""Graded decomposition and Cartan matrices of a Cubist set, and the identity checks tying them together.

Every entry is computed from global membership, so no matrix ever needs a
boundary correction: a window only selects which rows and columns are reported.
The identity checks in :func:`verify_identities` sum over exact finite index
sets (facets, unit boxes, cones cut down by the cutoff) rather than over a
truncated matrix product.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cubist import Box, CubistSet, Point, distance, facet_points
from .laurent import LaurentPoly, Scalar, TruncSeries, geometric_power, quantum_integer

__all__ = [
    "QMatrix",
    "window_points",
    "du_row",
    "du_sources",
    "dv_entry",
    "cu_brauer_row",
    "cu_local_row",
    "cv_entry",
    "d_u",
    "d_v",
    "c_u_brauer",
    "c_u_local",
    "c_v",
    "c_v_brauer",
    "CheckResult",
    "IdentityReport",
    "verify_identities",
]


@dataclass
class QMatrix:
    """A finite matrix indexed by lattice points with LaurentPoly or TruncSeries entries."""

    rows: list[Point]
    cols: list[Point]
    entries: dict[tuple[int, int], Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._row_index = {x: k for k, x in enumerate(self.rows)}
        self._col_index = {y: k for k, y in enumerate(self.cols)}
        cutoffs = {e.cutoff for e in self.entries.values() if isinstance(e, TruncSeries)}
        if len(cutoffs) > 1:
            raise ValueError(f"mixed cutoffs in one matrix: {sorted(cutoffs)}")
        self.entries = {k: v for k, v in self.entries.items() if not v.is_zero()}

    @classmethod
    def from_points(
        cls, rows: Sequence[Point], cols: Sequence[Point], values: Mapping[tuple[Point, Point], Scalar]
    ) -> QMatrix:
        ri = {x: k for k, x in enumerate(rows)}
        ci = {y: k for k, y in enumerate(cols)}
        return cls(list(rows), list(cols), {(ri[x], ci[y]): v for (x, y), v in values.items()})

    def get(self, x: Point, y: Point) -> Scalar | int:
        """Entry at (x, y); 0 when unstored."""
        key = (self._row_index[tuple(x)], self._col_index[tuple(y)])
        return self.entries.get(key, 0)

    def has_row(self, x: Point) -> bool:
        return tuple(x) in self._row_index

    def items(self) -> Iterable[tuple[Point, Point, Scalar]]:
        for (i, j) in sorted(self.entries):
            yield self.rows[i], self.cols[j], self.entries[(i, j)]

    def transpose(self) -> QMatrix:
        return QMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def restrict(self, rows: Sequence[Point], cols: Sequence[Point] | None = None) -> QMatrix:
        cols = rows if cols is None else cols
        values = {}
        for x in rows:
            for y in cols:
                v = self.get(x, y)
                if not isinstance(v, int):
                    values[(tuple(x), tuple(y))] = v
        return QMatrix.from_points([tuple(x) for x in rows], [tuple(y) for y in cols], values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries

    def to_json(self) -> dict:
        return {
            "rows": [list(x) for x in self.rows],
            "cols": [list(y) for y in self.cols],
            "entries": [
                {"r": i, "c": j, "poly": self.entries[(i, j)].to_json()} for (i, j) in sorted(self.entries)
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> QMatrix:
        entries: dict[tuple[int, int], Scalar] = {}
        for item in data["entries"]:
            poly = item["poly"]
            value = TruncSeries.from_json(poly) if "cutoff" in poly else LaurentPoly.from_json(poly)
            entries[(int(item["r"]), int(item["c"]))] = value
        return cls(
            [tuple(x) for x in data["rows"]],
            [tuple(y) for y in data["cols"]],
            entries,
        )


def window_points(s: CubistSet, window: Box | Sequence[Point]) -> list[Point]:
    if isinstance(window, Box):
        return s.points_in_window(window)
    return sorted(tuple(p) for p in window)


# entry-level formulas ----------------------------------------------------


def du_row(s: CubistSet, x: Point) -> dict[Point, LaurentPoly]:
    """Row x of D_U: q^d(x, y) for y in the facet of x."""
    return {y: LaurentPoly.monomial(distance(x, y)) for y in facet_points(s.facet_of(x))}


def du_sources(s: CubistSet, x: Point) -> list[Point]:
    """All z in X whose facet contains x (the nonzero rows of column x of D_U)."""
    r = s.rank
    found = set()
    for i in range(1, r + 1):
        others = [j for j in range(1, r + 1) if j != i]
        for bits in itertools.product((0, 1), repeat=r - 1):
            z = list(x)
            for j, b in zip(others, bits):
                if b:
                    z[j - 1] += -1 if j < i else 1
            z = tuple(z)
            if s.contains(z) and s.facet_of(z).axis == i:
                found.add(z)
    return sorted(found)


def dv_entry(s: CubistSet, x: Point, y: Point) -> LaurentPoly:
    return LaurentPoly.monomial(distance(x, y)) if s.in_mu(x, y) else LaurentPoly()


def cu_brauer_row(s: CubistSet, x: Point) -> dict[Point, LaurentPoly]:
    """Row x of C_U as the sum over z with x, y both in the facet of z of q^(d(x,z) + d(y,z))."""
    acc: dict[Point, dict[int, int]] = {}
    for z in du_sources(s, x):
        dxz = distance(x, z)
        for y in facet_points(s.facet_of(z)):
            e = dxz + distance(y, z)
            terms = acc.setdefault(y, {})
            terms[e] = terms.get(e, 0) + 1
    return {y: LaurentPoly(t) for y, t in acc.items() if t}


def cu_local_row(s: CubistSet, x: Point) -> dict[Point, LaurentPoly]:
    """Row x of C_U from the unit-box sets: sum over z in I(x) and I(y) of q^(r-1)[r - d(z,x) - d(z,y)]."""
    r = s.rank
    acc: dict[Point, LaurentPoly] = {}
    for z in s.i_set(x):
        dzx = distance(z, x)
        for b in itertools.product((0, 1), repeat=r):
            y = tuple(c - e for c, e in zip(z, b))
            if not s.contains(y):
                continue
            term = _local_term(r, r - dzx - sum(b))
            acc[y] = acc[y] + term if y in acc else term
    return {y: v for y, v in acc.items() if not v.is_zero()}


@lru_cache(maxsize=None)
def _local_term(r: int, k: int) -> LaurentPoly:
    return quantum_integer(k).shift(r - 1)


def cv_entry(r: int, d: int, cutoff: int) -> TruncSeries:
    """(1 - q^2)^(1 - r) q^d modulo q^(cutoff + 1)."""
    if d > cutoff:
        return TruncSeries({}, cutoff)
    return geometric_power(r, cutoff).shift(d)


# windowed matrices ----------------------------------------------------------


def d_u(s: CubistSet, window: Box | Sequence[Point]) -> QMatrix:
    pts = window_points(s, window)
    inside = set(pts)
    values = {}
    for x in pts:
        for y, v in du_row(s, x).items():
            if y in inside:
                values[(x, y)] = v
    return QMatrix.from_points(pts, pts, values)


def d_v(s: CubistSet, window: Box | Sequence[Point]) -> QMatrix:
    pts = window_points(s, window)
    values = {}
    for x in pts:
        for y in pts:
            if s.in_mu(x, y):
                values[(x, y)] = LaurentPoly.monomial(distance(x, y))
    return QMatrix.from_points(pts, pts, values)


def _row_matrix(s: CubistSet, window, row_fn) -> QMatrix:
    pts = window_points(s, window)
    inside = set(pts)
    values = {}
    for x in pts:
        for y, v in row_fn(s, x).items():
            if y in inside:
                values[(x, y)] = v
    return QMatrix.from_points(pts, pts, values)


def c_u_brauer(s: CubistSet, window: Box | Sequence[Point]) -> QMatrix:
    return _row_matrix(s, window, cu_brauer_row)


def c_u_local(s: CubistSet, window: Box | Sequence[Point]) -> QMatrix:
    return _row_matrix(s, window, cu_local_row)


def c_v(s: CubistSet, window: Box | Sequence[Point], cutoff: int) -> QMatrix:
    pts = window_points(s, window)
    g = geometric_power(s.rank, cutoff)
    values = {}
    for x in pts:
        for y in pts:
            d = distance(x, y)
            if d <= cutoff:
                values[(x, y)] = g.shift(d)
    return QMatrix.from_points(pts, pts, values)


# batched integer machinery for the series checks ----------------------------
#
# Coefficients in these sums are tiny (bounded by binomials in r and the
# cutoff), so int64 arrays are exact here; _guard asserts it.


def _guard(arr: np.ndarray) -> np.ndarray:
    if arr.size and int(np.abs(arr).max()) > 2**52:
        raise OverflowError("coefficient growth exceeds the exact int64 range")
    return arr


def _cone_bounds(s: CubistSet, pts: Sequence[Point]) -> tuple[np.ndarray, np.ndarray]:
    """Per point y, bounds lo <= z <= hi describing the cone y + C_i."""
    big = 1 << 40
    n, r = len(pts), s.rank
    lo = np.full((n, r), -big, dtype=np.int64)
    hi = np.full((n, r), big, dtype=np.int64)
    for k, y in enumerate(pts):
        i = s.facet_of(y).axis
        for j in range(1, r + 1):
            if j < i:
                hi[k, j - 1] = y[j - 1]
            elif j > i:
                lo[k, j - 1] = y[j - 1]
    return lo, hi


def _in_cone_of(z: Point, axis: int, arr: np.ndarray) -> np.ndarray:
    """Mask of the rows y of arr lying in z + C_axis."""
    zv = np.asarray(z, dtype=np.int64)
    mask = np.ones(len(arr), dtype=bool)
    r = len(z)
    for j in range(1, r + 1):
        if j < axis:
            mask &= arr[:, j - 1] <= zv[j - 1]
        elif j > axis:
            mask &= arr[:, j - 1] >= zv[j - 1]
    return mask


def c_v_brauer_array(s: CubistSet, pts: Sequence[Point], cutoff: int) -> np.ndarray:
    """Coefficient array of D_V^T D_V on pts x pts, modulo q^(cutoff + 1)."""
    n = len(pts)
    acc = np.zeros((n, n, cutoff + 1), dtype=np.int64)
    if n == 0:
        return acc
    arr = np.asarray(pts, dtype=np.int64)
    region = Box.bounding(pts).inflate(cutoff)
    for z in s.points_in_window(region):
        zv = np.asarray(z, dtype=np.int64)
        d = np.abs(arr - zv).sum(axis=1)
        mask = _in_cone_of(z, s.facet_of(z).axis, arr) & (d <= cutoff)
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            continue
        dd = d[idx]
        tot = dd[:, None] + dd[None, :]
        keep = tot <= cutoff
        ii, jj = np.nonzero(keep)
        np.add.at(acc, (idx[ii], idx[jj], tot[ii, jj]), 1)
    return _guard(acc)


def c_v_brauer(s: CubistSet, window: Box | Sequence[Point], cutoff: int) -> QMatrix:
    pts = window_points(s, window)
    acc = c_v_brauer_array(s, pts, cutoff)
    entries = {}
    for i, j in zip(*np.nonzero(acc.any(axis=2))):
        entries[(int(i), int(j))] = TruncSeries(
            {e: int(c) for e, c in enumerate(acc[i, j]) if c}, cutoff
        )
    return QMatrix(pts, pts, entries)


def _series_array(poly_terms: Mapping[int, int], cutoff: int) -> np.ndarray:
    out = np.zeros(cutoff + 1, dtype=np.int64)
    for e, c in poly_terms.items():
        if e < 0:
            raise ValueError("negative exponent in a series check")
        if e <= cutoff:
            out[e] += c
    return out


def _mul_series_rows(rows: np.ndarray, series: np.ndarray) -> np.ndarray:
    """Multiply each row (a coefficient vector) by a fixed series, truncating."""
    n = rows.shape[-1]
    out = np.zeros_like(rows)
    for e in np.nonzero(series)[0]:
        out[..., e:] += series[e] * rows[..., : n - e]
    return out


def _weighted_distance_sum(
    sources: Sequence[Point],
    polys: Sequence[Mapping[int, int]],
    targets: np.ndarray,
    cutoff: int,
    alternate: bool,
) -> np.ndarray:
    """For every target y: sum over sources z of poly_z(q) * (+-q)^d(z, y), truncated."""
    n = len(targets)
    acc = np.zeros((n, cutoff + 1), dtype=np.int64)
    if not sources:
        return acc
    zs = np.asarray(sources, dtype=np.int64)
    dist = np.abs(zs[:, None, :] - targets[None, :, :]).sum(axis=2)
    sign = np.where(dist % 2 == 1, -1, 1) if alternate else np.ones_like(dist)
    for k, terms in enumerate(polys):
        for e, c in terms.items():
            tot = dist[k] + e
            ok = tot <= cutoff
            np.add.at(acc, (np.nonzero(ok)[0], tot[ok]), c * sign[k][ok])
    return acc


# the report --------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    evaluated: int = 0
    failures: list[dict] = field(default_factory=list)
    failure_count: int = 0
    note: str = ""

    MAX_LISTED = 25

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def fail(self, x: Point, y: Point, lhs: object, rhs: object) -> None:
        self.failure_count += 1
        if len(self.failures) < self.MAX_LISTED:
            self.failures.append({"x": list(x), "y": list(y), "lhs": str(lhs), "rhs": str(rhs)})

    def to_json(self) -> dict:
        out = {
            "passed": self.passed,
            "evaluated": self.evaluated,
            "failure_count": self.failure_count,
            "failures": self.failures,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class IdentityReport:
    rank: int
    window_size: int
    cutoff: int
    checks: dict[str, CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failing(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "window_size": self.window_size,
            "cutoff": self.cutoff,
            "passed": self.passed,
            "checks": {name: c.to_json() for name, c in self.checks.items()},
        }


CHECK_NAMES = (
    "du_facet_formula",
    "dv_cone_formula",
    "cu_local_equals_brauer",
    "cv_equals_dv_brauer",
    "cu_symmetric",
    "cv_symmetric",
    "du_dv_inverse",
    "cu_cv_inverse",
    "cu_bar_symmetry",
)


def _check_du(s: CubistSet, pts: list[Point]) -> CheckResult:
    res = CheckResult("du_facet_formula", note="facet of x by staircase rule vs unique facet inside X")
    for x in pts:
        res.evaluated += 1
        by_rule = du_row(s, x)
        other = s.facet_by_containment(x)
        by_containment = {y: LaurentPoly.monomial(distance(x, y)) for y in facet_points(other)}
        if by_rule != by_containment:
            res.fail(x, x, sorted(by_rule), sorted(by_containment))
    return res


def _check_dv(s: CubistSet, pts: list[Point]) -> CheckResult:
    res = CheckResult("dv_cone_formula", note="cone test vs cone generated from the containment facet")
    arr = np.asarray(pts, dtype=np.int64)
    for x in pts:
        axis = s.facet_by_containment(x).axis
        mask = _in_cone_of(x, axis, arr)
        for k, y in enumerate(pts):
            res.evaluated += 1
            if s.in_mu(x, y) != bool(mask[k]):
                res.fail(x, y, dv_entry(s, x, y), LaurentPoly.monomial(distance(x, y)) if mask[k] else 0)
    return res


def verify_identities(
    s: CubistSet, window: Box | Sequence[Point], cutoff: int, hexagon: bool | None = None
) -> IdentityReport:
    """Run the nine matrix identities (and the rank-3 hexagon identity) on a window."""
    r = s.rank
    if cutoff < 2 * r:
        raise ValueError(f"cutoff must be at least 2r = {2 * r}")
    pts = window_points(s, window)
    n = len(pts)
    index = {x: k for k, x in enumerate(pts)}
    arr = np.asarray(pts, dtype=np.int64).reshape(n, r)
    checks: dict[str, CheckResult] = {}

    checks["du_facet_formula"] = _check_du(s, pts)
    checks["dv_cone_formula"] = _check_dv(s, pts)

    local_rows = {x: cu_local_row(s, x) for x in pts}
    brauer_rows = {x: cu_brauer_row(s, x) for x in pts}

    res = CheckResult("cu_local_equals_brauer")
    zero = LaurentPoly()
    for x in pts:
        lr, br = local_rows[x], brauer_rows[x]
        res.evaluated += n
        for y in sorted(set(lr) | set(br)):
            a, b = lr.get(y, zero), br.get(y, zero)
            if a != b:
                res.fail(x, y, a, b)
    checks[res.name] = res

    g = _series_array(geometric_power(r, cutoff).terms, cutoff)
    brauer_v = c_v_brauer_array(s, pts, cutoff)
    res = CheckResult("cv_equals_dv_brauer", note="z ranges over X within L1 distance cutoff of the window")
    dist = np.abs(arr[:, None, :] - arr[None, :, :]).sum(axis=2) if n else np.zeros((0, 0), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            res.evaluated += 1
            expected = np.zeros(cutoff + 1, dtype=np.int64)
            d = int(dist[i, j])
            if d <= cutoff:
                expected[d:] = g[: cutoff + 1 - d]
            if not np.array_equal(brauer_v[i, j], expected):
                res.fail(pts[i], pts[j], _fmt_series(brauer_v[i, j], cutoff), _fmt_series(expected, cutoff))
    checks[res.name] = res

    res = CheckResult("cu_symmetric")
    for x in pts:
        for y, v in local_rows[x].items():
            res.evaluated += 1
            other = local_rows[y].get(x, zero) if y in index else cu_local_row(s, y).get(x, zero)
            if v != other:
                res.fail(x, y, v, other)
    checks[res.name] = res

    res = CheckResult("cv_symmetric", note="checked on the Brauer product D_V^T D_V")
    res.evaluated = n * n
    if n:
        bad = np.argwhere((brauer_v != brauer_v.transpose(1, 0, 2)).any(axis=2))
        for i, j in bad:
            res.fail(pts[i], pts[j], _fmt_series(brauer_v[i, j], cutoff), _fmt_series(brauer_v[j, i], cutoff))
    checks[res.name] = res

    checks["du_dv_inverse"] = _check_du_dv_inverse(s, pts, arr, transpose=False)
    checks["du_dv_inverse_transposed"] = _check_du_dv_inverse(s, pts, arr, transpose=True)

    res = CheckResult("cu_cv_inverse", note="z ranges over the support of row x of C_U (within 2r-2)")
    for i, x in enumerate(pts):
        row = local_rows[x]
        zs = list(row)
        acc = _weighted_distance_sum(zs, [row[z].terms for z in zs], arr, cutoff, alternate=True)
        prod = _mul_series_rows(acc, g)
        for j in range(n):
            res.evaluated += 1
            expected = np.zeros(cutoff + 1, dtype=np.int64)
            if i == j:
                expected[0] = 1
            if not np.array_equal(prod[j], expected):
                res.fail(x, pts[j], _fmt_series(prod[j], cutoff), _fmt_series(expected, cutoff))
    checks[res.name] = res

    res = CheckResult("cu_bar_symmetry")
    for x in pts:
        for y, v in local_rows[x].items():
            res.evaluated += 1
            if v.subs_inv() != v.shift(2 - 2 * r):
                res.fail(x, y, v.subs_inv(), v.shift(2 - 2 * r))
    checks[res.name] = res

    if hexagon is None:
        hexagon = r == 3
    if hexagon:
        checks["hexagon"] = _check_hexagon(s, pts, arr, cutoff)

    return IdentityReport(r, n, cutoff, checks)


def _fmt_series(coeffs: np.ndarray, cutoff: int) -> str:
    return str(TruncSeries({e: int(c) for e, c in enumerate(coeffs) if c}, cutoff))


def _check_du_dv_inverse(s: CubistSet, pts: list[Point], arr: np.ndarray, transpose: bool) -> CheckResult:
    """D_U(q) D_V(-q)^T = 1 (z over the facet of x), or D_U(q)^T D_V(-q) = 1 (z over sources of x)."""
    if transpose:
        res = CheckResult("du_dv_inverse_transposed", note="D_U(q)^T D_V(-q) = 1, z with x in the facet of z")
    else:
        res = CheckResult("du_dv_inverse", note="D_U(q) D_V(-q)^T = 1, z in the facet of x")
    n = len(pts)
    if n == 0:
        return res
    lo, hi = _cone_bounds(s, pts)
    for i, x in enumerate(pts):
        acc: dict[int, dict[int, int]] = {}
        zs = du_sources(s, x) if transpose else facet_points(s.facet_of(x))
        for z in zs:
            dxz = distance(x, z)
            if transpose:
                mask = _in_cone_of(z, s.facet_of(z).axis, arr)
            else:
                zv = np.asarray(z, dtype=np.int64)
                mask = ((lo <= zv) & (zv <= hi)).all(axis=1)
            for j in np.nonzero(mask)[0]:
                dyz = distance(pts[j], z)
                e = dxz + dyz
                sign = -1 if dyz % 2 else 1
                terms = acc.setdefault(int(j), {})
                terms[e] = terms.get(e, 0) + sign
        for j in range(n):
            res.evaluated += 1
            got = LaurentPoly(acc.get(j, {}))
            want = LaurentPoly.constant(1 if i == j else 0)
            if got != want:
                res.fail(x, pts[j], got, want)
    return res


def _check_hexagon(s: CubistSet, pts: list[Point], arr: np.ndarray, cutoff: int) -> CheckResult:
    """Dist(q) Loc(-q) = (1 - q^2)^2 I with Dist = q^d and Loc = C_U; z over the support of column y."""
    res = CheckResult("hexagon", note="Dist(q) Loc(-q) = (1-q^2)^2 I, z within 2r-2 of y")
    n = len(pts)
    target = _series_array({0: 1, 2: -2, 4: 1}, cutoff)
    for j, y in enumerate(pts):
        col = cu_brauer_row(s, y)
        zs = list(col)
        acc = _weighted_distance_sum(zs, [col[z].subs_neg().terms for z in zs], arr, cutoff, alternate=False)
        for i in range(n):
            res.evaluated += 1
            expected = target if i == j else np.zeros(cutoff + 1, dtype=np.int64)
            if not np.array_equal(acc[i], expected):
                res.fail(pts[i], y, _fmt_series(acc[i], cutoff), _fmt_series(expected, cutoff))
    return res
