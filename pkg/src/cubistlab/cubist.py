"""Cubist subsets of Z^r described by a base ideal and a finite removal list.

A Cubist subset is X = I \\ I[-1] where I is a nonempty proper order ideal of
(Z^r, <=) and x[m] = x + m(1, ..., 1).  Here I is a base ideal (a half-space,
a negative orthant, or the weight-2 block ideal in rank 3) with finitely many
maximal boxes taken away in a fixed order.  Membership is therefore exact at
every point of Z^r, and every local construction (the vertex/facet bijection,
the cones, the unit-box sets, the partial order) is computed on demand.

Points are plain tuples of ints.  Axes are numbered 1..r in the public API.
"""

from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Protocol, Sequence

Point = tuple[int, ...]

__all__ = [
    "Point",
    "shift",
    "distance",
    "unit",
    "Box",
    "Flat",
    "Corner",
    "Weight2",
    "SliceIdeal",
    "Facet",
    "facet_points",
    "Validation",
    "OrderAnswer",
    "CubistSet",
    "richards_closed",
]


def shift(x: Sequence[int], m: int = 1) -> Point:
    """x[m] = x + m(1, ..., 1)."""
    return tuple(c + m for c in x)


def distance(x: Sequence[int], y: Sequence[int]) -> int:
    """L1 distance; on a Cubist subset it coincides with the path metric."""
    if len(x) != len(y):
        raise ValueError(f"rank mismatch: {len(x)} vs {len(y)}")
    return sum(abs(a - b) for a, b in zip(x, y))


def unit(r: int, axis: int) -> Point:
    """The standard basis vector for a 1-based axis."""
    return tuple(1 if k == axis - 1 else 0 for k in range(r))


def _add(x: Sequence[int], y: Sequence[int]) -> Point:
    return tuple(a + b for a, b in zip(x, y))


@dataclass(frozen=True)
class Box:
    """A finite L-infinity box lo <= x <= hi (inclusive)."""

    lo: Point
    hi: Point

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi):
            raise ValueError("box corners have different ranks")

    @classmethod
    def around(cls, center: Sequence[int], radius: int) -> Box:
        return cls(tuple(c - radius for c in center), tuple(c + radius for c in center))

    @classmethod
    def cube(cls, r: int, radius: int) -> Box:
        return cls.around((0,) * r, radius)

    @classmethod
    def bounding(cls, points: Iterable[Sequence[int]]) -> Box:
        pts = [tuple(p) for p in points]
        if not pts:
            raise ValueError("bounding box of no points")
        cols = list(zip(*pts))
        return cls(tuple(min(c) for c in cols), tuple(max(c) for c in cols))

    @property
    def rank(self) -> int:
        return len(self.lo)

    def is_empty(self) -> bool:
        return any(a > b for a, b in zip(self.lo, self.hi))

    def __contains__(self, x: object) -> bool:
        return all(a <= c <= b for a, c, b in zip(self.lo, x, self.hi))  # type: ignore[arg-type]

    def inflate(self, k: int) -> Box:
        return Box(tuple(a - k for a in self.lo), tuple(b + k for b in self.hi))

    def points(self) -> Iterator[Point]:
        if self.is_empty():
            return iter(())
        return itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))

    def label(self) -> str:
        lo = ",".join(map(str, self.lo))
        hi = ",".join(map(str, self.hi))
        return f"{lo}_{hi}"


class BaseIdeal(Protocol):
    def contains(self, y: Point) -> bool: ...

    def line_top(self, w: Point) -> int: ...

    def to_json(self) -> dict: ...


def _search_line_top(contains, w: Point) -> int:
    """Largest t with w + t(1,...,1) in an ideal, by exponential then binary search."""
    lo, hi = -1, 1
    while not contains(shift(w, lo)):
        lo *= 2
    while contains(shift(w, hi)):
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if contains(shift(w, mid)):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class Flat:
    """The half-space ideal {x : x_axis <= level}."""

    axis: int
    level: int = 0

    def contains(self, y: Point) -> bool:
        return y[self.axis - 1] <= self.level

    def line_top(self, w: Point) -> int:
        return self.level - w[self.axis - 1]

    def to_json(self) -> dict:
        return {"kind": "flat", "axis": self.axis, "level": self.level}


@dataclass(frozen=True)
class Corner:
    """The translated negative orthant anchor + Z^r_{<=0}."""

    anchor: Point

    def contains(self, y: Point) -> bool:
        return all(a >= c for a, c in zip(self.anchor, y))

    def line_top(self, w: Point) -> int:
        return min(a - c for a, c in zip(self.anchor, w))

    def to_json(self) -> dict:
        return {"kind": "corner", "anchor": list(self.anchor)}


def richards_closed(pairs: Iterable[tuple[int, int]]) -> bool:
    """(u, v) in the set and u < w < v imply (u, w) and (w, v) are in the set."""
    pset = set(pairs)
    for u, v in pset:
        for w in range(u + 1, v):
            if (u, w) not in pset or (w, v) not in pset:
                return False
    return True


@dataclass(frozen=True)
class Weight2:
    """The rank-3 ideal attached to a weight-2 block with the given pyramid.

    It consists of Z x Z x Z_{<=0} together with the points (i, j, 1) such that
    i + j <= 1 or (-i, j - 1) lies in the pyramid.
    """

    p: int
    pyramid: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        pyr = frozenset((int(u), int(v)) for u, v in self.pyramid)
        object.__setattr__(self, "pyramid", pyr)
        for u, v in pyr:
            if not 0 <= u < v <= self.p - 1:
                raise ValueError(f"pyramid pair {(u, v)} out of range for p={self.p}")
        if not richards_closed(pyr):
            raise ValueError("pyramid is not closed under the Richards condition")

    def contains(self, y: Point) -> bool:
        a, b, c = y
        if c <= 0:
            return True
        if c == 1:
            return a + b <= 1 or (-a, b - 1) in self.pyramid
        return False

    def line_top(self, w: Point) -> int:
        t = 1 - w[2]
        return t if self.contains(shift(w, t)) else t - 1

    def to_json(self) -> dict:
        return {"kind": "weight2", "p": self.p, "pyramid": sorted([list(e) for e in self.pyramid])}


@dataclass(frozen=True)
class SliceIdeal:
    """The ideal {x in Z^(r-1) : (x, level) in parent ideal} of a rank-r set."""

    parent: "CubistSet"
    level: int

    def contains(self, y: Point) -> bool:
        return self.parent.contains_ideal(tuple(y) + (self.level,))

    def line_top(self, w: Point) -> int:
        return _search_line_top(self.contains, w)

    def to_json(self) -> dict:
        raise TypeError("slice ideals are derived objects and are not serialised")


def base_from_json(data: dict) -> BaseIdeal:
    kind = data.get("kind")
    if kind == "flat":
        return Flat(int(data["axis"]), int(data.get("level", 0)))
    if kind == "corner":
        return Corner(tuple(int(c) for c in data["anchor"]))
    if kind == "weight2":
        return Weight2(int(data["p"]), frozenset(tuple(map(int, e)) for e in data.get("pyramid", [])))
    raise ValueError(f"unknown base ideal kind: {kind!r}")


def _identity(r: int) -> tuple[int, ...]:
    return tuple(range(1, r + 1))


@dataclass(frozen=True)
class Facet:
    """The (r-1)-cube anchor + F_axis.

    With the axis order ``order`` (a permutation of 1..r, identity by default),
    its points are anchor + sum(a_j e_j for j before axis) - sum(a_j e_j for j
    after axis) with every a_j in {0, 1}.
    """

    anchor: Point
    axis: int
    order: tuple[int, ...] | None = None

    def axis_order(self) -> tuple[int, ...]:
        return self.order if self.order is not None else _identity(len(self.anchor))

    def points(self) -> list[Point]:
        return facet_points(self)


def facet_points(f: Facet, r: int | None = None) -> list[Point]:
    """The 2^(r-1) points of a facet, in lexicographic order of the a-vector."""
    rank = len(f.anchor) if r is None else r
    if len(f.anchor) != rank:
        raise ValueError("facet anchor does not match the rank")
    if not 1 <= f.axis <= rank:
        raise ValueError(f"axis {f.axis} out of range 1..{rank}")
    order = f.axis_order()
    pos = order.index(f.axis)
    signed = [(ax, 1) for ax in order[:pos]] + [(ax, -1) for ax in order[pos + 1:]]
    signed.sort()
    out = []
    for a in itertools.product((0, 1), repeat=rank - 1):
        pt = list(f.anchor)
        for (ax, sign), bit in zip(signed, a):
            pt[ax - 1] += sign * bit
        out.append(tuple(pt))
    return out


@dataclass(frozen=True)
class Validation:
    ok: bool
    index: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class OrderAnswer(enum.Enum):
    """Outcome of a bounded reachability search for x >= y."""

    GEQ = "geq"
    NOT_FOUND = "not-found-within-box"

    def __bool__(self) -> bool:
        return self is OrderAnswer.GEQ


@dataclass(frozen=True)
class CubistSet:
    """X = I \\ I[-1] for I = base minus the listed removals."""

    rank: int
    base: BaseIdeal
    removals: tuple[Point, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ValueError("rank must be at least 1")
        rem = tuple(tuple(int(c) for c in y) for y in self.removals)
        object.__setattr__(self, "removals", rem)
        object.__setattr__(self, "_removed", frozenset(rem))
        object.__setattr__(self, "_member", {})
        object.__setattr__(self, "_facets", {})
        for y in rem:
            if len(y) != self.rank:
                raise ValueError(f"removal {y} does not have rank {self.rank}")
        base = self.base
        if isinstance(base, Flat) and not 1 <= base.axis <= self.rank:
            raise ValueError(f"flat axis {base.axis} out of range 1..{self.rank}")
        if isinstance(base, Corner) and len(base.anchor) != self.rank:
            raise ValueError("corner anchor does not match the rank")
        if isinstance(base, Weight2) and self.rank != 3:
            raise ValueError("weight-2 block ideals live in rank 3")
        if isinstance(base, SliceIdeal) and base.parent.rank != self.rank + 1:
            raise ValueError("slice ideal must come from a set of rank r + 1")

    # membership -------------------------------------------------------

    def _check(self, y: Sequence[int]) -> Point:
        if len(y) != self.rank:
            raise ValueError(f"rank mismatch: point {tuple(y)} in a rank-{self.rank} set")
        return tuple(y)

    def contains_ideal(self, y: Sequence[int]) -> bool:
        y = self._check(y)
        return self.base.contains(y) and y not in self._removed  # type: ignore[attr-defined]

    def contains(self, y: Sequence[int]) -> bool:
        y = self._check(y)
        cache = self._member  # type: ignore[attr-defined]
        hit = cache.get(y)
        if hit is None:
            hit = self.contains_ideal(y) and not self.contains_ideal(shift(y, 1))
            cache[y] = hit
        return hit

    __contains__ = contains

    def _require(self, x: Sequence[int]) -> Point:
        x = self._check(x)
        if not self.contains(x):
            raise ValueError(f"{x} is not in the set")
        return x

    def fiber_point(self, w: Sequence[int]) -> Point:
        """The unique point of X on the line w + Z(1, ..., 1)."""
        w = self._check(w)
        t = self.base.line_top(w)
        while shift(w, t) in self._removed:  # type: ignore[attr-defined]
            t -= 1
        return shift(w, t)

    def validate(self) -> Validation:
        """Check that each removal is maximal in the ideal left by the earlier ones."""
        if self.removals and isinstance(self.base, Flat):
            return Validation(False, 0, "a half-space ideal has no maximal elements")
        removed: set[Point] = set()

        def inside(y: Point) -> bool:
            return self.base.contains(y) and y not in removed

        for k, y in enumerate(self.removals):
            if not inside(y):
                return Validation(False, k, f"{y} is not in the current ideal")
            for i in range(1, self.rank + 1):
                up = _add(y, unit(self.rank, i))
                if inside(up):
                    return Validation(False, k, f"{y} is not maximal: {up} is still in the ideal")
            removed.add(y)
        return Validation(True)

    def with_removal(self, z: Sequence[int]) -> CubistSet:
        return CubistSet(self.rank, self.base, self.removals + (tuple(z),))

    def points_in_window(self, box: Box) -> list[Point]:
        """All points of X inside the box, in lexicographic order."""
        if box.rank != self.rank:
            raise ValueError("box rank does not match the set")
        if box.is_empty():
            return []
        r = self.rank
        lo_r, hi_r = box.lo[-1], box.hi[-1]
        ranges = [range(box.lo[k] - hi_r, box.hi[k] - lo_r + 1) for k in range(r - 1)]
        found = []
        for head in itertools.product(*ranges):
            x = self.fiber_point(head + (0,))
            if x in box:
                found.append(x)
        found.sort()
        return found

    # vertex / facet combinatorics ----------------------------------

    def _order(self, order: Sequence[int] | None) -> tuple[int, ...]:
        if order is None:
            return _identity(self.rank)
        order = tuple(order)
        if sorted(order) != list(_identity(self.rank)):
            raise ValueError(f"{order} is not a permutation of 1..{self.rank}")
        return order

    def facet_of(self, x: Sequence[int], order: Sequence[int] | None = None) -> Facet:
        """The facet attached to a vertex: x + F_i with i the last axis reachable by the staircase.

        With axis order (s_1, ..., s_r) the axis is s_k for the largest k such
        that x + e_{s_1} + ... + e_{s_{k-1}} lies in X.
        """
        x = self._require(x)
        if order is None:
            cached = self._facets.get(x)  # type: ignore[attr-defined]
            if cached is not None:
                return cached
        perm = self._order(order)
        pos = 0
        walk = list(x)
        for k in range(1, self.rank):
            walk[perm[k - 1] - 1] += 1
            if self.contains(tuple(walk)):
                pos = k
        f = Facet(x, perm[pos], None if order is None else perm)
        if order is None:
            self._facets[x] = f  # type: ignore[attr-defined]
        return f

    def facet_by_containment(self, x: Sequence[int], order: Sequence[int] | None = None) -> Facet:
        """The same facet, found as the unique axis i with x + F_i inside X."""
        x = self._require(x)
        perm = self._order(order)
        hits = [
            ax
            for ax in perm
            if all(self.contains(p) for p in facet_points(Facet(x, ax, perm)))
        ]
        if len(hits) != 1:
            raise AssertionError(f"expected exactly one facet anchored at {x}, found axes {hits}")
        return Facet(x, hits[0], None if order is None else perm)

    def in_mu(self, base: Sequence[int], y: Sequence[int], order: Sequence[int] | None = None) -> bool:
        """Whether y lies in the cone base + C_i opposite the facet of base."""
        base = self._require(base)
        y = self._check(y)
        f = self.facet_of(base, order)
        perm = f.axis_order()
        pos = perm.index(f.axis)
        for ax in perm[:pos]:
            if y[ax - 1] > base[ax - 1]:
                return False
        for ax in perm[pos + 1:]:
            if y[ax - 1] < base[ax - 1]:
                return False
        return True

    def flat_axis(self, x: Sequence[int]) -> int | None:
        """Least axis i with x + e_i and x - e_i both outside X, or None if x is crooked."""
        x = self._require(x)
        for i in range(1, self.rank + 1):
            e = unit(self.rank, i)
            if not self.contains(_add(x, e)) and not self.contains(tuple(a - b for a, b in zip(x, e))):
                return i
        return None

    def is_flat(self, x: Sequence[int]) -> bool:
        return self.flat_axis(x) is not None

    def i_set(self, x: Sequence[int]) -> list[Point]:
        """Points of X in the unit box [x, x[1]], lexicographically ordered."""
        x = self._require(x)
        return [
            p
            for p in (_add(x, b) for b in itertools.product((0, 1), repeat=self.rank))
            if self.contains(p)
        ]

    def facets_containing(self, x: Sequence[int]) -> list[Facet]:
        """Every facet inside X passing through x.

        A facet through x is fixed by its normal axis i and the set S of other
        axes along which x sits at the low end; it lies in X exactly when
        x + sum_{S} e_j is in X and x + sum_{S and i} e_j is not.
        """
        x = self._require(x)
        r = self.rank
        found = []
        for i in range(1, r + 1):
            others = [j for j in range(1, r + 1) if j != i]
            for bits in itertools.product((0, 1), repeat=r - 1):
                s = {j for j, b in zip(others, bits) if b}
                top = list(x)
                for j in s:
                    top[j - 1] += 1
                if not self.contains(tuple(top)):
                    continue
                top[i - 1] += 1
                if self.contains(tuple(top)):
                    continue
                anchor = list(x)
                for j in others:
                    if j < i and j not in s:
                        anchor[j - 1] -= 1
                    elif j > i and j in s:
                        anchor[j - 1] += 1
                found.append(Facet(tuple(anchor), i))
        found.sort(key=lambda f: (f.axis, f.anchor))
        return found

    def opposite(self, x: Sequence[int], order: Sequence[int] | None = None) -> Point:
        """The vertex of the facet of x diagonally opposite to x."""
        f = self.facet_of(x, order)
        perm = f.axis_order()
        pos = perm.index(f.axis)
        out = list(f.anchor)
        for ax in perm[:pos]:
            out[ax - 1] += 1
        for ax in perm[pos + 1:]:
            out[ax - 1] -= 1
        return tuple(out)

    def default_search_box(self, x: Sequence[int], y: Sequence[int]) -> Box:
        return Box.bounding([x, y]).inflate(2 * self.rank * (distance(x, y) + 1))

    def order_geq(
        self,
        x: Sequence[int],
        y: Sequence[int],
        box: Box | None = None,
        order: Sequence[int] | None = None,
    ) -> OrderAnswer:
        """Search for a chain x = x0, x1, ..., y with each step inside the facet of the previous point.

        A GEQ answer is definitive; NOT_FOUND only means no chain stays inside the box.
        Along any chain the first axis of the order never decreases and the
        last never increases, so points that break those bounds are pruned.
        """
        x = self._require(x)
        y = self._require(y)
        if x == y:
            return OrderAnswer.GEQ
        if box is None:
            box = self.default_search_box(x, y)
        perm = self._order(order)
        first, last = perm[0] - 1, perm[-1] - 1
        if x[first] > y[first] or x[last] < y[last]:
            return OrderAnswer.NOT_FOUND
        seen = {x}
        heap = [(distance(x, y), x)]
        while heap:
            _, u = heapq.heappop(heap)
            for v in facet_points(self.facet_of(u, order)):
                if v == y:
                    return OrderAnswer.GEQ
                if v not in seen and v in box and v[first] <= y[first] and v[last] >= y[last]:
                    seen.add(v)
                    heapq.heappush(heap, (distance(v, y), v))
        return OrderAnswer.NOT_FOUND

    def slice_at(self, level: int) -> CubistSet:
        """The rank r-1 set cut out by the last coordinate fixed at ``level``."""
        if self.rank < 2:
            raise ValueError("cannot slice a rank-1 set")
        return CubistSet(self.rank - 1, SliceIdeal(self, level))

    # serialisation ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "base": self.base.to_json(),
            "removals": [list(y) for y in self.removals],
        }

    @classmethod
    def from_json(cls, data: dict) -> CubistSet:
        return cls(
            int(data["rank"]),
            base_from_json(data["base"]),
            tuple(tuple(int(c) for c in y) for y in data.get("removals", [])),
        )
