"""Brute-force graded dimensions of quiver algebras with quadratic relations.

The oracle knows nothing about facets, cones or quantum integers.  It lists
every path of length n out of a vertex, spans the ideal by all products
(path) * (relation) * (path), and takes an exact integer rank.  Every path of
length n from x stays within L1 distance n of x, so the computation is finite
and complete.

A path is a tuple of signed axes: +i is the arrow x -> x + e_i (a or alpha),
-i is the arrow x -> x - e_i (b or beta).  Paths compose left to right.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .cubist import Box, CubistSet, Point, distance
from .laurent import geometric_power
from .qmatrix import cu_local_row

__all__ = [
    "Kind",
    "QuiverPresentation",
    "integer_rank",
    "graded_dims",
    "graded_dim",
    "expected_dim",
    "OracleReport",
    "oracle_check",
]

Step = int
Path = tuple[Step, ...]
Relation = dict[tuple[Step, Step], int]


class Kind(enum.Enum):
    U_OF_X = "u"
    V_OF_X = "v"
    V_FULL = "vfull"


def _move(x: Point, step: Step) -> Point:
    k = abs(step) - 1
    d = 1 if step > 0 else -1
    return x[:k] + (x[k] + d,) + x[k + 1:]


def _walk(x: Point, steps: Iterable[Step]) -> Point:
    for s in steps:
        x = _move(x, s)
    return x


@dataclass(frozen=True)
class QuiverPresentation:
    """Quiver with quadratic relations on the lattice.

    ``kind`` selects the algebra: U of a Cubist set, V of a Cubist set, or V on
    all of Z^r.  ``signs="rescaled"`` applies the sign rescaling of the arrows to
    the U relations.  The two narrowing switches drop part of the mixed
    relations (``mixed_lower_only``: mixed relations of V_r only for j <= i;
    ``mixed_offdiagonal_only``: mixed relations of V of X only for i != j).
    Both give the wrong dimensions; they are off by default and exist so the
    tests can show that the full index ranges are needed.
    """

    kind: Kind
    rank: int
    cubist: CubistSet | None = None
    signs: str = "standard"
    mixed_lower_only: bool = False
    mixed_offdiagonal_only: bool = False

    def __post_init__(self) -> None:
        if self.kind is Kind.V_FULL:
            if self.cubist is not None:
                raise ValueError("the full lattice presentation takes no Cubist set")
        else:
            if self.cubist is None:
                raise ValueError(f"{self.kind.value} presentation needs a Cubist set")
            if self.cubist.rank != self.rank:
                raise ValueError("rank mismatch between presentation and set")
        if self.signs not in ("standard", "rescaled"):
            raise ValueError(f"unknown sign convention {self.signs!r}")

    @classmethod
    def u_of(cls, s: CubistSet, signs: str = "standard") -> QuiverPresentation:
        return cls(Kind.U_OF_X, s.rank, s, signs=signs)

    @classmethod
    def v_of(cls, s: CubistSet, **kw) -> QuiverPresentation:
        return cls(Kind.V_OF_X, s.rank, s, **kw)

    @classmethod
    def v_full(cls, r: int, **kw) -> QuiverPresentation:
        return cls(Kind.V_FULL, r, None, **kw)

    def vertex_ok(self, x: Point) -> bool:
        if self.kind is Kind.V_FULL:
            return True
        return self.cubist.contains(x)  # type: ignore[union-attr]

    def relations_at(self, x: Point) -> list[Relation]:
        """Quadratic relations starting at x, with terms through missing vertices dropped."""
        if not self.vertex_ok(x):
            return []
        if self.kind is Kind.U_OF_X:
            raw = self._u_relations(x)
        elif self.kind is Kind.V_FULL:
            raw = self._v_full_relations()
        else:
            raw = self._v_of_x_relations(x)
        out = []
        for rel in raw:
            kept = {
                t: c
                for t, c in rel.items()
                if c and self.vertex_ok(_move(x, t[0])) and self.vertex_ok(_walk(x, t))
            }
            if kept:
                out.append(kept)
        return out

    # U_r ---------------------------------------------------------------

    def _arrow_sign(self, source: Point, step: Step) -> int:
        i = abs(step)
        upto = i if step > 0 else i - 1
        return -1 if sum(source[:upto]) % 2 else 1

    def _u_relations(self, x: Point) -> list[Relation]:
        r = self.rank
        rels: list[Relation] = []
        for i in range(1, r + 1):
            rels.append({(i, i): 1})
            rels.append({(-i, -i): 1})
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                rels.append({(i, j): 1, (j, i): 1})
                rels.append({(-i, -j): 1, (-j, -i): 1})
        for i in range(1, r + 1):
            for j in range(1, r + 1):
                if i != j:
                    rels.append({(i, -j): 1, (-j, i): 1})
        for i in range(1, r):
            rels.append({(-i, i): 1, (i, -i): 1, (-(i + 1), i + 1): -1, (i + 1, -(i + 1)): -1})
        if self.signs == "rescaled":
            rels = [
                {
                    t: c * self._arrow_sign(x, t[0]) * self._arrow_sign(_move(x, t[0]), t[1])
                    for t, c in rel.items()
                }
                for rel in rels
            ]
        return rels

    # V_r and V of X ---------------------------------------------------

    def _mixed_pairs(self) -> list[tuple[int, int]]:
        r = self.rank
        return [(i, j) for i in range(1, r + 1) for j in range(1, r + 1)]

    def _v_full_relations(self) -> list[Relation]:
        r = self.rank
        rels: list[Relation] = []
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                rels.append({(i, j): 1, (j, i): -1})
                rels.append({(-i, -j): 1, (-j, -i): -1})
        for i, j in self._mixed_pairs():
            if self.mixed_lower_only and j > i:
                continue
            if i == j:
                rels.append({(i, -i): 1, (-i, i): -1})
            else:
                rels.append({(i, -j): 1, (-j, i): -1})
        rels.append({(-i, i): 1 for i in range(1, r + 1)})
        return rels

    def _v_of_x_relations(self, x: Point) -> list[Relation]:
        r = self.rank
        ok = self.vertex_ok
        rels: list[Relation] = []
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                if all(ok(_walk(x, p)) for p in ((i,), (j,), (i, j))):
                    rels.append({(i, j): 1, (j, i): -1})
                if all(ok(_walk(x, p)) for p in ((-i,), (-j,), (-i, -j))):
                    rels.append({(-i, -j): 1, (-j, -i): -1})
        for i, j in self._mixed_pairs():
            if i == j and self.mixed_offdiagonal_only:
                continue
            if all(ok(_walk(x, p)) for p in ((i,), (-j,), (i, -j))):
                if i == j:
                    rels.append({(i, -i): 1, (-i, i): -1})
                else:
                    rels.append({(i, -j): 1, (-j, i): -1})
        if not self.cubist.is_flat(x):  # type: ignore[union-attr]
            milnor: Relation = {}
            for i in range(1, r + 1):
                if ok(_move(x, -i)):
                    milnor[(-i, i)] = 1
                else:
                    milnor[(i, -i)] = 1
            rels.append(milnor)
        return rels


# exact rank -----------------------------------------------------------


def integer_rank(rows: Iterable[dict[int, int]]) -> int:
    """Rank over Q of sparse integer rows, by fraction-free elimination.

    Each new row is reduced against stored pivot rows by cross-multiplication
    (a * row - b * pivot) and divided by the gcd of its entries, so every
    intermediate stays an integer vector and the result is exact.
    """
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        cur = {k: v for k, v in row.items() if v}
        while cur:
            lead = min(cur)
            piv = pivots.get(lead)
            if piv is None:
                g = 0
                for v in cur.values():
                    g = gcd(g, v)
                pivots[lead] = {k: v // g for k, v in cur.items()}
                break
            a, b = piv[lead], cur[lead]
            nxt = {k: a * v for k, v in cur.items()}
            for k, v in piv.items():
                nxt[k] = nxt.get(k, 0) - b * v
            cur = {k: v for k, v in nxt.items() if v}
            if cur:
                g = 0
                for v in cur.values():
                    g = gcd(g, v)
                if g > 1:
                    cur = {k: v // g for k, v in cur.items()}
    return len(pivots)


# path enumeration ------------------------------------------------------


def _paths_from(pres: QuiverPresentation, x: Point, n: int, cache: dict, ok=None) -> list[tuple[Path, Point]]:
    key = (x, n)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if n == 0:
        out = [((), x)]
    else:
        out = []
        steps = [s for i in range(1, pres.rank + 1) for s in (i, -i)]
        ok = pres.vertex_ok if ok is None else ok
        for path, end in _paths_from(pres, x, n - 1, cache, ok):
            for s in steps:
                nxt = _move(end, s)
                if ok(nxt):
                    out.append((path + (s,), nxt))
    cache[key] = out
    return out


def graded_dims(pres: QuiverPresentation, x: Point, n: int, radius: int | None = None) -> dict[Point, int]:
    """dim of the degree-n part of e_x A e_y for every y reached by a path, as a dict.

    ``radius`` restricts the enumeration to vertices within that L1 distance
    of x; relation terms that leave the region are dropped.  Any radius >= n
    gives the exact answer, which the tests use as a stability check.
    """
    x = tuple(x)
    if len(x) != pres.rank:
        raise ValueError("rank mismatch")
    if not pres.vertex_ok(x):
        raise ValueError(f"{x} is not a vertex of the quiver")
    if radius is None:
        ok = pres.vertex_ok
    else:
        def ok(v: Point) -> bool:
            return distance(x, v) <= radius and pres.vertex_ok(v)
    cache: dict = {}
    paths = _paths_from(pres, x, n, cache, ok)
    columns: dict[Point, dict[Path, int]] = {}
    for path, end in paths:
        col = columns.setdefault(end, {})
        col[path] = len(col)
    generators: dict[Point, list[dict[int, int]]] = {y: [] for y in columns}
    rel_cache: dict[Point, list[Relation]] = {}
    for k in range(0, n - 1):
        for prefix, v in _paths_from(pres, x, k, cache, ok):
            rels = rel_cache.get(v)
            if rels is None:
                rels = rel_cache[v] = pres.relations_at(v)
            for rel in rels:
                some = next(iter(rel))
                w = _walk(v, some)
                if not ok(w):
                    continue
                for suffix, y in _paths_from(pres, w, n - k - 2, cache, ok):
                    col = columns.get(y)
                    if col is None:
                        continue
                    vec: dict[int, int] = {}
                    for t, c in rel.items():
                        idx = col.get(prefix + t + suffix)
                        if idx is not None:
                            vec[idx] = vec.get(idx, 0) + c
                    generators[y].append(vec)
    return {y: len(columns[y]) - integer_rank(generators[y]) for y in sorted(columns)}


def graded_dim(pres: QuiverPresentation, x: Point, y: Point, n: int, radius: int | None = None) -> int:
    """dim of the span of length-n paths from x to y modulo the relation ideal."""
    if n < 0:
        return 0
    return graded_dims(pres, x, n, radius).get(tuple(y), 0)


def expected_dim(pres: QuiverPresentation, x: Point, y: Point, n: int, cu_rows: dict | None = None) -> int:
    """Coefficient of q^n in the closed-form Cartan entry (C_U for U, (1-q^2)^(1-r) q^d for V)."""
    if pres.kind is Kind.U_OF_X:
        s = pres.cubist
        rows = {} if cu_rows is None else cu_rows
        row = rows.get(x)
        if row is None:
            row = rows[x] = cu_local_row(s, x)  # type: ignore[arg-type]
        poly = row.get(tuple(y))
        return 0 if poly is None else poly.coefficient(n)
    d = distance(x, y)
    if n < d:
        return 0
    return geometric_power(pres.rank, n).coefficient(n - d)


@dataclass
class OracleReport:
    kind: str
    max_degree: int
    compared: int = 0
    mismatches: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "max_degree": self.max_degree,
            "compared": self.compared,
            "mismatch_count": len(self.mismatches),
            "passed": self.passed,
            "mismatches": self.mismatches,
        }


def oracle_check(pres: QuiverPresentation, window: Box | Sequence[Point], max_degree: int) -> OracleReport:
    """Compare brute-force dimensions with the closed forms for every window source and degree.

    Every endpoint reached from a window point is compared, together with every
    window point (where unreached endpoints must have expected dimension 0).
    """
    if isinstance(window, Box):
        if pres.kind is Kind.V_FULL:
            pts = sorted(window.points())
        else:
            pts = pres.cubist.points_in_window(window)  # type: ignore[union-attr]
    else:
        pts = sorted(tuple(p) for p in window)
    report = OracleReport(pres.kind.value, max_degree)
    cu_rows: dict = {}
    for x in pts:
        for n in range(max_degree + 1):
            dims = graded_dims(pres, x, n)
            targets = sorted(set(dims) | set(pts))
            for y in targets:
                report.compared += 1
                got = dims.get(y, 0)
                want = expected_dim(pres, x, y, n, cu_rows)
                if got != want:
                    report.mismatches.append(
                        {"x": list(x), "y": list(y), "degree": n, "expected": want, "actual": got}
                    )
    return report
