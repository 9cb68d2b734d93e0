"""Weight-2 block combinatorics on James's abacus.

Partitions are placed on a p-runner abacus, pushed up to their p-core, and
weight-2 blocks are described by the first empty position on each runner.
From those positions come the pyramid, the parametrisation of simple modules
by pairs (u, v), Scopes pairs of blocks, and the rank-3 Cubist set X_B.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .cubist import Box, CubistSet, Point, Weight2, richards_closed
from .laurent import LaurentPoly, q
from .qmatrix import QMatrix, cu_local_row

__all__ = [
    "Partition",
    "Abacus",
    "abacus_from_partition",
    "partition_from_abacus",
    "core_and_weight",
    "gaps",
    "default_bead_count",
    "BlockDescriptor",
    "Pair",
    "Single",
    "Double",
    "Label",
    "parse_label",
    "shorthand_to_partition",
    "lambda_b",
    "lambda_b_table",
    "ScopesPair",
    "scopes_pairs",
    "scopes_partner",
    "phi",
    "x_b",
    "in_x_b",
    "cubist_from_block",
    "block_truncated_cartan",
    "rouquier_cartan_entry",
    "sheet_zero_points",
]


# partitions and the abacus ---------------------------------------------------


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(x) for x in self.parts if int(x) != 0)
        if any(x < 0 for x in parts):
            raise ValueError("partition parts must be positive")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> Partition:
        text = text.strip().strip("()")
        if not text:
            return cls(())
        return cls(tuple(int(t) for t in text.split(",")))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def is_regular(self, p: int) -> bool:
        """No part value occurs p or more times."""
        return all(len(list(g)) < p for _, g in itertools.groupby(self.parts))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Abacus:
    p: int
    beads: frozenset

    def __post_init__(self) -> None:
        beads = frozenset(int(b) for b in self.beads)
        if any(b < 0 for b in beads):
            raise ValueError("bead positions must be nonnegative")
        object.__setattr__(self, "beads", beads)

    @property
    def n_beads(self) -> int:
        return len(self.beads)

    def runner_counts(self) -> list[int]:
        counts = [0] * self.p
        for b in self.beads:
            counts[b % self.p] += 1
        return counts

    def move(self, src: int, dst: int) -> Abacus:
        if src not in self.beads:
            raise ValueError(f"no bead at position {src}")
        if dst in self.beads or dst < 0:
            raise ValueError(f"position {dst} is not free")
        return Abacus(self.p, (self.beads - {src}) | {dst})


def default_bead_count(parts: int, p: int) -> int:
    """Smallest positive multiple of p that is at least the number of parts."""
    return max(1, -(-parts // p)) * p


def abacus_from_partition(lam: Partition, n_beads: int, p: int) -> Abacus:
    """Beads at lam_i + N - i for i = 1..N, missing parts read as 0."""
    if n_beads < len(lam):
        raise ValueError(f"{n_beads} beads cannot display a partition with {len(lam)} parts")
    parts = list(lam.parts) + [0] * (n_beads - len(lam))
    return Abacus(p, frozenset(parts[i] + n_beads - 1 - i for i in range(n_beads)))


def partition_from_abacus(a: Abacus) -> Partition:
    beads = sorted(a.beads, reverse=True)
    n = len(beads)
    return Partition(tuple(b - (n - 1 - i) for i, b in enumerate(beads)))


def core_and_weight(a: Abacus) -> tuple[Partition, int]:
    """Push every bead up its runner; the weight counts the single-step moves."""
    p = a.p
    weight = 0
    pushed = set()
    for k in range(p):
        on_runner = sorted(b for b in a.beads if b % p == k)
        for rank, b in enumerate(on_runner):
            weight += (b - k) // p - rank
            pushed.add(k + rank * p)
    return partition_from_abacus(Abacus(p, frozenset(pushed))), weight


def gaps(a: Abacus) -> tuple[int, ...]:
    """First unoccupied position on each runner of a core abacus, sorted."""
    _, w = core_and_weight(a)
    if w:
        raise ValueError(f"abacus is not a core (weight {w})")
    return tuple(sorted(k + c * a.p for k, c in enumerate(a.runner_counts())))


# shorthand labels ------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Pair:
    """<u,v> with u != v: beads at q_u - p and q_v - p each move down one step."""

    u: int
    v: int

    def __post_init__(self) -> None:
        if self.u == self.v:
            raise ValueError("a pair label needs distinct indices; use Double")
        if self.u > self.v:
            a, b = self.v, self.u
            object.__setattr__(self, "u", a)
            object.__setattr__(self, "v", b)

    def __str__(self) -> str:
        return f"<{self.u},{self.v}>"


@dataclass(frozen=True, order=True)
class Single:
    """<u>: the bead at q_u - p moves down two steps."""

    u: int

    def __str__(self) -> str:
        return f"<{self.u}>"


@dataclass(frozen=True, order=True)
class Double:
    """<u,u>: beads at q_u - 2p and q_u - p each move down one step."""

    u: int

    def __str__(self) -> str:
        return f"<{self.u},{self.u}>"


Label = Union[Pair, Single, Double]


def parse_label(text: str) -> Label:
    body = text.strip().strip("<>")
    nums = [int(t) for t in body.split(",")]
    if len(nums) == 1:
        return Single(nums[0])
    if len(nums) == 2:
        return Double(nums[0]) if nums[0] == nums[1] else Pair(nums[0], nums[1])
    raise ValueError(f"cannot parse label {text!r}")


# blocks -----------------------------------------------------------------------


@dataclass(frozen=True)
class BlockDescriptor:
    """A weight-2 block, described by its p-core and a bead count N."""

    p: int
    core: Partition
    n_beads: int

    def __post_init__(self) -> None:
        if self.p < 3 or any(self.p % d == 0 for d in range(2, int(self.p**0.5) + 1)):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        _, w = core_and_weight(abacus_from_partition(self.core, self.n_beads, self.p))
        if w:
            raise ValueError(f"{self.core} is not a {self.p}-core (weight {w})")
        if not richards_closed(self.pyramid):
            raise AssertionError("pyramid of a genuine core violates the Richards closure")

    @classmethod
    def from_core(cls, p: int, core: Partition | Sequence[int], n_beads: int | None = None) -> BlockDescriptor:
        core = core if isinstance(core, Partition) else Partition(tuple(core))
        if n_beads is None:
            n_beads = default_bead_count(len(core), p)
        return cls(p, core, n_beads)

    @classmethod
    def from_gaps(cls, p: int, qs: Sequence[int]) -> BlockDescriptor:
        qs = [int(x) for x in qs]
        if len(qs) != p or sorted(x % p for x in qs) != list(range(p)) or min(qs) < 0:
            raise ValueError("a gap vector needs p nonnegative values, one per residue class")
        beads = frozenset(b for x in qs for b in range(x % p, x, p))
        a = Abacus(p, beads)
        return cls(p, partition_from_abacus(a), a.n_beads)

    def abacus(self, extra_rows: int = 0) -> Abacus:
        return abacus_from_partition(self.core, self.n_beads + extra_rows * self.p, self.p)

    @property
    def qs(self) -> tuple[int, ...]:
        return gaps(self.abacus())

    @property
    def pyramid(self) -> frozenset:
        qs = self.qs
        return frozenset((u, v) for u, v in itertools.combinations(range(self.p), 2) if qs[v] - qs[u] < self.p)

    @property
    def sset(self) -> frozenset:
        return self.pyramid | {(u, u) for u in range(1, self.p)}

    @property
    def calS(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.p) for v in range(u, self.p) if (u, v) != (0, 0)]

    @property
    def calP(self) -> list[tuple[int, int]]:
        return list(itertools.combinations(range(self.p), 2))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "core": list(self.core.parts),
            "N": self.n_beads,
            "beads": sorted(self.abacus().beads),
            "q": list(self.qs),
            "pyramid": [list(e) for e in sorted(self.pyramid)],
            "sset": [list(e) for e in sorted(self.sset)],
        }


def shorthand_to_partition(label: Label, b: BlockDescriptor) -> Partition:
    """Apply the bead moves named by the label to the core abacus.

    Two extra rows of beads are added so that q_u - 2p is always a position;
    the partition read off does not depend on the bead count.
    """
    p = b.p
    a = b.abacus(extra_rows=2)
    qs = gaps(a)
    if isinstance(label, Pair):
        moves = [(qs[label.u] - p, qs[label.u]), (qs[label.v] - p, qs[label.v])]
    elif isinstance(label, Single):
        moves = [(qs[label.u] - p, qs[label.u] + p)]
    elif isinstance(label, Double):
        moves = [(qs[label.u] - p, qs[label.u]), (qs[label.u] - 2 * p, qs[label.u] - p)]
    else:
        raise TypeError(f"not a shorthand label: {label!r}")
    for src, dst in moves:
        if dst in a.beads:
            raise AssertionError(f"bead move target {dst} is occupied")
        a = a.move(src, dst)
    return partition_from_abacus(a)


def lambda_b(b: BlockDescriptor, uv: tuple[int, int]) -> Label:
    """The four-case parametrisation of simple modules by pairs in S."""
    u, v = uv
    if not (0 <= u <= v <= b.p - 1) or (u, v) == (0, 0):
        raise ValueError(f"{uv} is not in S")
    s = b.sset
    if (u, v) not in s:
        if (u + 1, v) not in s:
            return Pair(u + 1, v)
        return Double(v)
    if (u, v + 1) in s:
        return Pair(u, v + 1)
    return Single(u)


def lambda_b_table(b: BlockDescriptor) -> dict[tuple[int, int], Label]:
    return {uv: lambda_b(b, uv) for uv in b.calS}


# Scopes pairs -----------------------------------------------------------------


@dataclass(frozen=True)
class ScopesPair:
    s: int
    t: int
    m: int


def scopes_pairs(b: BlockDescriptor) -> list[ScopesPair]:
    """Index pairs s < t with q_t - q_s = mp + 1 for some m > 0."""
    qs, p = b.qs, b.p
    out = []
    for s, t in itertools.combinations(range(p), 2):
        diff = qs[t] - qs[s]
        if diff % p == 1 and diff > 1:
            out.append(ScopesPair(s, t, (diff - 1) // p))
    return out


def scopes_partner(b: BlockDescriptor, pair: ScopesPair) -> BlockDescriptor:
    """Slide beads q_t - kp to q_t - kp - 1 for k = 1..m and return the new block."""
    p = b.p
    a = b.abacus()
    qs = b.qs
    if qs[pair.t] - qs[pair.s] != pair.m * p + 1:
        raise ValueError(f"{pair} is not a Scopes pair of this block")
    for k in range(1, pair.m + 1):
        a = a.move(qs[pair.t] - k * p, qs[pair.t] - k * p - 1)
    return BlockDescriptor(p, partition_from_abacus(a), a.n_beads)


def phi(pair: ScopesPair, label: Label) -> Label:
    """Scopes bijection on shorthand labels: identity except the 3-cycle for m = 1."""
    if pair.m < 1:
        raise ValueError("not a Scopes pair")
    if pair.m >= 2:
        return label
    s, t = pair.s, pair.t
    if label == Double(t):
        return Single(s)
    if label == Pair(s, t):
        return Double(t)
    if label == Single(s):
        return Pair(s, t)
    return label


# blocks as Cubist sets --------------------------------------------------------


def x_b(b: BlockDescriptor, u: int, v: int) -> Point:
    if not u < v:
        raise ValueError("x_B is defined for u < v")
    if (u, v) in b.pyramid:
        return (-u, 1 + v, 1)
    return (-u - 1, v, 0)


def in_x_b(b: BlockDescriptor, y: Point) -> bool:
    """Membership in Im(x_B) together with the points (i, j, 1) with i + j <= 1."""
    i, j, c = y
    if c == 1:
        return i + j <= 1 or (-i, j - 1) in b.pyramid
    if c == 0:
        u, v = -i - 1, j
        return u < v and (u, v) not in b.pyramid
    return False


def cubist_from_block(b: BlockDescriptor) -> CubistSet:
    return CubistSet(3, Weight2(b.p, b.pyramid))


def block_truncated_cartan(b: BlockDescriptor) -> QMatrix:
    """C_U of X_B restricted to rows and columns x_B(P), in the order of P."""
    s = cubist_from_block(b)
    idx = [x_b(b, u, v) for u, v in b.calP]
    values = {}
    for x in idx:
        row = cu_local_row(s, x)
        for y in idx:
            e = row.get(y)
            if e is not None and not e.is_zero():
                values[(x, y)] = e
    return QMatrix.from_points(idx, idx, values)


def rouquier_cartan_entry(x: Point, y: Point) -> LaurentPoly:
    """Closed-form C_U entry between points (i, j, 0), i + j >= 0, of the empty-pyramid set."""
    (i, j, c), (k, l, d) = x, y
    if c or d or i + j < 0 or k + l < 0:
        raise ValueError("entries are tabulated on the sheet {(i, j, 0) : i + j >= 0}")
    di, dj = abs(i - k), abs(j - l)
    if (di, dj) == (0, 0):
        if i + j == 0:
            return 1 + q**2 + q**4
        if i + j == 1:
            return 1 + 3 * q**2 + q**4
        return 1 + 2 * q**2 + q**4
    if di + dj == 1:
        return q + q**3
    if di == 1 and dj == 1:
        return q**2
    return LaurentPoly()


def sheet_zero_points(window: Box) -> Iterable[Point]:
    return [x for x in sorted(window.points()) if x[2] == 0 and x[0] + x[1] >= 0]
