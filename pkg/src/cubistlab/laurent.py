"""Exact integer Laurent polynomials, truncated Laurent series and quantum integers.

Every matrix entry in the package is one of these two value types.  Both are
immutable, hashable and use Python integers for coefficients, so arithmetic
never overflows and never rounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from collections.abc import Iterable, Mapping
from functools import lru_cache
from typing import Union

__all__ = [
    "LaurentPoly",
    "TruncSeries",
    "quantum_integer",
    "geometric_power",
    "q",
]


def _clean(terms: Iterable[tuple[int, int]]) -> dict[int, int]:
    out: dict[int, int] = {}
    for e, c in terms:
        if c:
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def _format(terms: Mapping[int, int]) -> str:
    if not terms:
        return "0"
    pieces = []
    for e in sorted(terms):
        c = terms[e]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if e == 0:
            body = str(mag)
        else:
            mono = "q" if e == 1 else f"q^{e}"
            body = mono if mag == 1 else f"{mag}{mono}"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


class LaurentPoly:
    """A finite sum of integer multiples of powers ``q**e`` with ``e`` in Z."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] | None = None):
        if terms is None:
            items: Iterable[tuple[int, int]] = ()
        elif isinstance(terms, dict) or isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        self._terms = _clean((int(e), int(c)) for e, c in items)
        self._hash: int | None = None

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1) -> LaurentPoly:
        return cls({exponent: coefficient})

    @classmethod
    def constant(cls, value: int) -> LaurentPoly:
        return cls({0: value})

    @property
    def terms(self) -> dict[int, int]:
        """A copy of the exponent to coefficient mapping (no zero coefficients)."""
        return dict(self._terms)

    def coefficient(self, exponent: int) -> int:
        return self._terms.get(exponent, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def min_exponent(self) -> int | None:
        return min(self._terms) if self._terms else None

    def max_exponent(self) -> int | None:
        return max(self._terms) if self._terms else None

    # ring operations -------------------------------------------------

    def __add__(self, other: object) -> LaurentPoly | TruncSeries:
        if isinstance(other, TruncSeries):
            return other + self
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        merged = dict(self._terms)
        for e, c in other._terms.items():
            merged[e] = merged.get(e, 0) + c
        return LaurentPoly(merged)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: object) -> LaurentPoly | TruncSeries:
        if isinstance(other, TruncSeries):
            return (-other) + self
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> LaurentPoly:
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: object) -> LaurentPoly | TruncSeries:
        if isinstance(other, TruncSeries):
            return other * self
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            if len(self._terms) == 1:
                (e, c), = self._terms.items()
                if c in (1, -1):
                    return LaurentPoly({-e * -n: c ** -n})
            raise ValueError("only signed monomials can be inverted")
        result = LaurentPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # substitutions -----------------------------------------------------

    def subs_neg(self) -> LaurentPoly:
        """Substitute q -> -q."""
        return LaurentPoly({e: (-c if e % 2 else c) for e, c in self._terms.items()})

    def subs_inv(self) -> LaurentPoly:
        """Substitute q -> q^-1, which reverses exponents."""
        return LaurentPoly({-e: c for e, c in self._terms.items()})

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by q^k."""
        return LaurentPoly({e + k: c for e, c in self._terms.items()})

    def truncate(self, cutoff: int) -> TruncSeries:
        return TruncSeries(self._terms, cutoff)

    def evaluate(self, value: int | Fraction) -> Fraction:
        value = Fraction(value)
        return sum((c * value ** e for e, c in self._terms.items()), Fraction(0))

    # comparison and display -----------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TruncSeries):
            return NotImplemented
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("LaurentPoly", frozenset(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"LaurentPoly({_format(self._terms)})"

    def __str__(self) -> str:
        return _format(self._terms)

    def to_json(self) -> dict:
        return {"terms": {str(e): self._terms[e] for e in sorted(self._terms)}}

    @classmethod
    def from_json(cls, data: Mapping) -> LaurentPoly:
        return cls({int(e): int(c) for e, c in data["terms"].items()})


def _as_poly(value: object) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, int):
        return LaurentPoly.constant(value)
    return NotImplemented  # type: ignore[return-value]


class TruncSeries:
    """A Laurent series known modulo ``q**(cutoff + 1)``.

    Terms of exponent greater than the cutoff are dropped on construction and
    after every operation.  Combining two series with different cutoffs raises
    ``ValueError`` instead of silently re-truncating.
    """

    __slots__ = ("_terms", "cutoff", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]], cutoff: int):
        items = terms.items() if isinstance(terms, Mapping) else terms
        self.cutoff = int(cutoff)
        self._terms = _clean((int(e), int(c)) for e, c in items if e <= self.cutoff)
        self._hash: int | None = None

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def coefficient(self, exponent: int) -> int:
        if exponent > self.cutoff:
            raise ValueError(f"coefficient of q^{exponent} is beyond cutoff {self.cutoff}")
        return self._terms.get(exponent, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def valuation(self) -> int | None:
        return min(self._terms) if self._terms else None

    def _coerce(self, other: object) -> TruncSeries:
        if isinstance(other, TruncSeries):
            if other.cutoff != self.cutoff:
                raise ValueError(
                    f"cannot combine series with cutoffs {self.cutoff} and {other.cutoff}"
                )
            return other
        if isinstance(other, LaurentPoly):
            return other.truncate(self.cutoff)
        if isinstance(other, int):
            return TruncSeries({0: other}, self.cutoff)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> TruncSeries:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        merged = dict(self._terms)
        for e, c in other._terms.items():
            merged[e] = merged.get(e, 0) + c
        return TruncSeries(merged, self.cutoff)

    __radd__ = __add__

    def __neg__(self) -> TruncSeries:
        return TruncSeries({e: -c for e, c in self._terms.items()}, self.cutoff)

    def __sub__(self, other: object) -> TruncSeries:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> TruncSeries:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: object) -> TruncSeries:
        if isinstance(other, LaurentPoly):
            low = other.min_exponent()
            if low is not None and low < 0:
                raise ValueError("multiplying a truncated series by negative powers loses precision")
            factor = other._terms
        else:
            other = self._coerce(other)
            if other is NotImplemented:
                return NotImplemented
            for v in (self.valuation(), other.valuation()):
                if v is not None and v < 0:
                    raise ValueError("product of truncated series with negative valuation is not determined")
            factor = other._terms
        out: dict[int, int] = {}
        n = self.cutoff
        for e1, c1 in self._terms.items():
            for e2, c2 in factor.items():
                e = e1 + e2
                if e <= n:
                    out[e] = out.get(e, 0) + c1 * c2
        return TruncSeries(out, n)

    __rmul__ = __mul__

    def subs_neg(self) -> TruncSeries:
        """Substitute q -> -q."""
        return TruncSeries({e: (-c if e % 2 else c) for e, c in self._terms.items()}, self.cutoff)

    def shift(self, k: int) -> TruncSeries:
        """Multiply by q^k for k >= 0 (negative shifts would invent unknown terms)."""
        if k < 0:
            raise ValueError("a truncated series can only be shifted by nonnegative powers")
        return TruncSeries({e + k: c for e, c in self._terms.items()}, self.cutoff)

    def truncate(self, cutoff: int) -> TruncSeries:
        if cutoff > self.cutoff:
            raise ValueError("cannot raise the cutoff of a truncated series")
        return TruncSeries(self._terms, cutoff)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (LaurentPoly, int)):
            other = self._coerce(other)
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if other.cutoff != self.cutoff:
            raise ValueError(f"series with cutoffs {self.cutoff} and {other.cutoff} are not comparable")
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("TruncSeries", self.cutoff, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"TruncSeries({_format(self._terms)} + O(q^{self.cutoff + 1}))"

    def __str__(self) -> str:
        return f"{_format(self._terms)} + O(q^{self.cutoff + 1})"

    def to_json(self) -> dict:
        return {
            "terms": {str(e): self._terms[e] for e in sorted(self._terms)},
            "cutoff": self.cutoff,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> TruncSeries:
        return cls({int(e): int(c) for e, c in data["terms"].items()}, int(data["cutoff"]))


Scalar = Union[LaurentPoly, TruncSeries]

q = LaurentPoly.monomial(1)


@lru_cache(maxsize=None)
def quantum_integer(n: int) -> LaurentPoly:
    """The quantum integer [n] = q^(n-1) + q^(n-3) + ... + q^(1-n), with [-n] = -[n]."""
    if n == 0:
        return LaurentPoly()
    sign = 1 if n > 0 else -1
    m = abs(n)
    return LaurentPoly({m - 1 - 2 * k: sign for k in range(m)})


def geometric_power(r: int, cutoff: int) -> TruncSeries:
    """Expansion of (1 - q^2)^(1 - r) modulo q^(cutoff + 1).

    The coefficient of q^(2k) is binomial(k + r - 2, r - 2).
    """
    if r < 1:
        raise ValueError("rank must be at least 1")
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    if r == 1:
        return TruncSeries({0: 1}, cutoff)
    return TruncSeries({2 * k: comb(k + r - 2, r - 2) for k in range(cutoff // 2 + 1)}, cutoff)
