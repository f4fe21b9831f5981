"""Truncated Puiseux series scalars.

A :class:`PuiseuxScalar` is a finite list of (order, coefficient) pairs with
rational orders and rational coefficients, together with a truncation order:
terms of order >= ``trunc`` are unknown.  These scalars realize a real closed
field extension of the rationals, its canonical valuation ring (elements of
non-negative order), the maximal ideal (positive order), and the residue map
back to the rationals.

A value with no known terms is either *known zero* (``trunc is None``: every
term is known to vanish) or *indeterminate* (finite ``trunc``: zero up to the
truncation, nothing known beyond it).  Operations that need a leading term
fail loudly on indeterminate input instead of guessing.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

#: Default truncation order for infinitesimals; generous for all pipelines
#: in this package (which manipulate degrees up to 6).
DEFAULT_TRUNC = Fraction(12)

RationalLike = Union[int, Fraction]


class IndeterminateValueError(ArithmeticError):
    """Raised when an operation needs a leading term that is unknown."""


class PuiseuxScalar:
    __slots__ = ("terms", "trunc")

    def __init__(self, terms: Iterable[tuple[RationalLike, RationalLike]] = (),
                 trunc: RationalLike | None = None):
        cleaned = []
        for order, coeff in terms:
            order = Fraction(order)
            coeff = Fraction(coeff)
            if coeff != 0:
                cleaned.append((order, coeff))
        cleaned.sort(key=lambda t: t[0])
        for (o1, _), (o2, _) in zip(cleaned, cleaned[1:]):
            if o1 == o2:
                raise ValueError("duplicate orders in Puiseux term list")
        if trunc is not None:
            trunc = Fraction(trunc)
            cleaned = [(o, c) for o, c in cleaned if o < trunc]
        object.__setattr__(self, "terms", tuple(cleaned))
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, *args):
        raise AttributeError("PuiseuxScalar is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(value: RationalLike) -> "PuiseuxScalar":
        value = Fraction(value)
        return PuiseuxScalar([(Fraction(0), value)] if value else [], None)

    @staticmethod
    def eps(power: RationalLike = 1, coeff: RationalLike = 1,
            trunc: RationalLike | None = None) -> "PuiseuxScalar":
        """The infinitesimal t**power, truncated at ``trunc`` (default 12)."""
        if trunc is None:
            trunc = DEFAULT_TRUNC
        return PuiseuxScalar([(Fraction(power), Fraction(coeff))], trunc)

    @staticmethod
    def zero() -> "PuiseuxScalar":
        return PuiseuxScalar([], None)

    # -- classification ----------------------------------------------------

    @property
    def is_known_zero(self) -> bool:
        return not self.terms and self.trunc is None

    @property
    def is_indeterminate(self) -> bool:
        return not self.terms and self.trunc is not None

    @property
    def is_exact(self) -> bool:
        return self.trunc is None

    def is_rational(self) -> bool:
        return self.is_known_zero or (
            self.is_exact and len(self.terms) == 1 and self.terms[0][0] == 0)

    def as_rational(self) -> Fraction:
        if self.is_known_zero:
            return Fraction(0)
        if self.is_rational():
            return self.terms[0][1]
        raise ValueError("not an exact rational constant: %r" % (self,))

    # -- valuation / sign / residue ---------------------------------------

    def valuation(self) -> Fraction:
        """Order of the leading term."""
        if not self.terms:
            raise IndeterminateValueError(
                "valuation of a value with no known term")
        return self.terms[0][0]

    def sign(self) -> int:
        """Sign of the leading coefficient."""
        if not self.terms:
            if self.is_known_zero:
                return 0
            raise IndeterminateValueError("sign of an indeterminate value")
        return 1 if self.terms[0][1] > 0 else -1

    def in_valuation_ring(self) -> bool:
        """Whether the value has non-negative order (lies in B)."""
        if self.is_known_zero:
            return True
        return self.valuation() >= 0

    def is_infinitesimal(self) -> bool:
        if self.is_known_zero:
            return False
        return self.valuation() > 0

    def residue(self) -> Fraction:
        """Image under the reduction map B -> rationals."""
        if self.is_known_zero:
            return Fraction(0)
        if self.valuation() < 0:
            raise ValueError("residue of an element outside the valuation ring")
        for order, coeff in self.terms:
            if order == 0:
                return coeff
        return Fraction(0)

    def coefficient(self, order: RationalLike) -> Fraction:
        order = Fraction(order)
        if self.trunc is not None and order >= self.trunc:
            raise IndeterminateValueError(
                "coefficient at order %s is beyond truncation %s"
                % (order, self.trunc))
        for o, c in self.terms:
            if o == order:
                return c
        return Fraction(0)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(value) -> "PuiseuxScalar":
        if isinstance(value, PuiseuxScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return PuiseuxScalar.from_rational(value)
        raise TypeError("cannot coerce %r to PuiseuxScalar" % (value,))

    def __add__(self, other) -> "PuiseuxScalar":
        other = self._coerce(other)
        truncs = [t for t in (self.trunc, other.trunc) if t is not None]
        trunc = min(truncs) if truncs else None
        acc: dict[Fraction, Fraction] = {}
        for o, c in self.terms + other.terms:
            acc[o] = acc.get(o, Fraction(0)) + c
        return PuiseuxScalar(acc.items(), trunc)

    __radd__ = __add__

    def __neg__(self) -> "PuiseuxScalar":
        return PuiseuxScalar([(o, -c) for o, c in self.terms], self.trunc)

    def __sub__(self, other) -> "PuiseuxScalar":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PuiseuxScalar":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "PuiseuxScalar":
        other = self._coerce(other)
        if self.is_known_zero or other.is_known_zero:
            return PuiseuxScalar.zero()
        # Tightest provable truncation: unknown tail of one factor times the
        # leading term of the other, whichever kicks in first.
        candidates = []
        if self.trunc is not None and other.terms:
            candidates.append(self.trunc + other.terms[0][0])
        if other.trunc is not None and self.terms:
            candidates.append(other.trunc + self.terms[0][0])
        if self.trunc is not None and other.trunc is not None:
            candidates.append(self.trunc + other.trunc)
        trunc = min(candidates) if candidates else None
        acc: dict[Fraction, Fraction] = {}
        for o1, c1 in self.terms:
            for o2, c2 in other.terms:
                o = o1 + o2
                acc[o] = acc.get(o, Fraction(0)) + c1 * c2
        return PuiseuxScalar(acc.items(), trunc)

    __rmul__ = __mul__

    def inverse(self) -> "PuiseuxScalar":
        if not self.terms:
            if self.is_known_zero:
                raise ZeroDivisionError("inverse of zero")
            raise IndeterminateValueError(
                "inverse of a value with no known leading term")
        o0, c0 = self.terms[0]
        # self = c0 t^o0 (1 + u) with o(u) > 0; invert the unit by the
        # geometric series, to the relative precision the input carries.
        rel_trunc = None if self.trunc is None else self.trunc - o0
        u = PuiseuxScalar([(o - o0, c / c0) for o, c in self.terms[1:]],
                          rel_trunc)
        one = PuiseuxScalar.from_rational(1)
        if not u.terms:
            unit_inv = PuiseuxScalar([(Fraction(0), Fraction(1))], rel_trunc)
        else:
            u_val = u.valuation()
            n_terms = 1
            if rel_trunc is not None:
                while n_terms * u_val < rel_trunc:
                    n_terms += 1
            else:
                # exact finite series still needs enough powers to terminate
                raise NotImplementedError(
                    "exact inverse of a non-monomial series is not supported; "
                    "set a truncation order")
            acc = one
            power = one
            for _ in range(n_terms):
                power = power * (-u)
                acc = acc + power
            unit_inv = PuiseuxScalar(acc.terms, rel_trunc)
        scaled = PuiseuxScalar(
            [(o - o0, c / c0) for o, c in unit_inv.terms],
            None if rel_trunc is None else rel_trunc - o0)
        return scaled

    def __truediv__(self, other) -> "PuiseuxScalar":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "PuiseuxScalar":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "PuiseuxScalar":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = PuiseuxScalar.from_rational(1)
        for _ in range(n):
            result = result * self
        return result

    def shift_orders(self, delta: RationalLike) -> "PuiseuxScalar":
        """Multiply by t**delta exactly (shift every order by delta)."""
        delta = Fraction(delta)
        return PuiseuxScalar(
            [(o + delta, c) for o, c in self.terms],
            None if self.trunc is None else self.trunc + delta)

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms and self.trunc == other.trunc

    def __hash__(self):
        return hash((self.terms, self.trunc))

    def __bool__(self) -> bool:
        if self.terms:
            return True
        if self.is_known_zero:
            return False
        raise IndeterminateValueError(
            "truth value of an indeterminate Puiseux scalar")

    def __lt__(self, other) -> bool:
        diff = self._coerce(other) - self
        return bool(diff) and diff.sign() > 0

    def __gt__(self, other) -> bool:
        return self._coerce(other) < self

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "series": [{"ord": str(o), "coeff": str(c)} for o, c in self.terms],
            "trunc": None if self.trunc is None else str(self.trunc),
        }

    @staticmethod
    def from_json(data: dict) -> "PuiseuxScalar":
        terms = [(Fraction(t["ord"]), Fraction(t["coeff"]))
                 for t in data.get("series", [])]
        trunc = data.get("trunc")
        return PuiseuxScalar(terms, None if trunc is None else Fraction(trunc))

    def __repr__(self):
        if self.is_known_zero:
            return "PuiseuxScalar(0)"
        body = " + ".join(
            "%s*t^%s" % (c, o) if o else str(c) for o, c in self.terms)
        if not body:
            body = "0"
        if self.trunc is not None:
            body += " + O(t^%s)" % self.trunc
        return "PuiseuxScalar(%s)" % body
