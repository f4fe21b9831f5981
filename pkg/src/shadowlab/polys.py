"""Sparse multivariate polynomials over exact scalars.

Coefficients are either exact rationals (:class:`fractions.Fraction`) or
truncated Puiseux scalars (:class:`shadowlab.puiseux.PuiseuxScalar`).  The two
domains never mix silently; ``to_puiseux`` promotes a rational polynomial
explicitly.  Monomials are exponent tuples, ordered globally by graded
lexicographic order so that serialized polynomials and Gram bases are
deterministic.

The zero polynomial has an empty term map; its degree is the sentinel
``NEG_INF``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence, Union

from . import exactla
from .puiseux import PuiseuxScalar

NEG_INF = -math.inf

RATIONAL = "rational"
PUISEUX = "puiseux"

Scalar = Union[Fraction, PuiseuxScalar]


class DomainMismatchError(TypeError):
    pass


class VariableMismatchError(ValueError):
    pass


def grlex_key(exp: tuple[int, ...]) -> tuple:
    return (sum(exp), tuple(-e for e in exp))


def _zero(domain: str) -> Scalar:
    return Fraction(0) if domain == RATIONAL else PuiseuxScalar.zero()


def _is_zero(c: Scalar) -> bool:
    if isinstance(c, PuiseuxScalar):
        # indeterminate coefficients are kept; only known zeros are pruned
        return c.is_known_zero
    return c == 0


def _coerce_coeff(c, domain: str) -> Scalar:
    if domain == RATIONAL:
        if isinstance(c, PuiseuxScalar):
            raise DomainMismatchError("Puiseux coefficient in rational polynomial")
        return Fraction(c)
    if isinstance(c, PuiseuxScalar):
        return c
    return PuiseuxScalar.from_rational(Fraction(c))


class Polynomial:
    """Immutable sparse polynomial over a fixed ordered variable list."""

    __slots__ = ("vars", "terms", "domain")

    def __init__(self, variables: Sequence[str],
                 terms: Mapping[tuple[int, ...], Scalar] | Iterable = (),
                 domain: str = RATIONAL):
        if domain not in (RATIONAL, PUISEUX):
            raise ValueError("unknown scalar domain %r" % domain)
        variables = tuple(variables)
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[tuple[int, ...], Scalar] = {}
        for exp, coeff in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(variables):
                raise VariableMismatchError(
                    "exponent length %d != variable count %d"
                    % (len(exp), len(variables)))
            if any(e < 0 for e in exp):
                raise ValueError("negative exponent in %r" % (exp,))
            coeff = _coerce_coeff(coeff, domain)
            if exp in clean:
                coeff = clean[exp] + coeff
            if _is_zero(coeff):
                clean.pop(exp, None)
            else:
                clean[exp] = coeff
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "domain", domain)

    def __setattr__(self, *args):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(variables: Sequence[str], domain: str = RATIONAL) -> "Polynomial":
        return Polynomial(variables, {}, domain)

    @staticmethod
    def constant(variables: Sequence[str], value, domain: str = RATIONAL
                 ) -> "Polynomial":
        exp = (0,) * len(variables)
        return Polynomial(variables, {exp: value}, domain)

    @staticmethod
    def variable(variables: Sequence[str], name: str, domain: str = RATIONAL
                 ) -> "Polynomial":
        variables = tuple(variables)
        i = variables.index(name)
        exp = tuple(int(j == i) for j in range(len(variables)))
        return Polynomial(variables, {exp: 1}, domain)

    @staticmethod
    def monomial(variables: Sequence[str], exp: Sequence[int], coeff=1,
                 domain: str = RATIONAL) -> "Polynomial":
        return Polynomial(variables, {tuple(exp): coeff}, domain)

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def coefficient(self, exp: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(exp), _zero(self.domain))

    def constant_term(self) -> Scalar:
        return self.coefficient((0,) * len(self.vars))

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Scalar]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def monomials(self) -> list[tuple[int, ...]]:
        return sorted(self.terms, key=grlex_key)

    # -- arithmetic --------------------------------------------------------

    def _check_compatible(self, other: "Polynomial"):
        if self.vars != other.vars:
            raise VariableMismatchError(
                "variable lists differ: %r vs %r" % (self.vars, other.vars))
        if self.domain != other.domain:
            raise DomainMismatchError(
                "scalar domains differ: %s vs %s; promote with to_puiseux()"
                % (self.domain, other.domain))

    def _coerce_operand(self, other):
        if isinstance(other, Polynomial):
            self._check_compatible(other)
            return other
        if isinstance(other, (int, Fraction, PuiseuxScalar)):
            return Polynomial.constant(self.vars, other, self.domain)
        return None

    def __add__(self, other):
        other = self._coerce_operand(other)
        if other is None:
            return NotImplemented
        acc = dict(self.terms)
        for exp, c in other.terms.items():
            s = acc.get(exp, _zero(self.domain)) + c
            if _is_zero(s):
                acc.pop(exp, None)
            else:
                acc[exp] = s
        return Polynomial(self.vars, acc, self.domain)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars,
                          {e: -c for e, c in self.terms.items()}, self.domain)

    def __sub__(self, other):
        other = self._coerce_operand(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce_operand(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PuiseuxScalar)):
            c0 = _coerce_coeff(other, self.domain)
            return Polynomial(
                self.vars, {e: c * c0 for e, c in self.terms.items()},
                self.domain)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_compatible(other)
        acc: dict[tuple[int, ...], Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = acc.get(e, _zero(self.domain)) + c1 * c2
                if _is_zero(s):
                    acc.pop(e, None)
                else:
                    acc[e] = s
        return Polynomial(self.vars, acc, self.domain)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Polynomial.constant(self.vars, 1, self.domain)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.vars == other.vars and self.domain == other.domain
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.vars, self.domain,
                     tuple(sorted(self.terms.items(),
                                  key=lambda t: grlex_key(t[0])))))

    # -- domain promotion --------------------------------------------------

    def to_puiseux(self) -> "Polynomial":
        if self.domain == PUISEUX:
            return self
        return Polynomial(
            self.vars,
            {e: PuiseuxScalar.from_rational(c) for e, c in self.terms.items()},
            PUISEUX)

    def to_rational(self) -> "Polynomial":
        """Inverse promotion; requires every coefficient to be exact rational."""
        if self.domain == RATIONAL:
            return self
        return Polynomial(
            self.vars, {e: c.as_rational() for e, c in self.terms.items()},
            RATIONAL)

    # -- structural operations --------------------------------------------

    def substitute(self, assignment: Mapping[str, object]) -> "Polynomial":
        """Substitute polynomials or scalars for variables.

        Every variable occurring in self must be assigned.  Images may be
        polynomials over any common variable list, or plain scalars (treated
        as constants over an empty result list if everything is scalar).
        """
        occurring = [v for i, v in enumerate(self.vars)
                     if any(e[i] for e in self.terms)]
        missing = [v for v in occurring if v not in assignment]
        if missing:
            raise VariableMismatchError("unassigned variables: %r" % missing)
        images: dict[str, Polynomial] = {}
        target_vars = None
        target_domain = self.domain
        for v, img in assignment.items():
            if isinstance(img, Polynomial):
                if target_vars is None:
                    target_vars = img.vars
                elif img.vars != target_vars:
                    raise VariableMismatchError(
                        "assignment images live over different variable lists")
                if img.domain == PUISEUX:
                    target_domain = PUISEUX
            elif isinstance(img, PuiseuxScalar):
                target_domain = PUISEUX
        if target_vars is None:
            target_vars = self.vars
        for v in self.vars:
            img = assignment.get(v)
            if img is None:
                img = Polynomial.variable(target_vars, v, target_domain) \
                    if v in target_vars else None
            elif not isinstance(img, Polynomial):
                img = Polynomial.constant(target_vars, img, target_domain)
            elif img.domain != target_domain:
                img = img.to_puiseux()
            images[v] = img
        result = Polynomial.zero(target_vars, target_domain)
        for exp, coeff in self.sorted_terms():
            term = Polynomial.constant(target_vars, coeff, target_domain)
            for v, e in zip(self.vars, exp):
                if e:
                    term = term * (images[v] ** e)
            result = result + term
        return result

    def shift(self, point: Sequence) -> "Polynomial":
        """Return f(x + point)."""
        if len(point) != len(self.vars):
            raise VariableMismatchError(
                "shift point has dimension %d, expected %d"
                % (len(point), len(self.vars)))
        assignment = {
            v: Polynomial.variable(self.vars, v, self.domain) +
               Polynomial.constant(self.vars, p, self.domain)
            for v, p in zip(self.vars, point)}
        return self.substitute(assignment)

    def homogenize(self, new_var: str) -> "Polynomial":
        if new_var in self.vars:
            raise ValueError("variable %r already present" % new_var)
        d = self.degree()
        if d == NEG_INF:
            return Polynomial.zero((new_var,) + self.vars, self.domain)
        new_vars = (new_var,) + self.vars
        terms = {(int(d) - sum(e),) + e: c for e, c in self.terms.items()}
        return Polynomial(new_vars, terms, self.domain)

    def dehomogenize(self, var: str) -> "Polynomial":
        if not self.is_homogeneous():
            raise ValueError("dehomogenize requires a homogeneous polynomial")
        i = self.vars.index(var)
        new_vars = self.vars[:i] + self.vars[i + 1:]
        terms: dict[tuple[int, ...], Scalar] = {}
        for e, c in self.terms.items():
            ne = e[:i] + e[i + 1:]
            terms[ne] = terms.get(ne, _zero(self.domain)) + c
        return Polynomial(new_vars, terms, self.domain)

    def lowest_form(self) -> "Polynomial":
        """Homogeneous component of minimal total degree."""
        if not self.terms:
            raise ValueError("lowest form of the zero polynomial")
        dmin = min(sum(e) for e in self.terms)
        return Polynomial(
            self.vars,
            {e: c for e, c in self.terms.items() if sum(e) == dmin},
            self.domain)

    def homogeneous_component(self, d: int) -> "Polynomial":
        return Polynomial(
            self.vars,
            {e: c for e, c in self.terms.items() if sum(e) == d},
            self.domain)

    def evaluate(self, point: Sequence) -> Scalar:
        if len(point) != len(self.vars):
            raise VariableMismatchError("point dimension mismatch")
        total = _zero(self.domain)
        for exp, coeff in self.sorted_terms():
            val = coeff
            for p, e in zip(point, exp):
                for _ in range(e):
                    val = val * p
            total = total + val
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for exp, coeff in self.terms.items():
            val = float(coeff)
            for p, e in zip(point, exp):
                val *= float(p) ** e
            total += val
        return total

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for exp, coeff in self.sorted_terms():
            if isinstance(coeff, PuiseuxScalar):
                cval: object = coeff.to_json()
            else:
                cval = str(coeff)
            terms.append({"exp": list(exp), "coeff": cval})
        return {"vars": list(self.vars), "terms": terms}

    @staticmethod
    def from_json(data: dict) -> "Polynomial":
        variables = data["vars"]
        raw = data.get("terms", [])
        domain = RATIONAL
        for t in raw:
            if isinstance(t["coeff"], dict):
                domain = PUISEUX
        terms = {}
        for t in raw:
            c = t["coeff"]
            if isinstance(c, dict):
                coeff: Scalar = PuiseuxScalar.from_json(c)
            elif domain == PUISEUX:
                coeff = PuiseuxScalar.from_rational(Fraction(c))
            else:
                coeff = Fraction(c)
            terms[tuple(t["exp"])] = coeff
        return Polynomial(variables, terms, domain)

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        parts = []
        for exp, coeff in self.sorted_terms():
            mono = "*".join(
                "%s^%d" % (v, e) if e > 1 else v
                for v, e in zip(self.vars, exp) if e)
            cs = repr(coeff) if isinstance(coeff, PuiseuxScalar) else str(coeff)
            parts.append("(%s)%s" % (cs, "*" + mono if mono else ""))
        return "Polynomial(%s)" % " + ".join(parts)


class Subspace:
    """Finite-dimensional subspace of a polynomial ring, with a stored basis."""

    def __init__(self, basis: Sequence[Polynomial], check: bool = True):
        basis = [p for p in basis]
        if not basis:
            raise ValueError("empty basis")
        v0 = basis[0].vars
        dom = basis[0].domain
        for p in basis:
            if p.vars != v0:
                raise VariableMismatchError("basis over mixed variable lists")
            if p.domain != dom:
                raise DomainMismatchError("basis over mixed scalar domains")
            if p.is_zero():
                raise ValueError("zero polynomial in basis")
        self.basis = basis
        self.vars = v0
        self.domain = dom
        if check and dom == RATIONAL:
            mat, _ = self._coeff_matrix(basis)
            if exactla.rank(mat) != len(basis):
                raise ValueError("basis polynomials are linearly dependent")
        one = (0,) * len(v0)
        if dom == RATIONAL:
            coords = self.coordinates(Polynomial.monomial(v0, one))
            self.contains_one = coords is not None
        else:
            self.contains_one = any(one in p.terms for p in basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @staticmethod
    def _coeff_matrix(polys: Sequence[Polynomial]
                      ) -> tuple[list[list[Fraction]], list[tuple[int, ...]]]:
        monos = sorted({e for p in polys for e in p.terms}, key=grlex_key)
        mat = [[Fraction(p.terms.get(e, 0)) for e in monos] for p in polys]
        return mat, monos

    def coordinates(self, f: Polynomial) -> list[Fraction] | None:
        """Exact coordinates of f in the stored basis, or None if outside."""
        if self.domain != RATIONAL:
            raise DomainMismatchError("coordinates need a rational subspace")
        monos = sorted({e for p in self.basis for e in p.terms}
                       | set(f.terms), key=grlex_key)
        a = [[Fraction(p.terms.get(e, 0)) for p in self.basis] for e in monos]
        b = [Fraction(f.terms.get(e, 0)) for e in monos]
        return exactla.solve(a, b)

    def contains(self, f: Polynomial) -> bool:
        return self.coordinates(f) is not None

    def to_puiseux(self) -> "Subspace":
        return Subspace([p.to_puiseux() for p in self.basis], check=False)

    def contains_with_scalar_coeffs(self, f: Polynomial,
                                    allow_constant: bool = True) -> bool:
        """Membership of a Puiseux polynomial in span_B(basis) (+ constants).

        Solves the coefficient system exactly over rationals per Puiseux
        order, which is valid when the basis is rational (promoted).
        """
        basis = [p.to_rational() if p.domain == PUISEUX else p
                 for p in self.basis]
        fp = f if f.domain == PUISEUX else f.to_puiseux()
        one = (0,) * len(self.vars)
        cols = list(basis)
        if allow_constant:
            cols.append(Polynomial.monomial(self.vars, one))
        orders = sorted({o for c in fp.terms.values() for o, _ in c.terms})
        monos = sorted({e for p in cols for e in p.terms} | set(fp.terms),
                       key=grlex_key)
        a = [[Fraction(p.terms.get(e, 0)) for p in cols] for e in monos]
        for order in orders:
            b = []
            for e in monos:
                c = fp.terms.get(e)
                b.append(c.coefficient(order) if c is not None else Fraction(0))
            if exactla.solve(a, b) is None:
                return False
        return True

    def to_json(self) -> dict:
        return {"basis": [p.to_json() for p in self.basis],
                "contains_one": self.contains_one}

    @staticmethod
    def from_json(data: dict) -> "Subspace":
        return Subspace([Polynomial.from_json(p) for p in data["basis"]])

    def __repr__(self):
        return "Subspace(dim=%d, vars=%r)" % (self.dim, self.vars)


# -- module-level constructions -------------------------------------------


def monomial_exponents(n: int, d_min: int, d_max: int) -> list[tuple[int, ...]]:
    """All exponent tuples in n variables with total degree in [d_min, d_max]."""
    out = [e for e in product(range(d_max + 1), repeat=n)
           if d_min <= sum(e) <= d_max]
    return sorted(out, key=grlex_key)


def monomial_subspace(n: int, d_max: int, include_constant: bool = False,
                      variables: Sequence[str] | None = None) -> Subspace:
    """Span of all monomials of degree 1..d_max (plus 1 if requested)."""
    if n < 1 or d_max < 1:
        raise ValueError("need n >= 1 and d_max >= 1")
    if variables is None:
        variables = tuple("x%d" % (i + 1) for i in range(n))
    d_min = 0 if include_constant else 1
    basis = [Polynomial.monomial(variables, e)
             for e in monomial_exponents(n, d_min, d_max)]
    return Subspace(basis, check=False)


def homogeneous_monomial_subspace(n: int, d: int,
                                  variables: Sequence[str] | None = None
                                  ) -> Subspace:
    if variables is None:
        variables = tuple("x%d" % (i + 1) for i in range(n))
    basis = [Polynomial.monomial(variables, e)
             for e in monomial_exponents(n, d, d)]
    return Subspace(basis, check=False)


def shift_support(p: Polynomial) -> Subspace:
    """Smallest subspace L with p(x + a) in scalars + L for all points a.

    Expands p(x + y) over doubled variables and row-reduces the matrix whose
    rows, indexed by y-monomials, hold the x-coefficient vectors (constant in
    x dropped).  The row space is exactly the span of all shifted copies of p
    modulo constants; the returned basis is its reduced row echelon form, so
    the result is deterministic.
    """
    if p.domain != RATIONAL:
        raise DomainMismatchError("shift_support expects a rational polynomial")
    if not p.is_homogeneous():
        raise ValueError("shift_support expects a homogeneous input")
    if p.is_zero():
        raise ValueError("shift_support of the zero polynomial")
    n = len(p.vars)
    doubled = tuple(p.vars) + tuple("__s_%s" % v for v in p.vars)
    assignment = {
        v: Polynomial.variable(doubled, v) +
           Polynomial.variable(doubled, "__s_%s" % v)
        for v in p.vars}
    expanded = p.substitute(assignment)
    rows: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
    cols: set[tuple[int, ...]] = set()
    for exp, coeff in expanded.terms.items():
        xpart, ypart = exp[:n], exp[n:]
        if not any(xpart):
            continue
        cols.add(xpart)
        rows.setdefault(ypart, {})[xpart] = Fraction(coeff)
    col_list = sorted(cols, key=grlex_key)
    mat = [[rows[y].get(c, Fraction(0)) for c in col_list]
           for y in sorted(rows, key=grlex_key)]
    red, pivots = exactla.rref(mat)
    basis = []
    for row, _ in zip(red, pivots):
        terms = {c: v for c, v in zip(col_list, row) if v != 0}
        basis.append(Polynomial(p.vars, terms))
    return Subspace(basis, check=False)


def divide_eps_power(f: Polynomial, k) -> Polynomial:
    """Divide every Puiseux coefficient of f by t**k exactly."""
    if f.domain != PUISEUX:
        raise DomainMismatchError("divide_eps_power expects Puiseux coefficients")
    k = Fraction(k)
    for exp, c in f.terms.items():
        if c.is_indeterminate:
            raise ValueError(
                "coefficient at %r is indeterminate; divisibility unknown" % (exp,))
        if not c.is_known_zero and c.valuation() < k:
            raise ValueError(
                "coefficient at %r has valuation %s < %s; not divisible"
                % (exp, c.valuation(), k))
    return Polynomial(
        f.vars, {e: c.shift_orders(-k) for e, c in f.terms.items()}, PUISEUX)


def residue_poly(f: Polynomial) -> Polynomial:
    """Apply the residue map to every coefficient, landing in rationals."""
    if f.domain != PUISEUX:
        raise DomainMismatchError("residue_poly expects Puiseux coefficients")
    return Polynomial(
        f.vars, {e: c.residue() for e, c in f.terms.items()}, RATIONAL)
