"""Exact arithmetic in the field Q(λ, μ) of density-weight parameters.

:class:`ParamPoly` is a sparse bivariate polynomial with :class:`~fractions.Fraction`
coefficients, :class:`ParamRatFun` a reduced quotient of two of them.  Everything
is immutable and hashable; the canonical form is unique, so ``==`` is
mathematical equality.

Greatest common divisors are computed with a primitive pseudo-remainder
sequence over Q[λ][μ], which is all the generality the engine needs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as igcd
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple, Union

LAMBDA = "λ"
MU = "μ"
VARIABLES = (LAMBDA, MU)

_ALIASES = {"λ": LAMBDA, "lam": LAMBDA, "lambda": LAMBDA, "l": LAMBDA,
            "μ": MU, "mu": MU, "m": MU}

Exponent = Tuple[int, int]
Number = Union[int, Fraction]


def _var_index(name: str) -> int:
    try:
        return VARIABLES.index(_ALIASES[name])
    except KeyError:
        raise ValueError(f"unknown parameter {name!r}; expected one of λ, μ") from None


def _order_key(e: Exponent) -> Tuple[int, int, int]:
    # graded lexicographic, λ > μ
    return (e[0] + e[1], e[0], e[1])


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated at a zero of its denominator."""

    def __init__(self, message: str, factor: "ParamPoly"):
        super().__init__(message)
        self.factor = factor


class ParamPoly:
    """Sparse polynomial in λ, μ over Q.

    ``terms`` maps ``(deg_λ, deg_μ)`` to a nonzero ``Fraction``.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Exponent, Number]] = None):
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    clean[e] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Exponent, Fraction]) -> "ParamPoly":
        # caller guarantees no zero coefficients
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Number) -> "ParamPoly":
        return cls._raw({(0, 0): Fraction(c)} if c else {})

    @classmethod
    def gen(cls, name: str) -> "ParamPoly":
        return cls._raw({(1, 0) if _var_index(name) == 0 else (0, 1): Fraction(1)})

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        t = self.terms
        return not t or (len(t) == 1 and (0, 0) in t)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get((0, 0)) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0, 0), Fraction(0))

    def variables(self) -> Tuple[str, ...]:
        used = [False, False]
        for e in self.terms:
            used[0] |= e[0] > 0
            used[1] |= e[1] > 0
        return tuple(v for v, u in zip(VARIABLES, used) if u)

    def degree(self, var: Optional[str] = None) -> int:
        """Total degree, or degree in ``var``; the zero polynomial has degree -1."""
        if not self.terms:
            return -1
        if var is None:
            return max(a + b for a, b in self.terms)
        i = _var_index(var)
        return max(e[i] for e in self.terms)

    def leading_term(self) -> Tuple[Exponent, Fraction]:
        e = max(self.terms, key=_order_key)
        return e, self.terms[e]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "ParamPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s += c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return ParamPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "ParamPoly":
        return ParamPoly._raw({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "ParamPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "ParamPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "ParamPoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if not a or not b:
            return ZERO_POLY
        if len(b) == 1 and (0, 0) in b:
            c = b[(0, 0)]
            return self if c == 1 else ParamPoly._raw({e: v * c for e, v in a.items()})
        if len(a) == 1 and (0, 0) in a:
            return other * self
        out: Dict[Exponent, Fraction] = {}
        for (i1, j1), c1 in a.items():
            for (i2, j2), c2 in b.items():
                e = (i1 + i2, j1 + j2)
                out[e] = out.get(e, 0) + c1 * c2
        return ParamPoly._raw({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ParamPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = ONE_POLY, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: Number) -> "ParamPoly":
        c = Fraction(c)
        if not c:
            return ZERO_POLY
        return ParamPoly._raw({e: v * c for e, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, ParamPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0, 0): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- evaluation / substitution -----------------------------------------
    def evaluate(self, at: Mapping[str, Number]) -> Fraction:
        vals = [None, None]
        for k, v in at.items():
            vals[_var_index(k)] = Fraction(v)
        total = Fraction(0)
        for (i, j), c in self.terms.items():
            if (i and vals[0] is None) or (j and vals[1] is None):
                missing = VARIABLES[0] if i and vals[0] is None else VARIABLES[1]
                raise ValueError(f"no value given for {missing} in {self}")
            term = c
            if i:
                term *= vals[0] ** i
            if j:
                term *= vals[1] ** j
            total += term
        return total

    def subs(self, mapping: Mapping[str, Union[Number, "ParamPoly"]]) -> "ParamPoly":
        """Substitute polynomials (or numbers) for λ and/or μ."""
        images: List[Optional[ParamPoly]] = [None, None]
        for k, v in mapping.items():
            images[_var_index(k)] = _as_poly(v)
        gens = [ParamPoly.gen(LAMBDA), ParamPoly.gen(MU)]
        img = [images[0] or gens[0], images[1] or gens[1]]
        out = ZERO_POLY
        for (i, j), c in self.terms.items():
            out = out + (img[0] ** i) * (img[1] ** j) * c
        return out

    # -- normal forms -------------------------------------------------------
    def monic(self) -> "ParamPoly":
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        return self if lc == 1 else self.scale(1 / lc)

    def integer_content(self) -> Fraction:
        """Positive rational c with self / c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = igcd(num, c.numerator)
            den = den * c.denominator // igcd(den, c.denominator)
        return Fraction(num, den)

    def primitive_integer(self) -> "ParamPoly":
        """Integer-coefficient associate with content 1 and positive leading coefficient."""
        if not self.terms:
            return self
        c = self.integer_content()
        if self.leading_coefficient() < 0:
            c = -c
        return self.scale(1 / c)

    # -- printing -----------------------------------------------------------
    def sorted_terms(self) -> List[Tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: _order_key(t[0]), reverse=True)

    def __str__(self) -> str:
        return _render_poly(self, latex=False)

    def latex(self) -> str:
        return _render_poly(self, latex=True)

    def __repr__(self) -> str:
        return f"ParamPoly({self})"


def _as_poly(x) -> ParamPoly:
    if isinstance(x, ParamPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return ParamPoly.const(x)
    return NotImplemented


ZERO_POLY = ParamPoly._raw({})
ONE_POLY = ParamPoly._raw({(0, 0): Fraction(1)})


def _monomial_text(e: Exponent, latex: bool) -> str:
    parts = []
    for name, k in zip(VARIABLES, e):
        if latex:
            name = r"\lambda" if name == LAMBDA else r"\mu"
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{{{k}}}" if latex else f"{name}^{k}")
    return (" " if latex else "").join(parts)


def _fraction_text(c: Fraction, latex: bool) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    if latex:
        return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"
    return f"{c.numerator}/{c.denominator}"


def _render_poly(p: ParamPoly, latex: bool) -> str:
    if not p.terms:
        return "0"
    out = []
    for idx, (e, c) in enumerate(p.sorted_terms()):
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        mono = _monomial_text(e, latex)
        if mono:
            if a == 1:
                coef = ""
            elif a.denominator != 1 and not latex:
                coef = f"({a})"
            else:
                coef = _fraction_text(a, latex)
            body = coef + mono
        else:
            body = _fraction_text(a, latex)
        if idx == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ---------------------------------------------------------------------------
# Division and gcd
# ---------------------------------------------------------------------------

def exact_divide(a: ParamPoly, b: ParamPoly) -> ParamPoly:
    """Return ``a / b``; raises ``ValueError`` when ``b`` does not divide ``a``."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if b.is_constant():
        return a.scale(1 / b.constant_value())
    eb, cb = b.leading_term()
    q: Dict[Exponent, Fraction] = {}
    r = a
    while r.terms:
        er, cr = r.leading_term()
        de = (er[0] - eb[0], er[1] - eb[1])
        if de[0] < 0 or de[1] < 0:
            raise ValueError(f"{b} does not divide {a}")
        c = cr / cb
        q[de] = c
        r = r - b * ParamPoly._raw({de: c})
    return ParamPoly._raw(q)


def _univariate_divmod(a: ParamPoly, b: ParamPoly, idx: int) -> Tuple[ParamPoly, ParamPoly]:
    db = max(e[idx] for e in b.terms)
    lb = next(c for e, c in b.terms.items() if e[idx] == db)
    q: Dict[Exponent, Fraction] = {}
    r = a
    while r.terms:
        dr = max(e[idx] for e in r.terms)
        if dr < db:
            break
        lr = next(c for e, c in r.terms.items() if e[idx] == dr)
        shift = [0, 0]
        shift[idx] = dr - db
        t = ParamPoly._raw({tuple(shift): lr / lb})
        q[tuple(shift)] = lr / lb
        r = r - b * t
    return ParamPoly._raw(q), r


def _gcd_univariate(a: ParamPoly, b: ParamPoly, idx: int) -> ParamPoly:
    # monic remainders keep the rational coefficients from exploding
    while b.terms:
        _, r = _univariate_divmod(a, b, idx)
        a, b = b, (r.monic() if r.terms else r)
    return a.monic() if a.terms else a


def _mu_coeffs(p: ParamPoly) -> Dict[int, ParamPoly]:
    """View ``p`` as a polynomial in μ over Q[λ]."""
    out: Dict[int, Dict[Exponent, Fraction]] = {}
    for (i, j), c in p.terms.items():
        out.setdefault(j, {})[(i, 0)] = c
    return {j: ParamPoly._raw(t) for j, t in out.items()}


def _from_mu_coeffs(coeffs: Mapping[int, ParamPoly]) -> ParamPoly:
    out: Dict[Exponent, Fraction] = {}
    for j, cp in coeffs.items():
        for (i, _), c in cp.terms.items():
            out[(i, j)] = c
    return ParamPoly._raw(out)


def _lambda_content(p: ParamPoly) -> ParamPoly:
    g = ZERO_POLY
    for cp in _mu_coeffs(p).values():
        g = _gcd_univariate(cp, g, 0) if g.terms else cp.monic()
        if g.is_one():
            break
    return g


def _primitive_part(p: ParamPoly) -> ParamPoly:
    c = _lambda_content(p)
    if c.is_one():
        return p
    return _from_mu_coeffs({j: _univariate_divmod(cp, c, 0)[0]
                            for j, cp in _mu_coeffs(p).items()})


def _pseudo_remainder(a: ParamPoly, b: ParamPoly) -> ParamPoly:
    db = b.degree(MU)
    lb = _mu_coeffs(b)[db]
    r = a
    while r.terms and r.degree(MU) >= db:
        dr = r.degree(MU)
        lr = _mu_coeffs(r)[dr]
        r = r * lb - b * lr * ParamPoly._raw({(0, dr - db): Fraction(1)})
    return r


def poly_gcd(a: ParamPoly, b: ParamPoly) -> ParamPoly:
    """Monic gcd of two polynomials in Q[λ, μ] (gcd(0, 0) = 0)."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return ONE_POLY
    va, vb = a.variables(), b.variables()
    if MU not in va and MU not in vb:
        return _gcd_univariate(a, b, 0)
    if LAMBDA not in va and LAMBDA not in vb:
        return _gcd_univariate(a, b, 1)
    cont = _gcd_univariate(_lambda_content(a), _lambda_content(b), 0)
    pa, pb = _primitive_part(a).primitive_integer(), _primitive_part(b).primitive_integer()
    if pa.degree(MU) < pb.degree(MU):
        pa, pb = pb, pa
    while pb.terms:
        if pb.degree(MU) == 0:
            pa = ONE_POLY
            break
        r = _pseudo_remainder(pa, pb)
        pa, pb = pb, (_primitive_part(r).primitive_integer() if r.terms else r)
    return (cont * _primitive_part(pa)).monic()


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------

class ParamRatFun:
    """Element of Q(λ, μ) in lowest terms with a monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Union[ParamPoly, Number] = 0,
                 den: Union[ParamPoly, Number] = 1):
        num, den = _as_poly(num), _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        n, d = _reduce(num, den)
        self.num = n
        self.den = d
        self._hash = None

    @classmethod
    def _raw(cls, num: ParamPoly, den: ParamPoly) -> "ParamRatFun":
        r = object.__new__(cls)
        r.num = num
        r.den = den
        r._hash = None
        return r

    @classmethod
    def from_poly(cls, p: ParamPoly) -> "ParamRatFun":
        return cls._raw(p, ONE_POLY)

    @classmethod
    def const(cls, c: Number) -> "ParamRatFun":
        return cls._raw(ParamPoly.const(c), ONE_POLY)

    @classmethod
    def gen(cls, name: str) -> "ParamRatFun":
        return cls._raw(ParamPoly.gen(name), ONE_POLY)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num.terms

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value()

    def variables(self) -> Tuple[str, ...]:
        vs = set(self.num.variables()) | set(self.den.variables())
        return tuple(v for v in VARIABLES if v in vs)

    def complexity(self) -> int:
        return max(self.num.degree(), 0) + max(self.den.degree(), 0)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "ParamRatFun":
        other = _as_ratfun(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den.is_one() and other.den.is_one():
            return ParamRatFun._raw(self.num + other.num, ONE_POLY)
        if self.den == other.den:
            return ParamRatFun(self.num + other.num, self.den)
        return ParamRatFun(self.num * other.den + other.num * self.den,
                           self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "ParamRatFun":
        return ParamRatFun._raw(-self.num, self.den)

    def __sub__(self, other) -> "ParamRatFun":
        other = _as_ratfun(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "ParamRatFun":
        return _as_ratfun(other) - self

    def __mul__(self, other) -> "ParamRatFun":
        other = _as_ratfun(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return ZERO
        if self.den.is_one() and other.den.is_one():
            return ParamRatFun._raw(self.num * other.num, ONE_POLY)
        if other.is_constant():
            c = other.constant_value()
            return self if c == 1 else ParamRatFun._raw(self.num.scale(c), self.den)
        if self.is_constant():
            return other * self
        return ParamRatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "ParamRatFun":
        if self.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return ParamRatFun(self.den, self.num)

    def __truediv__(self, other) -> "ParamRatFun":
        other = _as_ratfun(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError(f"division of {self} by zero")
        if other.is_constant():
            return ParamRatFun._raw(self.num.scale(1 / other.constant_value()), self.den)
        return ParamRatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "ParamRatFun":
        return _as_ratfun(other) / self

    def __pow__(self, n: int) -> "ParamRatFun":
        if n < 0:
            return self.inverse() ** (-n)
        return ParamRatFun._raw(self.num ** n, self.den ** n)

    def __eq__(self, other) -> bool:
        if isinstance(other, ParamRatFun):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, ParamPoly)):
            return self.den.is_one() and self.num == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, at: Mapping[str, Number]) -> Fraction:
        d = self.den.evaluate(at)
        if d == 0:
            factor = _vanishing_factor(self.den, at)
            raise PoleError(
                f"{self} has a pole at {_format_point(at)}: "
                f"denominator factor {factor} vanishes", factor)
        return self.num.evaluate(at) / d

    def subs(self, mapping: Mapping[str, Union[Number, ParamPoly, "ParamRatFun"]]) -> "ParamRatFun":
        """Substitute for λ/μ; values may be numbers, polynomials or rational functions."""
        if not any(isinstance(v, ParamRatFun) and not v.is_polynomial() for v in mapping.values()):
            polys = {k: (v.num if isinstance(v, ParamRatFun) else v) for k, v in mapping.items()}
            den = self.den.subs(polys)
            if den.is_zero():
                raise PoleError(f"{self} has a pole under {mapping}", self.den)
            return ParamRatFun(self.num.subs(polys), den)
        # general case: evaluate term by term in the field
        images = {}
        for k, v in mapping.items():
            images[_var_index(k)] = _as_ratfun(v)
        gens = [ParamRatFun.gen(LAMBDA), ParamRatFun.gen(MU)]
        img = [images.get(0, gens[0]), images.get(1, gens[1])]

        def ev(p: ParamPoly) -> ParamRatFun:
            out = ZERO
            for (i, j), c in p.terms.items():
                out = out + (img[0] ** i) * (img[1] ** j) * ParamRatFun.const(c)
            return out

        d = ev(self.den)
        if d.is_zero():
            raise PoleError(f"{self} has a pole under {mapping}", self.den)
        return ev(self.num) / d

    # -- printing -----------------------------------------------------------
    def _display_parts(self) -> Tuple[ParamPoly, ParamPoly]:
        # integer-primitive denominator reads better than the monic one
        den = self.den.primitive_integer()
        factor = den.leading_coefficient() / self.den.leading_coefficient()
        return self.num.scale(factor), den

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        num, den = self._display_parts()
        n, d = str(num), str(den)
        if len(num.terms) > 1:
            n = f"({n})"
        if len(den.terms) > 1 or den.leading_coefficient() != 1:
            d = f"({d})"
        return f"{n}/{d}"

    def latex(self) -> str:
        if self.den.is_one():
            return self.num.latex()
        num, den = self._display_parts()
        return rf"\frac{{{num.latex()}}}{{{den.latex()}}}"

    def __repr__(self) -> str:
        return f"ParamRatFun({self})"


def _as_ratfun(x) -> ParamRatFun:
    if isinstance(x, ParamRatFun):
        return x
    if isinstance(x, (int, Fraction)):
        return ParamRatFun._raw(ParamPoly.const(x), ONE_POLY)
    if isinstance(x, ParamPoly):
        return ParamRatFun._raw(x, ONE_POLY)
    return NotImplemented


def as_ratfun(x) -> ParamRatFun:
    """Coerce ints, Fractions and polynomials into the field."""
    r = _as_ratfun(x)
    if r is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as an element of Q(λ, μ)")
    return r


def _reduce(num: ParamPoly, den: ParamPoly) -> Tuple[ParamPoly, ParamPoly]:
    if num.is_zero():
        return ZERO_POLY, ONE_POLY
    if den.is_constant():
        c = den.constant_value()
        return (num if c == 1 else num.scale(1 / c)), ONE_POLY
    g = poly_gcd(num, den)
    if not g.is_one():
        num, den = exact_divide(num, g), exact_divide(den, g)
    lc = den.leading_coefficient()
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return num, den


def _format_point(at: Mapping[str, Number]) -> str:
    return ", ".join(f"{_ALIASES.get(k, k)}={Fraction(v)}" for k, v in at.items())


def _vanishing_factor(den: ParamPoly, at: Mapping[str, Number]) -> ParamPoly:
    vs = den.variables()
    if len(vs) == 1:
        (v,) = vs
        x = Fraction(at[next(k for k in at if _ALIASES.get(k) == v)])
        idx = _var_index(v)
        e = [0, 0]
        e[idx] = 1
        lin = ParamPoly({tuple(e): x.denominator, (0, 0): -x.numerator})
        return lin
    return den.primitive_integer()


ZERO = ParamRatFun._raw(ZERO_POLY, ONE_POLY)
ONE = ParamRatFun._raw(ONE_POLY, ONE_POLY)
LAM = ParamRatFun._raw(ParamPoly.gen(LAMBDA), ONE_POLY)
MU_ = ParamRatFun._raw(ParamPoly.gen(MU), ONE_POLY)


def ratfun_arith(a, b, op: str) -> ParamRatFun:
    """Dispatch ``add``/``sub``/``mul``/``div`` on two field elements."""
    a, b = as_ratfun(a), as_ratfun(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def evaluate(f, at: Mapping[str, Number]) -> Fraction:
    return as_ratfun(f).evaluate(at)


# ---------------------------------------------------------------------------
# Rational roots
# ---------------------------------------------------------------------------

class RootResult(NamedTuple):
    roots: List[Fraction]
    residual: ParamPoly


def _divisors(n: int) -> List[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: ParamPoly) -> RootResult:
    """Rational roots (with multiplicity) of a univariate polynomial.

    The residual is the monic factor left after dividing out every rational
    root; it has no rational roots.
    """
    if p.is_zero():
        raise ValueError("identically zero condition")
    vs = p.variables()
    if len(vs) > 1:
        raise ValueError(f"{p} is not univariate")
    var = vs[0] if vs else LAMBDA
    idx = _var_index(var)
    deg = p.degree(var)
    coeffs = [Fraction(0)] * (deg + 1)
    for e, c in p.terms.items():
        coeffs[e[idx]] += c
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // igcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]  # ints[k] multiplies x^k
    roots: List[Fraction] = []
    while len(ints) > 1 and ints[0] == 0:
        roots.append(Fraction(0))
        ints = ints[1:]

    def deflate(cs: List[int], r: Fraction) -> Optional[List[Fraction]]:
        # synthetic division by (x - r), highest degree first
        hi = cs[::-1]
        acc = [Fraction(hi[0])]
        for c in hi[1:]:
            acc.append(c + acc[-1] * r)
        if acc[-1] != 0:
            return None
        return acc[:-1][::-1]

    changed = True
    while changed and len(ints) > 1:
        changed = False
        a0, an = ints[0], ints[-1]
        for q in _divisors(an):
            for pnum in _divisors(a0):
                for cand in (Fraction(pnum, q), Fraction(-pnum, q)):
                    rest = deflate(ints, cand)
                    if rest is None:
                        continue
                    roots.append(cand)
                    l2 = 1
                    for c in rest:
                        l2 = l2 * c.denominator // igcd(l2, c.denominator)
                    ints = [int(c * l2) for c in rest]
                    g = 0
                    for c in ints:
                        g = igcd(g, c)
                    ints = [c // g for c in ints]
                    changed = True
                    break
                if changed:
                    break
            if changed:
                break
    e = [0, 0]
    terms = {}
    for k, c in enumerate(ints):
        if c:
            e = [0, 0]
            e[idx] = k
            terms[tuple(e)] = Fraction(c)
    residual = ParamPoly(terms).monic()
    return RootResult(sorted(roots), residual)


def parse_rational(text: str) -> Fraction:
    """Parse an integer or ``p/q``; raises ``ValueError`` otherwise."""
    s = text.strip()
    try:
        if "/" in s:
            a, b = s.split("/", 1)
            return Fraction(int(a), int(b))
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed rational {text!r}; expected an integer or p/q") from None
