"""Jets of point maps, the Schwarzian derivative and its transformation laws.

Jets are taken at one symbolic base point.  A :class:`JetSeries` stores
``(f', f'', …, f⁽ᴺ⁾)``; composition uses Faà di Bruno's formula, so the jets
of the outer map are understood at the image point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .diffpoly import DiffPoly, as_diffpoly, render, substitute, total_derivative
from .operators import (GAMMA_NAME, PHI, R_NAME, DiffOperator, Mode, build_invariant_operator,
                        canonical_invariant_name)
from .scalar_field import LAM, ParamRatFun, as_ratfun

S_NAME = "S"


class RationalExpr:
    """Quotient of two differential polynomials; zero-testing is exact."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num, den = as_diffpoly(num), as_diffpoly(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            den = DiffPoly.const(1)
        elif den.is_constant():
            num, den = num.scale(den.constant_value().inverse()), DiffPoly.const(1)
        self.num, self.den = num, den

    @staticmethod
    def lift(x) -> "RationalExpr":
        return x if isinstance(x, RationalExpr) else RationalExpr(x)

    def __add__(self, other):
        o = RationalExpr.lift(other)
        if self.den == o.den:
            return RationalExpr(self.num + o.num, self.den)
        return RationalExpr(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalExpr(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalExpr.lift(other))

    def __rsub__(self, other):
        return RationalExpr.lift(other) - self

    def __mul__(self, other):
        o = RationalExpr.lift(other)
        return RationalExpr(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalExpr.lift(other)
        if not o.num:
            raise ZeroDivisionError("division by zero expression")
        return RationalExpr(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalExpr.lift(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalExpr(1) / self ** (-n)
        return RationalExpr(self.num ** n, self.den ** n)

    def d(self) -> "RationalExpr":
        """Total derivative (quotient rule)."""
        return RationalExpr(total_derivative(self.num) * self.den - self.num * total_derivative(self.den),
                            self.den * self.den)

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other) -> bool:
        o = RationalExpr.lift(other)
        return not (self.num * o.den - o.num * self.den)

    def __hash__(self):
        raise TypeError("RationalExpr is unhashable")

    def subs(self, mapping: Dict[str, DiffPoly]) -> "RationalExpr":
        return RationalExpr(substitute(self.num, mapping), substitute(self.den, mapping))

    def __str__(self) -> str:
        if self.den == DiffPoly.const(1):
            return render(self.num)
        return f"({render(self.num)})/({render(self.den)})"

    def __repr__(self) -> str:
        return f"RationalExpr({self})"


Expr = Union[RationalExpr, DiffPoly, int, Fraction]


@dataclass(frozen=True)
class JetSeries:
    """``jets[k-1]`` is the k-th derivative of the map at the base point."""

    jets: Tuple[RationalExpr, ...]

    def __post_init__(self):
        if not self.jets:
            raise ValueError("a jet series needs at least the first derivative")
        if self.jets[0].is_zero():
            raise ValueError("first jet must be invertible")

    @property
    def order(self) -> int:
        return len(self.jets)

    def __getitem__(self, k: int) -> RationalExpr:
        """``f⁽ᵏ⁾`` for k ≥ 1."""
        if not 1 <= k <= self.order:
            raise IndexError(f"jet order {k} outside 1..{self.order}")
        return self.jets[k - 1]

    def truncate(self, order: int) -> "JetSeries":
        return JetSeries(self.jets[:order])

    @classmethod
    def from_list(cls, values: Sequence[Expr]) -> "JetSeries":
        return cls(tuple(RationalExpr.lift(as_diffpoly(v) if not isinstance(v, RationalExpr) else v)
                         for v in values))

    @classmethod
    def symbolic(cls, name: str, order: int) -> "JetSeries":
        """Independent jet symbols ``name1 … nameN`` (constants at the base point)."""
        return cls(tuple(RationalExpr(DiffPoly.constant(f"{name}{k}")) for k in range(1, order + 1)))

    @classmethod
    def identity(cls, order: int) -> "JetSeries":
        return cls.from_list([1] + [0] * (order - 1))

    @classmethod
    def of_expression(cls, expr: Expr, order: int) -> "JetSeries":
        """Jets of a map given as an expression in the coordinate ``z``."""
        cur = RationalExpr.lift(expr if isinstance(expr, RationalExpr) else as_diffpoly(expr))
        out = []
        for _ in range(order):
            cur = cur.d()
            out.append(cur)
        return cls(tuple(out))

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetSeries) or other.order != self.order:
            return NotImplemented
        return all(a == b for a, b in zip(self.jets, other.jets))

    __hash__ = None


@lru_cache(maxsize=None)
def _bell_shape(n: int, k: int) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
    """Partial Bell polynomial ``B_{n,k}`` as (coefficient, exponent vector) pairs."""
    if n == 0 and k == 0:
        return ((1, ()),)
    if n == 0 or k == 0:
        return ()
    acc: Dict[Tuple[int, ...], int] = {}
    for i in range(1, n - k + 2):
        for c, exps in _bell_shape(n - i, k - 1):
            e = list(exps) + [0] * max(0, i - len(exps))
            e[i - 1] += 1
            key = tuple(e)
            acc[key] = acc.get(key, 0) + comb(n - 1, i - 1) * c
    return tuple((c, e) for e, c in sorted(acc.items()) if c)


def bell(n: int, k: int, xs: Sequence[RationalExpr]) -> RationalExpr:
    out = RationalExpr(0)
    for c, exps in _bell_shape(n, k):
        term = RationalExpr(c)
        for i, e in enumerate(exps):
            if e:
                term = term * xs[i] ** e
        out = out + term
    return out


def compose_jets(f: JetSeries, g: JetSeries) -> JetSeries:
    """Jets of ``f∘g``; ``f``'s jets are those at ``g``'s image point."""
    n = min(f.order, g.order)
    xs = list(g.jets[:n])
    return JetSeries(tuple(sum((f[k] * bell(m, k, xs) for k in range(1, m + 1)), RationalExpr(0))
                           for m in range(1, n + 1)))


def schwarzian(f: JetSeries) -> RationalExpr:
    """``f'''/f' - (3/2)(f''/f')²``."""
    if f.order < 3:
        raise ValueError("the Schwarzian needs jets up to order 3")
    ratio = f[2] / f[1]
    return f[3] / f[1] - RationalExpr(Fraction(3, 2)) * ratio * ratio


def mobius_jets(order: int = 4, names: Tuple[str, str, str, str] = ("a", "b", "c", "d")) -> JetSeries:
    """Jets of ``(az+b)/(cz+d)`` at a symbolic point, with symbolic a, b, c, d."""
    a, b, c, d = (DiffPoly.constant(n) for n in names)
    z = DiffPoly.z()
    return JetSeries.of_expression(RationalExpr(a * z + b, c * z + d), order)


def _check_order(order: int) -> None:
    if order < 3:
        raise ValueError("jet order must be at least 3")


def schwarzian_cocycle_residual(f: JetSeries, g: JetSeries) -> RationalExpr:
    """``S(f∘g) - S(f)·g'² - S(g)``."""
    return schwarzian(compose_jets(f, g)) - schwarzian(f) * g[1] * g[1] - schwarzian(g)


def verify_schwarzian_cocycle(order: int = 3) -> RationalExpr:
    _check_order(order)
    return schwarzian_cocycle_residual(JetSeries.symbolic("f", order), JetSeries.symbolic("g", order))


def transport_connection(r: Expr, f: JetSeries) -> RationalExpr:
    """Pull a projective connection back along a chart change: ``f'²·R + S(f)``."""
    return RationalExpr.lift(r if isinstance(r, RationalExpr) else as_diffpoly(r)) * f[1] * f[1] + schwarzian(f)


def transition_residual(f: JetSeries, g: JetSeries, r: Optional[Expr] = None) -> RationalExpr:
    """Pulling back by f then g minus pulling back by ``f∘g`` in one step."""
    r = RationalExpr(DiffPoly.constant(R_NAME)) if r is None else r
    return transport_connection(transport_connection(r, f), g) - transport_connection(r, compose_jets(f, g))


def verify_projective_transition_consistency(order: int = 4) -> RationalExpr:
    _check_order(order)
    return transition_residual(JetSeries.symbolic("f", order), JetSeries.symbolic("g", order))


# ---------------------------------------------------------------------------
# Correspondence with the Diff(S¹) cocycle family
# ---------------------------------------------------------------------------

def _s(k: int = 0) -> DiffPoly:
    return DiffPoly.jet(S_NAME, k)


def schwarzian_family(name: str, lam=None) -> DiffOperator:
    """The operator-valued group cocycle paired with ``name`` (I3 … I6'), in S and its derivatives."""
    name = canonical_invariant_name(name)
    h = Fraction(1, 2)
    if name == "I3":
        lam = LAM if lam is None else as_ratfun(lam)
        coeffs, shift = [_s()], 2
    elif name == "I4":
        lam = LAM if lam is None else as_ratfun(lam)
        coeffs, shift = [_s(1).scale(-lam * h), _s()], 3
    elif name == "I5":
        lam = LAM if lam is None else as_ratfun(lam)
        coeffs = [_s(2).scale(lam * (2 * lam + 1) / 10) - (_s() * _s()).scale(lam * (lam + 3) / 5),
                  _s(1).scale(-(2 * lam + 1) * h), _s()]
        shift = 4
    elif name == "I6":
        lam = as_ratfun(0)
        coeffs = [DiffPoly.zero(), _s(2).scale(Fraction(3, 10)) + (_s() * _s()).scale(Fraction(4, 5)),
                  _s(1).scale(Fraction(-3, 2)), _s()]
        shift = 5
    else:
        lam = as_ratfun(-4)
        coeffs = [_s(3).scale(Fraction(14, 5)) + (_s() * _s(1)).scale(Fraction(8, 5)),
                  _s(2).scale(Fraction(63, 10)) + (_s() * _s()).scale(Fraction(4, 5)),
                  _s(1).scale(Fraction(9, 2)), _s()]
        shift = 5
    return DiffOperator(lam, lam + shift, tuple(coeffs), Mode.FLAT, f"sch[{name}]")


FAMILY_LABELS = {"I3": "S_λ", "I4": "T_λ", "I5": "U_λ", "I6": "V_0", "I6'": "V_-4"}


@dataclass
class CorrespondenceReport:
    name: str
    family: str
    sign: int
    match: bool
    residual: DiffPoly
    substituted: DiffPoly
    family_value: DiffPoly
    even_in_s: bool

    @property
    def residual_text(self) -> str:
        return render(self.residual)


def invariant_in_s(name: str, lam=None) -> DiffOperator:
    """``I_k`` with Γ = 0 and R replaced by ``-S``."""
    op = build_invariant_operator(name, lam, Mode.COVARIANT_FREE_R)
    repl = {GAMMA_NAME: DiffPoly.zero(), R_NAME: -_s()}
    return DiffOperator(op.source, op.target, tuple(substitute(c, repl) for c in op.coeffs),
                        Mode.FLAT, op.name)


def _s_degree_parity(p: DiffPoly) -> bool:
    """True when every monomial has even total degree in S-jets."""
    for mono in p.terms:
        deg = sum(e for name, _, e in mono if name == S_NAME)
        if deg % 2:
            return False
    return True


def check_sch_correspondence(name: str, lam=None) -> CorrespondenceReport:
    """Compare ``I_k(R ↦ -S)`` with the group cocycle, allowing one overall sign."""
    name = canonical_invariant_name(name)
    mine = invariant_in_s(name, lam).value(PHI)
    theirs = schwarzian_family(name, lam).value(PHI)
    candidates = []
    for sign in (-1, 1):
        res = mine - theirs.scale(sign)
        candidates.append((len(res.terms), -sign, sign, res))
    _, _, sign, residual = min(candidates, key=lambda t: (t[0], t[1]))
    return CorrespondenceReport(name, FAMILY_LABELS[name], sign, not residual, residual,
                                mine, theirs, _s_degree_parity(residual))
