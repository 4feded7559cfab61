"""Differential operators between density modules and the Lie action on them.

Expressions are :class:`~projcoh.diffpoly.DiffPoly` values in jets of a
vector-field symbol ``X`` and an argument density ``phi``.  An operator value
``A(φ)`` is linear in ``phi``-jets; a cochain value ``c(X)(φ)`` is bilinear in
``X`` and ``phi``.

Three chart presentations are supported:

* ``FLAT``: Γ = 0 and R = 0, ∇ is plain d/dz;
* ``COVARIANT``: ∇ built from the connection symbol Γ, with R eliminated
  through ``R = Γ' - Γ²/2``;
* ``COVARIANT_FREE_R``: as above but R kept as an independent 2-density.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .diffpoly import (GAMMA, DiffPoly, FunctionSymbol, Kind, as_diffpoly, covariant_jets,
                       extract_bilinear, render, substitute, total_derivative)
from .scalar_field import LAM, ONE, ZERO, ParamRatFun, as_ratfun

X_NAME = "X"
Y_NAME = "Y"
PHI = "phi"
PSI = "psi"
R_NAME = "R"
GAMMA_NAME = GAMMA.name


class Mode(Enum):
    FLAT = "flat"
    COVARIANT = "covariant"
    COVARIANT_FREE_R = "covariant-free-r"

    @property
    def connection(self) -> Optional[str]:
        return None if self is Mode.FLAT else GAMMA_NAME

    @classmethod
    def parse(cls, value: Union[str, "Mode"]) -> "Mode":
        if isinstance(value, Mode):
            return value
        for m in cls:
            if m.value == value:
                return m
        raise ValueError(f"unknown chart mode {value!r}; expected flat, covariant or covariant-free-r")


def projective_connection_from_gamma(connection: str = GAMMA_NAME) -> DiffPoly:
    """``R = Γ' - Γ²/2``."""
    g = DiffPoly.jet(connection)
    return total_derivative(g) - (g * g).scale(Fraction(1, 2))


def eliminate_r(expr: DiffPoly, connection: str = GAMMA_NAME) -> DiffPoly:
    return substitute(expr, {R_NAME: projective_connection_from_gamma(connection)})


def _vf(x) -> DiffPoly:
    if isinstance(x, FunctionSymbol):
        return x.jet()
    if isinstance(x, str):
        return DiffPoly.jet(x)
    return as_diffpoly(x)


# ---------------------------------------------------------------------------
# Lie derivative on densities and on operators
# ---------------------------------------------------------------------------

def lie_action_density(X, expr, weight, mode: Union[str, Mode] = Mode.FLAT) -> DiffPoly:
    """``L_X^w(ψ) = X∇ψ + w·ψ·∇X`` for an expression ψ of weight ``w``.

    In the covariant presentation the Γ terms cancel, so both modes return
    ``Xψ' + w·X'ψ``; the covariant branch computes the long form literally.
    """
    Xp = _vf(X)
    psi = _vf(expr) if isinstance(expr, (str, FunctionSymbol)) else as_diffpoly(expr)
    w = as_ratfun(weight)
    conn = Mode.parse(mode).connection
    if conn is None:
        return Xp * total_derivative(psi) + (total_derivative(Xp) * psi).scale(w)
    nabla_psi = covariant_jets(psi, w, 1, conn)[1]
    nabla_x = covariant_jets(Xp, -1, 1, conn)[1]
    return Xp * nabla_psi + (psi * nabla_x).scale(w)


def lie_action_expr(X, value: DiffPoly, source, target, arg: str = PHI) -> DiffPoly:
    """``L_X^{λ,μ}(B) = L_X^μ ∘ B - B ∘ L_X^λ`` for an operator given by its value ``B(arg)``."""
    Xp = _vf(X)
    moved = substitute(value, {arg: lie_action_density(Xp, DiffPoly.jet(arg), source)})
    return lie_action_density(Xp, value, target) - moved


def vf_bracket(X, Y) -> DiffPoly:
    """``[X, Y] = X Y' - Y X'`` (coefficient of d/dz)."""
    Xp, Yp = _vf(X), _vf(Y)
    return Xp * total_derivative(Yp) - Yp * total_derivative(Xp)


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffOperator:
    """``A = Σ aᵢ Dⁱ`` from weight ``source`` to weight ``target``.

    ``D`` is ∇ (covariant modes) or d/dz (flat mode); ``coeffs[i]`` has weight
    ``target - source - i``.
    """

    source: ParamRatFun
    target: ParamRatFun
    coeffs: Tuple[DiffPoly, ...]
    mode: Mode = Mode.FLAT
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "source", as_ratfun(self.source))
        object.__setattr__(self, "target", as_ratfun(self.target))
        cs = [as_diffpoly(c) for c in self.coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "mode", Mode.parse(self.mode))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def connection(self) -> Optional[str]:
        return self.mode.connection

    def __call__(self, expr) -> DiffPoly:
        """Apply to an expression of weight ``source``."""
        psi = as_diffpoly(expr)
        if not self.coeffs:
            return DiffPoly.zero()
        jets = covariant_jets(psi, self.source, self.order, self.connection)
        out = DiffPoly.zero()
        for a, j in zip(self.coeffs, jets):
            if a:
                out = out + a * j
        return out

    def apply(self, density_symbol: FunctionSymbol) -> DiffPoly:
        w = density_symbol.density_weight
        if w is None or w != self.source:
            raise ValueError(
                f"weight mismatch: {density_symbol.name} has weight {w}, operator expects {self.source}")
        return self(density_symbol.jet())

    def value(self, arg: str = PHI) -> DiffPoly:
        return self(DiffPoly.jet(arg))

    def map_coefficients(self, fn: Callable[[DiffPoly], DiffPoly]) -> "DiffOperator":
        return DiffOperator(self.source, self.target, tuple(fn(c) for c in self.coeffs),
                            self.mode, self.name)

    def with_mode(self, mode: Union[str, Mode]) -> "DiffOperator":
        return DiffOperator(self.source, self.target, self.coeffs, mode, self.name)

    def __str__(self) -> str:
        D = "d" if self.mode is Mode.FLAT else "∇"
        parts = []
        for i in range(self.order, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            cs = render(c)
            if len(c) > 1:
                cs = f"({cs})"
            if i == 0:
                parts.append(cs)
            else:
                op = D if i == 1 else f"{D}^{i}"
                parts.append(op if cs == "1" else (f"-{op}" if cs == "-1" else f"{cs} {op}"))
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def identity_operator(weight, mode: Union[str, Mode] = Mode.FLAT) -> DiffOperator:
    return DiffOperator(weight, weight, (DiffPoly.const(1),), mode, "id")


def derivative_operator(order: int, source, target=None, coeff=1,
                        mode: Union[str, Mode] = Mode.FLAT) -> DiffOperator:
    """``coeff·Dⁿ`` from ``source`` to ``target`` (default ``source + order``)."""
    s = as_ratfun(source)
    t = s + order if target is None else as_ratfun(target)
    coeffs = [DiffPoly.zero()] * order + [as_diffpoly(coeff)]
    return DiffOperator(s, t, tuple(coeffs), mode)


def compose(B: DiffOperator, A: DiffOperator) -> DiffOperator:
    """``B ∘ A`` by the (covariant) Leibniz rule."""
    if A.target != B.source:
        raise ValueError(f"cannot compose: target weight {A.target} of A differs from source weight {B.source} of B")
    if A.mode.connection != B.mode.connection:
        raise ValueError("cannot compose operators presented in different chart modes")
    conn = A.connection
    out: Dict[int, DiffPoly] = {}
    for i, a in enumerate(A.coeffs):
        if a.is_zero():
            continue
        wa = A.target - A.source - i
        top = max((j for j, b in enumerate(B.coeffs) if b), default=-1)
        a_jets = covariant_jets(a, wa, max(top, 0), conn)
        for j, b in enumerate(B.coeffs):
            if b.is_zero():
                continue
            for l in range(j + 1):
                k = i + j - l
                term = (b * a_jets[l]).scale(comb(j, l))
                out[k] = out.get(k, DiffPoly.zero()) + term
    n = max(out, default=-1)
    coeffs = tuple(out.get(k, DiffPoly.zero()) for k in range(n + 1))
    return DiffOperator(A.source, B.target, coeffs, A.mode)


@dataclass(frozen=True)
class BiDiffExpr:
    """``Σ table[(i, j)]·first⁽ⁱ⁾·second⁽ʲ⁾``, linear in each slot."""

    table: Mapping[Tuple[int, int], DiffPoly]
    first: str = X_NAME
    second: str = PHI

    @classmethod
    def from_diffpoly(cls, expr: DiffPoly, first: str = X_NAME, second: str = PHI) -> "BiDiffExpr":
        return cls(extract_bilinear(expr, first, second), first, second)

    def to_diffpoly(self) -> DiffPoly:
        out = DiffPoly.zero()
        for (i, j), c in self.table.items():
            out = out + c * DiffPoly.jet(self.first, i) * DiffPoly.jet(self.second, j)
        return out

    def coefficient(self, i: int, j: int) -> DiffPoly:
        return self.table.get((i, j), DiffPoly.zero())

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.table.values())

    def support(self) -> List[Tuple[int, int]]:
        return sorted(k for k, c in self.table.items() if c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiDiffExpr):
            return NotImplemented
        return (self.first, self.second) == (other.first, other.second) and \
            self.to_diffpoly() == other.to_diffpoly()

    def __hash__(self) -> int:
        return hash(self.to_diffpoly())

    def __str__(self) -> str:
        return render(self.to_diffpoly())

    def latex(self) -> str:
        return self.to_diffpoly().latex()


def lie_action_operator(X, A: DiffOperator, arg: str = PHI) -> BiDiffExpr:
    """``L_X^{λ,μ}(A)`` as a bilinear expression in X-jets and argument jets."""
    value = lie_action_expr(X, A.value(arg), A.source, A.target, arg)
    name = X if isinstance(X, str) else (X.name if isinstance(X, FunctionSymbol) else X_NAME)
    return BiDiffExpr.from_diffpoly(value, name, arg)


# ---------------------------------------------------------------------------
# Transvectants
# ---------------------------------------------------------------------------

def binomial(top, k: int) -> ParamRatFun:
    """``C(t, k) = t(t-1)…(t-k+1)/k!`` for symbolic ``t``."""
    t = as_ratfun(top)
    out = ONE
    for r in range(k):
        out = out * (t - r)
    return out * Fraction(1, factorial(k))


def transvectant(m: int, lam, mu, first: str = PHI, second: str = PSI) -> BiDiffExpr:
    """The sl₂-invariant bilinear operator of order ``m`` on F_λ ⊗ F_μ.

    The coefficient of ``first⁽ⁱ⁾ second⁽ʲ⁾`` (i + j = m) is
    ``(-1)ⁱ m! C(2μ+m-1, i) C(2λ+m-1, j)``.
    """
    lam, mu = as_ratfun(lam), as_ratfun(mu)
    table = {}
    for i in range(m + 1):
        j = m - i
        c = binomial(2 * mu + m - 1, i) * binomial(2 * lam + m - 1, j) * (factorial(m) * (-1) ** i)
        if not c.is_zero():
            table[(i, j)] = DiffPoly.const(c)
    return BiDiffExpr(table, first, second)


def printed_transvectant(m: int, lam, mu, first: str = PHI, second: str = PSI) -> BiDiffExpr:
    """The variant with the binomials indexed the other way round.

    Coefficient ``(-1)ⁱ m! C(2λ+m-1, i) C(2μ+m-1, j)``; kept for comparison,
    it is not sl₂-invariant unless λ = ±μ at m = 1.
    """
    lam, mu = as_ratfun(lam), as_ratfun(mu)
    table = {}
    for i in range(m + 1):
        j = m - i
        c = binomial(2 * lam + m - 1, i) * binomial(2 * mu + m - 1, j) * (factorial(m) * (-1) ** i)
        if not c.is_zero():
            table[(i, j)] = DiffPoly.const(c)
    return BiDiffExpr(table, first, second)


# ---------------------------------------------------------------------------
# The invariant operators I₃ … I₆′ and cocycles J₃ … J₆′
# ---------------------------------------------------------------------------

# R-expressions available to operator templates
R_BASIS = ("R", "dR", "d2R", "d3R", "R^2", "R dR")
_TEMPLATE_TEXT = {"R": "R", "dR": "∇R", "d2R": "∇²R", "d3R": "∇³R", "R^2": "R²", "R dR": "R∇R"}


def r_basis(connection: Optional[str] = GAMMA_NAME) -> Dict[str, DiffPoly]:
    jets = covariant_jets(DiffPoly.jet(R_NAME), 2, 3, connection)
    return {"R": jets[0], "dR": jets[1], "d2R": jets[2], "d3R": jets[3],
            "R^2": jets[0] * jets[0], "R dR": jets[0] * jets[1]}


Coef = Union[ParamRatFun, str]  # a str names an unknown constant


@dataclass(frozen=True)
class OperatorTemplate:
    """Terms ``(slot, basis_key, coefficient)``: ``coefficient·basis·D^slot``."""

    name: str
    shift: int
    terms: Tuple[Tuple[int, str, Coef], ...]
    fixed_weight: Optional[Fraction] = None

    def unknowns(self) -> List[str]:
        return [c for _, _, c in self.terms if isinstance(c, str)]

    def __str__(self) -> str:
        parts = []
        for slot, key, c in sorted(self.terms, key=lambda t: -t[0]):
            coef = c if isinstance(c, str) else ("" if c.is_one() else f"({c})·")
            if isinstance(c, str):
                coef = f"{c}·"
            d = "" if slot == 0 else ("·∇" if slot == 1 else f"·∇^{slot}")
            parts.append(f"{coef}{_TEMPLATE_TEXT[key]}{d}")
        return " + ".join(parts)

    def resolve(self, values: Mapping[str, ParamRatFun]) -> "OperatorTemplate":
        """Replace unknowns that appear in ``values`` by their values."""
        terms = tuple((s, k, as_ratfun(values[c]) if isinstance(c, str) and c in values else c)
                      for s, k, c in self.terms)
        return OperatorTemplate(self.name, self.shift, terms, self.fixed_weight)

    def build(self, lam, mode: Union[str, Mode] = Mode.COVARIANT_FREE_R) -> DiffOperator:
        mode = Mode.parse(mode)
        lam = as_ratfun(lam)
        conn = mode.connection
        basis = r_basis(conn)
        top = max(s for s, _, _ in self.terms)
        coeffs = [DiffPoly.zero() for _ in range(top + 1)]
        for slot, key, c in self.terms:
            term = basis[key]
            if isinstance(c, str):
                term = DiffPoly.constant(c) * term
            else:
                term = term.scale(c)
            coeffs[slot] = coeffs[slot] + term
        if mode is Mode.COVARIANT:
            coeffs = [eliminate_r(c, conn) for c in coeffs]
        elif mode is Mode.FLAT:
            coeffs = [substitute(c, {R_NAME: DiffPoly.zero()}) for c in coeffs]
        return DiffOperator(lam, lam + self.shift, tuple(coeffs), mode, self.name)


def _invariant_table(lam: ParamRatFun) -> Dict[str, OperatorTemplate]:
    half = Fraction(1, 2)
    return {
        "I3": OperatorTemplate("I3", 2, ((0, "R", ONE),)),
        "I4": OperatorTemplate("I4", 3, ((1, "R", ONE), (0, "dR", -lam * half))),
        "I5": OperatorTemplate("I5", 4, (
            (2, "R", ONE),
            (1, "dR", -(2 * lam + 1) * half),
            (0, "d2R", lam * (2 * lam + 1) * Fraction(1, 10)),
            (0, "R^2", lam * (lam + 3) * Fraction(1, 5)))),
        "I6": OperatorTemplate("I6", 5, (
            (3, "R", ONE),
            (2, "dR", as_ratfun(Fraction(-3, 2))),
            (1, "d2R", as_ratfun(Fraction(3, 10))),
            (1, "R^2", as_ratfun(Fraction(4, 5)))), fixed_weight=Fraction(0)),
        "I6'": OperatorTemplate("I6'", 5, (
            (3, "R", ONE),
            (2, "dR", as_ratfun(Fraction(9, 2))),
            (1, "d2R", as_ratfun(Fraction(63, 10))),
            (1, "R^2", as_ratfun(Fraction(4, 5))),
            (0, "d3R", as_ratfun(Fraction(14, 5))),
            (0, "R dR", as_ratfun(Fraction(8, 5)))), fixed_weight=Fraction(-4)),
    }


INVARIANT_NAMES = ("I3", "I4", "I5", "I6", "I6'")
_ALIASES = {"I6p": "I6'", "I6prime": "I6'", "I6_m4": "I6'"}


def canonical_invariant_name(name: str) -> str:
    n = _ALIASES.get(name, name)
    if n not in INVARIANT_NAMES:
        raise ValueError(f"unknown operator {name!r}; expected one of {', '.join(INVARIANT_NAMES)}")
    return n


def _check_fixed_weight(name: str, fixed: Optional[Fraction], lam: ParamRatFun) -> None:
    if fixed is not None and lam != fixed:
        raise ValueError(f"{name} is only defined at λ={fixed}, got λ={lam}")


def invariant_template(name: str, lam=None) -> OperatorTemplate:
    """The printed operator, as a template with all coefficients fixed."""
    name = canonical_invariant_name(name)
    lam = LAM if lam is None else as_ratfun(lam)
    return _invariant_table(lam)[name]


def unknown_template(name: str) -> OperatorTemplate:
    """Same shape as the printed operator, leading ``R·D^k`` fixed and the rest unknown."""
    printed = invariant_template(name)
    terms = []
    for k, (slot, key, c) in enumerate(printed.terms):
        if k == 0:
            terms.append((slot, key, c))
        else:
            terms.append((slot, key, f"a{k}"))
    return OperatorTemplate(printed.name, printed.shift, tuple(terms), printed.fixed_weight)


def build_invariant_operator(name: str, lam=None,
                             mode: Union[str, Mode] = Mode.COVARIANT_FREE_R) -> DiffOperator:
    name = canonical_invariant_name(name)
    template = invariant_template(name, lam)
    lam_v = LAM if lam is None else as_ratfun(lam)
    if template.fixed_weight is not None:
        if lam is None:
            lam_v = as_ratfun(template.fixed_weight)
        _check_fixed_weight(name, template.fixed_weight, lam_v)
    return template.build(lam_v, mode)


@dataclass(frozen=True)
class Cocycle:
    """A cochain ``X ↦ c(X)`` stored through its value on the formal field ``X``."""

    name: str
    source: ParamRatFun
    target: ParamRatFun
    value: DiffPoly
    mode: Mode = Mode.FLAT
    vf: str = X_NAME
    arg: str = PHI

    def __call__(self, field) -> DiffPoly:
        """``c(V)(φ)`` for a vector-field expression V (linear substitution)."""
        return substitute(self.value, {self.vf: _vf(field)})

    def bidiff(self) -> BiDiffExpr:
        return BiDiffExpr.from_diffpoly(self.value, self.vf, self.arg)

    def scaled(self, c) -> "Cocycle":
        return Cocycle(self.name, self.source, self.target, self.value.scale(c),
                       self.mode, self.vf, self.arg)

    def specialize(self, lam) -> "Cocycle":
        at = {"λ": as_ratfun(lam)}
        return Cocycle(self.name, self.source.subs(at), self.target.subs(at),
                       self.value.specialize(at), self.mode, self.vf, self.arg)

    def __str__(self) -> str:
        return render(self.value)


@dataclass(frozen=True)
class CocycleSpec:
    name: str
    shift: int
    operator: str
    # (∇-order on X, ∇-order on φ, coefficient as a function of λ)
    terms: Tuple[Tuple[int, int, Callable[[ParamRatFun], ParamRatFun]], ...]
    fixed_weight: Optional[Fraction] = None

    @property
    def index(self) -> int:
        return self.shift + 1


COCYCLES: Dict[str, CocycleSpec] = {
    "J3": CocycleSpec("J3", 2, "I3", ((3, 0, lambda l: ONE),)),
    "J4": CocycleSpec("J4", 3, "I4", ((3, 1, lambda l: ONE), (4, 0, lambda l: -l / 2))),
    "J5": CocycleSpec("J5", 4, "I5", (
        (3, 2, lambda l: ONE),
        (4, 1, lambda l: -(2 * l + 1) / 2),
        (5, 0, lambda l: l * (2 * l + 1) / 10))),
    "J6_0": CocycleSpec("J6_0", 5, "I6", (
        (3, 3, lambda l: ONE),
        (4, 2, lambda l: as_ratfun(Fraction(-3, 2))),
        (5, 1, lambda l: as_ratfun(Fraction(3, 10)))), fixed_weight=Fraction(0)),
    "J6_m4": CocycleSpec("J6_m4", 5, "I6'", (
        (3, 3, lambda l: ONE),
        (4, 2, lambda l: as_ratfun(Fraction(9, 2))),
        (5, 1, lambda l: as_ratfun(Fraction(63, 10))),
        (6, 0, lambda l: as_ratfun(Fraction(14, 5)))), fixed_weight=Fraction(-4)),
}
COCYCLE_NAMES = tuple(COCYCLES)
_COCYCLE_ALIASES = {"J6": "J6_0", "J6'": "J6_m4", "J6p": "J6_m4", "J6_-4": "J6_m4"}


def canonical_cocycle_name(name: str) -> str:
    n = _COCYCLE_ALIASES.get(name, name)
    if n not in COCYCLES:
        raise ValueError(f"unknown cocycle {name!r}; expected one of {', '.join(COCYCLE_NAMES)}")
    return n


def cocycle_weight(name: str, lam=None) -> ParamRatFun:
    """Resolve the source weight, enforcing the fixed weight of the order-6 cocycles."""
    spec = COCYCLES[canonical_cocycle_name(name)]
    if spec.fixed_weight is not None:
        if lam is None:
            return as_ratfun(spec.fixed_weight)
        lam = as_ratfun(lam)
        _check_fixed_weight(spec.name, spec.fixed_weight, lam)
        return lam
    return LAM if lam is None else as_ratfun(lam)


def flat_part_value(spec: CocycleSpec, lam: ParamRatFun, conn: Optional[str],
                    coefficients: Optional[Sequence[Coef]] = None) -> DiffPoly:
    """``Σ c·∇ᵖX·∇^qφ``; ``coefficients`` overrides the printed ones (str = unknown)."""
    top_x = max(p for p, _, _ in spec.terms)
    top_phi = max(q for _, q, _ in spec.terms)
    xj = covariant_jets(DiffPoly.jet(X_NAME), -1, top_x, conn)
    pj = covariant_jets(DiffPoly.jet(PHI), lam, top_phi, conn)
    out = DiffPoly.zero()
    for k, (p, q, coef) in enumerate(spec.terms):
        c = coef(lam) if coefficients is None else coefficients[k]
        term = xj[p] * pj[q]
        out = out + (DiffPoly.constant(c) * term if isinstance(c, str) else term.scale(c))
    return out


def build_cocycle(name: str, lam=None, mode: Union[str, Mode] = Mode.COVARIANT,
                  operator: Optional[DiffOperator] = None) -> Cocycle:
    """``J_k(X) = (∇³X ∇^{k-3} + …) - L_X^{λ,λ+k-1}(I_k)`` in the requested chart.

    ``operator`` replaces the printed ``I_k`` (it must be in the same mode).
    """
    name = canonical_cocycle_name(name)
    spec = COCYCLES[name]
    mode = Mode.parse(mode)
    lam = cocycle_weight(name, lam)
    conn = mode.connection
    value = flat_part_value(spec, lam, conn)
    if mode is not Mode.FLAT:
        op = operator if operator is not None else build_invariant_operator(
            spec.operator, lam if spec.fixed_weight is None else None, mode)
        value = value - lie_action_expr(X_NAME, op.value(PHI), op.source, op.target)
        if mode is Mode.COVARIANT:
            value = eliminate_r(value)
    return Cocycle(name, lam, lam + spec.shift, value, mode)


def coboundary(A: DiffOperator, name: str = "δA") -> Cocycle:
    """The cochain ``X ↦ L_X^{λ,μ}(A)``."""
    value = lie_action_expr(X_NAME, A.value(PHI), A.source, A.target)
    return Cocycle(name, A.source, A.target, value, A.mode)


def bilinear_cochain(coeffs: Mapping[Tuple[int, int], Coef], lam, shift: int,
                     name: str = "c") -> Cocycle:
    """Flat cochain ``X ↦ Σ c_ij X⁽ⁱ⁾ φ⁽ʲ⁾`` (str coefficients are unknowns)."""
    out = DiffPoly.zero()
    for (i, j), c in coeffs.items():
        term = DiffPoly.jet(X_NAME, i) * DiffPoly.jet(PHI, j)
        out = out + (DiffPoly.constant(c) * term if isinstance(c, str) else term.scale(c))
    lam = as_ratfun(lam)
    return Cocycle(name, lam, lam + shift, out, Mode.FLAT)
