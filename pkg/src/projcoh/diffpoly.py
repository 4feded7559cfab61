"""Differential polynomials in jets of named function symbols.

A :class:`DiffPoly` is a finite sum of monomials in jet variables ``(name, k)``
(the k-th ``d/dz`` derivative of a function symbol), the coordinate ``z`` and
constant unknowns, with coefficients in :class:`~projcoh.scalar_field.ParamRatFun`.
Exponents may be negative, which lets a nonvanishing jet such as ``f'`` be
inverted; the Leibniz rule is unaffected.

Covariant derivatives are computed, never stored: ``∇`` of an expression of
weight ``w`` is ``d/dz - w·Γ``, and the caller supplies ``w`` each time.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .scalar_field import ONE, ZERO, ParamRatFun, as_ratfun

COORD = "z"
CONST_ORDER = -1

DEFAULT_MAX_JET = 12
_max_jet = int(os.environ.get("PROJCOH_MAX_JET", DEFAULT_MAX_JET))


class JetOrderError(ArithmeticError):
    """A jet order exceeded the configured maximum."""

    def __init__(self, symbol: str, order: int, limit: int):
        super().__init__(
            f"jet order {order} of symbol {symbol!r} exceeds the maximum jet order {limit}")
        self.symbol = symbol
        self.order = order
        self.limit = limit


def max_jet_order() -> int:
    return _max_jet


def set_max_jet_order(n: int) -> None:
    global _max_jet
    if n < 1:
        raise ValueError("maximum jet order must be positive")
    _max_jet = int(n)
    _DERIV_CACHE.clear()


@contextmanager
def jet_order_limit(n: int) -> Iterator[None]:
    old = _max_jet
    set_max_jet_order(n)
    try:
        yield
    finally:
        set_max_jet_order(old)


class Kind(Enum):
    DENSITY = "density"
    CONNECTION = "connection"
    CONNECTION_DIFFERENCE = "connection_difference"
    PROJECTIVE_CONNECTION = "projective_connection"
    VECTOR_FIELD = "vector_field"
    FUNCTION = "function"
    CONSTANT = "constant"


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    kind: Kind
    weight: Optional[ParamRatFun] = None

    def __post_init__(self):
        if self.kind is Kind.DENSITY and self.weight is None:
            raise ValueError(f"density symbol {self.name!r} needs a weight")
        if self.weight is not None and not isinstance(self.weight, ParamRatFun):
            object.__setattr__(self, "weight", as_ratfun(self.weight))

    @property
    def density_weight(self) -> Optional[ParamRatFun]:
        """Weight used when this symbol is covariantly differentiated."""
        if self.kind is Kind.VECTOR_FIELD:
            return as_ratfun(-1)
        if self.kind is Kind.PROJECTIVE_CONNECTION:
            return as_ratfun(2)
        if self.kind is Kind.CONNECTION_DIFFERENCE:
            return ONE
        return self.weight

    def jet(self, order: int = 0) -> "DiffPoly":
        if self.kind is Kind.CONSTANT:
            if order:
                return DiffPoly.zero()
            return DiffPoly.constant(self.name)
        return DiffPoly.jet(self.name, order)

    def __str__(self) -> str:
        return display_name(self.name)


def density(name: str, weight) -> FunctionSymbol:
    return FunctionSymbol(name, Kind.DENSITY, as_ratfun(weight))


def vector_field(name: str) -> FunctionSymbol:
    return FunctionSymbol(name, Kind.VECTOR_FIELD)


def unknown(name: str) -> FunctionSymbol:
    return FunctionSymbol(name, Kind.CONSTANT)


GAMMA = FunctionSymbol("Gamma", Kind.CONNECTION)
R = FunctionSymbol("R", Kind.PROJECTIVE_CONNECTION)
DELTA = FunctionSymbol("delta", Kind.CONNECTION_DIFFERENCE)
X = vector_field("X")
Y = vector_field("Y")


class JetVar(NamedTuple):
    symbol: str
    order: int


# A monomial is a sorted tuple of (name, order, exponent) triples; the
# coordinate is ("z", 0, n) and constants carry order CONST_ORDER.
Monomial = Tuple[Tuple[str, int, int], ...]
ONE_MONO: Monomial = ()

_MUL_CACHE: Dict[Tuple[Monomial, Monomial], Monomial] = {}
_DERIV_CACHE: Dict[Monomial, Tuple[Tuple[Monomial, int], ...]] = {}


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    key = (a, b)
    hit = _MUL_CACHE.get(key)
    if hit is not None:
        return hit
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        fa, fb = a[i], b[j]
        ka, kb = (fa[0], fa[1]), (fb[0], fb[1])
        if ka == kb:
            e = fa[2] + fb[2]
            if e:
                out.append((fa[0], fa[1], e))
            i += 1
            j += 1
        elif ka < kb:
            out.append(fa)
            i += 1
        else:
            out.append(fb)
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    res = tuple(out)
    if len(_MUL_CACHE) > 500_000:
        _MUL_CACHE.clear()
    _MUL_CACHE[key] = res
    return res


def _mono_derivative(m: Monomial) -> Tuple[Tuple[Monomial, int], ...]:
    hit = _DERIV_CACHE.get(m)
    if hit is not None:
        return hit
    out = []
    limit = _max_jet
    for idx, (name, order, e) in enumerate(m):
        if order == CONST_ORDER:
            continue
        rest = list(m[:idx])
        if e != 1:
            rest.append((name, order, e - 1))
        rest.extend(m[idx + 1:])
        base = tuple(rest)
        if name == COORD:
            out.append((base, e))
            continue
        if order + 1 > limit:
            raise JetOrderError(name, order + 1, limit)
        out.append((mono_mul(base, ((name, order + 1, 1),)), e))
    res = tuple(out)
    _DERIV_CACHE[m] = res
    return res


Scalar = Union[int, Fraction, ParamRatFun]


class DiffPoly:
    """Immutable differential polynomial; ``terms`` maps monomials to nonzero coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        clean: Dict[Monomial, ParamRatFun] = {}
        if terms:
            for m, c in terms.items():
                c = as_ratfun(c)
                if not c.is_zero():
                    clean[m] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, ParamRatFun]) -> "DiffPoly":
        p = object.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls) -> "DiffPoly":
        return cls._raw({})

    @classmethod
    def const(cls, c: Scalar) -> "DiffPoly":
        c = as_ratfun(c)
        return cls._raw({} if c.is_zero() else {ONE_MONO: c})

    @classmethod
    def jet(cls, name: str, order: int = 0) -> "DiffPoly":
        if order < 0:
            raise ValueError("jet order must be non-negative")
        if order > _max_jet:
            raise JetOrderError(name, order, _max_jet)
        if name == COORD:
            raise ValueError("use DiffPoly.z() for the coordinate")
        return cls._raw({((name, order, 1),): ONE})

    @classmethod
    def z(cls, power: int = 1) -> "DiffPoly":
        if power == 0:
            return cls.const(1)
        return cls._raw({((COORD, 0, power),): ONE})

    @classmethod
    def constant(cls, name: str) -> "DiffPoly":
        return cls._raw({((name, CONST_ORDER, 1),): ONE})

    @classmethod
    def monomial(cls, mono: Monomial, coeff: Scalar = 1) -> "DiffPoly":
        return cls({tuple(sorted(mono, key=lambda f: (f[0], f[1]))): coeff})

    # -- predicates / queries ----------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def names(self) -> set:
        return {f[0] for m in self.terms for f in m}

    def jet_vars(self) -> set:
        return {JetVar(f[0], f[1]) for m in self.terms for f in m}

    def max_order(self, name: str) -> int:
        """Highest jet order of ``name`` present, or -1 if absent."""
        best = -1
        for m in self.terms:
            for f in m:
                if f[0] == name and f[1] > best:
                    best = f[1]
        return best

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def constant_value(self) -> ParamRatFun:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get(ONE_MONO, ZERO)

    def coefficient(self, mono: Monomial) -> ParamRatFun:
        return self.terms.get(mono, ZERO)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "DiffPoly":
        other = _as_diffpoly(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
        return DiffPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "DiffPoly":
        return DiffPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "DiffPoly":
        other = _as_diffpoly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "DiffPoly":
        return _as_diffpoly(other) - self

    def scale(self, c: Scalar) -> "DiffPoly":
        c = as_ratfun(c)
        if c.is_zero():
            return DiffPoly._raw({})
        if c.is_one():
            return self
        return DiffPoly._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> "DiffPoly":
        if isinstance(other, (int, Fraction, ParamRatFun)):
            return self.scale(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return DiffPoly._raw({})
        if len(b) == 1 and ONE_MONO in b:
            return self.scale(b[ONE_MONO])
        if len(a) == 1 and ONE_MONO in a:
            return other.scale(a[ONE_MONO])
        out: Dict[Monomial, ParamRatFun] = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                out[m] = c if s is None else s + c
        return DiffPoly._raw({m: c for m, c in out.items() if not c.is_zero()})

    def __rmul__(self, other) -> "DiffPoly":
        if isinstance(other, (int, Fraction, ParamRatFun)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "DiffPoly":
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials can be inverted")
            (m, c), = self.terms.items()
            return DiffPoly._raw({tuple((f[0], f[1], -f[2]) for f in m): c.inverse()}) ** (-n)
        result, base = DiffPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, DiffPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, ParamRatFun)):
            return self == DiffPoly.const(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- calculus -----------------------------------------------------------
    def d(self) -> "DiffPoly":
        return total_derivative(self)

    def map_coefficients(self, fn) -> "DiffPoly":
        return DiffPoly({m: fn(c) for m, c in self.terms.items()})

    def specialize(self, at: Mapping[str, Union[int, Fraction, ParamRatFun]]) -> "DiffPoly":
        """Substitute values for λ/μ in every coefficient."""
        return self.map_coefficients(lambda c: c.subs(at))

    # -- printing -----------------------------------------------------------
    def sorted_terms(self) -> List[Tuple[Monomial, ParamRatFun]]:
        return sorted(self.terms.items(), key=lambda t: _display_key(t[0]))

    def __str__(self) -> str:
        return render(self)

    def latex(self) -> str:
        return render(self, latex=True)

    def __repr__(self) -> str:
        return f"DiffPoly({self})"


def _as_diffpoly(x) -> DiffPoly:
    if isinstance(x, DiffPoly):
        return x
    if isinstance(x, (int, Fraction, ParamRatFun)):
        return DiffPoly.const(x)
    return NotImplemented


def as_diffpoly(x) -> DiffPoly:
    r = _as_diffpoly(x)
    if r is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as a differential polynomial")
    return r


def poly_arith(a, b, op: str) -> DiffPoly:
    """Dispatch ``add``/``sub``/``mul``/``scale`` (``b`` a scalar for ``scale``)."""
    a = as_diffpoly(a)
    if op == "add":
        return a + as_diffpoly(b)
    if op == "sub":
        return a - as_diffpoly(b)
    if op == "mul":
        return a * as_diffpoly(b)
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Derivatives and substitution
# ---------------------------------------------------------------------------

def total_derivative(a: DiffPoly) -> DiffPoly:
    """Formal d/dz: raises jet orders by the Leibniz rule, d(z) = 1, constants are killed."""
    out: Dict[Monomial, ParamRatFun] = {}
    for m, c in a.terms.items():
        for dm, k in _mono_derivative(m):
            v = c if k == 1 else c * k
            s = out.get(dm)
            out[dm] = v if s is None else s + v
    return DiffPoly._raw({m: c for m, c in out.items() if not c.is_zero()})


def nth_derivative(a: DiffPoly, n: int) -> DiffPoly:
    for _ in range(n):
        a = total_derivative(a)
    return a


def covariant_derivative(a: DiffPoly, weight: Scalar,
                         connection: Optional[Union[str, FunctionSymbol]] = GAMMA) -> DiffPoly:
    """``∇a = a' - weight·Γ·a``; the result has weight ``weight + 1``.

    ``connection=None`` gives the flat chart (Γ = 0).
    """
    da = total_derivative(a)
    if connection is None:
        return da
    name = connection.name if isinstance(connection, FunctionSymbol) else connection
    w = as_ratfun(weight)
    if w.is_zero():
        return da
    return da - (DiffPoly.jet(name) * a).scale(w)


def covariant_jets(a: DiffPoly, weight: Scalar, n: int,
                   connection: Optional[Union[str, FunctionSymbol]] = GAMMA) -> List[DiffPoly]:
    """``[a, ∇a, ..., ∇ⁿa]`` with the weight stepping by one each time."""
    w = as_ratfun(weight)
    out = [a]
    for k in range(n):
        out.append(covariant_derivative(out[-1], w + k, connection))
    return out


def substitute(a: DiffPoly, replacements: Mapping[str, DiffPoly]) -> DiffPoly:
    """Simultaneously replace function symbols by expressions.

    Each jet ``(name, k)`` becomes the k-th total derivative of the
    replacement; constants (unknowns) are replaced as they are.
    """
    reps = {k: as_diffpoly(v) for k, v in replacements.items()}
    if not reps or not a.terms:
        return a
    needed: Dict[str, int] = {}
    for m in a.terms:
        for name, order, _ in m:
            if name in reps and order > needed.get(name, -2):
                needed[name] = order
    if not needed:
        return a
    jets: Dict[str, List[DiffPoly]] = {}
    for name, top in needed.items():
        seq = [reps[name]]
        for _ in range(max(top, 0)):
            seq.append(total_derivative(seq[-1]))
        jets[name] = seq
    power_cache: Dict[Tuple[str, int, int], DiffPoly] = {}

    def power(name: str, order: int, e: int) -> DiffPoly:
        key = (name, order, e)
        hit = power_cache.get(key)
        if hit is None:
            base = jets[name][max(order, 0)]
            hit = base ** e
            power_cache[key] = hit
        return hit

    zero_targets = {n for n, v in reps.items() if v.is_zero()}
    out = DiffPoly.zero()
    acc: Dict[Monomial, ParamRatFun] = {}
    for m, c in a.terms.items():
        if zero_targets and any(f[0] in zero_targets and f[2] > 0 for f in m):
            continue
        keep = tuple(f for f in m if f[0] not in reps)
        hit = [f for f in m if f[0] in reps]
        if not hit:
            s = acc.get(m)
            acc[m] = c if s is None else s + c
            continue
        term = DiffPoly._raw({keep: c})
        for name, order, e in hit:
            term = term * power(name, order, e)
        out = out + term
    return out + DiffPoly._raw({m: c for m, c in acc.items() if not c.is_zero()})


def substitute_symbol(a: DiffPoly, target: Union[str, FunctionSymbol], replacement) -> DiffPoly:
    name = target.name if isinstance(target, FunctionSymbol) else target
    return substitute(a, {name: as_diffpoly(replacement)})


def substitute_z(a: DiffPoly, value: Scalar) -> DiffPoly:
    """Evaluate the coordinate at a constant."""
    v = as_ratfun(value)
    out: Dict[Monomial, ParamRatFun] = {}
    for m, c in a.terms.items():
        k = 0
        keep = []
        for f in m:
            if f[0] == COORD:
                k = f[2]
            else:
                keep.append(f)
        if k:
            c = c * v ** k
        mm = tuple(keep)
        s = out.get(mm)
        out[mm] = c if s is None else s + c
    return DiffPoly({m: c for m, c in out.items()})


# ---------------------------------------------------------------------------
# Linear extraction
# ---------------------------------------------------------------------------

class NonlinearUnknownError(ValueError):
    pass


def split_linear(a: DiffPoly, unknowns: Sequence[str]) -> Dict[Monomial, Dict[Optional[str], ParamRatFun]]:
    """Group ``a`` by monomials free of the unknowns.

    Returns ``{rest_monomial: {unknown_or_None: coefficient}}`` where ``None``
    collects the part independent of the unknowns.
    """
    us = set(unknowns)
    rows: Dict[Monomial, Dict[Optional[str], ParamRatFun]] = {}
    for m, c in a.terms.items():
        found = None
        rest = []
        for f in m:
            if f[0] in us:
                if found is not None or f[2] != 1:
                    raise NonlinearUnknownError(
                        f"unknowns occur nonlinearly in the monomial {render_monomial(m)}")
                found = f[0]
            else:
                rest.append(f)
        row = rows.setdefault(tuple(rest), {})
        s = row.get(found)
        row[found] = c if s is None else s + c
    return {m: {k: v for k, v in row.items() if not v.is_zero()}
            for m, row in rows.items()}


def collect_linear_system(a: DiffPoly, unknowns: Sequence[Union[str, FunctionSymbol]]):
    """Turn ``a ≡ 0`` into one linear equation per monomial free of the unknowns."""
    from .linalg import LinearSystem

    names = [u.name if isinstance(u, FunctionSymbol) else u for u in unknowns]
    return LinearSystem.from_rows(split_linear(a, names), names)


def extract_bilinear(a: DiffPoly, first: str, second: str) -> Dict[Tuple[int, int], DiffPoly]:
    """Coefficient table ``(i, j) -> c`` with ``a = Σ c·first⁽ⁱ⁾·second⁽ʲ⁾``.

    Raises ``ValueError`` unless every term holds exactly one jet of each symbol.
    """
    out: Dict[Tuple[int, int], Dict[Monomial, ParamRatFun]] = {}
    for m, c in a.terms.items():
        i = j = None
        rest = []
        for f in m:
            if f[0] == first:
                if i is not None or f[2] != 1:
                    raise ValueError(f"{render_monomial(m)} is not linear in {first}")
                i = f[1]
            elif f[0] == second:
                if j is not None or f[2] != 1:
                    raise ValueError(f"{render_monomial(m)} is not linear in {second}")
                j = f[1]
            else:
                rest.append(f)
        if i is None or j is None:
            raise ValueError(f"{render_monomial(m)} is not bilinear in {first}, {second}")
        out.setdefault((i, j), {})[tuple(rest)] = c
    return {k: DiffPoly._raw(v) for k, v in out.items()}


def extract_linear(a: DiffPoly, name: str) -> Dict[int, DiffPoly]:
    """Coefficients ``k -> c`` with ``a = Σ c·name⁽ᵏ⁾``."""
    out: Dict[int, Dict[Monomial, ParamRatFun]] = {}
    for m, c in a.terms.items():
        k = None
        rest = []
        for f in m:
            if f[0] == name:
                if k is not None or f[2] != 1:
                    raise ValueError(f"{render_monomial(m)} is not linear in {name}")
                k = f[1]
            else:
                rest.append(f)
        if k is None:
            raise ValueError(f"{render_monomial(m)} does not involve {name}")
        out.setdefault(k, {})[tuple(rest)] = c
    return {k: DiffPoly._raw(v) for k, v in out.items()}


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_DISPLAY = {"phi": "φ", "psi": "ψ", "Gamma": "Γ", "delta": "δ", "alpha": "α"}
_LATEX = {"phi": r"\varphi", "psi": r"\psi", "Gamma": r"\Gamma", "delta": r"\delta",
          "alpha": r"\alpha", "R": "R", "S": "S", "X": "X", "Y": "Y", "z": "z"}
_RANK = {"X": 0, "Y": 1, "phi": 2, "psi": 3, "f": 4, "g": 5, "Gamma": 6, "R": 7,
         "delta": 8, "S": 9, "z": 20}


def display_name(name: str) -> str:
    return _DISPLAY.get(name, name)


def _factor_key(f: Tuple[str, int, int]) -> Tuple[int, str, int]:
    return (_RANK.get(f[0], 10), f[0], f[1])


def _display_key(m: Monomial):
    deg = sum(abs(f[2]) for f in m if f[1] != CONST_ORDER)
    order = sum(f[1] * abs(f[2]) for f in m if f[1] > 0)
    return (-order, -deg, tuple(sorted((_factor_key(f) + (-f[2],) for f in m))))


def _jet_text(name: str, order: int, latex: bool) -> str:
    base = _LATEX.get(name, name) if latex else display_name(name)
    if order <= 0:
        return base
    if order <= 3:
        return base + "'" * order
    return f"{base}^{{({order})}}" if latex else f"{base}^({order})"


def render_monomial(m: Monomial, latex: bool = False) -> str:
    parts = []
    for name, order, e in sorted(m, key=_factor_key):
        t = _jet_text(name, order, latex)
        if e != 1:
            if latex:
                t = f"{{{t}}}^{{{e}}}" if order > 0 else f"{t}^{{{e}}}"
            else:
                t = f"({t})^{e}" if order > 0 and order <= 3 else f"{t}^{e}"
        parts.append(t)
    return (" " if latex else " ").join(parts)


def render(a: DiffPoly, latex: bool = False) -> str:
    if not a.terms:
        return "0"
    chunks = []
    for idx, (m, c) in enumerate(a.sorted_terms()):
        mono = render_monomial(m, latex)
        neg = False
        if len(c.num.terms) == 1 and c.den.is_one() and next(iter(c.num.terms.values())) < 0:
            neg, c = True, -c
        ctext = c.latex() if latex else str(c)
        if len(c.num.terms) > 1 or not c.den.is_one():
            if latex and c.den.is_one():
                ctext = rf"\left({ctext}\right)"
            elif not latex:
                ctext = f"({ctext})"
        if mono:
            body = mono if c.is_one() else f"{ctext} {mono}"
        else:
            body = ctext
        if idx == 0:
            chunks.append(("-" if neg else "") + body)
        else:
            chunks.append((" - " if neg else " + ") + body)
    return "".join(chunks)
