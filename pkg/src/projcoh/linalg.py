"""Linear systems over Q(λ, μ) and their behaviour under specialization of λ.

Solving is Gauss-Jordan elimination in the field, with the pivot of lowest
degree chosen in each column.  Every pivot, and every right-hand side left
over in an inconsistent row, is a condition whose rational roots are the only
places where the answer can change; :func:`solve_system` re-solves the
specialized system exactly at each of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd as igcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .scalar_field import (LAMBDA, ONE, ONE_POLY, ZERO, ParamPoly, ParamRatFun, as_ratfun,
                           exact_divide, poly_gcd, rational_roots)


@dataclass(frozen=True)
class LinearSystem:
    """Equations ``Σ_j matrix[i][j]·unknowns[j] = rhs[i]``."""

    unknowns: Tuple[str, ...]
    matrix: Tuple[Tuple[ParamRatFun, ...], ...]
    rhs: Tuple[ParamRatFun, ...]

    @classmethod
    def from_rows(cls, rows: Mapping, unknowns: Sequence[str]) -> "LinearSystem":
        """Build from ``{key: {unknown_or_None: coeff}}`` (``None`` is the constant part)."""
        names = tuple(unknowns)
        seen = set()
        mat, rhs = [], []
        for row in rows.values():
            coeffs = tuple(row.get(u, ZERO) for u in names)
            b = -row.get(None, ZERO)
            if all(c.is_zero() for c in coeffs) and b.is_zero():
                continue
            coeffs, b = _clear_denominators(coeffs, b)
            key = (coeffs, b)
            if key in seen:
                continue
            seen.add(key)
            mat.append(coeffs)
            rhs.append(b)
        return cls(names, tuple(mat), tuple(rhs))

    @classmethod
    def homogeneous(cls, matrix: Sequence[Sequence], unknowns: Sequence[str]) -> "LinearSystem":
        rows = {i: {u: as_ratfun(c) for u, c in zip(unknowns, r)} for i, r in enumerate(matrix)}
        return cls.from_rows(rows, unknowns)

    def __len__(self) -> int:
        return len(self.rhs)

    def is_homogeneous(self) -> bool:
        return all(b.is_zero() for b in self.rhs)

    def parameters(self) -> Tuple[str, ...]:
        vs = set()
        for row, b in zip(self.matrix, self.rhs):
            for c in row + (b,):
                vs.update(c.variables())
        return tuple(sorted(vs))

    def specialize(self, at: Mapping[str, Fraction]) -> "LinearSystem":
        mat = tuple(tuple(c.subs(at) for c in row) for row in self.matrix)
        rhs = tuple(b.subs(at) for b in self.rhs)
        return LinearSystem(self.unknowns, mat, rhs)

    def __str__(self) -> str:
        lines = []
        for row, b in zip(self.matrix, self.rhs):
            lhs = " + ".join(f"({c})·{u}" for c, u in zip(row, self.unknowns) if not c.is_zero())
            lines.append(f"{lhs or '0'} = {b}")
        return "\n".join(lines)


def _clear_denominators(coeffs, b):
    den = ONE_POLY
    for c in coeffs + (b,):
        if not c.den.is_one():
            g = poly_gcd(den, c.den)
            den = exact_divide(den * c.den, g)
    if den.is_one():
        scale = None
    else:
        scale = ParamRatFun.from_poly(den)
    if scale is not None:
        coeffs = tuple(c * scale for c in coeffs)
        b = b * scale
    # rational content only; a polynomial common factor carries information
    num, den_ = 0, 1
    for c in coeffs + (b,):
        if c.is_zero():
            continue
        ic = c.num.integer_content()
        num = igcd(num, ic.numerator)
        den_ = den_ * ic.denominator // igcd(den_, ic.denominator)
    if num:
        content = Fraction(num, den_)
        first = next(c for c in coeffs + (b,) if not c.is_zero())
        if first.num.leading_coefficient() < 0:
            content = -content
        if content != 1:
            inv = ParamRatFun.const(1 / content)
            coeffs = tuple(c * inv for c in coeffs)
            b = b * inv
    return coeffs, b


@dataclass
class Elimination:
    rank: int
    consistent: bool
    particular: Dict[str, ParamRatFun]
    nullspace: List[Dict[str, ParamRatFun]]
    pivots: List[ParamRatFun]
    obstructions: List[ParamRatFun]


def eliminate(system: LinearSystem) -> Elimination:
    n = len(system.unknowns)
    work = [list(row) + [b] for row, b in zip(system.matrix, system.rhs)]
    pivots: List[ParamRatFun] = []
    pivot_cols: List[int] = []
    r = 0
    for col in range(n):
        cands = [i for i in range(r, len(work)) if not work[i][col].is_zero()]
        if not cands:
            continue
        best = min(cands, key=lambda i: (work[i][col].complexity(), i))
        work[r], work[best] = work[best], work[r]
        p = work[r][col]
        pivots.append(p)
        if not p.is_one():
            inv = p.inverse()
            work[r] = [c if c.is_zero() else c * inv for c in work[r]]
        prow = work[r]
        for i in range(len(work)):
            if i == r:
                continue
            f = work[i][col]
            if f.is_zero():
                continue
            row = work[i]
            work[i] = [row[k] if prow[k].is_zero() else row[k] - f * prow[k]
                       for k in range(n + 1)]
        pivot_cols.append(col)
        r += 1
        if r == len(work):
            break
    obstructions = [work[i][n] for i in range(r, len(work)) if not work[i][n].is_zero()]
    names = system.unknowns
    particular = {u: ZERO for u in names}
    for k, col in enumerate(pivot_cols):
        particular[names[col]] = work[k][n]
    free = [c for c in range(n) if c not in pivot_cols]
    nullspace = []
    for f in free:
        vec = {u: ZERO for u in names}
        vec[names[f]] = ONE
        for k, col in enumerate(pivot_cols):
            vec[names[col]] = -work[k][f]
        nullspace.append(vec)
    return Elimination(r, not obstructions, particular, nullspace, pivots, obstructions)


@dataclass
class ExceptionalValue:
    value: Fraction
    resolution: str  # becomes_solvable | becomes_unsolvable | dimension_jump
    solvable: bool
    nullity: int
    solution: Optional[Dict[str, ParamRatFun]] = None
    nullspace: List[Dict[str, ParamRatFun]] = field(default_factory=list)


@dataclass
class SolveReport:
    unknowns: Tuple[str, ...]
    generic_solvable: bool
    solution: Optional[Dict[str, ParamRatFun]]
    nullspace: List[Dict[str, ParamRatFun]]
    rank: int
    obstruction_factors: List[ParamPoly]
    exceptional_values: List[ExceptionalValue]
    irrational_factors: List[ParamPoly] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def nullity(self) -> int:
        return len(self.nullspace)

    def at(self, value: Fraction) -> Optional[ExceptionalValue]:
        for ev in self.exceptional_values:
            if ev.value == value:
                return ev
        return None

    def solvable_at(self, value: Fraction) -> bool:
        ev = self.at(Fraction(value))
        return self.generic_solvable if ev is None else ev.solvable


def _factors(values: Sequence[ParamRatFun], numerators_only: bool = False) -> List[ParamPoly]:
    out: List[ParamPoly] = []
    for v in values:
        polys = [v.num] if numerators_only else [v.num, v.den]
        for p in polys:
            if p.is_constant():
                continue
            q = p.primitive_integer()
            if q not in out:
                out.append(q)
    return out


def solve_system(system: LinearSystem, parameter: str = LAMBDA) -> SolveReport:
    """Generic solution over Q(λ, μ) plus exact re-solves at candidate λ values.

    Candidate values are only enumerated when the system depends on the single
    ``parameter``; for bivariate systems the conditions are reported as
    ``obstruction_factors`` only.
    """
    generic = eliminate(system)
    conditions = list(generic.pivots) + list(generic.obstructions)
    for vec in [generic.particular] + generic.nullspace:
        conditions.extend(v for v in vec.values() if not v.den.is_one())
    factors = _factors(conditions)
    params = system.parameters()
    exceptional: List[ExceptionalValue] = []
    irrational: List[ParamPoly] = []
    if params and set(params) == {parameter}:
        candidates = set()
        for f in factors:
            roots, residual = rational_roots(f)
            candidates.update(roots)
            if not residual.is_constant() and residual not in irrational:
                irrational.append(residual)
        for val in sorted(candidates):
            special = eliminate(system.specialize({parameter: val}))
            nullity = len(special.nullspace)
            if special.consistent != generic.consistent:
                res = "becomes_solvable" if special.consistent else "becomes_unsolvable"
            elif nullity != len(generic.nullspace):
                res = "dimension_jump"
            else:
                continue
            exceptional.append(ExceptionalValue(
                val, res, special.consistent, nullity,
                special.particular if special.consistent else None,
                special.nullspace))
    return SolveReport(
        unknowns=system.unknowns,
        generic_solvable=generic.consistent,
        solution=generic.particular if generic.consistent else None,
        nullspace=generic.nullspace,
        rank=generic.rank,
        obstruction_factors=factors,
        exceptional_values=exceptional,
        irrational_factors=irrational,
    )


def matrix_rank(rows: Sequence[Sequence[ParamRatFun]]) -> Tuple[int, List[ParamRatFun]]:
    """Generic rank and the pivots that realise it."""
    if not rows:
        return 0, []
    n = len(rows[0])
    names = tuple(f"c{i}" for i in range(n))
    system = LinearSystem(names, tuple(tuple(as_ratfun(c) for c in r) for r in rows),
                          tuple(ZERO for _ in rows))
    e = eliminate(system)
    return e.rank, e.pivots
