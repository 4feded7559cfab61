"""Acceptance checks, one per criterion, all exact.

Run with pytest (a summary section lists one line per criterion) or directly
with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction

import pytest

from projcoh.cohomology import (classify_invariant_bilinear, cohomology_table,
                                nabla3_identity_residuals, solve_coboundary,
                                solve_invariant_coefficients, verify_cocycle,
                                verify_projective_invariance, verify_sl2_vanishing)
from projcoh.diffpoly import DiffPoly, render
from projcoh.operators import (COCYCLES, DiffOperator, Mode, build_cocycle, coboundary,
                               invariant_template, lie_action_density, lie_action_expr,
                               unknown_template, vf_bracket)
from projcoh.scalar_field import LAM, MU_, as_ratfun
from projcoh.schwarzian import (check_sch_correspondence, mobius_jets, schwarzian,
                                verify_projective_transition_consistency, verify_schwarzian_cocycle)

J = DiffPoly.jet
HALF = Fraction(1, 2)


def _random_operator(rng: random.Random, order: int, lam, mu) -> DiffOperator:
    coeffs = []
    for _ in range(order + 1):
        c = DiffPoly.zero()
        for power in range(3):
            c = c + DiffPoly.z(power).scale(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        coeffs.append(c)
    return DiffOperator(lam, mu, tuple(coeffs), Mode.FLAT)


def _random_weight(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 5))


def _proportional(a: DiffPoly, b: DiffPoly) -> bool:
    """a and b span the same line (both nonzero)."""
    if not a or not b or set(a.terms) != set(b.terms):
        return False
    mono = next(iter(a.terms))
    return a.scale(b.terms[mono]) == b.scale(a.terms[mono])


# ---------------------------------------------------------------------------

def criterion_1():
    bad = []
    for name in COCYCLES:
        for mode in (Mode.FLAT, Mode.COVARIANT):
            res = verify_cocycle(build_cocycle(name, None, mode))
            if res:
                bad.append(f"{name}/{mode.value}: {render(res)}")
    return not bad, "; ".join(bad) or "10 residuals exactly zero"


def criterion_2():
    bad = []
    for name in COCYCLES:
        for mode in (Mode.FLAT, Mode.COVARIANT):
            for g, r in zip(("1", "z", "z^2"), verify_sl2_vanishing(build_cocycle(name, None, mode))):
                if r:
                    bad.append(f"{name}/{mode.value} at X={g}: {render(r)}")
    for g, r in zip(("1", "z", "z^2"), nabla3_identity_residuals()):
        if r:
            bad.append(f"nabla^3 identity at X={g}: {render(r)}")
    return not bad, "; ".join(bad) or "30 generator residuals and 3 identity residuals zero"


def criterion_3():
    bad = []
    for name in ("I4", "I5", "I6", "I6'"):
        rep, _ = solve_invariant_coefficients(name)
        want = {u: c for (_, _, u), (_, _, c) in zip(unknown_template(name).terms,
                                                   invariant_template(name).terms)
                if isinstance(u, str)}
        if not (rep.generic_solvable and rep.nullity == 0 and rep.solution == want):
            got = {k: str(v) for k, v in (rep.solution or {}).items()}
            bad.append(f"{name}: solved {got}")
    res = verify_projective_invariance("I4").residual
    expected = (DiffPoly.constant("a1").scale(2) + DiffPoly.const(LAM)) * J("delta") * J("R") * J("phi")
    if res != expected:
        bad.append(f"I4 residual {render(res)}")
    return not bad, "; ".join(bad) or "I4, I5, I6, I6' coefficients recovered; I4 residual (2α+λ)δRφ"


def criterion_4():
    bad, info = [], []
    j3 = solve_coboundary("J3")
    sig = [(ev.value, ev.solvable) for ev in j3.report.exceptional_values]
    w = j3.witness
    ok_w = (w is not None and len(w.coeffs) == 3 and not w.coeffs[0] and not w.coeffs[1]
            and abs(w.coeffs[2].constant_value().constant_value()) == 2)
    if j3.report.generic_solvable or sig != [(-HALF, True)] or not ok_w:
        bad.append(f"J3 exceptional {sig}, witness {w}")
    else:
        info.append(f"J3 at -1/2 witness {w}")
    j4 = solve_coboundary("J4")
    sig = [(ev.value, ev.solvable) for ev in j4.report.exceptional_values]
    if j4.report.generic_solvable or sig != [(Fraction(-1), True)]:
        bad.append(f"J4 exceptional {sig}")
    j5 = solve_coboundary("J5")
    vals = [ev.value for ev in j5.report.exceptional_values if ev.solvable]
    flagged = any("discrepancy" in n and "-1/2" in n for n in j5.notes)
    if j5.report.generic_solvable or len(vals) != 1 or not flagged:
        bad.append(f"J5 exceptional {vals}, conflict flagged: {flagged}")
    else:
        info.append(f"J5 at {vals[0]}")
    for name in ("J6_0", "J6_m4"):
        r = solve_coboundary(name)
        if r.status != "nontrivial":
            bad.append(f"{name} status {r.status}")
    return not bad, "; ".join(bad) or ", ".join(info) + ", J4 at -1, J6 nontrivial"


def criterion_5():
    bad = []
    m1 = classify_invariant_bilinear(1)
    target = (J("phi") * J("psi", 1)).scale(2 * MU_) - (J("phi", 1) * J("psi")).scale(2 * LAM)
    if m1.dimension != 1 or not _proportional(m1.basis[0].to_diffpoly(), target):
        got = ", ".join(str(b) for b in m1.basis)
        bad.append(f"m=1 basis [{got}] is not proportional to 2μ φψ' - 2λ φ'ψ")
    for m, name in ((3, "J3"), (4, "J4"), (5, "J5")):
        rep = classify_invariant_bilinear(m, -1)
        flat = build_cocycle(name, None, Mode.FLAT).value
        if rep.dimension != 1 or not _proportional(rep.basis[0].to_diffpoly(), flat):
            bad.append(f"m={m}: {[str(b) for b in rep.basis]}")
    rep6 = classify_invariant_bilinear(6, -1)
    if rep6.dimension != 1:
        bad.append(f"m=6 dimension {rep6.dimension}")
    else:
        for lam, name in ((0, "J6_0"), (-4, "J6_m4")):
            spec = rep6.basis[0].to_diffpoly().specialize({"λ": as_ratfun(lam)})
            if not _proportional(spec, build_cocycle(name, None, Mode.FLAT).value):
                bad.append(f"m=6 at λ={lam}: {render(spec)}")
    return not bad, "; ".join(bad) or "m=1 and m=3..6 match"


def criterion_6(cases: int = 60, seed: int = 20261016):
    rng = random.Random(seed)
    bad = []
    for i in range(cases):
        lam = _random_weight(rng)
        mu = lam + rng.choice([rng.randint(-2, 5), _random_weight(rng)])
        A = _random_operator(rng, rng.randint(0, 3), lam, mu)
        res = verify_cocycle(coboundary(A))
        if res:
            bad.append(f"case {i}: A={A}, λ={lam}, μ={mu}")
    return not bad, "; ".join(bad[:3]) or f"{cases} random coboundaries are cocycles"


def criterion_7(cases: int = 20, seed: int = 7):
    bad = []
    X, Y, phi = J("X"), J("Y"), J("phi")
    br = vf_bracket(X, Y)
    lhs = lie_action_density(br, phi, LAM)
    rhs = (lie_action_density(X, lie_action_density(Y, phi, LAM), LAM)
           - lie_action_density(Y, lie_action_density(X, phi, LAM), LAM))
    if lhs != rhs:
        bad.append(f"density axiom residual {render(lhs - rhs)}")
    rng = random.Random(seed)
    for i in range(cases):
        lam = _random_weight(rng)
        mu = _random_weight(rng)
        A = _random_operator(rng, rng.randint(0, 3), lam, mu)
        val = A.value()
        l_br = lie_action_expr(br, val, lam, mu)
        comm = (lie_action_expr(X, lie_action_expr(Y, val, lam, mu), lam, mu)
                - lie_action_expr(Y, lie_action_expr(X, val, lam, mu), lam, mu))
        if l_br != comm:
            bad.append(f"module axiom fails for {A}")
    psi = phi * J("Gamma", 1) + J("phi", 2)
    for expr in (phi, psi):
        if lie_action_density(X, expr, LAM, Mode.COVARIANT) != lie_action_density(X, expr, LAM):
            bad.append(f"Γ survives in the covariant action on {render(expr)}")
    return not bad, "; ".join(bad) or f"density axiom, {cases} operator cases, Γ cancels"


def criterion_8():
    bad, info = [], []
    if not schwarzian(mobius_jets(4)).is_zero():
        bad.append("Möbius Schwarzian nonzero")
    for order in range(3, 7):
        if not verify_schwarzian_cocycle(order).is_zero():
            bad.append(f"cocycle residual at order {order}")
    if not verify_projective_transition_consistency(4).is_zero():
        bad.append("transition residual nonzero")
    signs = set()
    for name in ("I3", "I4", "I6", "I6'"):
        rep = check_sch_correspondence(name)
        signs.add(rep.sign)
        if not rep.match:
            bad.append(f"{name} vs {rep.family}: residual {rep.residual_text}")
    if len(signs) > 1:
        bad.append(f"signs differ: {sorted(signs)}")
    i5 = check_sch_correspondence("I5")
    if i5.match:
        info.append("I5 matches exactly")
    elif i5.even_in_s:
        info.append(f"I5 residual {i5.residual_text}")
    else:
        bad.append(f"I5 residual not confined to S^2: {i5.residual_text}")
    return not bad, "; ".join(bad + info) or "all Schwarzian checks zero"


# tabulated case list: shift k -> (generic dimension, {λ: dimension})
CASE_LIST = {0: (0, {}), 1: (0, {}), 2: (1, {-HALF: 0}), 3: (1, {Fraction(-1): 0}),
             4: (1, {-HALF: 0}), 5: (0, {Fraction(-4): 1, Fraction(0): 1}), 6: (0, {})}


def criterion_9():
    bad, deviations = [], []
    rows = cohomology_table(0, 6)
    for row in rows:
        special = {e["lambda"]: e["dimension"] for e in row.exceptional
                   if e["dimension"] != row.generic_dimension}
        want = CASE_LIST[row.k]
        if (row.generic_dimension, special) != want:
            deviations.append(row.k)
            if not any(n.startswith("discrepancy") for n in row.notes):
                bad.append(f"k={row.k} deviates without a note: {row.generic_dimension}, {special}")
    for k in (0, 1, 5):
        if rows[k].generic_dimension != 0:
            bad.append(f"k={k} generic dimension {rows[k].generic_dimension}")
    if len([e for e in rows[4].exceptional if e["dimension"] != 1]) != 1:
        bad.append("k=4 should have one exceptional weight")
    detail = "; ".join(bad) or ("case list reproduced" + (f", deviations noted for k={deviations}"
                                                          if deviations else ""))
    return not bad, detail


CRITERIA = {
    1: ("cocycle identities", criterion_1),
    2: ("sl2-vanishing", criterion_2),
    3: ("projective-class invariance", criterion_3),
    4: ("exceptional weights", criterion_4),
    5: ("transvectant classification", criterion_5),
    6: ("coboundaries are cocycles", criterion_6),
    7: ("Lie-action axioms", criterion_7),
    8: ("Schwarzian suite", criterion_8),
    9: ("table reproduction", criterion_9),
}


def evaluate(n: int):
    label, fn = CRITERIA[n]
    t0 = time.perf_counter()
    ok, detail = fn()
    ms = int((time.perf_counter() - t0) * 1000)
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n} ({label}, {ms} ms): {detail}"
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    from conftest import ACCEPTANCE_LINES
    ok, line = evaluate(n)
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def main() -> int:
    failures = 0
    for n in sorted(CRITERIA):
        ok, line = evaluate(n)
        print(line)
        failures += not ok
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
