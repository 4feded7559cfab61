from fractions import Fraction

import pytest

from projcoh.cohomology import (classify_invariant_bilinear, cohomology_row, derive_delta_constraint,
                                nabla3_identity_residuals, projective_variation, solve_coboundary,
                                solve_invariant_coefficients, verify_cocycle,
                                verify_projective_invariance, verify_sl2_vanishing)
from projcoh.diffpoly import DiffPoly
from projcoh.operators import (COCYCLES, Cocycle, Mode, OperatorTemplate, bilinear_cochain,
                               build_cocycle, build_invariant_operator, coboundary,
                               derivative_operator)
from projcoh.scalar_field import LAM, ONE

J = DiffPoly.jet
half = Fraction(1, 2)


def test_non_cocycle_has_residual():
    residual = verify_cocycle(bilinear_cochain({(2, 0): 1}, LAM, 2))
    assert residual == J("X", 2) * J("Y", 1) * J("phi") - J("X", 1) * J("Y", 2) * J("phi")


def test_second_derivative_cochain_is_a_coboundary_at_shift_one():
    # X ↦ X''φ equals -(1/λ)·δ(d) into D_{λ,λ+1}
    assert not verify_cocycle(bilinear_cochain({(2, 0): 1}, LAM, 1))


def test_coboundary_of_small_operator_is_cocycle():
    A = derivative_operator(2, LAM, LAM + 3, coeff=DiffPoly.z(1) + 1)
    assert not verify_cocycle(coboundary(A))


@pytest.mark.parametrize("name", list(COCYCLES))
@pytest.mark.parametrize("mode", [Mode.FLAT, Mode.COVARIANT])
def test_cocycles_and_sl2(name, mode):
    c = build_cocycle(name, None, mode)
    assert not verify_cocycle(c)
    assert not any(verify_sl2_vanishing(c))


def test_nabla_cubed_identity():
    assert not any(nabla3_identity_residuals())


def test_delta_constraint():
    g, dl = J("Gamma"), J("delta")
    rules = derive_delta_constraint(2)
    assert rules[1] == g * dl + (dl * dl).scale(half)
    assert rules[2] == J("Gamma", 1) * dl + (g * g + (g * dl).scale(Fraction(3, 2)) + (dl * dl).scale(half)) * dl


def test_i3_has_no_variation():
    assert not projective_variation(build_invariant_operator("I3", mode=Mode.COVARIANT_FREE_R))


def test_i4_residual_and_solution():
    res = verify_projective_invariance("I4")
    alpha = DiffPoly.constant("a1")
    assert res.residual == (alpha.scale(2) + DiffPoly.const(LAM)) * J("delta") * J("R") * J("phi")
    assert res.report.solution == {"a1": -LAM / 2}


def test_bare_r_nabla_is_invariant_only_on_functions():
    bare = OperatorTemplate("bare", 3, ((1, "R", ONE),))
    rep = verify_projective_invariance(bare).report
    assert not rep.generic_solvable
    assert [(ev.value, ev.resolution) for ev in rep.exceptional_values] == [(0, "becomes_solvable")]


@pytest.mark.parametrize("name", ["I4", "I5", "I6", "I6'"])
def test_combined_solver_recovers_printed(name):
    from projcoh.operators import invariant_template, unknown_template
    rep, _ = solve_invariant_coefficients(name)
    assert rep.generic_solvable and rep.nullity == 0
    want = {u: c for (_, _, u), (_, _, c) in zip(unknown_template(name).terms,
                                               invariant_template(name).terms) if isinstance(u, str)}
    assert rep.solution == want


def test_zero_cocycle_is_trivial():
    zero = Cocycle("0", LAM, LAM + 2, DiffPoly.zero())
    res = solve_coboundary(zero, 2)
    assert res.status == "trivial"
    assert all(c.is_zero() for c in res.witness.coeffs)


def test_j3_witness():
    res = solve_coboundary("J3")
    assert res.status == "trivial_at_exceptional"
    assert res.witness_at == -half
    assert res.witness.coeffs[2] == DiffPoly.const(2)
    assert res.widened_consistent


def test_small_order_bound_is_indeterminate():
    res = solve_coboundary("J4", order_bound=1)
    assert res.status == "indeterminate"
    assert any("unsolvable at order 1" in n for n in res.notes)


def test_rescaling_does_not_change_exceptional_set():
    c = build_cocycle("J4", None, Mode.FLAT)
    assert solve_coboundary(c.scaled(7)).exceptional_values == solve_coboundary(c).exceptional_values


def test_classify_m0_and_m3():
    assert classify_invariant_bilinear(0).basis[0].to_diffpoly() == J("phi") * J("psi")
    rep = classify_invariant_bilinear(3, -1)
    assert rep.dimension == 1 and rep.basis[0].support() == [(3, 0)]
    assert rep.automatic_generators


def test_table_examples():
    row2 = cohomology_row(2)
    assert row2.generic_dimension == 1 and row2.dimension_at(-half) == 0
    row3 = cohomology_row(3)
    assert row3.dimension_at(-1) == 0 and row3.dimension_at(5) == 1
    for k in (0, 1):
        row = cohomology_row(k)
        assert row.generic_dimension == 0 and not row.exceptional
    with pytest.raises(ValueError):
        cohomology_row(7)
