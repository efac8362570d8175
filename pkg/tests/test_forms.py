"""Exact-algebra tests for trig-polynomial matrix forms.

Hand-computed oracles pin the sign/normalization conventions; hypothesis
properties check the graded-algebra axioms on random small forms.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from etacalc.forms import EQ_TOL, SubTorus, TrigPolyForm

from helpers import forms, rng_form

TWO_PI_I = 2j * math.pi


# ----------------------------------------------------------------------
# hand-computed oracles


def test_wedge_matrix_order_and_sign():
    # (M dx1) ^ (N dx2) = (M N) dx1^dx2 ; swapping picks up the sign.
    M = np.array([[1.0, 2.0], [0.0, 1.0]])
    N = np.array([[1.0, 0.0], [3.0, 1.0]])
    a = TrigPolyForm.monomial(2, M, I=(1,))
    b = TrigPolyForm.monomial(2, N, I=(2,))
    ab = a.wedge(b)
    np.testing.assert_allclose(ab.coefficient((0, 0), (1, 2)), M @ N)
    ba = b.wedge(a)
    np.testing.assert_allclose(ba.coefficient((0, 0), (1, 2)), -(N @ M))


def test_wedge_repeated_index_vanishes():
    a = TrigPolyForm.monomial(2, np.eye(1), I=(1,))
    assert a.wedge(a).is_zero(0.0)


def test_ext_d_single_phase():
    # d(e^{2 pi i x1} dx2) = 2 pi i e^{2 pi i x1} dx1^dx2
    a = TrigPolyForm.monomial(2, np.eye(1), k=(1, 0), I=(2,))
    da = a.ext_d()
    np.testing.assert_allclose(
        da.coefficient((1, 0), (1, 2)), TWO_PI_I * np.eye(1)
    )
    assert da.num_terms() == 1


def test_ext_d_sign_of_insertion():
    # d(e^{2 pi i x2} dx1) = 2 pi i dx2^dx1 e^{...} = -2 pi i e^{...} dx1^dx2
    a = TrigPolyForm.monomial(2, np.eye(1), k=(0, 1), I=(1,))
    da = a.ext_d()
    np.testing.assert_allclose(
        da.coefficient((0, 1), (1, 2)), -TWO_PI_I * np.eye(1)
    )


def test_integrate_full_torus_picks_zero_mode():
    # integral over T^2 of (3 + e^{2 pi i x1}) dx1^dx2 = 3
    f = TrigPolyForm.monomial(2, 3.0 * np.eye(1), I=(1, 2)) + TrigPolyForm.monomial(
        2, np.eye(1), k=(1, 0), I=(1, 2)
    )
    np.testing.assert_allclose(f.integrate(), [[3.0]])


def test_integrate_subtorus_base_phase():
    # e^{2 pi i x2} dx1 integrated over the x1-circle at x2 = 1/4 gives i.
    f = TrigPolyForm.monomial(2, np.eye(1), k=(0, 1), I=(1,))
    circle = SubTorus(2, (1,), (0.0, 0.25))
    np.testing.assert_allclose(f.integrate(circle), [[1j]], atol=1e-15)


def test_integrate_oscillatory_in_fiber_direction_is_zero():
    f = TrigPolyForm.monomial(2, np.eye(1), k=(2, 0), I=(1,))
    circle = SubTorus(2, (1,), (0.0, 0.0))
    np.testing.assert_allclose(f.integrate(circle), [[0.0]])


def test_integrate_degree_mismatch_raises():
    f = TrigPolyForm.monomial(2, np.eye(1), I=(1,))
    with pytest.raises(ValueError, match="lower-degree"):
        f.integrate()


def test_integrate_skips_outside_directions():
    # dx2 restricted to the x1-circle pulls back to zero: no error, no value.
    f = TrigPolyForm.monomial(2, np.eye(1), I=(2,)) + TrigPolyForm.monomial(
        2, 5.0 * np.eye(1), I=(1,)
    )
    circle = SubTorus(2, (1,), (0.0, 0.0))
    np.testing.assert_allclose(f.integrate(circle), [[5.0]])


def test_evaluate_at_sums_phases():
    f = TrigPolyForm.monomial(2, np.eye(1), k=(1, 0)) + TrigPolyForm.monomial(
        2, np.eye(1), k=(-1, 0)
    )
    val = f.evaluate_at((0.25, 0.9))[()]
    np.testing.assert_allclose(val, [[2.0 * math.cos(math.pi / 2)]], atol=1e-15)


def test_phi_normalize_square():
    # s^2 = 2 pi i, so a 2-form is divided by 2 pi i regardless of branch.
    f = TrigPolyForm.monomial(2, np.eye(1), I=(1, 2))
    for branch in (1, -1):
        g = f.phi_normalize(branch)
        np.testing.assert_allclose(
            g.coefficient((0, 0), (1, 2)), np.eye(1) / TWO_PI_I, atol=1e-15
        )


def test_mat_trace_and_constant():
    M = np.array([[1.0, 5.0], [2.0, 3.0]])
    f = TrigPolyForm.constant(2, M)
    t = f.mat_trace()
    assert t.rank == 1
    np.testing.assert_allclose(t.coefficient((0, 0), ()), [[4.0]])


def test_exp_nilpotent_degree_two_on_t3():
    # On T^3 a 2-form squares to a 4-form = 0, so exp(a) = I + a exactly.
    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    f = TrigPolyForm.monomial(3, N, I=(1, 2))
    e = f.exp_nilpotent()
    np.testing.assert_allclose(e.coefficient((0, 0, 0), ()), np.eye(2))
    np.testing.assert_allclose(e.coefficient((0, 0, 0), (1, 2)), N)
    assert e.num_terms() == 2


def test_exp_nilpotent_second_order_on_t5():
    # Two non-commuting 2-form blocks: the quadratic term must appear.
    M1 = np.array([[0.0, 1.0], [0.0, 0.0]])
    M2 = np.array([[0.0, 0.0], [1.0, 0.0]])
    a = TrigPolyForm.monomial(5, M1, I=(1, 2)) + TrigPolyForm.monomial(
        5, M2, I=(3, 4)
    )
    e = a.exp_nilpotent()
    # quadratic term: (a^a)/2 has the cross products on dx1..dx4
    np.testing.assert_allclose(
        e.coefficient((0,) * 5, (1, 2, 3, 4)), 0.5 * (M1 @ M2 + M2 @ M1)
    )
    assert e.wedge((-a).exp_nilpotent()).allclose(
        TrigPolyForm.identity(5, 2), 1e-12
    )


def test_exp_nilpotent_rejects_degree_zero_and_odd():
    with pytest.raises(ValueError):
        TrigPolyForm.identity(2, 2).exp_nilpotent()
    with pytest.raises(ValueError):
        TrigPolyForm.monomial(2, np.eye(2), I=(1,)).exp_nilpotent()


def test_dagger_is_involution_and_conjugates_phase():
    M = np.array([[1.0 + 2j, 3.0], [0.0, -1j]])
    f = TrigPolyForm.monomial(2, M, k=(1, -1), I=(2,))
    fd = f.dagger()
    np.testing.assert_allclose(fd.coefficient((-1, 1), (2,)), M.conj().T)
    assert fd.dagger().allclose(f, 0.0)


# ----------------------------------------------------------------------
# algebra axioms (hypothesis)


@given(forms())
def test_dd_is_exactly_zero(a):
    assert a.ext_d().ext_d().is_zero(0.0)


@given(forms(dim=2, rank=2), forms(dim=2, rank=2), forms(dim=2, rank=2))
def test_wedge_associative(a, b, c):
    lhs = a.wedge(b).wedge(c)
    rhs = a.wedge(b.wedge(c))
    assert lhs.allclose(rhs, 1e-12)


@given(forms(dim=3, rank=1), forms(dim=3, rank=1))
def test_graded_commutativity_scalar_forms(a, b):
    # For rank-1 (scalar) forms a^b = (-1)^{pq} b^a degreewise.
    for p in a.degrees() | {0}:
        for q in b.degrees() | {0}:
            ap = a.degree_component(p)
            bq = b.degree_component(q)
            lhs = ap.wedge(bq)
            rhs = bq.wedge(ap) * ((-1) ** (p * q))
            assert lhs.allclose(rhs, 1e-12)


@given(forms(dim=2, rank=2), forms(dim=2, rank=2))
def test_leibniz_rule(a, b):
    for p in a.degrees() | {0}:
        ap = a.degree_component(p)
        lhs = ap.wedge(b).ext_d()
        rhs = ap.ext_d().wedge(b) + ap.wedge(b.ext_d()) * ((-1) ** p)
        assert lhs.allclose(rhs, 1e-10)


@given(forms(dim=2, rank=2), forms(dim=2, rank=2))
def test_dagger_antimorphism(a, b):
    for p in a.degrees() | {0}:
        for q in b.degrees() | {0}:
            ap = a.degree_component(p)
            bq = b.degree_component(q)
            lhs = ap.wedge(bq).dagger()
            rhs = bq.dagger().wedge(ap.dagger()) * ((-1) ** (p * q))
            assert lhs.allclose(rhs, 1e-12)


@given(forms(dim=2, rank=1))
def test_stokes_full_torus(a):
    # integral over T^d of an exact top-degree form vanishes identically.
    da = a.degree_component(a.dim - 1).ext_d()
    np.testing.assert_allclose(da.integrate(), 0.0, atol=1e-12)


@given(forms(dim=3, rank=2, degree=2, max_terms=2))
def test_exp_times_exp_of_minus_is_identity(a):
    e = a.exp_nilpotent()
    em = (-a).exp_nilpotent()
    assert e.wedge(em).allclose(TrigPolyForm.identity(a.dim, a.rank), 1e-9)


@given(forms())
def test_json_round_trip(a):
    b = TrigPolyForm.from_json_obj(a.to_json_obj())
    assert a.allclose(b, 0.0)
    assert b.allclose(a, 0.0)


@given(forms(dim=2, rank=2), st.sampled_from([1, -1]))
def test_phi_branch_flip_squares_away(a, branch):
    # phi with either branch agrees on even degrees and flips odd degrees;
    # applying the rescale twice with opposite branches is degree-parity id.
    f1 = a.phi_normalize(branch)
    f2 = a.phi_normalize(-branch)
    for p in a.degrees():
        lhs = f1.degree_component(p)
        rhs = f2.degree_component(p) * ((-1) ** p)
        assert lhs.allclose(rhs, 1e-12)


def test_random_dense_round_trip_and_linearity():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng_form(rng, dim=3, rank=2)
        b = rng_form(rng, dim=3, rank=2)
        assert (a + b - b).allclose(a, 1e-12)
        assert (2.5 * a - a - a).allclose(0.5 * a, 1e-12)
        assert TrigPolyForm.from_json_obj(a.to_json_obj()).allclose(a, 0.0)
