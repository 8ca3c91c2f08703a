"""Solver checks: closed-form cases, residual structure, twist derivatives."""

import cmath
import math

import numpy as np
import pytest

from gl3aba.bethe_solver import (
    BetheRoots,
    BranchCutWarning,
    CollisionError,
    ContinuationPlan,
    ModelFunctions,
    TwistVector,
    bethe_residuals,
    check_global_constraints,
    excitation_momentum,
    roots_from_record,
    roots_to_record,
    solve_bethe,
    twist_derivatives,
    verify_deform,
    _jacobian,
    _raw_residuals,
)
from gl3aba.ratcore import Coupling, ParameterSet

L = 2 * math.pi


def tcbg(varkappa=1.0, x=0.0):
    return ModelFunctions.tcbg(L=L, varkappa=varkappa, x=x)


def empty_roots(model, twist=None):
    return BetheRoots(
        ubar=ParameterSet.of(),
        vbar=ParameterSet.of(),
        twist=twist or TwistVector.identity(),
        residual_norm=0.0,
        model_descriptor=model.descriptor(),
    )


def test_empty_sector_residuals():
    model = tcbg()
    res = bethe_residuals(empty_roots(model), model)
    assert res.shape == (0,)


def test_single_v_root_ladder():
    # one particle: exp(i v L) = 1 has roots v = 2 pi n / L = n for L = 2 pi
    model = tcbg()
    for n in (-1, 0, 2):
        roots = solve_bethe(model, 0, 1, plan=ContinuationPlan(v_numbers=(n,)))
        assert roots.residual_norm < 1e-12
        assert abs(roots.vbar[0] - n) < 1e-10


def test_solver_is_deterministic():
    model = tcbg(varkappa=0.8)
    plan = ContinuationPlan(v_numbers=(0, 1), rng_seed=5)
    r1 = solve_bethe(model, 1, 2, plan=plan)
    r2 = solve_bethe(model, 1, 2, plan=plan)
    assert r1.ubar.points == r2.ubar.points
    assert r1.vbar.points == r2.vbar.points


def test_one_u_two_v_closed_form():
    # the u-equation at a=1, b=2 collapses to u = (v1 + v2 + c)/2
    model = tcbg(varkappa=1.3)
    roots = solve_bethe(model, 1, 2, plan=ContinuationPlan(v_numbers=(0, 1)))
    v1, v2 = roots.vbar.points
    u = roots.ubar[0]
    assert abs(u - (v1 + v2 + model.coupling.c) / 2) < 1e-10
    assert roots.residual_norm < 1e-12


def test_collision_seed_raises():
    model = tcbg()
    with pytest.raises(CollisionError):
        solve_bethe(model, 0, 2, seed=((), (1.0, 1.0 + 1e-12)))


def test_chain_roots_verified_by_residuals():
    # N=3 lattice, sector (1,0): u-roots solve prod f(u, xi_i) = 1,
    # i.e. a degree-(N-1) polynomial equation; pick one root as a seed.
    xi = ParameterSet.of(0.21, -0.4, 0.9, label="xi")
    c = Coupling(1.0)
    model = ModelFunctions.chain(xi, c)
    coeffs_plus = np.poly(np.array(xi.points) - c.c)
    coeffs_zero = np.poly(np.array(xi.points))
    poly = coeffs_plus - coeffs_zero  # prod(u - xi + c) - prod(u - xi)
    candidates = np.roots(poly[1:]) if abs(poly[0]) < 1e-14 else np.roots(poly)
    seed_u = candidates[0]
    roots = solve_bethe(model, 1, 0, seed=((seed_u,), ()))
    res = bethe_residuals(roots, model)
    assert np.max(np.abs(res)) < 1e-12


def test_global_constraints_empty_and_solved():
    model = tcbg()
    rep = check_global_constraints(empty_roots(model), model)
    assert rep["r1_ubar_dev"] == 0.0
    assert rep["r3_vbar_dev"] == 0.0
    assert rep["f_vu_dev"] == 0.0

    roots = solve_bethe(model, 1, 2, plan=ContinuationPlan(v_numbers=(0, 1)))
    rep = check_global_constraints(roots, model)
    assert rep["r1_ubar_dev"] < 1e-10
    assert rep["r3_vbar_dev"] < 1e-10
    assert rep["f_vu_dev"] < 1e-10


def test_jacobian_matches_finite_differences():
    model = tcbg(varkappa=0.9)
    roots = solve_bethe(model, 1, 2, plan=ContinuationPlan(v_numbers=(0, 1)))
    u = np.array(roots.ubar.points)
    v = np.array(roots.vbar.points)
    J = _jacobian(u, v, model)
    tw = TwistVector.identity()
    h = 1e-7
    n = len(u) + len(v)
    for col in range(n):
        du = np.zeros(len(u), dtype=complex)
        dv = np.zeros(len(v), dtype=complex)
        if col < len(u):
            du[col] = h
        else:
            dv[col - len(u)] = h
        plus = _raw_residuals(u + du, v + dv, model, tw)
        minus = _raw_residuals(u - du, v - dv, model, tw)
        fd = (plus - minus) / (2 * h)
        assert np.max(np.abs(fd - J[:, col])) < 1e-6


def test_twist_derivatives_deform_direction():
    # joint kappa1 = kappa2 direction: every root moves by -i/L per unit kappa
    model = tcbg(varkappa=1.1)
    roots = solve_bethe(model, 1, 2, plan=ContinuationPlan(v_numbers=(0, 1)))
    du1, dv1 = twist_derivatives(roots, model, 1)
    du2, dv2 = twist_derivatives(roots, model, 2)
    assert np.allclose(du1 + du2, -1j / L, atol=1e-9)
    assert np.allclose(dv1 + dv2, -1j / L, atol=1e-9)
    # summed identity: i * sum_k dv_k over the joint direction = b / L
    total = 1j * np.sum(dv1 + dv2)
    assert abs(total - roots.b / L) < 1e-9


def test_twist_derivatives_match_finite_differences():
    model = tcbg(varkappa=0.7)
    roots = solve_bethe(model, 1, 2, plan=ContinuationPlan(v_numbers=(0, 1)))
    h = 1e-5
    for direction in (1, 2, 3):
        du, dv = twist_derivatives(roots, model, direction)
        kplus = [1.0, 1.0, 1.0]
        kminus = [1.0, 1.0, 1.0]
        kplus[direction - 1] += h
        kminus[direction - 1] -= h
        rp = solve_bethe(model, 1, 2, twist=TwistVector(*kplus),
                         seed=(roots.ubar.points, roots.vbar.points))
        rm = solve_bethe(model, 1, 2, twist=TwistVector(*kminus),
                         seed=(roots.ubar.points, roots.vbar.points))
        fd_u = (np.array(rp.ubar.points) - np.array(rm.ubar.points)) / (2 * h)
        fd_v = (np.array(rp.vbar.points) - np.array(rm.vbar.points)) / (2 * h)
        # solver sorts roots by (re, im); derivative ordering must match
        scale = max(1.0, np.max(np.abs(du)) if du.size else 0.0,
                    np.max(np.abs(dv)) if dv.size else 0.0)
        assert np.max(np.abs(fd_u - du)) < 1e-6 * scale
        assert np.max(np.abs(fd_v - dv)) < 1e-6 * scale


def test_verify_deform():
    model = tcbg(varkappa=1.0)
    roots = solve_bethe(model, 1, 2, plan=ContinuationPlan(v_numbers=(0, 1)))
    assert verify_deform(roots, model, 1.0) == pytest.approx(roots.residual_norm, abs=1e-12)
    for kappa in (0.9, 1.1, cmath.exp(0.3j)):
        assert verify_deform(roots, model, kappa) < 1e-12
    with pytest.warns(BranchCutWarning):
        verify_deform(roots, model, -1.0)


def test_excitation_momentum():
    vB = ParameterSet.of(2.0)
    assert excitation_momentum(vB, ParameterSet.of()) == 2.0
    assert excitation_momentum(vB, vB) == 0.0
    a = ParameterSet.of(1.0, 3.0)
    b = ParameterSet.of(2.0)
    assert excitation_momentum(a, b) == 2.0
    assert excitation_momentum(a, b) == -excitation_momentum(b, a)


def test_roots_record_roundtrip():
    model = tcbg()
    roots = solve_bethe(model, 0, 2, plan=ContinuationPlan(v_numbers=(0, 1)))
    rec = roots_to_record(roots)
    back = roots_from_record(rec)
    assert back.ubar.points == roots.sorted_copy().ubar.points
    assert back.vbar.points == roots.sorted_copy().vbar.points
    assert back.residual_norm == roots.residual_norm
