"""Lattice-realization checks: RTT, vacuum structure, zero modes, on-shell states."""

import numpy as np
import pytest

from gl3aba.ratcore import Coupling, ParameterSet, PoleError, product_f
from gl3aba.bethe_solver import BetheRoots, TwistVector, bethe_residuals
from gl3aba.chain_oracle import (
    AmbiguityError,
    ChainError,
    NoMatchError,
    build_chain,
    composite_defect,
    enumerate_regular_solutions,
    exchange_2132_defect,
    identify_onshell,
    matrix_element,
    rtt_defect,
    scalar_product,
)

C1 = Coupling(1.0)
XI3 = ParameterSet.of(0.21, -0.40, 0.93, label="xi")
XI4 = ParameterSet.of(0.21, -0.40, 0.93, -1.1, label="xi")


@pytest.fixture(scope="module")
def chain3():
    return build_chain(3, XI3, C1, split=1)


@pytest.fixture(scope="module")
def chain4():
    return build_chain(4, XI4, C1, split=2)


def dense(op):
    import scipy.sparse as sp

    return np.asarray(op.todense()) if sp.issparse(op) else np.asarray(op)


def test_one_site_transfer_matrix():
    xi = ParameterSet.of(0.3, label="xi")
    ch = build_chain(1, xi, C1)
    u = 1.7 + 0.4j
    M = dense(ch.transfer_matrix(u))
    expect = (3.0 + 1.0 / (u - 0.3)) * np.eye(3)
    assert np.abs(M - expect).max() < 1e-13


def test_build_rejects_bad_requests():
    with pytest.raises(ChainError):
        build_chain(2, XI3, C1)  # wrong xi count
    with pytest.raises(ChainError):
        build_chain(3, XI3, C1, split=7)
    with pytest.raises(ChainError):
        build_chain(
            3,
            ParameterSet.of(0.5, 0.5, 1.0, degenerate=True, label="xi"),
            C1,
        )


def test_monodromy_pole_at_inhomogeneity(chain3):
    with pytest.raises(PoleError):
        chain3.monodromy_entry(1, 1, 0.21)


def test_rtt_defect_small(chain3):
    rng = np.random.default_rng(1)
    for _ in range(5):
        u, v = rng.standard_normal(2) * 2 + 1j * rng.standard_normal(2)
        assert rtt_defect(chain3, complex(u), complex(v)) < 1e-12


def test_vacuum_structure(chain3):
    vac = chain3.vacuum()
    u = 1.3 + 0.8j
    # annihilation on the vacuum
    for (i, j) in [(2, 1), (3, 1), (3, 2)]:
        op = dense(chain3.monodromy_entry(i, j, u))
        assert np.abs(op @ vac).max() < 1e-14
    # vacuum eigenvalues r1 = prod f, r2 = r3 = 1
    r1 = product_f(u, XI3, C1)
    for k, expect in [(1, r1), (2, 1.0), (3, 1.0)]:
        op = dense(chain3.monodromy_entry(k, k, u))
        val = vac @ (op @ vac)
        assert abs(val - expect) < 1e-12 * max(1.0, abs(expect))


def test_partial_monodromy_identity_at_zero_split():
    ch = build_chain(3, XI3, C1, split=0)
    u = 0.9 + 0.4j
    for i in range(1, 4):
        for j in range(1, 4):
            op = dense(ch.monodromy_entry(i, j, u, "part1"))
            expect = np.eye(ch.dim) if i == j else np.zeros((ch.dim, ch.dim))
            assert np.abs(op - expect).max() == 0.0


def test_composite_product(chain4):
    assert composite_defect(chain4, 1.37 + 0.21j) < 1e-12


def test_commuting_transfer_matrices(chain3):
    M1 = dense(chain3.transfer_matrix(0.77 + 0.31j))
    M2 = dense(chain3.transfer_matrix(-1.21 + 0.64j))
    comm = M1 @ M2 - M2 @ M1
    assert np.abs(comm).max() < 1e-12


def test_weight_conservation(chain3):
    M = dense(chain3.transfer_matrix(0.9 + 1.1j))
    for k in (1, 2, 3):
        W = dense(chain3.weight_operator(k))
        assert np.abs(M @ W - W @ M).max() < 1e-12


def test_zero_mode_large_u_consistency(chain3):
    u = 1e6
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (1, 3)]:
        T = dense(chain3.monodromy_entry(i, j, u))
        delta = np.eye(chain3.dim) if i == j else 0.0
        approx = (u / C1.c) * (T - delta)
        exact = dense(chain3.zero_mode(i, j))
        assert np.abs(approx - exact).max() < 1e-4


def test_zero_mode_vacuum_count(chain3):
    vac = chain3.vacuum()
    Z11 = dense(chain3.zero_mode(1, 1))
    assert abs(vac @ (Z11 @ vac) - chain3.N) < 1e-14


def test_zero_mode_additivity(chain4):
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        tot = dense(chain4.zero_mode(i, j, "total"))
        p1 = dense(chain4.zero_mode(i, j, "part1"))
        p2 = dense(chain4.zero_mode(i, j, "part2"))
        assert np.abs(tot - (p1 + p2)).max() == 0.0


def test_exchange_2132(chain4):
    assert exchange_2132_defect(chain4, 0.83 + 0.4j, -0.62 + 0.9j) < 1e-12


def test_psi_transpose_entries(chain3):
    u = 0.57 + 0.66j
    for (i, j) in [(1, 2), (1, 3), (2, 3), (1, 1)]:
        lhs = chain3.psi_transpose(dense(chain3.monodromy_entry(i, j, u)))
        rhs = dense(chain3.monodromy_entry(j, i, u))
        assert np.abs(lhs - rhs).max() < 1e-9
        # involution
        back = chain3.psi_transpose(chain3.psi_transpose(dense(chain3.monodromy_entry(i, j, u))))
        assert np.abs(back - dense(chain3.monodromy_entry(i, j, u))).max() < 1e-9


def test_transposition_similarity_symmetric(chain3):
    S = chain3.transposition_similarity
    assert np.abs(S - S.T).max() < 1e-12


def test_identify_vacuum(chain3):
    sols = enumerate_regular_solutions(chain3, 0, 0)
    state = identify_onshell(chain3, sols[0])
    assert state.certificate < 1e-10
    assert abs(state.state[0] - 1.0) < 1e-12
    assert np.abs(state.state[1:]).max() < 1e-12


def test_identify_onshell_sector_21(chain3):
    (sol,) = enumerate_regular_solutions(chain3, 2, 1)
    state = identify_onshell(chain3, sol)
    assert state.certificate < 1e-8
    # highest-weight annihilation
    hw = dense(chain3.zero_mode(2, 1)) @ state.state
    assert np.abs(hw).max() < 1e-10
    dual_hw = state.dual @ dense(chain3.zero_mode(1, 2))
    assert np.abs(dual_hw).max() < 1e-10
    # weight eigenvalues (N-a, a-b, b)
    for k, expect in zip((1, 2, 3), state.weights):
        W = dense(chain3.weight_operator(k))
        assert np.abs(W @ state.state - expect * state.state).max() < 1e-10
    assert state.weights == (1, 1, 1)


def test_identify_rejects_wrong_roots(chain3):
    bogus = BetheRoots(
        ubar=ParameterSet.of(0.123 + 0.5j, -0.77),
        vbar=ParameterSet.of(0.3 - 0.9j),
        twist=TwistVector.identity(),
        residual_norm=1.0,
        model_descriptor={},
    )
    with pytest.raises(NoMatchError):
        identify_onshell(chain3, bogus)


def test_onshell_orthogonality_and_selection_rules(chain4):
    sols10 = enumerate_regular_solutions(chain4, 1, 0)
    sols20 = enumerate_regular_solutions(chain4, 2, 0)
    s10 = [identify_onshell(chain4, s) for s in sols10]
    s20 = [identify_onshell(chain4, s) for s in sols20]
    # distinct eigenvectors are orthogonal under the bilinear pairing
    g01 = scalar_product(chain4, s10[0], s10[1])
    assert abs(g01) < 1e-10 * abs(scalar_product(chain4, s10[0], s10[0]))
    # T12(z) raises a by one: needs a' = a + 1
    z = 2.31 + 0.5j
    T12 = dense(chain4.monodromy_entry(1, 2, z))
    allowed = matrix_element(chain4, s20[0], T12, s10[0])
    assert abs(allowed) > 1e-8
    blocked = matrix_element(chain4, s10[1], T12, s10[0])
    assert abs(blocked) < 1e-10
    # zero-mode annihilation against any on-shell ket
    Z21 = dense(chain4.zero_mode(2, 1))
    for st in s10 + s20:
        val = matrix_element(chain4, st, Z21, st)
        assert abs(val) < 1e-10 * max(1.0, abs(st.pairing()))


def test_bethe_residuals_verify_enumerated_solutions(chain4):
    model = chain4.model()
    for (a, b) in [(1, 0), (2, 0), (2, 1)]:
        for sol in enumerate_regular_solutions(chain4, a, b):
            res = bethe_residuals(sol, model)
            if res.size:
                assert np.max(np.abs(res)) < 1e-12
