"""Kernel-level checks: rational functions, products, tau, partition streams."""

import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl3aba.ratcore import (
    Bipartition,
    Coupling,
    ParameterSet,
    PoleError,
    enumerate_bipartitions,
    enumerate_bipartitions_containing,
    enumerate_bipartitions_excluding,
    enumerate_fourpartitions,
    f,
    g,
    product_f,
    tau,
)
from gl3aba.bethe_solver import ModelFunctions

C1 = Coupling(1.0)


def test_g_direct_values():
    assert g(3.0, 1.0, C1) == 0.5
    assert g(1.0, 3.0, C1) == -0.5
    with pytest.raises(PoleError):
        g(2.0, 2.0, C1)


def test_f_direct_values():
    assert f(2.0, 1.0, C1) == 2.0
    assert abs(f(1e6, 0.0, C1) - (1.0 + 1e-6)) < 1e-18
    assert f(0.0, 1.0, C1) == 0.0  # zero at u = v - c


complex_strategy = st.builds(
    complex,
    st.floats(-50, 50, allow_nan=False, allow_infinity=False),
    st.floats(-50, 50, allow_nan=False, allow_infinity=False),
)


@settings(max_examples=200)
@given(complex_strategy, complex_strategy)
def test_f_equals_one_plus_g(u, v):
    if abs(u - v) < 1e-6 * max(1.0, abs(u), abs(v)):
        return
    lhs = f(u, v, C1)
    rhs = 1.0 + g(u, v, C1)
    assert abs(lhs - rhs) <= 1e-14 * max(1.0, abs(lhs))


@settings(max_examples=200)
@given(complex_strategy, complex_strategy)
def test_g_antisymmetry(u, v):
    if abs(u - v) < 1e-6 * max(1.0, abs(u), abs(v)):
        return
    s = g(u, v, C1) + g(v, u, C1)
    assert abs(s) <= 1e-14 * max(1.0, abs(g(u, v, C1)))


def test_product_f_empty_conventions():
    empty = ParameterSet.of()
    other = ParameterSet.of(1.0, 2.0)
    assert product_f(empty, other, C1) == 1.0
    assert product_f(other, empty, C1) == 1.0
    assert product_f(ParameterSet.of(5.0), ParameterSet.of(1.0), C1) == 1.25


def test_product_f_multiplicative_over_disjoint_union():
    rng = np.random.default_rng(3)
    A = ParameterSet.of(*(rng.standard_normal(2) + 1j * rng.standard_normal(2)))
    A2 = ParameterSet.of(*(rng.standard_normal(3) + 1j * rng.standard_normal(3)))
    B = ParameterSet.of(*(rng.standard_normal(2) + 1j * rng.standard_normal(2)))
    lhs = product_f(A.union(A2), B, C1)
    rhs = product_f(A, B, C1) * product_f(A2, B, C1)
    assert abs(lhs - rhs) < 1e-12 * abs(lhs)


def test_product_f_pole_reports_pair():
    with pytest.raises(PoleError):
        product_f(ParameterSet.of(1.0), ParameterSet.of(1.0), C1)


def test_coupling_gas_relation():
    c = Coupling.from_gas(2.5)
    assert c.c == -2.5j
    with pytest.raises(ValueError):
        Coupling(0.0)
    with pytest.raises(ValueError):
        Coupling(c=1.0, varkappa=1.0, from_varkappa=True)


def test_parameter_set_rejects_coinciding_points():
    with pytest.raises(ValueError):
        ParameterSet.of(1.0, 1.0)
    ParameterSet.of(1.0, 1.0, degenerate=True)  # explicit opt-out


def test_tau_empty_sets():
    model = ModelFunctions.tcbg(L=2 * np.pi, varkappa=1.0)
    w = 0.7 + 0.2j
    empty = ParameterSet.of()
    val = tau(w, empty, empty, model)
    expect = 2.0 + cmath.exp(1j * w * 2 * np.pi)
    assert abs(val - expect) < 1e-13


def test_tau_one_site_vacuum():
    # one lattice site: trace of I + g P has vacuum eigenvalue 3 + c/(w - xi)
    xi = ParameterSet.of(0.3, label="xi")
    c = Coupling(1.0)
    model = ModelFunctions.chain(xi, c)
    w = 2.2 + 0.5j
    empty = ParameterSet.of()
    val = tau(w, empty, empty, model)
    assert abs(val - (3.0 + 1.0 / (w - 0.3))) < 1e-13


def test_tau_pole_on_root():
    model = ModelFunctions.tcbg(L=1.0, varkappa=1.0)
    with pytest.raises(PoleError):
        tau(1.0, ParameterSet.of(1.0), ParameterSet.of(), model)


# -- partition streams -------------------------------------------------------


def test_bipartition_counts():
    assert len(list(enumerate_bipartitions(3, 1))) == 3
    parts = list(enumerate_bipartitions(4, 0))
    assert len(parts) == 1 and parts[0].indices_I == ()
    with pytest.raises(ValueError):
        list(enumerate_bipartitions(2, 3))


def test_bipartition_uniqueness_and_order():
    for n in range(0, 7):
        for k in range(0, n + 1):
            masks = [p.mask for p in enumerate_bipartitions(n, k)]
            assert len(masks) == len(set(masks))
            assert masks == sorted(masks)
            import math

            assert len(masks) == math.comb(n, k)


def test_pinned_streams_partition_the_full_stream():
    for n in range(1, 6):
        for k in range(1, n):
            pinned = n // 2
            inc = {p.mask for p in enumerate_bipartitions_containing(n, k, pinned)}
            exc = {p.mask for p in enumerate_bipartitions_excluding(n, k, pinned)}
            allm = {p.mask for p in enumerate_bipartitions(n, k)}
            assert inc | exc == allm
            assert not inc & exc
            import math

            assert len(inc) == math.comb(n - 1, k - 1)
            assert len(exc) == math.comb(n - 1, k)


def test_pinned_requires_positive_k():
    assert len(list(enumerate_bipartitions_containing(1, 1, 0))) == 1
    with pytest.raises(ValueError):
        list(enumerate_bipartitions_containing(3, 0, 1))


def test_fourpartition_counts():
    assert len(list(enumerate_fourpartitions(2, (1, 1, 0, 0)))) == 2
    assert len(list(enumerate_fourpartitions(0, (0, 0, 0, 0)))) == 1
    with pytest.raises(ValueError):
        list(enumerate_fourpartitions(3, (1, 1, 1, 1)))
    # multinomial count 4!/(1!1!1!1!)
    assert len(list(enumerate_fourpartitions(4, (1, 1, 1, 1)))) == 24
    parts = list(enumerate_fourpartitions(5, (2, 1, 1, 1)))
    assert len(parts) == 60
    seen = {p.masks for p in parts}
    assert len(seen) == 60
    for p in parts:
        assert p.masks[0] | p.masks[1] | p.masks[2] | p.masks[3] == (1 << 5) - 1
        assert sum(bin(m).count("1") for m in p.masks) == 5
