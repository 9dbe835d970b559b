import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgfermi import pseudofermion as pf
from pgfermi.coherent import pg_context
from pgfermi.errors import ContextMismatch, KindMismatch, NotUnitLeading
from pgfermi.paragrassmann import (NotEvenElement, PGContext, constant,
                                   element_from_json, element_to_json,
                                   g_coefficients, monomial, parity_conjugate,
                                   pg_adjoint, pg_integrate, pg_mul, pg_scalar,
                                   pg_sqrt_even, random_element, zeta,
                                   zeta_star)


def _pf_context(kind):
    if kind == "ex2":
        pair = pf.example_family(pf.ExampleParams("ex2", 1.5, -0.7, 2.0 + 1j, 0.8))
    else:
        pair = pf.example_family(pf.ExampleParams("ex3", alphas=(2.0, 0.3j, 1.7)))
    return pg_context(pf.build_system(pair))


CONTEXTS = {"diag1": PGContext.diagonal(1), "diag2": PGContext.diagonal(2),
            "diag4": PGContext.diagonal(4), "ex2": _pf_context("ex2"),
            "ex3": _pf_context("ex3")}
contexts = st.sampled_from(sorted(CONTEXTS)).map(CONTEXTS.get)
seeds = st.integers(0, 2 ** 32 - 1)


@pytest.mark.parametrize("n, expected", [(1, (0, 1)), (2, (-1, 2, 1)), (3, (0, 1, 0, 1))])
def test_g_coefficients_small(n, expected):
    assert g_coefficients(n) == expected


def test_parity_conjugate_fermion_context():
    ctx = PGContext.diagonal(2)
    e1 = np.eye(3)[1]
    assert np.allclose(parity_conjugate(ctx, e1, "vector"), -e1)
    A = np.eye(3, k=1)
    assert np.allclose(parity_conjugate(ctx, A, "operator"), -A)
    assert parity_conjugate(ctx, 5, "scalar") == 5


def test_generator_relations():
    ctx = PGContext.diagonal(3)
    z, zs = zeta(ctx), zeta_star(ctx)
    assert pg_mul(zs, z).allclose(-1 * monomial(ctx, 1, 1))
    zz = pg_mul(z, zs)
    assert pg_mul(zz, zz).allclose(-1 * monomial(ctx, 2, 2))
    assert pg_mul(zeta(ctx, 3), z).terms == {}
    assert pg_mul(zs, zeta_star(ctx, 3)).terms == {}


@pytest.mark.parametrize("n", range(1, 7))
def test_nilpotency(n):
    ctx = PGContext.diagonal(n)
    p = pg_scalar(ctx)
    for _ in range(n):
        p = pg_mul(p, zeta(ctx))
    assert p.terms and pg_mul(p, zeta(ctx)).terms == {}


def test_generator_moves_past_coefficient_by_parity():
    ctx = CONTEXTS["ex2"]
    rng = np.random.default_rng(3)
    X = rng.normal(size=(4, 4))
    lhs = pg_mul(constant(ctx, X, "operator"), zeta(ctx))
    rhs = pg_mul(zeta(ctx), constant(ctx, ctx.P @ X @ ctx.P, "operator"))
    assert lhs.allclose(rhs)


@settings(max_examples=60, deadline=None)
@given(ctx=contexts, seed=seeds,
       kinds=st.sampled_from([("operator", "operator", "operator"),
                              ("operator", "operator", "vector"),
                              ("covector", "operator", "vector"),
                              ("vector", "covector", "operator"),
                              ("scalar", "covector", "vector")]))
def test_associativity(ctx, seed, kinds):
    rng = np.random.default_rng(seed)
    x, y, z = (random_element(ctx, k, rng) for k in kinds)
    lhs = pg_mul(pg_mul(x, y), z)
    rhs = pg_mul(x, pg_mul(y, z))
    assert lhs.allclose(rhs, atol=1e-9 * max(1.0, lhs.max_abs()))


@settings(max_examples=60, deadline=None)
@given(ctx=contexts, seed=seeds,
       kinds=st.sampled_from([("operator", "operator"), ("operator", "vector"),
                              ("covector", "vector"), ("vector", "covector"),
                              ("scalar", "operator")]))
def test_adjoint_is_anti_homomorphism(ctx, seed, kinds):
    rng = np.random.default_rng(seed)
    x, y = (random_element(ctx, k, rng) for k in kinds)
    lhs = pg_adjoint(pg_mul(x, y))
    rhs = pg_mul(pg_adjoint(y), pg_adjoint(x))
    assert lhs.context.same_as(ctx.adjoint())
    assert lhs.allclose(rhs, atol=1e-9 * max(1.0, lhs.max_abs()))


@settings(max_examples=40, deadline=None)
@given(ctx=contexts, seed=seeds,
       kind=st.sampled_from(["scalar", "vector", "covector", "operator"]))
def test_adjoint_is_involution(ctx, seed, kind):
    x = random_element(ctx, kind, np.random.default_rng(seed))
    back = pg_adjoint(pg_adjoint(x))
    assert back.context is ctx
    assert back.allclose(x, atol=1e-9 * max(1.0, x.max_abs()))


def test_adjoint_examples():
    ctx = PGContext.diagonal(2)
    v = np.eye(3)[1]
    adj = pg_adjoint(monomial(ctx, 1, 0, v, "vector"))
    assert adj.bidegrees() == [(0, 1)] and np.allclose(adj.coeff(0, 1), -v)
    even = pg_scalar(ctx) + pg_mul(zeta(ctx), zeta_star(ctx))
    assert pg_adjoint(even).allclose(even)
    M = np.array([[1, 2j, 0], [0, 3, 0], [1, 0, 0]])
    assert np.allclose(pg_adjoint(constant(ctx, M, "operator")).coeff(0, 0), M.conj().T)


def test_integration_rules():
    assert pg_integrate(pg_scalar(PGContext.diagonal(1))) == 0
    for n in (2, 3, 5):
        ctx = PGContext.diagonal(n)
        for i in range(n + 1):
            for k in range(n + 1):
                val = pg_integrate(monomial(ctx, i, k, np.eye(n + 1), "operator"))
                want = g_coefficients(n)[k] if i == k else 0
                assert np.allclose(val, want * np.eye(n + 1))


def test_berezin_kernel_n1():
    ctx = PGContext.diagonal(1)
    P0, P1 = np.diag([1.0, 0]), np.diag([0, 1.0])
    zz = pg_mul(zeta(ctx), zeta_star(ctx))
    kernel = (pg_mul(pg_scalar(ctx) + zz, constant(ctx, P0, "operator"))
              + pg_mul(zz, constant(ctx, P1, "operator")))
    assert np.allclose(pg_integrate(kernel), np.eye(2))


def test_sqrt_examples():
    ctx1, ctx2 = PGContext.diagonal(1), PGContext.diagonal(2)
    s1 = pg_sqrt_even(pg_scalar(ctx1) + pg_mul(zeta(ctx1), zeta_star(ctx1)))
    assert s1.allclose(pg_scalar(ctx1) + 0.5 * monomial(ctx1, 1, 1))
    s2 = pg_sqrt_even(pg_scalar(ctx2) + pg_mul(zeta(ctx2), zeta_star(ctx2)))
    want = pg_scalar(ctx2) + 0.5 * monomial(ctx2, 1, 1) + 0.125 * monomial(ctx2, 2, 2)
    assert s2.allclose(want)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 6), seed=seeds)
def test_sqrt_squares_back(n, seed):
    ctx = PGContext.diagonal(n)
    rng = np.random.default_rng(seed)
    s = pg_scalar(ctx) + PGElement_even(ctx, rng)
    r = pg_sqrt_even(s)
    assert pg_mul(r, r).allclose(s, atol=1e-10)


def PGElement_even(ctx, rng):
    out = pg_scalar(ctx, 0.0)
    for k in range(1, ctx.n + 1):
        out = out + monomial(ctx, k, k, complex(rng.normal(), rng.normal()))
    return out


def test_sqrt_rejects_bad_input():
    ctx = PGContext.diagonal(2)
    with pytest.raises(NotUnitLeading):
        pg_sqrt_even(2 * pg_scalar(ctx))
    with pytest.raises(NotEvenElement):
        pg_sqrt_even(pg_scalar(ctx) + zeta(ctx))
    with pytest.raises(KindMismatch):
        pg_sqrt_even(constant(ctx, np.eye(3), "operator"))


def test_kind_and_context_errors():
    ctx = PGContext.diagonal(2)
    v = constant(ctx, np.ones(3), "vector")
    with pytest.raises(KindMismatch):
        pg_mul(v, v)
    with pytest.raises(ContextMismatch):
        pg_mul(constant(ctx, np.eye(3), "operator"),
               constant(PGContext.diagonal(3), np.ones(4), "vector"))


@settings(max_examples=30, deadline=None)
@given(ctx=contexts, seed=seeds,
       kind=st.sampled_from(["scalar", "vector", "covector", "operator"]))
def test_json_round_trip(ctx, seed, kind):
    x = random_element(ctx, kind, np.random.default_rng(seed))
    y = element_from_json(json.loads(json.dumps(element_to_json(x))))
    assert y.kind == kind and y.context.same_as(ctx)
    assert y.terms.keys() == x.terms.keys()
    assert all(np.array_equal(y.terms[key], x.terms[key]) for key in x.terms)
