import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steinlab import (
    FDAlgebra,
    WeightsNotNormalized,
    cyclic,
    group_algebra,
    multimatrix,
    symmetric_3,
    tomita_j,
    validate,
)

M2C = multimatrix([(2, 2 / 3), (1, 1 / 3)], label="M2+C")


def rand_elem(alg, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)


@pytest.mark.parametrize(
    "blocks",
    [[(1, 1.0)], [(1, 0.5), (1, 0.5)], [(2, 1.0)], [(2, 0.5), (3, 0.5)],
     [(3, 0.2), (2, 0.5), (1, 0.3)]],
)
def test_multimatrix_satisfies_axioms(blocks):
    rep = validate(multimatrix(blocks))
    assert rep.passed, rep.residuals
    assert rep.gram_min_eig > 0


@pytest.mark.parametrize("grp", [cyclic(2), cyclic(5), symmetric_3()])
def test_group_algebra_satisfies_axioms(grp):
    rep = validate(group_algebra(grp))
    assert rep.passed, rep.residuals


def test_weights_must_sum_to_one():
    with pytest.raises(WeightsNotNormalized):
        multimatrix([(2, 0.5), (1, 0.3)])


def test_validate_flags_broken_trace():
    alg = multimatrix([(2, 1.0)])
    bad = FDAlgebra(alg.dim, alg.mult, alg.star, alg.unit, 2.0 * alg.trace)
    rep = validate(bad)
    assert not rep.passed
    name, worst = rep.worst()
    assert worst > 1e-2


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_star_is_antimultiplicative(s1, s2):
    x, y = rand_elem(M2C, s1), rand_elem(M2C, s2)
    lhs = M2C.star_of(M2C.mul(x, y))
    rhs = M2C.mul(M2C.star_of(y), M2C.star_of(x))
    assert np.max(np.abs(lhs - rhs)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_trace_is_cyclic(s1, s2):
    x, y = rand_elem(M2C, s1), rand_elem(M2C, s2)
    assert abs(M2C.tr(M2C.mul(x, y)) - M2C.tr(M2C.mul(y, x))) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000), st.integers(0, 10_000))
def test_inner_product_sesquilinearity(s1, s2, s3):
    x, y, z = (rand_elem(M2C, s) for s in (s1, s2, s3))
    a = 0.7 - 0.3j
    lhs = M2C.inner(a * x + z, y)
    rhs = a * M2C.inner(x, y) + M2C.inner(z, y)
    assert abs(lhs - rhs) < 1e-9
    assert abs(M2C.inner(x, y) - np.conj(M2C.inner(y, x))) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_norm_is_faithful(seed):
    x = rand_elem(M2C, seed)
    assert M2C.norm(x) > 0 or np.max(np.abs(x)) == 0


def test_mult_matrices_realize_products():
    x, y = rand_elem(M2C, 1), rand_elem(M2C, 2)
    assert np.allclose(M2C.left_mult(x) @ y, M2C.mul(x, y))
    assert np.allclose(M2C.right_mult(y) @ x, M2C.mul(x, y))
    # the two commute: (a . ) and ( . b)
    comm = M2C.left_mult(x) @ M2C.right_mult(y) - M2C.right_mult(y) @ M2C.left_mult(x)
    assert np.max(np.abs(comm)) < 1e-12


def test_onb_round_trip():
    x = rand_elem(M2C, 3)
    assert np.allclose(M2C.from_onb(M2C.to_onb(x)), x)
    # orthonormal coordinates carry the GNS inner product to the standard one
    y = rand_elem(M2C, 4)
    assert abs(np.vdot(M2C.to_onb(y), M2C.to_onb(x)) - M2C.inner(x, y)) < 1e-9


def test_tomita_conjugation_is_involutive():
    j = tomita_j(M2C)
    x = rand_elem(M2C, 5)
    assert np.allclose(j(j(x)), x)
    assert np.allclose(j(x), M2C.star_of(x))
    # <Jx, Jy> = <y, x>
    y = rand_elem(M2C, 6)
    assert abs(M2C.inner(j(x), j(y)) - M2C.inner(y, x)) < 1e-9


def test_antilinear_sandwich_matrix():
    j = tomita_j(M2C)
    m = np.asarray(
        np.random.default_rng(7).standard_normal((M2C.dim, M2C.dim)), dtype=complex
    )
    x = rand_elem(M2C, 8)
    assert np.allclose(j.compose_linear(m) @ x, j(m @ j(x)))


def test_gram_matches_trace_pairing():
    for i in range(M2C.dim):
        for j in range(M2C.dim):
            want = M2C.tr(M2C.mul(M2C.star_of(M2C.basis(i)), M2C.basis(j)))
            assert abs(M2C.gram[i, j] - want) < 1e-12
