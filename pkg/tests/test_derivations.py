import numpy as np
import pytest

from steinlab import (
    Bimodule,
    CrossedContext,
    Derivation,
    NotSubalgebra,
    ad_action,
    average_scaling,
    central_projection_element,
    central_vectors,
    commutator_derivation,
    covariance_defect,
    crossed_product,
    cyclic,
    decompose_vanishing,
    derivation_space,
    extend_vanishing,
    group_algebra,
    inner_derivations,
    is_covariant,
    matrix_units,
    multimatrix,
    permutation_action,
    relative_derivations,
    restrict_component,
    scaling_conjugation,
    trivial_action,
    vanishing_space,
)

M2 = multimatrix([(2, 1.0)], label="M2")


@pytest.fixture(scope="module")
def ctx_c2():
    c2 = multimatrix([(1, 0.5), (1, 0.5)], label="C^2")
    act = permutation_action(cyclic(2), c2, [[0, 1], [1, 0]])
    return CrossedContext(crossed_product(c2, act))


@pytest.fixture(scope="module")
def ctx_m2():
    sign = np.array([1, 0, 0, -1], dtype=complex)
    act = ad_action(cyclic(2), M2, np.stack([M2.unit, sign]))
    return CrossedContext(crossed_product(M2, act))


def test_derivation_space_satisfies_leibniz():
    space = derivation_space(M2)
    assert space.rank > 0
    for r in range(space.rank):
        assert space.derivation(r).leibniz_residual() < 1e-9


def test_commutator_derivations_live_in_the_space():
    space = derivation_space(M2)
    bim = space.bim
    rng = np.random.default_rng(2)
    xi = rng.standard_normal(bim.dim) + 1j * rng.standard_normal(bim.dim)
    d = commutator_derivation(bim, xi)
    assert d.leibniz_residual() < 1e-9
    assert space.contains(d)
    assert space.distance(d) < 1e-8


@pytest.mark.parametrize(
    "alg",
    [M2, multimatrix([(1, 0.5), (1, 0.5)]), group_algebra(cyclic(3))],
    ids=["M2", "C^2", "C[Z/3]"],
)
def test_inner_derivations_exhaust_the_space(alg):
    full = derivation_space(alg)
    inner = inner_derivations(alg)
    assert full.same_span(inner)


def test_linear_rank_counts_non_central_directions():
    # the commutator map kills exactly the bimodule-central vectors
    for alg in (M2, multimatrix([(1, 0.5), (1, 0.5)])):
        space = derivation_space(alg)
        n_central = central_vectors(alg, np.eye(alg.dim, dtype=complex)).shape[1]
        assert space.rank == alg.dim * alg.dim - n_central


def test_central_vectors_of_diagonal_algebra():
    c3 = multimatrix([(1, 0.5), (1, 0.3), (1, 0.2)])
    q = central_vectors(c3, np.eye(3, dtype=complex))
    assert q.shape[1] == 3
    bim = Bimodule(c3)
    gram = q.conj().T @ (bim.gram @ q)
    assert np.max(np.abs(gram - np.eye(3))) < 1e-10


def test_relative_derivations_require_a_subalgebra():
    space = derivation_space(M2)
    e01 = np.zeros((4, 1), dtype=complex)
    e01[1, 0] = 1.0
    with pytest.raises(NotSubalgebra):
        relative_derivations(space, e01)


def test_relative_derivations_vanish_on_the_subalgebra(ctx_m2):
    cp = ctx_m2.cp
    space = derivation_space(cp.algebra, bim=ctx_m2.big)
    van = relative_derivations(space, cp.embed_group, check_subalgebra=False)
    assert 0 < van.rank < space.rank
    for r in range(van.rank):
        d = van.derivation(r)
        assert d.restricted_norm(cp.embed_group) < 1e-9
        assert d.leibniz_residual() < 1e-9


def test_vanishing_space_shortcut_matches(ctx_c2):
    cp = ctx_c2.cp
    space = derivation_space(cp.algebra, bim=ctx_c2.big)
    van = relative_derivations(space, cp.embed_group, check_subalgebra=False)
    assert vanishing_space(ctx_c2).same_span(van)


def test_extend_then_restrict_is_identity(ctx_c2):
    base_space = derivation_space(ctx_c2.cp.base, bim=ctx_c2.base)
    grp = ctx_c2.group
    for r in range(base_space.rank):
        d = base_space.derivation(r)
        for h in range(grp.order):
            ext = extend_vanishing(ctx_c2, d, h)
            assert ext.leibniz_residual() < 1e-9
            assert ext.restricted_norm(ctx_c2.cp.embed_group) < 1e-9
            back = restrict_component(ctx_c2, ext, grp.identity, h)
            assert np.max(np.abs(back.matrix - d.matrix)) < 1e-10


def test_vanishing_derivations_reassemble_from_components(ctx_m2):
    van = vanishing_space(ctx_m2)
    dec = decompose_vanishing(ctx_m2, van)
    assert dec.worst_residual < 1e-9
    assert len(dec.components) == van.rank
    assert all(len(row) == ctx_m2.group.order for row in dec.components)


def test_scaling_conjugations_form_a_group_action(ctx_m2):
    space = derivation_space(ctx_m2.cp.algebra, bim=ctx_m2.big)
    d = space.derivation(0)
    grp = ctx_m2.group
    ident = scaling_conjugation(ctx_m2, grp.identity, d)
    assert np.max(np.abs(ident.matrix - d.matrix)) < 1e-12
    for g in range(grp.order):
        for h in range(grp.order):
            lhs = scaling_conjugation(ctx_m2, g, scaling_conjugation(ctx_m2, h, d))
            rhs = scaling_conjugation(ctx_m2, grp.mul(h, g), d)
            assert np.max(np.abs(lhs.matrix - rhs.matrix)) < 1e-10


def test_average_scaling_is_covariant_and_vanishes(ctx_m2):
    space = derivation_space(ctx_m2.cp.algebra, bim=ctx_m2.big)
    for r in range(min(space.rank, 3)):
        avg = average_scaling(ctx_m2, space.derivation(r))
        assert avg.leibniz_residual() < 1e-9
        assert covariance_defect(ctx_m2, avg) < 1e-9
        assert avg.restricted_norm(ctx_m2.cp.embed_group) < 1e-8


def test_covariance_detects_both_directions(ctx_m2):
    base_space = derivation_space(ctx_m2.cp.base, bim=ctx_m2.base)
    ext = extend_vanishing(ctx_m2, base_space.derivation(0), 1)
    assert is_covariant(ctx_m2, ext)
    # an inner derivation by a group unitary is not covariant and does not
    # vanish on the group algebra
    xi = ctx_m2.big.embed(ctx_m2.cp.u(1), ctx_m2.cp.algebra.unit)
    d = commutator_derivation(ctx_m2.big, xi)
    assert covariance_defect(ctx_m2, d) > 1e-3
    assert d.restricted_norm(ctx_m2.cp.embed_group) > 1e-3
    assert not is_covariant(ctx_m2, d)


def test_coset_masks_partition_the_bimodule(ctx_m2):
    grp = ctx_m2.group
    total = np.zeros(ctx_m2.big.dim)
    for g in range(grp.order):
        for h in range(grp.order):
            mask = ctx_m2.coset_mask(g, h)
            assert set(np.unique(mask)) <= {0.0, 1.0}
            total = total + mask
    assert np.allclose(total, 1.0)


def test_coset_projection_matrix_is_idempotent(ctx_c2):
    proj = ctx_c2.coset_projection(1, 0)
    m = proj.matrix
    assert np.allclose(m @ m, m)
    v = np.arange(ctx_c2.big.dim, dtype=complex)
    assert np.allclose(proj.apply(v), m @ v)


def test_central_projection_element_of_m2():
    blocks = [(2, 1.0)]
    bim = Bimodule(M2)
    p, left_p = central_projection_element(M2, matrix_units(blocks), bim)
    # left action agrees with the orthogonal projection onto central vectors
    q = central_vectors(M2, np.eye(4, dtype=complex), bim)
    proj = q @ (q.conj().T @ bim.gram)
    assert np.max(np.abs(left_p - proj)) < 1e-10
    # idempotent, self-adjoint for the GNS form, trace 1/4
    assert np.max(np.abs(left_p @ left_p - left_p)) < 1e-10
    w = bim.gram
    assert np.max(np.abs(w @ left_p - left_p.conj().T @ w)) < 1e-10
    trace_val = np.conj(bim.unit) @ (w @ p)
    assert abs(trace_val - 0.25) < 1e-12


def test_derivation_metric_and_coefficients():
    space = derivation_space(M2)
    d = space.derivation(1)
    coef = space.coefficients(d)
    rebuilt = np.einsum("r,rpj->pj", coef, space.basis)
    assert np.max(np.abs(rebuilt - d.matrix)) < 1e-9


def test_zero_derivation_is_contained():
    space = derivation_space(M2)
    zero = Derivation(space.bim, np.zeros((space.bim.dim, M2.dim)))
    assert space.contains(zero)
    assert zero.leibniz_residual() == 0.0
