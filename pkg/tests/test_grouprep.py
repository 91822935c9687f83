import math

import numpy as np
import pytest

from gptpurity import grouprep, statespace as ss
from gptpurity.errors import ReducibleSpaceError, UnsupportedSpaceError


def test_haar_conjugation_is_gram_orthogonal(rng):
    space = ss.build_quantum(3)
    gram = grouprep.analytic_gram(space)
    for _ in range(20):
        t = grouprep.sample_haar_unitary(space, rng)
        np.testing.assert_allclose(t.T @ gram.matrix @ t, gram.matrix, atol=1e-9)


def test_haar_mean_of_pure_state_is_max_mixed(rng):
    space = ss.build_quantum(2)
    sampler = grouprep.sampler_for(space)
    phi = space.sample_pure(rng)
    n = 10_000
    out = np.zeros((n, space.K))
    for i in range(n):
        out[i] = sampler.draw(rng) @ phi
    mean = out.mean(axis=0)
    sigma = out.std(axis=0, ddof=1) / math.sqrt(n)
    np.testing.assert_array_less(np.abs(mean - space.max_mixed), 3 * sigma + 1e-12)


def test_haar_first_moment_vanishes(rng):
    n, draws = 3, 8000
    acc = np.zeros((n, n), dtype=complex)
    for _ in range(draws):
        acc += grouprep.haar_unitary(n, rng)
    mean = acc / draws
    # each entry has second moment 1/n per draw
    bound = 4 * math.sqrt(1 / (2 * n * draws))
    assert np.max(np.abs(mean.real)) < bound
    assert np.max(np.abs(mean.imag)) < bound


def test_haar_unitary_is_unitary(rng):
    u = grouprep.haar_unitary(5, rng)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(5), atol=1e-12)


def test_permutation_matrices_are_01_doubly_stochastic(rng):
    space = ss.build_classical(6)
    for _ in range(25):
        t = grouprep.sample_permutation(space, rng)
        assert set(np.unique(t)) <= {0.0, 1.0}
        np.testing.assert_allclose(t.sum(axis=0), 1.0)
        np.testing.assert_allclose(t.sum(axis=1), 1.0)


def test_dihedral_four_enumerates_eight_elements():
    sampler = grouprep.sampler_for(ss.build_polygon(4))
    assert sampler.is_finite
    assert len(sampler.elements) == 8
    keys = {np.round(t, 10).tobytes() for t in sampler.elements}
    assert len(keys) == 8


def test_orthogonal_conjugation_preserves_real_cone(rng):
    space = ss.build_real_quantum(2)
    mm = space.max_mixed
    for _ in range(100):
        t = grouprep.sample_orthogonal(space, rng)
        omega = 0.7 * space.sample_pure(rng) + 0.3 * mm
        assert space.cone_contains(t @ omega)


# -- clifford ---------------------------------------------------------------------------


def test_clifford_1q_has_24_elements_including_identity():
    els = grouprep.clifford_unitaries(1)
    assert len(els) == 24
    keys = {grouprep._key(u) for u in els}
    ident = grouprep._phase_canonical(np.eye(2, dtype=complex))
    assert grouprep._key(ident) in keys


def test_clifford_1q_permutes_pauli_directions():
    from gptpurity.purity import pauli_string

    paulis = [pauli_string(p) for p in "XYZ"]
    signed = [s * p for p in paulis for s in (1, -1)]
    for u in grouprep.clifford_unitaries(1):
        for p in paulis:
            img = u @ p @ u.conj().T
            assert any(np.allclose(img, q, atol=1e-9) for q in signed)


def test_clifford_1q_closed_under_composition_and_inverse():
    els = grouprep.clifford_unitaries(1)
    keys = {grouprep._key(u) for u in els}
    for u in els:
        assert grouprep._key(grouprep._phase_canonical(u.conj().T)) in keys
    rng = np.random.default_rng(1)
    for _ in range(200):
        a, b = rng.integers(24, size=2)
        prod = grouprep._phase_canonical(els[a] @ els[b])
        assert grouprep._key(prod) in keys


def test_enumerate_clifford_1q_conjugations_fix_max_mixed():
    space = ss.build_quantum(2)
    conj = grouprep.enumerate_clifford_1q()
    assert conj.shape == (24, 4, 4)
    for t in conj:
        np.testing.assert_allclose(t @ space.max_mixed, space.max_mixed, atol=1e-12)


# -- invariant gram -----------------------------------------------------------------------


@pytest.mark.parametrize(
    "space",
    [ss.build_quantum(2), ss.build_quantum(3), ss.build_classical(4), ss.build_polygon(4),
     ss.build_polygon(5), ss.build_real_quantum(2)],
    ids=lambda s: f"{s.kind}-{s.level}",
)
def test_invariant_gram_matches_analytic(space):
    sampler = grouprep.sampler_for(space)
    rng = np.random.default_rng(11)
    gram = grouprep.invariant_gram(space, sampler, n_avg=3000, rng=rng, check_trials=3000)
    np.testing.assert_allclose(gram.matrix, grouprep.analytic_gram(space).matrix, atol=1e-10)


def test_quantum_gram_matches_scaled_trace_product(rng):
    for n in (2, 3):
        space = ss.build_quantum(n)
        gram = grouprep.analytic_gram(space)
        for _ in range(20):
            a = space.bloch(space.sample_pure(rng))
            b = space.bloch(space.sample_pure(rng))
            expected = n / (n - 1) * np.trace(space.to_matrix(a) @ space.to_matrix(b)).real
            assert abs(gram.inner(a, b) - expected) < 1e-12


def test_classical_gram_matches_scaled_componentwise(rng):
    n = 5
    space = ss.build_classical(n)
    gram = grouprep.analytic_gram(space)
    for _ in range(20):
        a = space.bloch(space.sample_pure(rng))
        b = space.bloch(space.sample_pure(rng))
        assert abs(gram.inner(a, b) - n / (n - 1) * np.dot(a, b)) < 1e-12


def test_square_gram_is_euclidean_on_bloch_plane():
    gram = grouprep.analytic_gram(ss.build_polygon(4))
    np.testing.assert_allclose(gram.matrix, np.diag([0.0, 1.0, 1.0]), atol=1e-15)


def test_gram_pure_norm_and_invariance(rng):
    for space in (ss.build_quantum(2), ss.build_classical(3), ss.build_polygon(5)):
        gram = grouprep.analytic_gram(space)
        sampler = grouprep.sampler_for(space)
        p = space.bloch_projector()
        for _ in range(100):
            phi = space.bloch(space.sample_pure(rng))
            assert abs(gram.norm_sq(phi) - 1.0) < 1e-12
            t = sampler.draw(rng)
            x, y = p @ rng.normal(size=space.K), p @ rng.normal(size=space.K)
            assert abs(gram.inner(t @ x, t @ y) - gram.inner(x, y)) < 1e-8


def test_gram_seed_cross_check(rng):
    space = ss.build_quantum(2)
    sampler = grouprep.sampler_for(space)
    g1 = grouprep.invariant_gram(space, sampler, n_avg=2000,
                                 rng=np.random.default_rng(1), check_trials=2000)
    g2 = grouprep.invariant_gram(space, sampler, n_avg=2000,
                                 rng=np.random.default_rng(2), check_trials=2000)
    np.testing.assert_allclose(g1.matrix, g2.matrix, atol=1e-9)


def _reducible_cylinder_space_and_sampler():
    # Bloch space R^4 = two planes rotated independently: transitive-looking
    # but reducible, like a cylinder with its symmetry axis.
    order_unit = np.zeros(5)
    order_unit[0] = 1.0
    verts = []
    for k in range(8):
        a = 2 * math.pi * k / 8
        verts.append([1.0, math.cos(a), math.sin(a), math.cos(3 * a), math.sin(3 * a)])
    space = ss.SpaceDescriptor(
        kind=ss.KIND_POLYGON, K=5, N=2,
        order_unit=order_unit, max_mixed=order_unit.copy(),
        basis_labels=("u", "x1", "y1", "x2", "y2"), level=8,
        vertices=np.array(verts),
    )

    def draw(rng):
        t = np.eye(5)
        a, b = rng.uniform(0, 2 * math.pi, size=2)
        t[1:3, 1:3] = [[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]]
        t[3:, 3:] = [[math.cos(b), -math.sin(b)], [math.sin(b), math.cos(b)]]
        return t

    sampler = grouprep.GroupSampler(space=space, name="two-rotations", is_finite=False, _draw=draw)
    return space, sampler


def test_check_irreducible_flags_reducible_rep(rng):
    space, sampler = _reducible_cylinder_space_and_sampler()
    dev = grouprep.check_irreducible(space, sampler, trials=3000, rng=rng)
    assert dev > 0.3
    with pytest.raises(ReducibleSpaceError):
        grouprep.invariant_gram(space, sampler, n_avg=100, rng=rng, check_trials=3000)


def test_check_irreducible_pentagon_exact():
    space = ss.build_polygon(5)
    sampler = grouprep.sampler_for(space)
    assert grouprep.check_irreducible(space, sampler) < 1e-10


def test_check_irreducible_qubit_statistical():
    space = ss.build_quantum(2)
    sampler = grouprep.sampler_for(space)
    dev = grouprep.check_irreducible(
        space, sampler, trials=100_000, rng=np.random.default_rng(3), n_probes=1
    )
    assert dev < 1e-2


# -- two-design ----------------------------------------------------------------------------


def test_two_design_identity_k1():
    assert grouprep.two_design_check(1) < 1e-12


def test_two_design_superoperator_on_identity_and_swap():
    lhs, rhs = grouprep.two_design_superoperators(1)
    d = 2
    ident = np.eye(d * d)
    np.testing.assert_allclose((lhs @ ident.ravel()).reshape(4, 4), ident, atol=1e-12)
    np.testing.assert_allclose((rhs @ ident.ravel()).reshape(4, 4), ident, atol=1e-12)
    swap = grouprep.swap_operator(d)
    # Direct evaluation of the projector side: Tr(pi_s S) = Tr(pi_s) and
    # Tr(pi_a S) = -Tr(pi_a), so the right side returns pi_s - pi_a = S.
    np.testing.assert_allclose((rhs @ swap.ravel()).reshape(4, 4), swap, atol=1e-12)
    np.testing.assert_allclose((lhs @ swap.ravel()).reshape(4, 4), swap, atol=1e-12)


@pytest.mark.slow
def test_two_design_identity_k2():
    assert grouprep.two_design_check(2) < 1e-11


def test_unsupported_clifford_order():
    with pytest.raises(UnsupportedSpaceError):
        grouprep.clifford_unitaries(3)


def test_sample_dihedral_draws_group_elements(rng):
    space = ss.build_polygon(5)
    elements = grouprep.sampler_for(space).elements
    for _ in range(20):
        t = grouprep.sample_dihedral(space, rng)
        assert any(np.allclose(t, e, atol=1e-12) for e in elements)


def test_large_classical_group_is_finite_but_not_enumerated(rng):
    sampler = grouprep.sampler_for(ss.build_classical(8))
    assert sampler.is_finite
    assert sampler.elements is None
    t = sampler.draw(rng)
    np.testing.assert_allclose(t.sum(axis=0), 1.0)
