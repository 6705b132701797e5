import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from liegates.algebra import (
    Answer,
    centralizer_in,
    commutant_of_operators,
    decide_algebra_membership,
    decide_algebra_universality,
    decomposition_dims,
    derived_algebra,
    generate_subalgebra,
    is_simple,
    projector_PX,
    split_center_derived,
)
from liegates.matrix_core import RealSubspace
from liegates.su_structure import ad_matrix, build_su_structure

from conftest import PAULI_X, PAULI_Y, PAULI_Z, random_hamiltonian_set

S2 = build_su_structure(2)
S3 = build_su_structure(3)
SQ2 = np.sqrt(2)
IX, IY, IZ = (S2.to_coords(1j * p / SQ2) for p in (PAULI_X, PAULI_Y, PAULI_Z))


def block3(p):
    m = np.zeros((3, 3), dtype=complex)
    m[:2, :2] = 1j * p / SQ2
    return S3.to_coords(m)


BLOCK = np.array([block3(p) for p in (PAULI_X, PAULI_Y, PAULI_Z)])
U1 = S3.to_coords(1j * np.diag([1, 1, -2]) / np.sqrt(6))


def brute_commutant_dim(ops, n):
    """Operators A with AM = MA, one elementary matrix E_ij per column."""
    cols = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n))
            e[i, j] = 1
            cols.append(np.concatenate([(e @ m - m @ e).ravel() for m in ops]))
    return scipy.linalg.null_space(np.array(cols).T, rcond=1e-9).shape[1]


def test_generate_examples():
    assert generate_subalgebra([IZ], S2).dim == 1
    assert generate_subalgebra([IX, IY], S2).dim == 3
    assert generate_subalgebra(BLOCK[:2], S3).dim == 3


def test_generate_accepts_matrices():
    assert generate_subalgebra(np.array([1j * PAULI_X, 1j * PAULI_Y]), S2).dim == 3


def test_centralizer_examples():
    full = RealSubspace.full(3)
    c = centralizer_in(full, [IZ], S2)
    assert c.dim == 1 and c.contains(IZ)
    assert centralizer_in(full, [IX, IZ], S2).dim == 0
    assert centralizer_in(full, np.zeros((0, 3)), S2).dim == 3


def test_commutant_examples():
    assert commutant_of_operators([], 4).dim == 16
    ads = [ad_matrix(v, S2) for v in np.eye(3)]
    assert commutant_of_operators(ads).dim == 1
    assert commutant_of_operators([ad_matrix(IZ, S2)]).dim == 3


@pytest.mark.parametrize("seed", range(6))
def test_commutant_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    d = [2, 3, 3, 4, 4, 2][seed]
    xs, _ = random_hamiltonian_set(rng, d)
    s = build_su_structure(d)
    ops = [ad_matrix(x, s) for x in xs]
    assert commutant_of_operators(ops).dim == brute_commutant_dim(ops, s.n)


def test_projector_examples():
    assert np.allclose(projector_PX(np.zeros((0, 3)), S2), np.eye(3))
    assert np.allclose(projector_PX(np.eye(3), S2), 0, atol=1e-12)
    p = projector_PX([IZ], S2)
    assert np.allclose(p, np.outer(IZ, IZ), atol=1e-12)


def test_derived_examples():
    assert derived_algebra(generate_subalgebra([IZ], S2), S2).dim == 0
    assert derived_algebra(RealSubspace.full(3), S2).dim == 3
    g = generate_subalgebra(np.vstack([BLOCK, U1]), S3)
    assert g.dim == 4
    dg = derived_algebra(g, S3)
    assert dg.distance(RealSubspace.span(BLOCK, 8)) < 1e-9
    with pytest.raises(ValueError):
        derived_algebra(RealSubspace.span(np.array([IX, IY]), 3), S2)


def test_split_examples():
    c, dg = split_center_derived([IZ], S2)
    assert (c.dim, dg.dim) == (1, 0)
    c, dg = split_center_derived([IX, IY], S2)
    assert (c.dim, dg.dim) == (0, 3)
    c, dg = split_center_derived(np.vstack([BLOCK[:2], U1]), S3)
    assert (c.dim, dg.dim) == (1, 3)
    assert c.contains(U1)


def test_universality_examples():
    assert decide_algebra_universality([IX, IY], S2).answer is Answer.YES
    v = decide_algebra_universality([IZ], S2)
    assert v.answer is Answer.NO
    assert v.condition_commutant.lhs_dim == 3 and v.condition_commutant.rhs_dim == 1
    assert v.witnesses
    assert decide_algebra_universality(BLOCK, S3).answer is Answer.NO
    with pytest.raises(ValueError):
        decide_algebra_universality(np.zeros((0, 3)), S2)


def test_membership_examples():
    for variant in ("P_X1", "P_X2"):
        assert decide_algebra_membership([IX, IY], [IZ], S2, variant).answer is Answer.YES
        assert decide_algebra_membership([IZ], [IX], S2, variant).answer is Answer.NO
        assert decide_algebra_membership([IZ], np.zeros((0, 3)), S2, variant).answer is Answer.YES
    with pytest.raises(ValueError):
        decide_algebra_membership(np.zeros((0, 3)), [IX], S2)
    with pytest.raises(ValueError):
        decide_algebra_membership([IX], [IY], S2, "other")


def test_membership_needs_dimension_condition():
    # X1 = {a + z}, Y = {a} with a, z commuting: same commutant only fails through the center
    x1 = [BLOCK[2] + U1]
    y = [BLOCK[2]]
    v = decide_algebra_membership(x1, y, S3)
    assert v.answer is Answer.NO
    assert generate_subalgebra(np.vstack([x1, y]), S3).dim == 2


def test_is_simple_examples():
    for d in (2, 3, 4):
        assert is_simple(RealSubspace.full(d * d - 1), build_su_structure(d))
    assert not is_simple(generate_subalgebra([IZ], S2), S2)
    assert not is_simple(RealSubspace.zero(3), S2)
    assert not is_simple(generate_subalgebra(np.vstack([BLOCK, U1]), S3), S3)
    assert is_simple(generate_subalgebra(BLOCK, S3), S3)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), d=st.sampled_from([2, 3, 4]))
def test_generator_invariance(seed, d):
    rng = np.random.default_rng(seed)
    xs, _ = random_hamiltonian_set(rng, d)
    s = build_su_structure(d)
    g = generate_subalgebra(xs, s)
    full = RealSubspace.full(s.n)
    assert centralizer_in(full, xs, s).distance(centralizer_in(full, g.vectors(), s)) < 1e-8
    assert np.linalg.norm(projector_PX(xs, s) - projector_PX(g.vectors(), s)) < 1e-8
    p = projector_PX(xs, s)
    assert np.allclose(p @ p, p, atol=1e-9)
    c, dg = split_center_derived(xs, s)
    assert (c + dg).distance(g) < 1e-8
    assert c.dim + dg.dim == g.dim
    a, b = decomposition_dims(xs, s)
    assert a + b == s.n


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), d=st.sampled_from([2, 3, 4]))
def test_deciders_match_generation(seed, d):
    rng = np.random.default_rng(seed)
    s = build_su_structure(d)
    x1, _ = random_hamiltonian_set(rng, d)
    y, _ = random_hamiltonian_set(rng, d, size=1)
    if rng.random() < 0.5:
        # an element that really lies in <X1>
        g = generate_subalgebra(x1, s)
        y = (g.basis @ rng.normal(size=g.dim))[None]
    expect_univ = generate_subalgebra(x1, s).dim == s.n
    assert (decide_algebra_universality(x1, s).answer is Answer.YES) == expect_univ
    g1 = generate_subalgebra(x1, s)
    expect_member = all(g1.contains(v, 1e-7) for v in y)
    a1 = decide_algebra_membership(x1, y, s, "P_X1").answer
    a2 = decide_algebra_membership(x1, y, s, "P_X2").answer
    assert a1 == a2
    assert (a1 is Answer.YES) == expect_member
