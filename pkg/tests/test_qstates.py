import numpy as np
import pytest

from entsampler import entropy, matcore, qstates
from entsampler.errors import IndexOutOfRange, NotPrime


@pytest.mark.parametrize("d", [2, 3, 5])
def test_weyl_unitary_and_trace_orthogonal(d):
    ops = [qstates.weyl(d, s) for s in range(d * d)]
    for s, w in enumerate(ops):
        assert np.allclose(w @ w.conj().T, np.eye(d), atol=1e-12)
        # diagonal-first numbering: the first d operators are diagonal
        if s < d:
            assert np.allclose(w, np.diag(np.diag(w)), atol=1e-12)
    for s in range(d * d):
        for t in range(d * d):
            tr = np.trace(ops[s].conj().T @ ops[t])
            assert abs(tr - (d if s == t else 0.0)) < 1e-10


def test_weyl_qubit_values():
    # s = a*2 + b -> X^a Z^b
    i, z, x = np.eye(2), np.diag([1.0, -1.0]), np.array([[0, 1], [1, 0]])
    assert np.allclose(qstates.weyl(2, 0), i)
    assert np.allclose(qstates.weyl(2, 1), z)
    assert np.allclose(qstates.weyl(2, 2), x)
    assert np.allclose(qstates.weyl(2, 3), x @ z)


def test_weyl_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        qstates.weyl(2, 4)


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (3, 1)])
def test_phi_basis_orthogonality(d, n):
    # unnormalized projectors: tr[Phi_s Phi_t] = d^{2n} delta_st
    strings = qstates.all_weyl_strings(d, n)
    vecs = [qstates.phi_s_vec(d, n, s) for s in strings]
    g = np.array([[abs(np.vdot(u, v)) ** 2 for v in vecs] for u in vecs])
    assert np.allclose(g, d ** (2 * n) * np.eye(len(vecs)), atol=1e-9)


def test_max_entangled_normalization():
    dens = qstates.max_entangled(3)
    assert dens.trace == pytest.approx(1.0)
    assert np.allclose(dens.ptrace([0]).matrix, np.eye(3) / 3, atol=1e-12)
    v = qstates.max_entangled_vec(2, n=2)
    assert np.vdot(v, v).real == pytest.approx(4.0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_mub_unbiasedness(d):
    fam = qstates.mub_bases(d)
    assert len(fam.unitaries) == d + 1
    bases = [fam.basis_vectors(t) for t in range(d + 1)]
    for t1 in range(d + 1):
        b1 = bases[t1]
        # each basis is orthonormal
        assert np.allclose(b1.conj().T @ b1, np.eye(d), atol=1e-10)
        for t2 in range(t1 + 1, d + 1):
            overlaps = np.abs(b1.conj().T @ bases[t2]) ** 2
            assert np.allclose(overlaps, 1.0 / d, atol=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_mub_projectors_form_two_design(d):
    # averaging P⊗P over all (d+1)d basis projectors gives the normalized
    # projector onto the symmetric subspace: (I + SWAP) / (d(d+1))
    fam = qstates.mub_bases(d)
    acc = np.zeros((d * d, d * d), dtype=complex)
    for t in range(d + 1):
        b = fam.basis_vectors(t)
        for x in range(d):
            p = np.outer(b[:, x], b[:, x].conj())
            acc += np.kron(p, p)
    swap = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            swap[i * d + j, j * d + i] = 1.0
    assert np.allclose(acc / ((d + 1) * d), (np.eye(d * d) + swap) / (d * (d + 1)),
                       atol=1e-10)


def test_mub_rejects_composite_dimension():
    with pytest.raises(NotPrime):
        qstates.mub_bases(4)


def test_pauli_weight():
    assert qstates.pauli_weight((0, 0, 0)) == 0
    assert qstates.pauli_weight((0, 3, 1)) == 2
    assert qstates.pauli_weight((2,)) == 1


def test_random_state_seeded_and_valid():
    a = qstates.random_state((2, 3), rank=2, seed=5)
    b = qstates.random_state((2, 3), rank=2, seed=5)
    assert np.array_equal(a.matrix, b.matrix)
    a.validate()
    w, _ = matcore.eig_hermitian(a.matrix)
    assert np.sum(w > 1e-12) == 2


def test_random_cq_state_block_diagonal():
    dens = qstates.random_cq_state(3, 2, seed=9)
    dens.validate()
    m = dens.matrix.reshape(3, 2, 3, 2)
    for i in range(3):
        for j in range(3):
            if i != j:
                assert np.allclose(m[i, :, j, :], 0.0)


def test_cq_state_probabilities():
    k0 = np.array([1, 0], dtype=complex)
    k1 = np.array([0, 1], dtype=complex)
    dens = qstates.cq_state([0.25, 0.75], [np.outer(k0, k0), np.outer(k1, k1)])
    diag = np.diag(dens.matrix).real
    assert diag == pytest.approx([0.25, 0.0, 0.0, 0.75])


@pytest.mark.parametrize("n,d,w", [(1, 2, 0), (2, 2, 1), (2, 3, 2), (3, 2, 1)])
def test_corrupted_epr_matches_closed_form(n, d, w):
    dens = qstates.corrupted_epr(n, d, w)
    dens.validate()
    dn = d ** n
    h2 = entropy.h2_cond(dens.matrix, dn, dn).value
    assert h2 == pytest.approx(qstates.corrupted_epr_h2(n, d, w), abs=1e-9)


def test_corrupted_epr_zero_weight_is_max_entangled():
    dens = qstates.corrupted_epr(2, 2, 0)
    ref = qstates.max_entangled(2, n=2)
    # the A^n B^n interleaving differs from the bipartite constructor only by
    # a subsystem permutation, so entropies agree
    h2 = entropy.h2_cond(dens.matrix, 4, 4).value
    assert h2 == pytest.approx(-2.0, abs=1e-10)


def test_fixed_weight_classical_support_size():
    dens = qstates.fixed_weight_classical(3, 2, 1)
    diag = np.diag(dens.matrix).real
    assert np.count_nonzero(diag > 1e-12) == 3  # C(3,1) * (2-1)^1
    assert diag.sum() == pytest.approx(1.0)
    off = dens.matrix - np.diag(np.diag(dens.matrix))
    assert np.allclose(off, 0.0)
