import numpy as np
import pytest

from entsampler import entropy, matcore, qmaps, qstates
from entsampler.errors import NotDiagonalInPhiBasis


def total_out_dim(kmap):
    return int(np.prod(kmap.out_dims))


def test_bb84_lambda_anchor():
    table = qmaps.lambda_coefficients(qmaps.bb84_map(1), 2, 1)
    # diagonal-first labels (I, Z, X, XZ)
    assert np.allclose(table.values, [0.25, 0.125, 0.125, 0.0], atol=1e-12)
    # Bell display labels
    bell = table.values[list(qstates.BELL_TO_CONV)]
    assert np.allclose(bell, [0.25, 0.125, 0.0, 0.125], atol=1e-12)
    assert table.residual <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 5])
def test_mub_lambda_anchor(d):
    table = qmaps.lambda_coefficients(qmaps.mub_map(1, d), d, 1)
    expect = np.array([1.0 / ((d + 1) * d)] +
                      [1.0 / ((d + 1) * d * (d + 1))] * (d * d - 1))
    assert np.allclose(table.values, expect, atol=1e-10)
    assert table.residual <= 1e-9


def test_sampling_lambda_values():
    # n=1, k=1, d=2: lambda = 1/2 on weight-0 and each weight-1 string? no:
    # C(1-w,1)/(2^0 C(1,1)^2) = 1 for w=0, 0 for w=1
    t = qmaps.lambda_coefficients(qmaps.sampling_map(1, 1, 2), 2, 1)
    assert np.allclose(t.values, [1.0, 0.0, 0.0, 0.0], atol=1e-12)
    # n=2, k=1, d=2: per-string 1/4 (w=0), 1/8 (w=1), 0 (w=2)
    t = qmaps.lambda_coefficients(qmaps.sampling_map(2, 1, 2), 2, 2)
    expect = qmaps.analytic_lambda(qmaps.sampling_map(2, 1, 2))
    assert np.allclose(t.values, expect.values, atol=1e-10)
    assert t.values[0] == pytest.approx(0.25, abs=1e-12)
    assert np.allclose(t.sum_by_weight, [0.25, 0.75, 0.0], atol=1e-10)


def test_cq_sampling_lambda_values():
    # n=1, k=1, d=2: 1/2 on the two diagonal strings, 0 on the shifts
    t = qmaps.lambda_coefficients(qmaps.cq_sampling_map(1, 1, 2), 2, 1)
    assert np.allclose(t.values, [0.5, 0.5, 0.0, 0.0], atol=1e-12)
    # n=2, k=1, d=2: per shift-weight 1/8, 1/16, 0
    full = qmaps.lambda_coefficients(qmaps.cq_sampling_map(2, 1, 2), 2, 2)
    ana = qmaps.analytic_lambda(qmaps.cq_sampling_map(2, 1, 2))
    assert np.allclose(full.values, ana.values, atol=1e-10)
    assert full.values[0] == pytest.approx(0.125, abs=1e-12)


@pytest.mark.parametrize("kind,builder", [
    ("sampling", lambda: qmaps.sampling_map(2, 1, 2)),
    ("cq_sampling", lambda: qmaps.cq_sampling_map(2, 1, 2)),
    ("bb84", lambda: qmaps.bb84_map(2)),
    ("mub", lambda: qmaps.mub_map(1, 3)),
])
def test_analytic_matches_decomposition(kind, builder):
    kmap = builder()
    d = kmap.params["d"]
    n = kmap.params["n"]
    full = qmaps.lambda_coefficients(kmap, d, n)
    ana = qmaps.analytic_lambda(kmap)
    assert np.allclose(full.values, ana.values, atol=1e-9)
    assert full.total == pytest.approx(ana.total, abs=1e-9)


def test_lambda_totals_frozen():
    assert qmaps.analytic_lambda(qmaps.bb84_map(1)).total == pytest.approx(0.5, abs=1e-12)
    assert qmaps.analytic_lambda(qmaps.sampling_map(2, 1, 2)).total == pytest.approx(1.0, abs=1e-12)
    assert qmaps.analytic_lambda(qmaps.mub_map(1, 3)).total == pytest.approx(0.25, abs=1e-12)


def test_trace_scale_uniform_maps():
    assert qmaps.bb84_map(1).trace_scale() == pytest.approx(1.0, abs=1e-10)
    assert qmaps.sampling_map(2, 1, 2).trace_scale() == pytest.approx(1.0, abs=1e-10)


def test_lambda_rejects_non_covariant_map():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    q, _ = np.linalg.qr(g)
    kraus = [q[:2, :], q[2:, :]]
    kmap = qmaps.KrausMap(kraus_ops=kraus, in_dims=(2,), out_dims=(2,),
                          kind="custom", params={"d": 2, "n": 1})
    with pytest.raises(NotDiagonalInPhiBasis):
        qmaps.lambda_coefficients(kmap, 2, 1)


def test_apply_preserves_trace_scale():
    for kmap in (qmaps.bb84_map(1), qmaps.sampling_map(2, 1, 2)):
        din = int(np.prod(kmap.in_dims))
        rho = qstates.random_state((din, 2), rank=din, seed=3)
        out = qmaps.apply(kmap, rho.matrix, env_dim=2)
        assert np.trace(out).real == pytest.approx(kmap.trace_scale(), abs=1e-10)


def test_apply_acts_as_kraus_sum():
    kmap = qmaps.bb84_map(1)
    rho = qstates.random_state((2, 2), rank=2, seed=8)
    out = qmaps.apply(kmap, rho.matrix, env_dim=2)
    expect = np.zeros_like(out)
    for k in kmap.kraus_ops:
        kk = np.kron(k, np.eye(2))
        expect += kk @ rho.matrix @ kk.conj().T
    assert np.allclose(out, expect, atol=1e-12)


def test_adjoint_inner_product():
    kmap = qmaps.bb84_map(1)
    adj = qmaps.adjoint(kmap)
    rng = np.random.default_rng(5)
    dout = total_out_dim(kmap)
    a = rng.standard_normal((dout, dout)) + 1j * rng.standard_normal((dout, dout))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    lhs = np.trace(a.conj().T @ qmaps.apply(kmap, b))
    rhs = np.trace(qmaps.apply(adj, a).conj().T @ b)
    assert abs(lhs - rhs) < 1e-10


def test_compose_matches_sequential_apply():
    f = qmaps.bb84_map(1)
    g = qmaps.adjoint(f)
    gf = qmaps.compose(g, f)
    rho = qstates.random_state((2,), rank=2, seed=6).matrix
    seq = qmaps.apply(g, qmaps.apply(f, rho))
    assert np.allclose(qmaps.apply(gf, rho), seq, atol=1e-10)


def test_theorem1_bound_partitions():
    table = qmaps.analytic_lambda(qmaps.bb84_map(2))
    # threshold below 0 keeps everything in the tail; threshold n keeps all
    h2 = 0.3
    full = qmaps.theorem1_bound(table, h2, weight_threshold=2)
    tail = qmaps.theorem1_bound(table, h2, weight_threshold=-1)
    assert full <= tail + 1e-12
    # explicit-set partition agrees with the threshold version
    pos = [s for s in qstates.all_weyl_strings(2, 2) if qstates.pauli_weight(s) <= 1]
    via_set = qmaps.theorem1_bound(table, h2, positive_set=pos)
    via_thr = qmaps.theorem1_bound(table, h2, weight_threshold=1)
    assert via_set == pytest.approx(via_thr, abs=1e-14)


@pytest.mark.parametrize("builder,env", [
    (lambda: qmaps.bb84_map(2), 2),
    (lambda: qmaps.mub_map(1, 3), 3),
    (lambda: qmaps.sampling_map(3, 2, 2), 4),
])
def test_measured_mass_matches_dense_apply(builder, env):
    kmap = builder()
    din = int(np.prod(kmap.in_dims))
    rho = qstates.random_state((din, env), rank=din, seed=12)
    mass = qmaps.measured_collision_mass(kmap, rho.matrix, env_dim=env)
    out = qmaps.apply(kmap, rho.matrix, env_dim=env)
    sig = matcore.partial_trace(rho.matrix, (din, env), keep=[1])
    ref = entropy.collision_mass_sigma(out, sig, total_out_dim(kmap), env,
                                       check_support=False)
    assert mass == pytest.approx(ref, rel=1e-9)


def test_measured_mass_cq_sampling_matches_dense():
    kmap = qmaps.cq_sampling_map(2, 1, 2)
    rho = qstates.random_cq_state(4, 2, seed=17)
    mass = qmaps.measured_collision_mass(kmap, rho.matrix, env_dim=2)
    out = qmaps.apply(kmap, rho.matrix, env_dim=2)
    sig = matcore.partial_trace(rho.matrix, (4, 2), keep=[1])
    ref = entropy.collision_mass_sigma(out, sig, total_out_dim(kmap), 2,
                                       check_support=False)
    assert mass == pytest.approx(ref, rel=1e-9)


def test_large_mub_map_has_no_dense_kraus():
    kmap = qmaps.mub_map(3, 3)
    assert kmap.kraus_ops is None
    table = qmaps.analytic_lambda(kmap)
    assert table.total > 0
