import json

import numpy as np
import pytest

from entsampler import entropy, qmaps, qstates, verify


def test_report_bookkeeping():
    rep = verify.VerificationReport(suite="x", config={}, tolerance=1e-8)
    rep.add(0, "a", {}, value=1.0, bound=2.0)
    rep.add(1, "b", {}, value=2.0, bound=1.0)
    assert rep.trials == 2
    assert rep.failures == 1
    assert rep.worst_slack == pytest.approx(-1.0)
    assert not rep.passed
    d = rep.to_dict()
    assert d["summary"]["failures"] == 1
    json.loads(rep.to_json())  # serializable


def test_report_json_round_trip(tmp_path):
    rep = verify.VerificationReport(suite="x", config={"n": 1}, tolerance=1e-8)
    rep.add(0, "a", {"p": 2}, value=0.5, bound=1.0)
    path = tmp_path / "r.json"
    rep.to_json(path)
    loaded = json.loads(path.read_text())
    assert loaded["records"][0]["check"] == "a"
    assert loaded["summary"]["trials"] == 1


def test_theorem1_overlaps_identity():
    # sum_s overlaps = d^n and the lambda-weighted sum reconstructs the
    # measured collision mass
    rho = qstates.random_state((4, 2), 4, 3)
    ov = verify.theorem1_overlaps(rho.matrix, 2, 2, 2)
    assert ov.sum() == pytest.approx(4.0, abs=1e-8)
    assert np.all(ov > -1e-10)
    kmap = qmaps.bb84_map(2)
    table = qmaps.analytic_lambda(kmap)
    mass = qmaps.measured_collision_mass(kmap, rho.matrix, 2)
    assert float(np.dot(table.values, ov)) == pytest.approx(mass, rel=1e-8)


def test_theorem1_overlaps_bounded_by_input_mass():
    rho = qstates.random_state((2, 2), 2, 7)
    h2 = entropy.h2_cond(rho.matrix, 2, 2).value
    ov = verify.theorem1_overlaps(rho.matrix, 2, 1, 2)
    assert np.max(ov) <= 2.0 ** (-h2) + 1e-9


@pytest.mark.parametrize("kind", ["sampling", "cq_sampling", "bb84", "mub"])
def test_verify_theorem1_small(kind):
    rep = verify.verify_theorem1(map_kind=kind, n=2, trials=5, seed=1)
    assert rep.passed, rep.to_dict()["summary"]


def test_verify_theorem1_max_entangled_slack():
    # on the maximally entangled input the bb84 n=1 bound has slack 1/2:
    # measured mass 1/4 vs lambda-weighted bound using H2 = -1
    phi = qstates.max_entangled(2)
    kmap = qmaps.bb84_map(1)
    table = qmaps.analytic_lambda(kmap)
    mass = qmaps.measured_collision_mass(kmap, phi.matrix, 2)
    bound = qmaps.theorem1_bound(table, -1.0, weight_threshold=1)
    assert bound - mass == pytest.approx(0.5, abs=1e-9)


def test_verify_theorem1_deterministic():
    r1 = verify.verify_theorem1(map_kind="bb84", n=1, trials=4, seed=9)
    r2 = verify.verify_theorem1(map_kind="bb84", n=1, trials=4, seed=9)
    assert r1.worst_slack == r2.worst_slack


def test_subset_mass_single_subset():
    # n = k: the only subset is everything, so the average is the full mass
    rho = qstates.random_state((4, 2), 4, 5)
    full = entropy.h2_cond(rho.matrix, 4, 2).collision_mass
    avg = verify.subset_mass(rho.matrix, 2, 2, 2, 2)
    assert avg == pytest.approx(full, rel=1e-10)


@pytest.mark.parametrize("classical", [False, True])
def test_verify_sampling_small(classical):
    rep = verify.verify_sampling(n=3, k=2, trials=5, seed=2, classical=classical)
    assert rep.passed, rep.to_dict()["summary"]


@pytest.mark.parametrize("kind,n,d", [("bb84", 1, 2), ("bb84", 2, 2), ("mub", 1, 3)])
def test_verify_uncertainty_small(kind, n, d):
    rep = verify.verify_uncertainty(kind=kind, n=n, d=d, trials=4, seed=3,
                                    hmin_trials=2)
    assert rep.passed, rep.to_dict()["summary"]


def test_verify_lemmas_small():
    rep = verify.verify_lemmas(seed=1, trials=5)
    assert rep.passed, rep.to_dict()["summary"]


def test_avoidance_product_values():
    assert verify.avoidance_product(4, 1, 1) == pytest.approx(0.5)
    assert verify.avoidance_product(4, 2, 1) == pytest.approx(0.0)
    assert verify.avoidance_product(5, 1, 2) == pytest.approx((3 / 5) * (2 / 4))


@pytest.mark.parametrize("n,d,w,k", [(2, 2, 1, 1), (3, 2, 1, 2), (4, 2, 2, 1),
                                     (2, 3, 1, 1)])
def test_verify_upper_bounds(n, d, w, k):
    rep = verify.verify_upper_bounds(n=n, d=d, w=w, k=k)
    assert rep.passed, rep.to_dict()["summary"]
