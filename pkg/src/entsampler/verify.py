"""Inequality verification harness.

Each suite generates seeded instances, evaluates both sides of an inequality
with brute-force oracles, and collects per-trial records into a
VerificationReport.  Slack is always bound minus value for upper bounds (or
value minus bound for lower bounds), so negative slack beyond the tolerance
is a failure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb, log2

import numpy as np

from . import entropy, matcore, qmaps, qstates, rates

LINALG_TOL = 1e-10
COMPOSITE_TOL = 1e-8
SDP_TOL = 1e-6


@dataclass
class TrialRecord:
    trial: int
    check: str
    params: dict
    value: float
    bound: float
    slack: float

    def to_dict(self) -> dict:
        return {"trial": self.trial, "check": self.check, "params": self.params,
                "value": self.value, "bound": self.bound, "slack": self.slack}


@dataclass
class VerificationReport:
    suite: str
    config: dict
    tolerance: float
    records: list = field(default_factory=list)

    def add(self, trial: int, check: str, params: dict, value: float, bound: float,
            slack: float | None = None):
        if slack is None:
            slack = bound - value
        self.records.append(TrialRecord(trial, check, dict(params),
                                        float(value), float(bound), float(slack)))

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.records if r.slack < -self.tolerance)

    @property
    def worst_slack(self) -> float:
        return min((r.slack for r in self.records), default=float("inf"))

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"suite": self.suite, "config": self.config,
                "tolerance": self.tolerance,
                "summary": {"trials": self.trials, "failures": self.failures,
                            "worst_slack": self.worst_slack},
                "records": sorted((r.to_dict() for r in self.records),
                                  key=lambda r: (r["trial"], r["check"]))}

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _trial_state(dims, rank, seed, trial):
    return qstates.random_state(dims, rank, [int(seed), int(trial)])


def _trial_cq_state(n_classical, dim_q, seed, trial, rank=None):
    return qstates.random_cq_state(n_classical, dim_q, [int(seed), int(trial)],
                                   rank=rank)


def _sandwich_env(mat, da, de, s4):
    t = mat.reshape(da, de, da, de)
    return np.einsum("ij,ajbl,lk->aibk", s4, t, s4, optimize=True).reshape(da * de, da * de)


def theorem1_overlaps(mat: np.ndarray, d: int, n: int, env_dim: int) -> np.ndarray:
    """tr[(W_s† ⊗ id) rho~ (W_s ⊗ id) rho~] for all s, rho~ the E-sandwiched
    state; these are the Phi-basis overlaps of the proof's auxiliary operator."""
    dn = d ** n
    rho_e = matcore.partial_trace(mat, (dn, env_dim), keep=[1])
    s4 = matcore.mat_pow_support(rho_e, -0.25)
    tilde = _sandwich_env(mat, dn, env_dim, s4)
    t = tilde.reshape(dn, env_dim, dn, env_dim)
    out = np.empty((d * d) ** n)
    for idx, s in enumerate(product(range(d * d), repeat=n)):
        w = qstates.weyl_string(d, s)
        rot = np.einsum("xa,aebf,by->xeyf", w.conj().T, t, w, optimize=True)
        out[idx] = float(np.real(np.einsum("aebf,bfae->", rot, t, optimize=True)))
    return out


_MAP_CACHE: dict = {}


def _get_map(kind: str, n: int, d: int, k: int | None):
    key = (kind, n, d, k)
    if key not in _MAP_CACHE:
        if kind == "sampling":
            kmap = qmaps.sampling_map(n, k, d)
        elif kind == "cq_sampling":
            kmap = qmaps.cq_sampling_map(n, k, d)
        elif kind == "bb84":
            kmap = qmaps.bb84_map(n)
        elif kind == "mub":
            kmap = qmaps.mub_map(n, d)
        else:
            raise ValueError(f"unknown map kind {kind!r}")
        _MAP_CACHE[key] = (kmap, qmaps.analytic_lambda(kmap))
    return _MAP_CACHE[key]


def verify_theorem1(map_kind: str, n: int, d: int = 2, trials: int = 200,
                    seed: int = 0, env_dim: int = 2, k: int = 1,
                    check_constraints: bool = True,
                    tolerance: float = COMPOSITE_TOL) -> VerificationReport:
    """Entropy-evolution bound: for every weight-threshold partition, the
    measured collision mass is at most the lambda-weighted bound."""
    if map_kind == "bb84" and d != 2:
        raise ValueError("bb84 requires d = 2")
    kmap, table = _get_map(map_kind, n, d, k if "sampling" in map_kind else None)
    dn = d ** n
    report = VerificationReport(
        suite="theorem1",
        config={"map": map_kind, "n": n, "d": d, "k": k, "trials": trials,
                "seed": seed, "env_dim": env_dim},
        tolerance=tolerance)
    small = dn * env_dim <= 64 and (d * d) ** n <= 256
    for trial in range(trials):
        rho = _trial_state((dn, env_dim), rank=dn, seed=seed, trial=trial)
        mat = rho.matrix
        h2_in = entropy.h2_cond(mat, dn, env_dim).value
        lhs = qmaps.measured_collision_mass(kmap, mat, env_dim)
        for l0 in range(-1, n + 1):
            bound = qmaps.theorem1_bound(table, h2_in, weight_threshold=l0)
            report.add(trial, "bound", {"l0": l0}, value=lhs, bound=bound)
        if check_constraints and small:
            ov = theorem1_overlaps(mat, d, n, env_dim)
            mass_in = 2.0 ** (-h2_in)
            report.add(trial, "total-constraint", {}, value=abs(ov.sum() - dn),
                       bound=tolerance * dn)
            report.add(trial, "individual-constraint", {},
                       value=max(float(-ov.min()), float(ov.max() - mass_in)),
                       bound=tolerance)
            recon = float(np.dot(table.values, ov))
            report.add(trial, "phi-identity", {}, value=abs(recon - lhs),
                       bound=1e-9 + 1e-7 * lhs)
    return report


def subset_mass(mat, n, d, env_dim, k, measured=False):
    """Exact E_{|S|=k} 2^{-H2(A_S|E)}, conditioning on the global rho_E.

    With measured=True the sampled registers are first measured in the
    standard basis (classical sampling)."""
    dims = (d,) * n + (env_dim,)
    rho_e = matcore.partial_trace(mat, (d ** n, env_dim), keep=[1])
    s4 = matcore.mat_pow_support(rho_e, -0.25)
    total = 0.0
    subsets = list(combinations(range(n), k))
    for subset in subsets:
        sub = matcore.partial_trace(mat, dims, keep=list(subset) + [n])
        dk = d ** k
        if measured:
            t = sub.reshape(dk, env_dim, dk, env_dim)
            for x in range(dk):
                total += matcore.frob_sq(s4 @ t[x, :, x, :] @ s4)
        else:
            total += matcore.frob_sq(_sandwich_env(sub, dk, env_dim, s4))
    return total / len(subsets)


def verify_sampling(n: int, k: int, d: int = 2, trials: int = 100, seed: int = 0,
                    classical: bool = False, env_dim: int = 2,
                    tolerance: float = COMPOSITE_TOL) -> VerificationReport:
    """Subset-sampling bound: brute-force subset average vs the rate-function
    bound, plus the map-based chain identity."""
    kind = "cq_sampling" if classical else "sampling"
    kmap, _ = _get_map(kind, n, d, k)
    dn = d ** n
    report = VerificationReport(
        suite="sampling",
        config={"n": n, "k": k, "d": d, "trials": trials, "seed": seed,
                "classical": classical, "env_dim": env_dim},
        tolerance=tolerance)
    for trial in range(trials):
        if classical:
            rho = _trial_cq_state(dn, env_dim, seed, trial)
        else:
            rho = _trial_state((dn, env_dim), rank=dn, seed=seed, trial=trial)
        mat = rho.matrix
        h2_rate = entropy.h2_cond(mat, dn, env_dim).value / n
        avg = subset_mass(mat, n, d, env_dim, k, measured=classical)
        if classical:
            bound = rates.sampling_bound_cq(n, k, d, max(h2_rate, 0.0)).value
        else:
            bound = rates.sampling_bound_qq(n, k, d, h2_rate).value
        report.add(trial, "sampling-bound", {}, value=avg, bound=bound)
        chain = comb(n, k) * qmaps.measured_collision_mass(kmap, mat, env_dim)
        report.add(trial, "chain-identity", {}, value=abs(chain - avg),
                   bound=1e-9 + 1e-9 * avg)
    return report


def measured_basis_masses(mat, n, d, env_dim, unitaries):
    """Per-basis-string collision masses m_theta = sum_x ||rho_E^{-1/4}
    <x|U rho U†|x> rho_E^{-1/4}||_F^2."""
    dn = d ** n
    rho_e = matcore.partial_trace(mat, (dn, env_dim), keep=[1])
    s4 = matcore.mat_pow_support(rho_e, -0.25)
    t = mat.reshape(dn, env_dim, dn, env_dim)
    nb = len(unitaries)
    masses = {}
    blocks = {}
    for thetas in product(range(nb), repeat=n):
        u = unitaries[thetas[0]]
        for th in thetas[1:]:
            u = np.kron(u, unitaries[th])
        rot = np.einsum("xa,aebf,yb->xeyf", u, t, u.conj(), optimize=True)
        m = 0.0
        blk = np.zeros((dn * env_dim, dn * env_dim), dtype=complex)
        for x in range(dn):
            m += matcore.frob_sq(s4 @ rot[x, :, x, :] @ s4)
            blk4 = blk.reshape(dn, env_dim, dn, env_dim)
            blk4[x, :, x, :] = rot[x, :, x, :]
        masses[thetas] = m
        blocks[thetas] = blk
    return masses, blocks


def verify_uncertainty(kind: str, n: int, d: int = 2, trials: int = 100,
                       seed: int = 0, env_dim: int = 2, check_hmin: bool = True,
                       hmin_trials: int | None = None,
                       tolerance: float = SDP_TOL) -> VerificationReport:
    """Measurement uncertainty relations for random basis choices, in both
    the collision-entropy and min-entropy forms."""
    if kind == "bb84":
        unitaries = [np.eye(2, dtype=complex), qmaps.HADAMARD]
        gamma = rates.gamma_bb84
        if d != 2:
            raise ValueError("bb84 requires d = 2")
    elif kind == "mub":
        unitaries = qstates.mub_bases(d).unitaries
        def gamma(h):
            return rates.gamma_mub(d, h)
    else:
        raise ValueError(f"unknown uncertainty kind {kind!r}")
    if hmin_trials is None:
        hmin_trials = min(trials, 20)
    dn = d ** n
    nb = len(unitaries)
    p_theta = float(nb) ** (-n)
    report = VerificationReport(
        suite="uncertainty",
        config={"kind": kind, "n": n, "d": d, "trials": trials, "seed": seed,
                "env_dim": env_dim},
        tolerance=tolerance)
    for trial in range(trials):
        rho = _trial_state((dn, env_dim), rank=dn, seed=seed, trial=trial)
        mat = rho.matrix
        h2_rate = entropy.h2_cond(mat, dn, env_dim).value / n
        masses, blocks = measured_basis_masses(mat, n, d, env_dim, unitaries)
        h2_meas = -log2(p_theta * sum(masses.values()))
        report.add(trial, "h2-form", {}, value=n * gamma(h2_rate) - 1.0,
                   bound=h2_meas)
        if check_hmin and trial < hmin_trials:
            hmin_in, _ = entropy.hmin_cond(mat, dn, env_dim, tol=1e-7)
            probs = [p_theta] * len(blocks)
            res, _ = entropy.hmin_cond_classical(probs, list(blocks.values()),
                                                 dn, env_dim, tol=1e-7)
            report.add(trial, "hmin-form", {},
                       value=0.5 * (n * gamma(hmin_in.value / n) - 1.0),
                       bound=res.value)
    return report


def _random_cptp(rng, dim_in: int, dim_out: int):
    """Random CPTP map via a Gaussian Stinespring isometry."""
    env = 2
    g = rng.standard_normal((dim_out * env, dim_in)) + \
        1j * rng.standard_normal((dim_out * env, dim_in))
    q, _ = np.linalg.qr(g)
    v = q[:, :dim_in]
    return [v.reshape(dim_out, env, dim_in)[:, e, :] for e in range(env)]


def verify_lemmas(seed: int = 0, trials: int = 50,
                  tolerance: float = COMPOSITE_TOL) -> VerificationReport:
    """Identity and lemma checks: operator identities, entropy sandwiches,
    the classical-register decomposition, recovery-fidelity equality,
    divergence monotonicity, and the combinatorial estimates."""
    report = VerificationReport(suite="lemmas",
                                config={"seed": seed, "trials": trials},
                                tolerance=tolerance)
    rng = np.random.default_rng(seed)
    phi = np.outer(qstates.max_entangled_vec(4), qstates.max_entangled_vec(4).conj())
    for trial in range(trials):
        x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        y = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        lhs = np.trace(x @ y)
        rhs = np.trace(np.kron(x, y.T) @ phi)
        report.add(trial, "swap-trick", {}, value=abs(lhs - rhs), bound=LINALG_TOL * 100)
        v = qstates.max_entangled_vec(4)
        diff = np.kron(x, np.eye(4)) @ v - np.kron(np.eye(4), x.T) @ v
        report.add(trial, "transpose-trick", {}, value=float(np.linalg.norm(diff)),
                   bound=1e-10)
    for trial in range(trials):
        rho = _trial_state((2, 2), rank=int(rng.integers(1, 5)), seed=seed,
                           trial=1000 + trial)
        h2 = entropy.h2_cond(rho).value
        hmin, _ = entropy.hmin_cond(rho.matrix, 2, 2)
        report.add(trial, "sandwich-lower", {}, value=hmin.value, bound=h2 + SDP_TOL,
                   slack=h2 - hmin.value + SDP_TOL)
        report.add(trial, "sandwich-upper", {}, value=h2,
                   bound=2 * hmin.value + 1.0 + SDP_TOL)
        f_pg, _ = entropy.pretty_good_fidelity(rho.matrix, 2, 2)
        report.add(trial, "recovery-equality", {},
                   value=abs(h2 + log2(2.0 * f_pg ** 2)), bound=COMPOSITE_TOL)
    for trial in range(trials):
        rho = _trial_cq_state(3, 4, seed, 2000 + trial)
        h2 = entropy.h2_cond(rho.matrix, 3, 4).value
        hmin, _ = entropy.hmin_cond(rho.matrix, 3, 4)
        report.add(trial, "cq-sandwich-lower", {}, value=hmin.value,
                   bound=h2 + SDP_TOL, slack=h2 - hmin.value + SDP_TOL)
        report.add(trial, "cq-sandwich-upper", {}, value=h2,
                   bound=2 * hmin.value + SDP_TOL)
    # classical-register decomposition: rho_{AQC} with C classical
    for trial in range(trials):
        probs = rng.dirichlet(np.ones(3))
        conds = [_trial_state((2, 2), rank=2, seed=seed, trial=3000 + 10 * trial + i)
                 for i in range(3)]
        # arrange as (A, Q, C): permute the cq block structure (C, A, Q)
        caq = qstates.cq_state(probs, conds)
        aqc = matcore.permute_subsystems(caq.matrix, (3, 2, 2), (1, 2, 0))
        direct = entropy.h2_cond(aqc, 2, 6).value
        masses = [entropy.h2_cond(c.matrix, 2, 2).collision_mass for c in conds]
        combined = entropy.condition_on_classical(probs, masses)
        report.add(trial, "condition-cl", {}, value=abs(direct - combined),
                   bound=1e-9)
        report.add(trial, "condition-cl-floor", {}, value=-log2(2.0),
                   bound=direct, slack=direct + 1.0)
    # divergence monotonicity under random CPTP maps
    for trial in range(trials):
        dim = 4
        gx = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        gy = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        x = gx @ gx.conj().T
        y = gy @ gy.conj().T
        x /= np.trace(x).real
        y /= np.trace(y).real
        d2_before = entropy.d2_div(x, y)
        for j in range(3):
            kraus = _random_cptp(rng, dim, int(rng.integers(2, 5)))
            nx = sum(k @ x @ k.conj().T for k in kraus)
            ny = sum(k @ y @ k.conj().T for k in kraus)
            d2_after = entropy.d2_div(nx, ny)
            report.add(trial, "d2-monotone", {"j": j}, value=d2_after,
                       bound=d2_before + COMPOSITE_TOL)
    # combinatorics
    for i, x in enumerate(np.linspace(1e-4, 1.0 / 3.0, 1000)):
        ok = rates.estimate_gamma_holds(float(x))
        report.add(i, "estimate-gamma", {"x": float(x)}, value=0.0 if ok else 1.0,
                   bound=0.5)
    for a in (1, 3, 8):
        for n in range(1, 17):
            for ell in range(0, int(a / (a + 1) * n) + 1):
                ok = rates.sum_binomial_lemma_holds(n, a, ell)
                report.add(n, "sum-binomial", {"a": a, "ell": ell},
                           value=0.0 if ok else 1.0, bound=0.5)
    for d in (2, 3):
        for n in range(d * d + 1, 17):
            lmax = int((d * d - 1) / (d * d) * n)
            for k in range(1, n + 1):
                for l0 in range(0, lmax + 1):
                    ok = rates.binomial_sum_lemma_holds(n, k, d, l0)
                    report.add(n, "binomial-sum", {"d": d, "k": k, "l0": l0},
                               value=0.0 if ok else 1.0, bound=0.5)
    return report


def avoidance_product(n: int, w: int, k: int) -> float:
    """Probability that a random k-subset avoids the union of two weight-w
    supports: (n-2w)/n * ... * (n-2w-k+1)/(n-k+1), clamped at zero."""
    p = 1.0
    for j in range(k):
        p *= max(n - 2 * w - j, 0) / (n - j)
    return p


def verify_upper_bounds(n: int, d: int = 2, w: int = 1, k: int = 1,
                        tolerance: float = COMPOSITE_TOL) -> VerificationReport:
    """Witness states for the converse rate bounds: closed-form entropies and
    the error-avoidance lower bound on the sampled collision mass."""
    report = VerificationReport(suite="upper",
                                config={"n": n, "d": d, "w": w, "k": k},
                                tolerance=tolerance)
    dn = d ** n
    rho = qstates.corrupted_epr(n, d, w)
    h2_exact = entropy.h2_cond(rho.matrix, dn, dn).value
    h2_closed = qstates.corrupted_epr_h2(n, d, w)
    report.add(0, "epr-closed-form", {}, value=abs(h2_exact - h2_closed), bound=1e-9)
    mat = rho.matrix
    dims = (d,) * n + (dn,)
    rho_b = matcore.partial_trace(mat, (dn, dn), keep=[1])
    s4 = matcore.mat_pow_support(rho_b, -0.25)
    avg = 0.0
    subsets = list(combinations(range(n), k))
    for subset in subsets:
        sub = matcore.partial_trace(mat, dims, keep=list(subset) + [n])
        avg += matcore.frob_sq(_sandwich_env(sub, d ** k, dn, s4))
    avg /= len(subsets)
    avoid = d ** k * avoidance_product(n, w, k)
    report.add(0, "epr-avoidance", {}, value=avoid, bound=avg,
               slack=avg - avoid)
    arg = d - 2 * d * (w / n) * (n / (n - k)) if n > k else 0.0
    if arg > 0:
        achieved = -log2(avg) / k
        report.add(0, "epr-rate-gap", {}, value=achieved, bound=-log2(arg),
                   slack=-log2(arg) - achieved + tolerance)
    cls = qstates.fixed_weight_classical(n, d, w)
    diag = np.diag(cls.matrix).real
    h2_cls = -log2(float(np.sum(diag ** 2)))
    report.add(0, "classical-closed-form", {},
               value=abs(h2_cls - log2(comb(n, w) * (d - 1) ** w)), bound=1e-9)
    avg_c = 0.0
    for subset in subsets:
        sub = matcore.partial_trace(cls.matrix, (d,) * n, keep=list(subset))
        avg_c += float(np.sum(np.diag(sub).real ** 2))
    avg_c /= len(subsets)
    avoid_c = avoidance_product(n, w, k)
    report.add(0, "classical-avoidance", {}, value=avoid_c, bound=avg_c,
               slack=avg_c - avoid_c)
    return report
