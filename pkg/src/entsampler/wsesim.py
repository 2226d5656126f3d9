"""Weak string erasure simulation.

Honest protocol runs (BB84 prepare-and-measure, noiseless), a small menu of
bounded-storage attacks evaluated exactly on the purified protocol state,
and the check of the resulting min-entropy against the bounded-storage
security bound.  The attack menu is a fixed set of strategies, not an
optimizer: it validates consistency with the bound, not tightness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from math import log2

import numpy as np

from . import entropy, rates
from .errors import DimTooLarge, OutOfDomain
from .qmaps import HADAMARD

STRATEGIES = ("store-first-q", "measure-rest-fixed", "measure-rest-random")


@dataclass
class WseTranscript:
    n: int
    x: list
    theta: list
    theta_prime: list
    bob_bits: list
    index_set: list = field(init=False)
    x_i: list = field(init=False)

    def __post_init__(self):
        self.index_set = [i for i in range(self.n)
                          if self.theta[i] == self.theta_prime[i]]
        self.x_i = [self.x[i] for i in self.index_set]

    def to_dict(self) -> dict:
        return {"n": self.n, "x": self.x, "theta": self.theta,
                "theta_prime": self.theta_prime, "bob_bits": self.bob_bits,
                "index_set": self.index_set, "x_I": self.x_i}


def transcripts_to_jsonl(transcripts, path):
    with open(path, "w") as fh:
        for t in transcripts:
            fh.write(json.dumps(t.to_dict()) + "\n")


def run_honest(n: int, seed, purified: bool = False) -> WseTranscript:
    """One noiseless protocol run.

    purified=True samples Bob's outcomes from the Born probabilities of the
    post-measurement qubit states instead of the shortcut distribution; both
    produce the same transcript statistics.
    """
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 2, size=n).tolist()
    theta = rng.integers(0, 2, size=n).tolist()
    theta_p = rng.integers(0, 2, size=n).tolist()
    bob = []
    for i in range(n):
        if purified:
            ket = np.zeros(2, dtype=complex)
            ket[x[i]] = 1.0
            if theta[i] == 1:
                ket = HADAMARD @ ket
            if theta_p[i] == 1:
                ket = HADAMARD @ ket
            p1 = float(np.abs(ket[1]) ** 2)
            bob.append(int(rng.random() < p1))
        else:
            if theta[i] == theta_p[i]:
                bob.append(x[i])
            else:
                bob.append(int(rng.integers(0, 2)))
    return WseTranscript(n=n, x=x, theta=theta, theta_prime=theta_p, bob_bits=bob)


@dataclass
class AttackSpec:
    q: int
    strategy: str = "store-first-q"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise OutOfDomain(f"unknown strategy {self.strategy!r}")


def _basis_ket(x: int, theta: int) -> np.ndarray:
    ket = np.zeros(2, dtype=complex)
    ket[x] = 1.0
    return HADAMARD @ ket if theta else ket


def attack_value(n: int, attack: AttackSpec, tol: float = 1e-7):
    """Exact (pguess, hmin) of X^n given the adversary's stored qubits, the
    classical measurement record, and the revealed bases."""
    q = attack.q
    if not 0 <= q <= n:
        raise OutOfDomain(f"q = {q} outside [0, {n}]")
    if n > 4:
        raise DimTooLarge(f"n = {n} too large for exact attack evaluation")
    nm = n - q  # measured/discarded qubits
    dim_x, dim_b = 2 ** n, 2 ** q

    if attack.strategy == "store-first-q":
        basis_menu = [None]
    elif attack.strategy == "measure-rest-fixed":
        basis_menu = [tuple([0] * nm)]
    else:
        basis_menu = list(product(range(2), repeat=nm))

    mass = 0.0
    p_theta = 2.0 ** (-n)
    for thetas in product(range(2), repeat=n):
        for bases in basis_menu:
            p_bases = 1.0 / len(basis_menu)
            # classical record m for the measured qubits (absent when the
            # rest is discarded)
            m_range = [None] if bases is None else list(product(range(2), repeat=nm))
            for m in m_range:
                # conditional cq block on (X^n ; stored B), weight p(m|theta)
                blk = np.zeros((dim_x * dim_b, dim_x * dim_b), dtype=complex)
                p_m = 0.0
                for xi, xs in enumerate(product(range(2), repeat=n)):
                    px = 2.0 ** (-n)
                    stored = np.array([1.0], dtype=complex)
                    for i in range(q):
                        stored = np.kron(stored, _basis_ket(xs[i], thetas[i]))
                    w = px
                    if bases is not None:
                        for j in range(nm):
                            ket = _basis_ket(xs[q + j], thetas[q + j])
                            amp = _basis_ket(m[j], bases[j]).conj() @ ket
                            w *= float(np.abs(amp) ** 2)
                    if w == 0.0:
                        continue
                    p_m += w
                    bop = np.outer(stored, stored.conj())
                    blk[xi * dim_b:(xi + 1) * dim_b,
                        xi * dim_b:(xi + 1) * dim_b] = w * bop
                if p_m == 0.0:
                    continue
                res, _ = entropy.hmin_cond(blk / p_m, dim_x, dim_b, tol=tol,
                                           max_dim=4 ** n)
                mass += p_theta * p_bases * p_m * 2.0 ** (-res.value)
    hmin = -log2(mass)
    return float(mass), float(hmin)


def check_bqsm_bound(n: int, q: int, strategies=STRATEGIES, tol: float = 1e-6):
    """Every implemented attack must respect
    Hmin(X^n | B M Theta^n) >= 1/2 (n gamma(-q/n) - 1)."""
    from .verify import VerificationReport
    report = VerificationReport(suite="wse",
                                config={"n": n, "q": q,
                                        "strategies": list(strategies)},
                                tolerance=tol)
    bound = 0.5 * (n * rates.gamma_bb84(-q / n) - 1.0)
    for i, strategy in enumerate(strategies):
        _, hmin = attack_value(n, AttackSpec(q=q, strategy=strategy))
        report.add(i, strategy, {"q": q}, value=bound, bound=hmin,
                   slack=hmin - bound)
    return report
