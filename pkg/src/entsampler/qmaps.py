"""Completely positive maps in Kraus form and their Phi-basis spectra.

Provides the generic Kraus machinery (apply / adjoint / compose), extraction
of the lambda coefficients of ((M† ∘ M) ⊗ id)(Phi) in the maximally
entangled operator basis, constructors for the four concrete measurement /
sampling maps, the entropy-evolution bound evaluator, and efficient
computation of the measured collision mass that never materializes large
classical output registers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from . import matcore
from .errors import DimMismatch, DimTooLarge, NotDiagonalInPhiBasis, NotPrime
from .qstates import mub_bases, pauli_weight, weyl_string

# dense lambda decomposition is only attempted below this total dimension
DECOMPOSE_DIM_CAP = 2048
# explicit Kraus families are materialized only below this entry count
KRAUS_ENTRY_CAP = 8_000_000

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass
class KrausMap:
    """CP map given by Kraus operators, with optional structural metadata.

    kind/params identify the analytically known map families so that large
    instances can be handled without explicit Kraus matrices (kraus_ops may
    then be None).
    """

    kraus_ops: list | None
    in_dims: tuple
    out_dims: tuple
    kind: str | None = None
    params: dict = field(default_factory=dict)

    @property
    def dim_in(self) -> int:
        return int(np.prod(self.in_dims))

    @property
    def dim_out(self) -> int:
        return int(np.prod(self.out_dims))

    def trace_scale(self, tol: float = 1e-9):
        """mu such that sum K†K = mu * id, or None if not uniform."""
        if self.kraus_ops is None:
            return 1.0
        acc = sum(k.conj().T @ k for k in self.kraus_ops)
        mu = float(np.trace(acc).real) / self.dim_in
        if np.max(np.abs(acc - mu * np.eye(self.dim_in))) > tol * max(mu, 1.0):
            return None
        return mu


def apply(kmap: KrausMap, mat: np.ndarray, env_dim: int = 1) -> np.ndarray:
    """Apply the map to the leading subsystem of mat, identity on the rest."""
    if kmap.kraus_ops is None:
        raise DimMismatch("map has no explicit Kraus form at this size")
    din = kmap.dim_in
    if mat.shape[0] != din * env_dim:
        raise DimMismatch(f"input dim {mat.shape[0]} != {din} * {env_dim}")
    dout = kmap.dim_out
    out = np.zeros((dout * env_dim, dout * env_dim), dtype=complex)
    t = mat.reshape(din, env_dim, din, env_dim)
    for k in kmap.kraus_ops:
        kt = np.einsum("oa,aebf->oebf", k, t, optimize=True)
        kt = np.einsum("oebf,pb->oepf", kt, k.conj(), optimize=True)
        out += kt.reshape(dout * env_dim, dout * env_dim)
    return out


def adjoint(kmap: KrausMap) -> KrausMap:
    if kmap.kraus_ops is None:
        raise DimMismatch("map has no explicit Kraus form at this size")
    return KrausMap([k.conj().T for k in kmap.kraus_ops],
                    in_dims=kmap.out_dims, out_dims=kmap.in_dims)


def compose(f: KrausMap, g: KrausMap) -> KrausMap:
    """f ∘ g (g applied first)."""
    if f.kraus_ops is None or g.kraus_ops is None:
        raise DimMismatch("composition needs explicit Kraus forms")
    if f.dim_in != g.dim_out:
        raise DimMismatch(f"cannot compose: {f.dim_in} != {g.dim_out}")
    ops = [a @ b for a in f.kraus_ops for b in g.kraus_ops]
    return KrausMap(ops, in_dims=g.in_dims, out_dims=f.out_dims)


# ---------------------------------------------------------------------------
# lambda tables


@dataclass
class LambdaTable:
    """Coefficients lambda_s of ((M† ∘ M) ⊗ id)(Phi) = sum_s lambda_s Phi_s.

    values is a flat array over all s in [d^2]^n in row-major string order
    when small enough; sum_by_weight / max_by_weight aggregate lambda over
    Pauli-weight classes and are always available (they are all the bound
    evaluator needs).
    """

    d: int
    n: int
    sum_by_weight: np.ndarray
    max_by_weight: np.ndarray
    values: np.ndarray | None = None
    residual: float | None = None

    def lookup(self, s) -> float:
        if self.values is None:
            raise DimMismatch("full lambda values not stored at this size")
        idx = 0
        for si in s:
            idx = idx * self.d * self.d + int(si)
        return float(self.values[idx])

    @property
    def total(self) -> float:
        return float(np.sum(self.sum_by_weight))


def _aggregate_by_weight(d: int, n: int, values: np.ndarray) -> tuple:
    sums = np.zeros(n + 1)
    maxs = np.zeros(n + 1)
    for idx, s in enumerate(product(range(d * d), repeat=n)):
        w = pauli_weight(s)
        sums[w] += values[idx]
        maxs[w] = max(maxs[w], values[idx])
    return sums, maxs


def _table_from_values(d: int, n: int, values: np.ndarray,
                       residual: float | None = None) -> LambdaTable:
    sums, maxs = _aggregate_by_weight(d, n, values)
    return LambdaTable(d=d, n=n, sum_by_weight=sums, max_by_weight=maxs,
                       values=values, residual=residual)


def lambda_coefficients(kmap: KrausMap, d: int, n: int,
                        neg_tol: float = 1e-8, residual_tol: float = 1e-8) -> LambdaTable:
    """Decompose ((M† ∘ M) ⊗ id)(Phi) in the Phi_s basis by direct linear
    algebra and reject maps that are not diagonal in it."""
    dn = d ** n
    dim = dn * dn
    if dim > DECOMPOSE_DIM_CAP:
        raise DimTooLarge(f"decomposition dimension {dim} exceeds {DECOMPOSE_DIM_CAP}")
    if kmap.kraus_ops is None:
        raise DimMismatch("map has no explicit Kraus form")
    if kmap.dim_in != dn:
        raise DimMismatch(f"map input dim {kmap.dim_in} != {dn}")
    # ((M†M) ⊗ id)(Phi) = sum over Kraus pairs of vec(Ki† Kj) outer products
    x = np.zeros((dim, dim), dtype=complex)
    for ki in kmap.kraus_ops:
        for kj in kmap.kraus_ops:
            v = (ki.conj().T @ kj).reshape(-1)
            x += np.outer(v, v.conj())
    # unitary with columns vec(W_s)/d^{n/2}
    u = np.empty((dim, dim), dtype=complex)
    strings = list(product(range(d * d), repeat=n))
    for col, s in enumerate(strings):
        u[:, col] = weyl_string(d, s).reshape(-1) / np.sqrt(dn)
    a = u.conj().T @ x @ u
    diag = np.diag(a).real
    values = diag / dn
    off = a - np.diag(np.diag(a))
    residual = float(np.sqrt(matcore.frob_sq(off)))
    if values.min() < -neg_tol or residual > residual_tol:
        raise NotDiagonalInPhiBasis(
            f"min lambda {values.min():.3e}, off-diagonal residual {residual:.3e}")
    values = np.clip(values, 0.0, None)
    return _table_from_values(d, n, values, residual=residual)


def _analytic_values(kind: str, d: int, n: int, **params) -> np.ndarray:
    d2 = d * d
    values = np.zeros(d2 ** n)
    if kind == "sampling":
        k = params["k"]
        denom = d ** (n - k) * comb(n, k) ** 2
        per_weight = [comb(n - w, k) / denom if n - w >= k else 0.0
                      for w in range(n + 1)]
        for idx, s in enumerate(product(range(d2), repeat=n)):
            values[idx] = per_weight[pauli_weight(s)]
    elif kind == "cq_sampling":
        k = params["k"]
        denom = d ** n * comb(n, k) ** 2
        # weight class counts symbols acting nontrivially on the standard
        # basis (the shift part), s_i >= d
        per_weight = [comb(n - w, k) / denom if n - w >= k else 0.0
                      for w in range(n + 1)]
        for idx, s in enumerate(product(range(d2), repeat=n)):
            w = sum(1 for si in s if si >= d)
            values[idx] = per_weight[w]
    elif kind == "bb84":
        # support: strings avoiding the XZ symbol (index 3 in the
        # diagonal-first convention); lambda = 4^{-n} 2^{-|s|}
        for idx, s in enumerate(product(range(4), repeat=n)):
            if all(si != 3 for si in s):
                values[idx] = 4.0 ** (-n) * 2.0 ** (-pauli_weight(s))
    elif kind == "mub":
        base = 1.0 / ((d + 1) * d) ** n
        for idx, s in enumerate(product(range(d2), repeat=n)):
            values[idx] = base * (d + 1) ** (-pauli_weight(s))
    else:
        raise DimMismatch(f"unknown map kind {kind!r}")
    return values


def analytic_lambda(kmap: KrausMap) -> LambdaTable:
    """Closed-form lambda table for the built-in map families."""
    p = dict(kmap.params)
    d, n = p.pop("d"), p.pop("n")
    return _table_from_values(d, n, _analytic_values(kmap.kind, d, n, **p))


# ---------------------------------------------------------------------------
# concrete map constructors


def _subset_kraus(n: int, k: int, d: int, subset) -> list:
    """Operators mapping |x^n> to <z|x_{S^c}> |x_S> for all z."""
    dn, dk = d ** n, d ** k
    comp = [i for i in range(n) if i not in subset]
    ops = {}
    for full in range(dn):
        digits = []
        r = full
        for _ in range(n):
            digits.append(r % d)
            r //= d
        digits = digits[::-1]
        xs = 0
        for i in subset:
            xs = xs * d + digits[i]
        z = 0
        for i in comp:
            z = z * d + digits[i]
        ops.setdefault(z, np.zeros((dk, dn), dtype=complex))[xs, full] = 1.0
    return [ops[z] for z in sorted(ops)]


def sampling_map(n: int, k: int, d: int = 2) -> KrausMap:
    """Average over size-k subsets S of  tr_{S^c}[X] ⊗ |S><S|."""
    if not 1 <= k <= n:
        raise DimMismatch(f"k = {k} not in [1, {n}]")
    subsets = list(_combinations(n, k))
    nsub = len(subsets)
    dk = d ** k
    entries = nsub * d ** (n - k) * dk * d ** n
    kraus = None
    if entries <= KRAUS_ENTRY_CAP:
        kraus = []
        for lab, subset in enumerate(subsets):
            for p in _subset_kraus(n, k, d, subset):
                op = np.zeros((dk * nsub, d ** n), dtype=complex)
                op[lab * dk:(lab + 1) * dk, :] = p / np.sqrt(nsub)
                kraus.append(op)
    return KrausMap(kraus, in_dims=(d,) * n, out_dims=(dk, nsub),
                    kind="sampling", params={"n": n, "k": k, "d": d})


def cq_sampling_map(n: int, k: int, d: int = 2) -> KrausMap:
    """Like sampling_map, but the kept subsystems are measured in the
    standard basis."""
    base = sampling_map(n, k, d)
    kraus = None
    if base.kraus_ops is not None:
        dk = d ** k
        nsub = comb(n, k)
        kraus = []
        for op in base.kraus_ops:
            for x in range(dk):
                rows = np.zeros_like(op)
                for lab in range(nsub):
                    rows[lab * dk + x, :] = op[lab * dk + x, :]
                if np.any(rows):
                    kraus.append(rows)
    return KrausMap(kraus, in_dims=(d,) * n, out_dims=(d ** k, comb(n, k)),
                    kind="cq_sampling", params={"n": n, "k": k, "d": d})


def _measurement_kraus(unitaries, n: int, d: int) -> list | None:
    """Kraus family of the n-fold tensor of  (1/nb) sum |theta,x><x| U_theta."""
    nb = len(unitaries)
    single = []
    for theta, u in enumerate(unitaries):
        for x in range(d):
            op = np.zeros((nb * d, d), dtype=complex)
            op[theta * d + x, :] = u[x, :] / np.sqrt(nb)
            single.append(op)
    if ((nb * d) ** n) * (d ** n) * len(single) ** n > KRAUS_ENTRY_CAP:
        return None
    kraus = single
    for _ in range(n - 1):
        kraus = [np.kron(a, b) for a in kraus for b in single]
    return kraus


def bb84_map(n: int) -> KrausMap:
    """Per-qubit measurement in a uniformly random standard/Hadamard basis,
    outputting the basis label and the outcome."""
    unitaries = [np.eye(2, dtype=complex), HADAMARD]
    kraus = _measurement_kraus(unitaries, n, 2)
    return KrausMap(kraus, in_dims=(2,) * n, out_dims=(2, 2) * n,
                    kind="bb84", params={"n": n, "d": 2, "unitaries": unitaries})


def mub_map(n: int, d: int) -> KrausMap:
    """Per-qudit measurement in a uniformly random basis from the full set of
    d+1 mutually unbiased bases."""
    fam = mub_bases(d)  # raises NotPrime for composite d
    kraus = _measurement_kraus(fam.unitaries, n, d)
    return KrausMap(kraus, in_dims=(d,) * n, out_dims=(d + 1, d) * n,
                    kind="mub", params={"n": n, "d": d, "unitaries": fam.unitaries})


def _combinations(n: int, k: int):
    from itertools import combinations
    return combinations(range(n), k)


# ---------------------------------------------------------------------------
# bound evaluation and measured collision mass


def theorem1_bound(table: LambdaTable, h2_input: float, weight_threshold: int | None = None,
                   positive_set=None) -> float:
    """Right-hand side of the entropy-evolution bound.

    The partition is either by Pauli weight (positive part = weight <=
    threshold) or an explicit collection of strings forming the positive
    part.  Returns sum_{S+} lambda * 2^{-h2_input} + max_{S-} lambda * d^n.
    """
    dn = table.d ** table.n
    if positive_set is not None:
        pos = {tuple(int(x) for x in s) for s in positive_set}
        sum_pos = sum(table.lookup(s) for s in pos)
        max_neg = 0.0
        for s in product(range(table.d ** 2), repeat=table.n):
            if s not in pos:
                max_neg = max(max_neg, table.lookup(s))
    else:
        if weight_threshold is None:
            weight_threshold = table.n
        l0 = max(-1, min(int(weight_threshold), table.n))
        sum_pos = float(np.sum(table.sum_by_weight[:l0 + 1]))
        max_neg = float(np.max(table.max_by_weight[l0 + 1:])) if l0 < table.n else 0.0
    return sum_pos * 2.0 ** (-h2_input) + max_neg * dn


def _digits(idx: int, d: int, n: int) -> list:
    out = []
    for _ in range(n):
        out.append(idx % d)
        idx //= d
    return out[::-1]


def measured_collision_mass(kmap: KrausMap, mat: np.ndarray, env_dim: int,
                            sigma_env: np.ndarray | None = None) -> float:
    """tr[(sigma_E^{-1/4} (M ⊗ id)(rho) sigma_E^{-1/4})^2] computed through
    the map's classical output structure, so the (often huge) output register
    never appears as a dense matrix.  sigma_env defaults to rho_E."""
    n = kmap.params.get("n")
    d = kmap.params.get("d")
    dn = kmap.dim_in
    if mat.shape[0] != dn * env_dim:
        raise DimMismatch(f"state dim {mat.shape[0]} != {dn} * {env_dim}")
    if sigma_env is None:
        sigma_env = matcore.partial_trace(mat, (dn, env_dim), keep=[1])
    s4 = matcore.mat_pow_support(sigma_env, -0.25)

    def block_mass(block):
        return matcore.frob_sq(s4 @ block @ s4)

    if kmap.kind == "sampling":
        k = kmap.params["k"]
        nsub = comb(n, k)
        total = 0.0
        for subset in _combinations(n, k):
            keep = list(subset) + [n]
            sub = matcore.partial_trace(mat, (d,) * n + (env_dim,), keep=keep)
            dk = d ** k
            t = sub.reshape(dk, env_dim, dk, env_dim)
            sand = np.einsum("ij,ajbl,lk->aibk", s4, t, s4, optimize=True)
            total += matcore.frob_sq(sand)
        return total / nsub ** 2
    if kmap.kind == "cq_sampling":
        k = kmap.params["k"]
        nsub = comb(n, k)
        total = 0.0
        for subset in _combinations(n, k):
            keep = list(subset) + [n]
            sub = matcore.partial_trace(mat, (d,) * n + (env_dim,), keep=keep)
            dk = d ** k
            t = sub.reshape(dk, env_dim, dk, env_dim)
            for x in range(dk):
                total += block_mass(t[x, :, x, :])
        return total / nsub ** 2
    if kmap.kind in ("bb84", "mub"):
        unitaries = kmap.params["unitaries"]
        nb = len(unitaries)
        p2 = float(nb) ** (-2 * n)
        total = 0.0
        for thetas in product(range(nb), repeat=n):
            u = unitaries[thetas[0]]
            for th in thetas[1:]:
                u = np.kron(u, unitaries[th])
            t = mat.reshape(dn, env_dim, dn, env_dim)
            rot = np.einsum("xa,aebf,yb->xeyf", u, t, u.conj(), optimize=True)
            for x in range(dn):
                total += block_mass(rot[x, :, x, :])
        return p2 * total
    # generic fallback: materialize the output
    out = apply(kmap, mat, env_dim)
    dout = kmap.dim_out
    t = out.reshape(dout, env_dim, dout, env_dim)
    sand = np.einsum("ij,ajbl,lk->aibk", s4, t, s4, optimize=True)
    return matcore.frob_sq(sand)
