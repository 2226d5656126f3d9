"""Constructors for the states and operator bases used throughout.

Covers maximally entangled states, Weyl (generalized Pauli) operators, the
maximally entangled operator basis built from them, mutually unbiased bases
for prime dimension, seeded random states, and the two fixed-weight witness
states used for the rate-function upper bounds.

Weyl numbering is "diagonal-first": for s = a*d + b, W_s = X^a Z^b, so the
first d operators are diagonal (W_y |x> = exp(2 pi i x y / d) |x>).  For
qubits this differs from the usual Bell-basis display order; the remap
tables CONV_TO_BELL / BELL_TO_CONV translate between the two labelings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb

import numpy as np

from . import matcore
from .errors import DimMismatch, IndexOutOfRange, NotPrime

# qubit index remap: convention label (I, Z, X, XZ) -> Bell display label
CONV_TO_BELL = (0, 3, 1, 2)
BELL_TO_CONV = (0, 2, 3, 1)


@dataclass
class DensityOperator:
    """Hermitian PSD matrix together with its subsystem dimension vector."""

    matrix: np.ndarray
    dims: tuple
    normalized: bool = True

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        self.dims = matcore.check_dims(self.matrix, self.dims)

    def validate(self, tol: float = 1e-10) -> "DensityOperator":
        w, _ = matcore.eig_hermitian(self.matrix, tol=1e-9)
        lam_max = float(w[0]) if w.size else 0.0
        if w.size and w[-1] < -tol * max(lam_max, 1.0):
            raise ValueError(f"not PSD: lambda_min = {w[-1]:.3e}")
        if self.normalized and abs(self.trace - 1.0) > tol:
            raise ValueError(f"trace {self.trace} not 1 within {tol}")
        return self

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def ptrace(self, keep) -> "DensityOperator":
        kept = matcore.partial_trace(self.matrix, self.dims, keep)
        return DensityOperator(kept, tuple(self.dims[i] for i in sorted(set(keep))),
                               normalized=self.normalized)


def pauli_weight(s) -> int:
    """Number of non-identity symbols of a Weyl string."""
    return sum(1 for x in s if x != 0)


def max_entangled_vec(d: int, n: int = 1, normalized: bool = False) -> np.ndarray:
    """Vector sum_a |a>|a> on A^n Abar^n (norm d^{n/2} unnormalized)."""
    dn = d ** n
    vec = np.eye(dn, dtype=complex).reshape(-1)
    if normalized:
        vec = vec / np.sqrt(dn)
    return vec


def max_entangled(d: int, n: int = 1, normalized: bool = True) -> DensityOperator:
    """Maximally entangled state Phi on A^n Abar^n (projector form)."""
    vec = max_entangled_vec(d, n, normalized=normalized)
    return DensityOperator(np.outer(vec, vec.conj()), (d ** n, d ** n),
                           normalized=normalized)


def weyl(d: int, s: int) -> np.ndarray:
    """Weyl operator W_s = X^a Z^b for s = a*d + b."""
    if not 0 <= s < d * d:
        raise IndexOutOfRange(f"s = {s} not in [0, {d * d})")
    a, b = divmod(s, d)
    w = np.zeros((d, d), dtype=complex)
    omega = np.exp(2j * np.pi / d)
    for x in range(d):
        w[(x + a) % d, x] = omega ** (x * b)
    return w


def weyl_string(d: int, s) -> np.ndarray:
    """Tensor product W_{s_1} x ... x W_{s_n}."""
    out = weyl(d, s[0])
    for si in s[1:]:
        out = np.kron(out, weyl(d, si))
    return out


def phi_s_vec(d: int, n: int, s) -> np.ndarray:
    """Unnormalized vector (W_s ⊗ id)|Phi> on A^n Abar^n.

    Row-major flattening of W_s gives exactly (W_s ⊗ id) sum_a |a>|a>.
    """
    return weyl_string(d, s).reshape(-1)


def phi_s(d: int, n: int, s) -> np.ndarray:
    """Rank-1 unnormalized basis operator |Phi_s><Phi_s| (trace d^n)."""
    v = phi_s_vec(d, n, s)
    return np.outer(v, v.conj())


def all_weyl_strings(d: int, n: int):
    """Iterate over all s in [d^2]^n."""
    return product(range(d * d), repeat=n)


def _is_prime(d: int) -> bool:
    if d < 2:
        return False
    return all(d % p for p in range(2, int(d ** 0.5) + 1))


@dataclass
class MubFamily:
    """d+1 mutually unbiased bases of prime dimension d.

    unitaries[theta] maps basis theta to the standard basis (rows are the
    conjugated basis vectors); unitaries[0] is the identity (computational
    basis).
    """

    d: int
    unitaries: list = field(default_factory=list)

    def basis_vectors(self, theta: int) -> np.ndarray:
        """Columns are the basis vectors of basis theta."""
        return self.unitaries[theta].conj().T


def mub_bases(d: int) -> MubFamily:
    """Full set of d+1 mutually unbiased bases for prime d."""
    if not _is_prime(d):
        raise NotPrime(f"d = {d} is not prime")
    bases = [np.eye(d, dtype=complex)]
    if d == 2:
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        y = np.array([[1, -1j], [1, 1j]], dtype=complex) / np.sqrt(2)
        bases += [h, y]
    else:
        omega = np.exp(2j * np.pi / d)
        for a in range(d):
            vecs = np.zeros((d, d), dtype=complex)
            for x in range(d):
                for j in range(d):
                    vecs[j, x] = omega ** ((a * j * j + x * j) % d) / np.sqrt(d)
            # U maps basis vectors (columns of vecs) to standard basis
            bases.append(vecs.conj().T)
    return MubFamily(d=d, unitaries=bases)


def random_state(dims, rank: int, seed: int) -> DensityOperator:
    """Seeded random state of fixed rank via a Gaussian purification."""
    dims = tuple(int(x) for x in dims)
    total = int(np.prod(dims))
    if not 1 <= rank <= total:
        raise DimMismatch(f"rank {rank} not in [1, {total}]")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((total, rank)) + 1j * rng.standard_normal((total, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityOperator(rho, dims, normalized=True)


def random_cq_state(n_classical: int, dim_q: int, seed: int, rank: int | None = None) -> DensityOperator:
    """Seeded random classical-quantum state with n_classical symbols."""
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(n_classical))
    conds = []
    if rank is None:
        rank = dim_q
    for i in range(n_classical):
        sub = random_state((dim_q,), rank, int(rng.integers(0, 2 ** 31)))
        conds.append(sub)
    return cq_state(p, conds)


def corrupted_epr(n: int, d: int, w: int) -> DensityOperator:
    """Maximally entangled n-qudit state hit by a uniformly random weight-w
    Weyl error; lives on A^n B^n with B^n the last n subsystems."""
    if not 0 <= w <= n:
        raise DimMismatch(f"w = {w} not in [0, {n}]")
    dn = d ** n
    total = dn * dn
    acc = np.zeros((total, total), dtype=complex)
    count = 0
    for supp in combinations(range(n), w):
        for symbols in product(range(1, d * d), repeat=w):
            s = [0] * n
            for pos, sym in zip(supp, symbols):
                s[pos] = sym
            acc += phi_s(d, n, s)
            count += 1
    assert count == comb(n, w) * (d * d - 1) ** w
    acc /= count * dn
    return DensityOperator(acc, (dn, dn), normalized=True)


def corrupted_epr_h2(n: int, d: int, w: int) -> float:
    """Closed-form H2(A^n|B^n) of corrupted_epr."""
    return -np.log2(d ** n / (comb(n, w) * (d * d - 1) ** w))


def fixed_weight_classical(n: int, d: int, w: int) -> DensityOperator:
    """Uniform distribution over strings in [d]^n of Hamming weight w."""
    if not 0 <= w <= n:
        raise DimMismatch(f"w = {w} not in [0, {n}]")
    dn = d ** n
    diag = np.zeros(dn)
    count = 0
    for supp in combinations(range(n), w):
        for symbols in product(range(1, d), repeat=w):
            s = [0] * n
            for pos, sym in zip(supp, symbols):
                s[pos] = sym
            idx = 0
            for x in s:
                idx = idx * d + x
            diag[idx] = 1.0
            count += 1
    diag /= count
    return DensityOperator(np.diag(diag.astype(complex)), (d,) * n, normalized=True)


def cq_state(probs, conditionals) -> DensityOperator:
    """Block-diagonal state sum_x p(x) |x><x| ⊗ rho_x."""
    probs = np.asarray(probs, dtype=float)
    if abs(probs.sum() - 1.0) > 1e-10:
        raise DimMismatch(f"probabilities sum to {probs.sum()}")
    mats = []
    dims_q = None
    for c in conditionals:
        if isinstance(c, DensityOperator):
            if dims_q is None:
                dims_q = c.dims
            elif c.dims != dims_q:
                raise DimMismatch("conditionals have inconsistent dims")
            mats.append(c.matrix)
        else:
            m = np.asarray(c, dtype=complex)
            if dims_q is None:
                dims_q = (m.shape[0],)
            mats.append(m)
    if len(mats) != len(probs):
        raise DimMismatch("probs and conditionals length mismatch")
    dq = mats[0].shape[0]
    nx = len(probs)
    out = np.zeros((nx * dq, nx * dq), dtype=complex)
    for x, (p, m) in enumerate(zip(probs, mats)):
        if m.shape != (dq, dq):
            raise DimMismatch("conditional dimension mismatch")
        out[x * dq:(x + 1) * dq, x * dq:(x + 1) * dq] = p * m
    return DensityOperator(out, (nx,) + tuple(dims_q), normalized=True)
