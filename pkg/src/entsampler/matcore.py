"""Dense complex linear algebra kernel.

Hermitian eigendecomposition, fractional matrix powers restricted to the
support, tensor products, partial traces over arbitrary subsystem sets and
the fidelity of positive operators.  All functions are pure and operate on
plain numpy arrays; subsystem structure is carried separately as a tuple of
dimensions (a "dim vector") whose product must match the matrix dimension.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, NegativeEigenvalue, NotHermitian

HERMITICITY_TOL = 1e-12
SUPPORT_CUTOFF = 1e-10


def check_dims(mat: np.ndarray, dims) -> tuple:
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims)) if dims else 1
    if mat.shape != (total, total):
        raise DimMismatch(f"matrix shape {mat.shape} does not match dims {dims}")
    return dims


def hermitize(mat: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return (M + M†)/2, rejecting matrices that are not Hermitian within tol.

    The tolerance is relative to the largest matrix entry (absolute for
    matrices of unit scale).
    """
    dev = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    scale = max(1.0, float(np.max(np.abs(mat))) if mat.size else 1.0)
    if dev > tol * scale:
        raise NotHermitian(f"max |M - M†| = {dev:.3e} exceeds tolerance {tol * scale:.3e}")
    return (mat + mat.conj().T) / 2


def eig_hermitian(mat: np.ndarray, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues sorted descending and
    eigenvectors as columns of a unitary matrix, so M = V diag(w) V†.
    """
    m = hermitize(np.asarray(mat, dtype=complex), tol)
    w, v = np.linalg.eigh(m)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def mat_pow_support(mat: np.ndarray, p: float, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """M^p for Hermitian PSD M, with negative powers taken on the support.

    Eigenvalues at or below cutoff * lambda_max are treated as exactly zero and
    excluded from negative powers.  Raises NegativeEigenvalue when M fails the
    PSD check lambda_min >= -cutoff * lambda_max.
    """
    w, v = eig_hermitian(mat)
    lam_max = float(w[0]) if w.size else 0.0
    if lam_max <= 0.0:
        # zero (or numerically negative) operator: powers on empty support
        if w.size and w[-1] < -cutoff * max(abs(lam_max), 1.0):
            raise NegativeEigenvalue(f"lambda_min = {w[-1]:.3e}")
        return np.zeros_like(np.asarray(mat, dtype=complex))
    if w[-1] < -cutoff * lam_max:
        raise NegativeEigenvalue(f"lambda_min = {w[-1]:.3e} below -{cutoff:.1e} * lambda_max")
    support = w > cutoff * lam_max
    wp = np.zeros_like(w)
    wp[support] = w[support] ** p
    return (v * wp) @ v.conj().T


def support_projector(mat: np.ndarray, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Projector onto the support of a Hermitian PSD matrix."""
    w, v = eig_hermitian(mat)
    lam_max = float(w[0]) if w.size else 0.0
    if lam_max <= 0.0:
        return np.zeros_like(np.asarray(mat, dtype=complex))
    support = w > cutoff * lam_max
    return (v[:, support]) @ (v[:, support]).conj().T


def tensor(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices."""
    out = np.asarray(mats[0], dtype=complex)
    for m in mats[1:]:
        out = np.kron(out, np.asarray(m, dtype=complex))
    return out


def partial_trace(mat: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in keep.

    The kept subsystems remain in their original order.  dims is the full
    subsystem dimension tuple; keep is an iterable of subsystem indices.
    """
    dims = check_dims(np.asarray(mat, dtype=complex), dims)
    n = len(dims)
    keep = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= n for i in keep):
        raise DimMismatch(f"keep {keep} out of range for {n} subsystems")
    traced = [i for i in range(n) if i not in keep]
    t = np.asarray(mat, dtype=complex).reshape(dims + dims)
    # contract row/column indices of every traced subsystem
    for offset, i in enumerate(traced):
        axis = i - offset
        ncur = t.ndim // 2
        t = np.trace(t, axis1=axis, axis2=axis + ncur)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return t.reshape(dk, dk)


def permute_subsystems(mat: np.ndarray, dims, perm) -> np.ndarray:
    """Reorder subsystems: subsystem perm[j] of the input becomes subsystem j."""
    dims = check_dims(np.asarray(mat, dtype=complex), dims)
    n = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise DimMismatch(f"perm {perm} is not a permutation of 0..{n - 1}")
    t = np.asarray(mat, dtype=complex).reshape(dims + dims)
    t = t.transpose(perm + [p + n for p in perm])
    total = int(np.prod(dims))
    return t.reshape(total, total)


def frob_sq(mat: np.ndarray) -> float:
    """Squared Frobenius norm; equals tr[M²] for Hermitian M."""
    return float(np.sum(np.abs(mat) ** 2))


def fidelity(rho: np.ndarray, sigma: np.ndarray, cutoff: float = SUPPORT_CUTOFF) -> float:
    """F(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)) for PSD operators."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimMismatch(f"shape mismatch {rho.shape} vs {sigma.shape}")
    sr = mat_pow_support(rho, 0.5, cutoff)
    inner = sr @ sigma @ sr
    w, _ = eig_hermitian(inner, tol=1e-9)
    lam_max = float(w[0]) if w.size else 0.0
    if w.size and w[-1] < -cutoff * max(lam_max, 1.0):
        raise NegativeEigenvalue(f"lambda_min = {w[-1]:.3e} in fidelity kernel")
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
