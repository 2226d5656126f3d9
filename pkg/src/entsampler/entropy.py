"""Entropy and divergence evaluators.

Collision entropy H2 in its three conditionings, exact conditional
min-entropy through a structured log-det barrier SDP, guessing probability
for classical-quantum states, the pretty-good recovery fidelity, and the
collision divergence D2.  All entropies are in bits.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import (DimTooLarge, NegativeEigenvalue, NoConvergence,
                     NotClassical, SupportMismatch)
from .qstates import DensityOperator

DEFAULT_SDP_TOL = 1e-7
DEFAULT_MAX_DIM = 256


@dataclass
class EntropyResult:
    value: float
    conditioning: str = "rho-conditioned"

    @property
    def collision_mass(self) -> float:
        return float(2.0 ** (-self.value))


@dataclass
class SdpSolution:
    optimal_sigma: np.ndarray
    optimal_value: float
    duality_gap: float
    iterations: int
    dual_certificate: np.ndarray | None = None


def _as_matrix_dims(rho, dim_a=None, dim_b=None):
    """Accept a DensityOperator or a raw matrix plus an (A, B) split."""
    if isinstance(rho, DensityOperator):
        mat = rho.matrix
        if dim_a is None:
            if len(rho.dims) < 2:
                raise SupportMismatch("need a bipartition")
            dim_a = rho.dims[0]
        total = mat.shape[0]
        dim_b = total // dim_a
    else:
        mat = np.asarray(rho, dtype=complex)
        if dim_a is None or dim_b is None:
            raise SupportMismatch("raw matrix input needs explicit dim_a, dim_b")
    if dim_a * dim_b != mat.shape[0]:
        raise SupportMismatch(f"dims ({dim_a},{dim_b}) do not factor {mat.shape[0]}")
    return mat, int(dim_a), int(dim_b)


def _sandwich_b(mat: np.ndarray, dim_a: int, dim_b: int, b_factor: np.ndarray) -> np.ndarray:
    """(id_A ⊗ F) M (id_A ⊗ F) without building the Kronecker factor."""
    t = mat.reshape(dim_a, dim_b, dim_a, dim_b)
    t = np.einsum("ij,ajbl,lk->aibk", b_factor, t, b_factor, optimize=True)
    return t.reshape(dim_a * dim_b, dim_a * dim_b)


def collision_mass_sigma(rho, sigma_b, dim_a=None, dim_b=None,
                         check_support: bool = True) -> float:
    """tr[(sigma^{-1/4} rho_AB sigma^{-1/4})^2] with powers on the support."""
    mat, da, db = _as_matrix_dims(rho, dim_a, dim_b)
    sig = sigma_b.matrix if isinstance(sigma_b, DensityOperator) else np.asarray(sigma_b, dtype=complex)
    if sig.shape[0] != db:
        raise SupportMismatch(f"sigma dimension {sig.shape[0]} != {db}")
    if check_support:
        rho_b = matcore.partial_trace(mat, (da, db), keep=[1])
        proj = matcore.support_projector(sig)
        leak = matcore.frob_sq(rho_b - proj @ rho_b @ proj)
        if leak > 1e-18 * max(matcore.frob_sq(rho_b), 1.0):
            raise SupportMismatch(f"supp(rho_B) outside supp(sigma): leak {leak:.3e}")
    inv4 = matcore.mat_pow_support(sig, -0.25)
    tilde = _sandwich_b(mat, da, db, inv4)
    return matcore.frob_sq(tilde)


def h2_cond_sigma(rho, sigma_b, dim_a=None, dim_b=None) -> EntropyResult:
    """H2(A|B)_{rho|sigma} = -log tr[(sigma^{-1/4} rho sigma^{-1/4})^2]."""
    mass = collision_mass_sigma(rho, sigma_b, dim_a, dim_b)
    return EntropyResult(value=float(-np.log2(mass)), conditioning="sigma-conditioned")


def h2_cond(rho, dim_a=None, dim_b=None) -> EntropyResult:
    """H2(A|B) conditioned on the state's own marginal rho_B."""
    mat, da, db = _as_matrix_dims(rho, dim_a, dim_b)
    rho_b = matcore.partial_trace(mat, (da, db), keep=[1])
    mass = collision_mass_sigma(mat, rho_b, da, db, check_support=False)
    return EntropyResult(value=float(-np.log2(mass)), conditioning="rho-conditioned")


def _herm_from_vec(x: np.ndarray, n: int) -> np.ndarray:
    m = x.reshape(n, n)
    return (m + m.conj().T) / 2


def hmin_cond(rho, dim_a=None, dim_b=None, tol: float = DEFAULT_SDP_TOL,
              max_dim: int | None = None):
    """Exact H_min(A|B) by solving  min tr(sigma)  s.t.  id_A ⊗ sigma >= rho.

    Log-det barrier path following with exact Newton steps in sigma.
    Returns (EntropyResult, SdpSolution).
    """
    mat, da, db = _as_matrix_dims(rho, dim_a, dim_b)
    dim = da * db
    if max_dim is None:
        max_dim = int(os.environ.get("ENTSAMPLER_MAX_DIM", DEFAULT_MAX_DIM))
    if dim > max_dim:
        raise DimTooLarge(f"|A||B| = {dim} exceeds cap {max_dim}")
    mat = matcore.hermitize(mat, tol=1e-9)
    lam_max = float(np.linalg.eigvalsh(mat)[-1])
    if lam_max <= 0:
        raise NegativeEigenvalue("state has no positive part")

    ident_b = np.eye(db, dtype=complex)
    sigma = 2.0 * lam_max * ident_b

    def schur(sig):
        return np.kron(np.eye(da), sig) - mat

    mu = lam_max
    iters = 0
    max_outer = 200
    for _ in range(max_outer):
        # Newton iterations at fixed mu
        for _ in range(60):
            iters += 1
            s = schur(sigma)
            s_inv = np.linalg.inv(s)
            s_inv = (s_inv + s_inv.conj().T) / 2
            grad = ident_b - mu * matcore.partial_trace(s_inv, (da, db), keep=[1])
            t4 = s_inv.reshape(da, db, da, db)
            # Hessian of the barrier as a map on vec(sigma)
            hess4 = np.einsum("aicj,ckal->ijkl", t4, t4, optimize=True)
            kmat = mu * hess4.transpose(0, 3, 1, 2).reshape(db * db, db * db)
            # regularize tiny asymmetry
            try:
                delta = np.linalg.solve(kmat, -grad.reshape(-1))
            except np.linalg.LinAlgError:
                delta = np.linalg.lstsq(kmat, -grad.reshape(-1), rcond=None)[0]
            delta = _herm_from_vec(delta, db)
            # backtracking line search keeping S positive definite
            step = 1.0
            base_obj = np.trace(sigma).real - mu * np.linalg.slogdet(s)[1]
            newton_dec = float(np.real(np.vdot(grad.reshape(-1), -delta.reshape(-1))))
            accepted = False
            for _ in range(50):
                cand = sigma + step * delta
                sc = schur(cand)
                wmin = np.linalg.eigvalsh(sc)[0]
                if wmin > 0:
                    obj = np.trace(cand).real - mu * np.linalg.slogdet(sc)[1]
                    if obj <= base_obj + 1e-12 * abs(base_obj) or step < 1e-8:
                        sigma = cand
                        accepted = True
                        break
                step *= 0.5
            if not accepted:
                raise NoConvergence("line search failed")
            if abs(newton_dec) < 0.25 * mu:
                break
        gap_bound = mu * dim
        if gap_bound <= tol * max(np.trace(sigma).real, 1e-300):
            break
        mu *= 0.25
    else:
        raise NoConvergence("barrier path did not reach requested gap")

    s = schur(sigma)
    s_inv = np.linalg.inv(s)
    x_dual = mu * (s_inv + s_inv.conj().T) / 2
    # project onto the exact dual feasible slice tr_A X = id_B
    corr = ident_b - matcore.partial_trace(x_dual, (da, db), keep=[1])
    x_dual = x_dual + np.kron(np.eye(da), corr) / da
    primal = float(np.trace(sigma).real)
    dual = float(np.trace(mat @ x_dual).real)
    sol = SdpSolution(optimal_sigma=sigma, optimal_value=primal,
                      duality_gap=primal - dual, iterations=iters,
                      dual_certificate=x_dual)
    res = EntropyResult(value=float(-np.log2(primal)), conditioning="rho-conditioned")
    return res, sol


def check_classical_first(rho, dim_a=None, dim_b=None, tol: float = 1e-10):
    """Verify the first subsystem is classical (block-diagonal)."""
    mat, da, db = _as_matrix_dims(rho, dim_a, dim_b)
    t = mat.reshape(da, db, da, db)
    off = 0.0
    for x in range(da):
        for y in range(da):
            if x != y:
                off = max(off, float(np.max(np.abs(t[x, :, y, :]))))
    if off > tol:
        raise NotClassical(f"off-diagonal X-block magnitude {off:.3e}")
    return mat, da, db


def pguess(rho, dim_a=None, dim_b=None, tol: float = DEFAULT_SDP_TOL) -> float:
    """Optimal guessing probability 2^{-H_min(X|E)} for a cq state."""
    mat, da, db = check_classical_first(rho, dim_a, dim_b)
    res, _ = hmin_cond(mat, da, db, tol=tol)
    return float(2.0 ** (-res.value))


@dataclass
class KrausChannel:
    """Minimal Kraus-form channel used for the recovery map output.

    The full-featured map type lives in qmaps; this avoids a circular import
    for the one place entropy needs to hand back a channel.
    """

    kraus_ops: list = field(default_factory=list)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return sum(k @ x @ k.conj().T for k in self.kraus_ops)


def _choi_to_kraus(choi: np.ndarray, dim_in: int, dim_out: int) -> list:
    """Kraus operators from a Choi matrix indexed (out, in)."""
    w, v = matcore.eig_hermitian(choi, tol=1e-8)
    ops = []
    for lam, col in zip(w, v.T):
        if lam > 1e-12 * max(w[0], 1.0):
            ops.append(np.sqrt(lam) * col.reshape(dim_out, dim_in))
    return ops


def pretty_good_fidelity(rho, dim_a=None, dim_b=None):
    """Fidelity of the pretty-good recovery map with the maximally entangled
    state, plus the recovery channel itself.

    Lambda_pg(Y) = (tr_B[rho_AB (id ⊗ rho_B^{-1/2} Y rho_B^{-1/2})])^T,
    acting B -> A'.  Satisfies H2(A|B) = -log(|A| F_pg^2).
    """
    mat, da, db = _as_matrix_dims(rho, dim_a, dim_b)
    rho_b = matcore.partial_trace(mat, (da, db), keep=[1])
    binv2 = matcore.mat_pow_support(rho_b, -0.5)

    def recover(y):
        ky = binv2 @ y @ binv2
        t = mat.reshape(da, db, da, db)
        out = np.einsum("ajbk,kj->ab", t, ky, optimize=True)
        return out.T

    # Choi of the recovery map (input B, output A')
    choi = np.zeros((da * db, da * db), dtype=complex)
    for i in range(db):
        for j in range(db):
            e = np.zeros((db, db), dtype=complex)
            e[i, j] = 1.0
            block = recover(e)
            choi_t = choi.reshape(da, db, da, db)
            choi_t[:, i, :, j] += block
    kraus = _choi_to_kraus(choi.reshape(da * db, da * db), db, da)
    recovery = KrausChannel(kraus_ops=kraus)

    # (id_A ⊗ Lambda_pg)(rho_AB)
    t = mat.reshape(da, db, da, db)
    out = np.zeros((da, da, da, da), dtype=complex)
    for i in range(da):
        for j in range(da):
            out[i, :, j, :] = recover(t[i, :, j, :])
    recovered = out.reshape(da * da, da * da)
    phi_n = np.eye(da, dtype=complex).reshape(-1) / np.sqrt(da)
    # the target is pure, so F = sqrt(<phi|recovered|phi>) exactly
    f = np.sqrt(max(float(np.real(phi_n.conj() @ recovered @ phi_n)), 0.0))
    return float(f), recovery


def d2_div(x_op: np.ndarray, y_op: np.ndarray) -> float:
    """Collision divergence: 2^{D2(X||Y)} = tr[(Y^{-1/4} X Y^{-1/4})^2]."""
    x_mat = x_op.matrix if isinstance(x_op, DensityOperator) else np.asarray(x_op, dtype=complex)
    y_mat = y_op.matrix if isinstance(y_op, DensityOperator) else np.asarray(y_op, dtype=complex)
    proj = matcore.support_projector(y_mat)
    leak = matcore.frob_sq(x_mat - proj @ x_mat @ proj)
    if leak > 1e-18 * max(matcore.frob_sq(x_mat), 1.0):
        raise SupportMismatch(f"supp(X) outside supp(Y): leak {leak:.3e}")
    yinv4 = matcore.mat_pow_support(y_mat, -0.25)
    return float(np.log2(matcore.frob_sq(yinv4 @ x_mat @ yinv4)))


def hmin_cond_classical(probs, blocks, dim_a: int, dim_b: int,
                        tol: float = DEFAULT_SDP_TOL, max_dim: int | None = None):
    """H_min(A|BC) when C is a classical register.

    blocks[c] is the normalized conditional state on A x B for symbol c.  For
    such states the SDP splits across the blocks:
    2^{-Hmin(A|BC)} = sum_c p(c) 2^{-Hmin(A|B)_{rho^c}}.
    Returns (EntropyResult, per-block SdpSolutions).
    """
    mass = 0.0
    sols = []
    for p, blk in zip(probs, blocks):
        res, sol = hmin_cond(blk, dim_a, dim_b, tol=tol, max_dim=max_dim)
        mass += float(p) * 2.0 ** (-res.value)
        sols.append(sol)
    return EntropyResult(value=float(-np.log2(mass))), sols


def condition_on_classical(probs, masses) -> float:
    """Combine per-symbol collision masses: H2(A|QC) = -log sum_c p(c) m_c."""
    total = float(np.dot(np.asarray(probs, dtype=float), np.asarray(masses, dtype=float)))
    return float(-np.log2(total))
