"""Scalar rate functions, their inverses, and the derived bound calculators.

Everything here is pure real arithmetic: the sampling rate functions R_d and
C_d, the measurement-uncertainty rates gamma and gamma_d, the finite-n
sampling bounds with their smooth-min-entropy variants, the upper (converse)
rates, the weak-string-erasure security parameters, and the random-access
code bounds.  Logs are base 2 and entropies are in bits throughout.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from math import comb, inf, log2

import numpy as np

from .errors import OutOfDomain

BISECTION_ITERS = 200
INVERSE_TOL = 1e-12


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise OutOfDomain(f"binary entropy argument {x} outside [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * log2(x) - (1.0 - x) * log2(1.0 - x))


def f_d(d: int, alpha: float) -> float:
    """h(a) + a log(d^2-1) - log d, increasing on [0, (d^2-1)/d^2]."""
    amax = (d * d - 1) / (d * d)
    if not 0.0 <= alpha <= amax + 1e-15:
        raise OutOfDomain(f"alpha {alpha} outside [0, {amax}]")
    return binary_entropy(min(alpha, 1.0)) + alpha * log2(d * d - 1) - log2(d)


def c_d(d: int, alpha: float) -> float:
    """h(a) + a log(d-1), increasing on [0, (d-1)/d]."""
    amax = (d - 1) / d
    if not 0.0 <= alpha <= amax + 1e-15:
        raise OutOfDomain(f"alpha {alpha} outside [0, {amax}]")
    return binary_entropy(min(alpha, 1.0)) + alpha * (log2(d - 1) if d > 2 else 0.0)


def g(alpha: float) -> float:
    """h(a) + a - 1, increasing on [0, 1/2]."""
    if not 0.0 <= alpha <= 0.5 + 1e-15:
        raise OutOfDomain(f"alpha {alpha} outside [0, 1/2]")
    return binary_entropy(min(alpha, 0.5)) + alpha - 1.0


def _bisect_inverse(fn, lo: float, hi: float, target: float) -> float:
    flo, fhi = fn(lo), fn(hi)
    if not flo - 1e-12 <= target <= fhi + 1e-12:
        raise OutOfDomain(f"target {target} outside [{flo}, {fhi}]")
    target = min(max(target, flo), fhi)
    # the range endpoints can sit at flat extrema where bisection only
    # resolves the preimage to sqrt(ulp); return the boundary exactly
    if target >= fhi:
        return hi
    if target <= flo:
        return lo
    for _ in range(BISECTION_ITERS):
        mid = 0.5 * (lo + hi)
        if fn(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return 0.5 * (lo + hi)


def f_d_inv(d: int, x: float) -> float:
    return _bisect_inverse(lambda a: f_d(d, a), 0.0, (d * d - 1) / (d * d), x)


def c_d_inv(d: int, x: float) -> float:
    return _bisect_inverse(lambda a: c_d(d, a), 0.0, (d - 1) / d, x)


def g_inv(x: float) -> float:
    return _bisect_inverse(g, 0.0, 0.5, x)


def rate_qq(d: int, h2: float) -> float:
    """R_d(h2) = -log(d - d f_d^{-1}(h2))."""
    return -log2(d - d * f_d_inv(d, h2))


def rate_cq(d: int, h2: float) -> float:
    """C_d(h2) = -log(1 - c_d^{-1}(h2))."""
    return -log2(1.0 - c_d_inv(d, h2))


def gamma_bb84(h2: float) -> float:
    """Uncertainty rate for random standard/Hadamard measurements."""
    if not -1.0 - 1e-12 <= h2 <= 1.0 + 1e-12:
        raise OutOfDomain(f"h2 {h2} outside [-1, 1]")
    h2 = min(max(h2, -1.0), 1.0)
    if h2 >= 0.5:
        return h2
    return g_inv(h2)


def gamma_mub(d: int, h2: float) -> float:
    """Uncertainty rate for random measurements over all d+1 unbiased bases.

    The lower branch carries a log(d+1) factor so the function is continuous
    at the branch point h2 = ((d-1)/d) log(d+1).
    """
    ld = log2(d)
    if not -ld - 1e-12 <= h2 <= ld + 1e-12:
        raise OutOfDomain(f"h2 {h2} outside [{-ld}, {ld}]")
    h2 = min(max(h2, -ld), ld)
    branch = (d - 1) / d * log2(d + 1)
    if h2 >= branch:
        return h2
    return f_d_inv(d, h2) * log2(d + 1)


@dataclass
class BoundResult:
    value: float
    warnings: tuple = ()


def sampling_bound_qq(n: int, k: int, d: int, h2: float) -> BoundResult:
    """Upper bound on the subset-averaged collision mass, 2^{-kR_d + log(n^2+1)}."""
    warns = []
    if n <= d * d:
        warns.append(f"hypothesis n > d^2 not met (n={n}, d={d})")
    if k == 0:
        warns.append("k = 0 is degenerate; bound is the trivial n^2+1")
        return BoundResult(float(n * n + 1), tuple(warns))
    return BoundResult(2.0 ** (-k * rate_qq(d, h2) + log2(n * n + 1)), tuple(warns))


def sampling_bound_cq(n: int, k: int, d: int, h2: float) -> BoundResult:
    warns = []
    if n <= d:
        warns.append(f"hypothesis n > d not met (n={n}, d={d})")
    if k == 0:
        warns.append("k = 0 is degenerate; bound is the trivial n^2+1")
        return BoundResult(float(n * n + 1), tuple(warns))
    return BoundResult(2.0 ** (-k * rate_cq(d, h2) + log2(n * n + 1)), tuple(warns))


def sampling_bound_qq_smooth(n: int, k: int, d: int, hmin: float, eps: float) -> BoundResult:
    """Smooth min-entropy lower bound, in bits: kR_d - log(n^2+1) - log(2/eps^2)."""
    if not 0.0 < eps <= 1.0:
        raise OutOfDomain(f"eps {eps} outside (0, 1]")
    base = sampling_bound_qq(n, k, d, hmin)
    return BoundResult(k * rate_qq(d, hmin) - log2(n * n + 1) - log2(2.0 / eps ** 2),
                       base.warnings)


def sampling_bound_cq_smooth(n: int, k: int, d: int, hmin: float, eps: float) -> BoundResult:
    if not 0.0 < eps <= 1.0:
        raise OutOfDomain(f"eps {eps} outside (0, 1]")
    base = sampling_bound_cq(n, k, d, hmin)
    return BoundResult(k * rate_cq(d, hmin) - log2(n * n + 1) - log2(2.0 / eps ** 2),
                       base.warnings)


def upper_rate_qq(d: int, h2: float) -> float:
    """Converse rate -log(d - 2d f_d^{-1}(h2)); +inf once the argument hits 0."""
    arg = d - 2.0 * d * f_d_inv(d, h2)
    return -log2(arg) if arg > 0.0 else inf


def upper_rate_cq(d: int, h2: float) -> float:
    arg = 1.0 - 2.0 * c_d_inv(d, h2)
    return -log2(arg) if arg > 0.0 else inf


def wse_lambda_nsm(n: int, eta: float) -> float:
    """Security rate 1/2 (gamma(-1 + log(1/eta)/n) - 1/n) for noisy storage
    retaining a fraction eta of channel uses."""
    if not 0.0 < eta < 1.0:
        raise OutOfDomain(f"eta {eta} outside (0, 1)")
    arg = min(-1.0 + log2(1.0 / eta) / n, 1.0)
    return 0.5 * (gamma_bb84(arg) - 1.0 / n)


def wse_lambda_bqsm(n: int, q: float) -> float:
    """Security rate 1/2 (gamma(-q/n) - 1/n) against q stored qubits."""
    if not 0.0 <= q <= n:
        raise OutOfDomain(f"q {q} outside [0, {n}]")
    return 0.5 * (gamma_bb84(-q / n) - 1.0 / n)


def rac_quantum_bound(n: int, m: int, k: int, d: int = 2) -> BoundResult:
    """Fidelity-squared bound for recovering any k of n encoded qudits from
    m qudits of storage."""
    warns = []
    if n <= d * d:
        warns.append(f"hypothesis n > d^2 not met (n={n}, d={d})")
    if not 0 <= m <= n or not 1 <= k <= n:
        raise OutOfDomain(f"need 0 <= m <= n and 1 <= k <= n, got m={m}, k={k}")
    exponent = (-0.5 * k * (rate_qq(d, -m / n * log2(d)) + log2(d))
                + 0.5 * log2(n * n + 1))
    return BoundResult(min(1.0, 2.0 ** exponent), tuple(warns))


def rac_classical_bound(n: int, m: int, k: int) -> BoundResult:
    """Guessing-probability bound for recovering any k of n encoded bits from
    m bits of storage."""
    warns = []
    if n <= 2:
        warns.append(f"hypothesis n > d not met (n={n})")
    if not 0 <= m <= n or not 1 <= k <= n:
        raise OutOfDomain(f"need 0 <= m <= n and 1 <= k <= n, got m={m}, k={k}")
    exponent = -k * rate_cq(2, 1.0 - m / n) + log2(n * n + 1)
    return BoundResult(min(1.0, 2.0 ** (0.5 * exponent)), tuple(warns))


# ---------------------------------------------------------------------------
# appendix combinatorics (used by the verification harness)


def sum_binomial_lemma_holds(n: int, a: int, ell: int) -> bool:
    """sum_{k<=ell} C(n,k) a^k <= 2^{n h(ell/n)} a^ell for ell <= a/(a+1) n."""
    if ell > a / (a + 1) * n:
        raise OutOfDomain(f"ell {ell} > {a / (a + 1) * n}")
    lhs = sum(comb(n, k) * a ** k for k in range(ell + 1))
    rhs = 2.0 ** (n * binary_entropy(ell / n)) * a ** ell
    return lhs <= rhs * (1 + 1e-12)


def binomial_sum_lemma_holds(n: int, k: int, d: int, l0: int) -> bool:
    """sum_{l<=l0} C(n-k,l)(d^2-1)^l <= n^2 C(n,l0)(d^2-1)^{l0}
    max((n-l0-1)/n, 1/d^2)^k, for l0 <= (d^2-1)/d^2 n and n > d^2."""
    if n <= d * d or l0 > (d * d - 1) / (d * d) * n:
        raise OutOfDomain(f"hypotheses fail for n={n}, d={d}, l0={l0}")
    a = d * d - 1
    lhs = sum(comb(n - k, ell) * a ** ell for ell in range(l0 + 1))
    rhs = (n * n * comb(n, l0) * a ** l0
           * max((n - l0 - 1) / n, 1.0 / (d * d)) ** k)
    return lhs <= rhs * (1 + 1e-12)


def estimate_gamma_holds(x: float) -> bool:
    """gamma(-1+x) >= x / (10 log(1/x)) for x in (0, 1/3]."""
    if not 0.0 < x <= 1.0 / 3.0:
        raise OutOfDomain(f"x {x} outside (0, 1/3]")
    return gamma_bb84(-1.0 + x) >= x / (10.0 * log2(1.0 / x)) - 1e-12


# ---------------------------------------------------------------------------
# curves


@dataclass
class RateCurve:
    function_id: str
    d: int
    x: np.ndarray
    y: np.ndarray
    monotone: bool = field(init=False)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        finite = np.isfinite(self.y)
        self.monotone = bool(np.all(np.diff(self.y[finite]) >= -1e-12))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "function", "d"])
            for xi, yi in zip(self.x, self.y):
                if np.isfinite(yi):
                    w.writerow([f"{xi:.12g}", f"{yi:.12g}", self.function_id, self.d])


CURVE_IDS = ("R", "C", "gamma", "gamma_d", "upper_qq", "upper_cq")


def rate_curve(function_id: str, d: int = 2, grid: int = 512) -> RateCurve:
    """Sample a named rate function across its full domain."""
    ld = log2(d)
    if function_id == "R":
        xs = np.linspace(-ld, ld, grid)
        ys = [rate_qq(d, x) for x in xs]
    elif function_id == "C":
        xs = np.linspace(0.0, ld, grid)
        ys = [rate_cq(d, x) for x in xs]
    elif function_id == "gamma":
        xs = np.linspace(-1.0, 1.0, grid)
        ys = [gamma_bb84(x) for x in xs]
    elif function_id == "gamma_d":
        xs = np.linspace(-ld, ld, grid)
        ys = [gamma_mub(d, x) for x in xs]
    elif function_id == "upper_qq":
        xs = np.linspace(-ld, ld, grid)
        ys = [upper_rate_qq(d, x) for x in xs]
    elif function_id == "upper_cq":
        xs = np.linspace(0.0, ld, grid)
        ys = [upper_rate_cq(d, x) for x in xs]
    else:
        raise OutOfDomain(f"unknown function id {function_id!r}")
    return RateCurve(function_id=function_id, d=d, x=xs, y=np.array(ys))
