"""Schur factors, deflated nontrivial spectrum, and triangular power bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .config import DEFAULTS
from .core import ConvergenceError, DomainError, as_array, as_matrix, to_fractions, _integerize

PROJECTED = "projected_eig"
EXACT_NILPOTENT = "exact_nilpotent"


@dataclass(frozen=True, eq=False)
class SchurFactors:
    U: np.ndarray
    T: np.ndarray
    reconstruction_residual: float
    unitarity_residual: float


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Nontrivial spectrum of a balanced matrix.

    ``lambda2`` has maximal real part (ties resolved toward nonnegative
    imaginary part), ``lambda_m`` maximal modulus. ``method`` says whether the
    eigenvalues came from floating point or from an exact nilpotency check.
    """

    lambda2: complex
    lambda_m: complex
    sigma2: float
    spectral_gap: float
    nontrivial_eigs: np.ndarray
    deflation_residual: float
    singular_values: np.ndarray = field(repr=False)
    method: str = PROJECTED
    nilpotency_index: int | None = None

    def as_dict(self) -> dict:
        c = lambda z: [float(np.real(z)), float(np.imag(z))]
        return {
            "lambda2": c(self.lambda2),
            "lambda_m": c(self.lambda_m),
            "sigma2": self.sigma2,
            "spectral_gap": self.spectral_gap,
            "nontrivial_eigs": [c(z) for z in self.nontrivial_eigs],
            "deflation_residual": self.deflation_residual,
            "method": self.method,
            "nilpotency_index": self.nilpotency_index,
        }


def schur_decompose(M) -> SchurFactors:
    a = as_array(M)
    if not np.all(np.isfinite(a)):
        raise DomainError("non-finite entries")
    try:
        T, U = scipy.linalg.schur(a.astype(complex), output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(f"Schur decomposition failed: {exc}") from exc
    n = a.shape[0]
    recon = float(np.abs(a - U @ T @ U.conj().T).max())
    unit = float(np.abs(U @ U.conj().T - np.eye(n)).max())
    return SchurFactors(U, T, recon, unit)


def _householder_complement(w: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the complement of the unit vector ``w``."""
    n = w.shape[0]
    x = w.astype(float)
    alpha = -np.copysign(1.0, x[0])
    h = x.copy()
    h[0] -= alpha
    H = np.eye(n) - 2.0 * np.outer(h, h) / (h @ h)
    return H[:, 1:]


def _pick(vals: np.ndarray, key: np.ndarray) -> complex:
    top = key.max()
    tied = np.flatnonzero(key >= top - 1e-12 * max(1.0, abs(top)))
    # prefer nonnegative imaginary part, then larger real part
    best = max(tied, key=lambda i: (vals[i].imag >= -1e-15, vals[i].real, -abs(vals[i].imag)))
    return complex(vals[best])


def operator_norm(M) -> float:
    a = as_array(M)
    if a.shape[0] <= 256:
        return float(scipy.linalg.svdvals(a)[0])
    x = np.ones(a.shape[0])
    prev = 0.0
    for _ in range(10_000):
        y = a.T @ (a @ x)
        s = np.linalg.norm(y)
        x = y / s
        if abs(s - prev) <= 1e-14 * s:
            break
        prev = s
    return float(np.sqrt(s))


def spectral_summary(A, w=None, certify: bool | None = None) -> SpectralSummary:
    """Nontrivial eigenvalues of a balanced ``A`` with PF vector ``w``.

    The trivial direction is removed by orthogonal projection: with ``W`` an
    orthonormal basis of the complement of ``w``, the eigenvalues of
    ``W^T A W`` are exactly the other ``n - 1`` eigenvalues of ``A`` whenever
    ``A w = w = A^T w``.

    With ``certify`` (default: on for rational input that is doubly
    stochastic) ``A - J`` is tested for exact nilpotency; when it is
    nilpotent every nontrivial eigenvalue is exactly 0.
    """
    m = as_matrix(A)
    a = m.to_float()
    n = m.n
    if n < 2:
        raise DomainError("nontrivial spectrum needs n >= 2")
    if w is None:
        w = np.full(n, 1 / np.sqrt(n))
    w = np.asarray(w, dtype=float)
    w = w / np.linalg.norm(w)
    Wp = _householder_complement(w)
    C = Wp.T @ a @ Wp
    resid = max(
        float(np.abs(Wp.T @ (a @ w)).max()),
        float(np.abs((w @ a) @ Wp).max()),
        abs(float(w @ a @ w) - 1.0),
    )
    sv = scipy.linalg.svdvals(a)
    if certify is None:
        certify = m.is_rational and "doubly_stochastic" in m.tags
    idx = None
    if certify and "doubly_stochastic" in m.tags:
        idx = nilpotency_index(deflated_exact(m))
    if idx is not None:
        eigs = np.zeros(n - 1, dtype=complex)
        method = EXACT_NILPOTENT
    else:
        eigs = scipy.linalg.eigvals(C).astype(complex)
        method = PROJECTED
    lam2 = _pick(eigs, eigs.real)
    lamm = _pick(eigs, np.abs(eigs))
    return SpectralSummary(
        lambda2=lam2,
        lambda_m=lamm,
        sigma2=float(sv[1]),
        spectral_gap=1.0 - lam2.real,
        nontrivial_eigs=eigs,
        deflation_residual=resid,
        singular_values=sv,
        method=method,
        nilpotency_index=idx,
    )


def deflated_exact(A) -> np.ndarray:
    """``A - J`` as exact Fractions (float entries convert without rounding)."""
    F = to_fractions(as_matrix(A).entries)
    n = F.shape[0]
    return F - Fraction(1, n)


# ---------------------------------------------------------------------------
# exact nilpotency through modular images


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def _primes_below(limit: int):
    p = limit - 1 if limit % 2 == 0 else limit - 2
    while p > 2:
        if _is_prime(p):
            yield p
        p -= 2


class _ModImage:
    """Integer matrix reduced mod p, multiplied in float64.

    With entries below ``p`` and ``n p^2 < 2^53`` every dot product is an exact
    integer, so BLAS can be used without losing exactness.
    """

    def __init__(self, X: np.ndarray, p: int):
        self.p = p
        self.base = np.array([[int(x) % p for x in row] for row in X], dtype=float)

    def mul(self, x, y):
        return np.fmod(x @ y, self.p)

    def power(self, k: int):
        result, base = None, self.base
        while k:
            if k & 1:
                result = base if result is None else self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result


def nilpotency_index(B) -> int | None:
    """Smallest ``k`` with ``B^k = 0`` exactly, or ``None`` if ``B`` is not nilpotent.

    ``B`` is a Fraction array. It is scaled to an integer matrix ``X``. One
    prime finds the candidate index (nilpotent over the integers implies
    nilpotent mod p). Then ``X^k = 0`` is confirmed mod enough primes that
    their product exceeds twice the entry bound ``n^(k-1) max|X|^k``, which
    forces exact zero by the Chinese remainder theorem.
    """
    B = to_fractions(B)
    n = B.shape[0]
    X, _ = _integerize(B)
    mx = max((abs(int(x)) for x in X.flat), default=0)
    if mx == 0:
        return 1
    limit = int(math.isqrt(2**53 // n)) - 1
    primes = _primes_below(min(limit, 2**26))
    p0 = next(primes)
    img = _ModImage(X, p0)
    P = img.base
    k0 = None
    for k in range(1, n + 1):
        if not P.any():
            k0 = k
            break
        P = img.mul(P, img.base)
    if k0 is None:
        return None
    for k in range(k0, n + 1):
        if _zero_by_crt(X, k, n, mx, p0, primes):
            return k
    return None


def _zero_by_crt(X, k, n, mx, p0, primes) -> bool:
    need = (k - 1) * math.log2(n) + k * math.log2(mx) + 1
    have = math.log2(p0)
    if _ModImage(X, p0).power(k).any():
        return False
    while have <= need:
        p = next(primes)
        if _ModImage(X, p).power(k).any():
            return False
        have += math.log2(p)
    return True


# ---------------------------------------------------------------------------
# triangular power bounds


def triangular_power_bound(n: int, sigma: float, beta: float, k: int) -> float:
    """``n sigma^n C(k+n, n) beta^(k-n)``, evaluated in log space."""
    if n < 1 or k < 1:
        raise DomainError("n and k must be positive")
    if sigma < 1:
        raise DomainError("sigma must be at least 1")
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    if beta == 0:
        if k > n:
            return 0.0
        if k < n:
            return math.inf
    log_binom = math.lgamma(k + n + 1) - math.lgamma(n + 1) - math.lgamma(k + 1)
    log_b = 0.0 if k == n else (k - n) * math.log(beta)
    val = math.log(n) + n * math.log(sigma) + log_binom + log_b
    return math.exp(val) if val < 709 else math.inf


def triangular_mix_power(n: int, alpha: float, eps: float) -> int:
    """Power ``k`` at which ``||T^k|| <= eps`` for ``||T|| <= 1``, ``|T_ii| <= alpha``."""
    if not 0 <= alpha < 1:
        raise DomainError("alpha must lie in [0, 1)")
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    return math.ceil((3.51 * n + 1.385 * math.log(n / eps)) / (1 - alpha))


def triangular_mix_power_loose(n: int, alpha: float, eps: float) -> int:
    """Rounded-up constants ``(4n + 2 ln(n/eps)) / (1 - alpha)``."""
    if not 0 <= alpha < 1:
        raise DomainError("alpha must lie in [0, 1)")
    return math.ceil((4 * n + 2 * math.log(n / eps)) / (1 - alpha))
