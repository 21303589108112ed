"""Explicit matrix families: the low-expansion zero-spectrum matrix and comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction

import numpy as np

from .core import CapacityError, DomainError, NonnegMatrix

FLOAT = "float"
RATIONAL = "rational"


@dataclass(frozen=True)
class ConstructionCoefficients:
    n: int
    m: object
    a: object
    b: object
    c: object
    d: object
    e: object
    f: object
    r: object
    alpha: object
    beta: object
    mode: str

    def identities(self) -> dict:
        """Residuals of the row-sum and unitarity identities (exactly 0 in rational mode)."""
        n, m = self.n, self.m
        a, b, c, d, e, f = self.a, self.b, self.c, self.d, self.e, self.f
        al, be = self.alpha, self.beta
        inv_n = Fraction(1, n) if self.mode == RATIONAL else 1 / n
        inv_m = 1 / m
        return {
            "row_first": a + b - 1,
            "row_middle": c + d + (n - 3) * e - 1,
            "row_last": b + f + (n - 2) * c - 1,
            "unit_diag": inv_n + al * al + (n - 2) * be * be - 1,
            "unit_first": inv_m + al + (n - 2) * be,
            "unit_off": inv_n + 2 * al * be + (n - 3) * be * be,
        }

    def as_dict(self) -> dict:
        out = {}
        for fld in fields(self):
            v = getattr(self, fld.name)
            out[fld.name] = str(v) if isinstance(v, Fraction) else v
        return out


def _root(n: int, mode: str):
    if mode == RATIONAL:
        m = math.isqrt(n)
        if m * m != n:
            raise DomainError(f"rational mode needs a perfect square n, got {n}")
        return Fraction(m)
    if mode != FLOAT:
        raise DomainError(f"unknown mode {mode!r}")
    return math.sqrt(n)


def construction_coefficients(n: int, mode: str = FLOAT) -> ConstructionCoefficients:
    if n < 4:
        raise DomainError("the construction needs n >= 4")
    m = _root(n, mode)
    one = Fraction(1) if mode == RATIONAL else 1.0
    a = (m * m + m - 1) / (m * (m + 2))
    b = (m + 1) / (m * (m + 2))
    c = one / (m * (m + 1))
    d = (m**3 + 2 * m * m + m + 1) / (m * (m + 1) * (m + 2))
    e = one / (m * (m + 1) * (m + 2))
    f = (2 * m + 3) / (m * (m + 1) * (m + 2))
    r = 1 - one / (m + 2)
    alpha = -1 + one / (m * (m + 1))
    beta = one / (m * (m + 1))
    return ConstructionCoefficients(n, m, a, b, c, d, e, f, r, alpha, beta, mode)


def _grid(n: int, mode: str) -> np.ndarray:
    if mode == RATIONAL:
        g = np.empty((n, n), dtype=object)
        g[:, :] = Fraction(0)
        return g
    return np.zeros((n, n))


def _rogue_entries(co: ConstructionCoefficients) -> np.ndarray:
    n = co.n
    g = _grid(n, co.mode)
    g[0, 0], g[0, 1] = co.a, co.b
    for i in range(1, n - 1):
        g[i, 1] = co.c
        for j in range(2, n):
            g[i, j] = co.e
        g[i, i + 1] = co.d
    g[n - 1, 0], g[n - 1, 1] = co.b, co.f
    for j in range(2, n):
        g[n - 1, j] = co.c
    return g


def rogue_matrix(n: int, mode: str = FLOAT) -> NonnegMatrix:
    """Doubly stochastic ``A_n`` whose nontrivial eigenvalues all vanish
    while its edge expansion is of order ``1/sqrt(n)``."""
    co = construction_coefficients(n, mode)
    return NonnegMatrix(_rogue_entries(co), mode)


def schur_witness(n: int, mode: str = FLOAT) -> tuple[np.ndarray, np.ndarray]:
    """Real orthogonal ``U`` and upper triangular ``T`` with ``A_n = U T U^T``.

    ``U`` is symmetric: first row and column ``1/sqrt(n)``, then ``alpha`` on
    the trailing diagonal and ``beta`` elsewhere. ``T`` has ``T[0,0] = 1`` and
    ``r`` on the superdiagonal of rows ``1..n-2``.
    """
    co = construction_coefficients(n, mode)
    U = _grid(n, mode)
    T = _grid(n, mode)
    inv_m = 1 / co.m
    for i in range(n):
        for j in range(n):
            if i == 0 or j == 0:
                U[i, j] = inv_m
            elif i == j:
                U[i, j] = co.alpha
            else:
                U[i, j] = co.beta
    T[0, 0] = Fraction(1) if mode == RATIONAL else 1.0
    for i in range(1, n - 1):
        T[i, i + 1] = co.r
    return U, T


def perturbed_rogue(n: int, mode: str = FLOAT) -> NonnegMatrix:
    """``A_n`` with the mass ``b`` moved so that vertex 0 becomes absorbing."""
    co = construction_coefficients(n, mode)
    g = _rogue_entries(co)
    g[0, 0] = co.a + co.b
    g[0, 1] = 0 * co.b
    g[n - 1, 0] = 0 * co.b
    g[n - 1, 1] = co.f + co.b
    return NonnegMatrix(g, mode)


def de_bruijn(k: int, mode: str = FLOAT) -> NonnegMatrix:
    """Walk on binary strings of length ``k``: shift left, append a uniform bit.

    Vertex ``v`` reads with its first symbol as the most significant bit.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    if k > 20:
        raise CapacityError("de Bruijn family capped at n = 2^20")
    n = 1 << k
    g = _grid(n, mode)
    half = Fraction(1, 2) if mode == RATIONAL else 0.5
    for v in range(n):
        base = (v << 1) & (n - 1)
        g[v, base] += half
        g[v, base | 1] += half
    return NonnegMatrix(g, mode)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    return all(p % q for q in range(3, math.isqrt(p) + 1, 2))


def klawe_vazirani(p: int, mode: str = FLOAT) -> NonnegMatrix:
    """Walk on ``Z/p`` moving to ``v + 1`` or ``2v`` with probability 1/2 each."""
    if p < 3 or not is_prime(p):
        raise DomainError(f"p must be an odd prime, got {p}")
    g = _grid(p, mode)
    half = Fraction(1, 2) if mode == RATIONAL else 0.5
    for v in range(p):
        g[v, (v + 1) % p] += half
        g[v, (2 * v) % p] += half
    return NonnegMatrix(g, mode)
