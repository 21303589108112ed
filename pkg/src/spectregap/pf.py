"""Perron-Frobenius structure of nonnegative matrices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from .config import DEFAULTS
from .core import (
    ConvergenceError,
    DegenerateError,
    DomainError,
    NonnegMatrix,
    as_array,
    as_matrix,
)

IRREDUCIBLE = "irreducible"
POSITIVE_PAIR = "reducible_with_positive_pair"
DEGENERATE = "reducible_degenerate"


@dataclass(frozen=True)
class ComponentStructure:
    components: tuple[tuple[int, ...], ...]
    condensation_edges: frozenset
    per_component_pf: tuple[float, ...]

    @property
    def count(self) -> int:
        return len(self.components)


@dataclass(frozen=True, eq=False)
class PFData:
    """PF eigenvalue with left (``u``) and right (``v``) eigenvectors.

    ``w = sqrt(u * v)`` and ``kappa = min(u * v)``. When ``normalization`` is set,
    ``<u, v> = 1`` and ``||u|| = ||v||``.
    """

    r: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    kappa: float
    normalization: bool
    classification: str
    structure: ComponentStructure
    residual: float = 0.0

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def positive(self) -> bool:
        return self.classification != DEGENERATE

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "u": self.u.tolist(),
            "v": self.v.tolist(),
            "w": self.w.tolist(),
            "kappa": self.kappa,
            "normalization": self.normalization,
            "classification": self.classification,
            "residual": self.residual,
        }


def _spectral_radius(block: np.ndarray) -> float:
    if block.shape[0] == 1:
        return float(block[0, 0])
    return float(np.max(np.abs(scipy.linalg.eigvals(block))))


def strong_components(R) -> ComponentStructure:
    a = as_array(R)
    n = a.shape[0]
    _, labels = connected_components(a > 0, directed=True, connection="strong")
    # relabel by smallest member so the output order is deterministic
    order = {}
    for i in range(n):
        order.setdefault(labels[i], len(order))
    lab = np.array([order[x] for x in labels])
    comps = tuple(tuple(int(i) for i in np.flatnonzero(lab == c)) for c in range(len(order)))
    rows, cols = np.nonzero(a > 0)
    edges = frozenset((int(lab[i]), int(lab[j])) for i, j in zip(rows, cols) if lab[i] != lab[j])
    pfs = tuple(_spectral_radius(a[np.ix_(c, c)]) for c in comps)
    return ComponentStructure(comps, edges, pfs)


def _normalize_pair(u: np.ndarray, v: np.ndarray, target: float = 1.0):
    ip = float(u @ v)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    s = np.sqrt(target * nv / (nu * ip))
    t = np.sqrt(target * nu / (nv * ip))
    return u * s, v * t


def _residual(a: np.ndarray, r: float, u: np.ndarray, v: np.ndarray) -> float:
    scale = max(r, 1e-300)
    rv = np.abs(a @ v - r * v).max() / (scale * np.abs(v).max())
    ru = np.abs(a.T @ u - r * u).max() / (scale * np.abs(u).max())
    return float(max(rv, ru))


def _dense_pf(a: np.ndarray):
    vals, vl, vr = scipy.linalg.eig(a, left=True, right=True)
    i = int(np.argmax(vals.real))
    r = float(vals[i].real)
    v = np.abs(vr[:, i].real)
    u = np.abs(vl[:, i].real)
    return r, u, v


def _irreducible_pf(a: np.ndarray, tol: float, max_iter: int):
    """Positive PF pair of an irreducible block.

    A dense eigensolver gives the starting point; power iteration on
    ``(I + R/r)/2`` then polishes both vectors. The half-lazy shift removes
    periodicity without moving the eigenvectors.
    """
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0]), np.ones(1), np.ones(1), 0.0
    r, u, v = _dense_pf(a)
    if r <= 0:
        raise DegenerateError("irreducible block with zero PF eigenvalue")
    best = _residual(a, r, u, v)
    stall = 0
    for _ in range(max_iter):
        if best <= tol:
            break
        v_new = 0.5 * (v + a @ v / r)
        u_new = 0.5 * (u + a.T @ u / r)
        v_new /= np.abs(v_new).max()
        u_new /= np.abs(u_new).max()
        r_new = float(u_new @ a @ v_new / (u_new @ v_new))
        res = _residual(a, r_new, u_new, v_new)
        u, v, r = u_new, v_new, r_new
        if res < best * (1 - 1e-3):
            best, stall = res, 0
        else:
            best = min(best, res)
            stall += 1
            if stall > 50:
                break
    if best > max(tol, 1e-10):
        raise ConvergenceError(f"PF iteration stalled at residual {best:.3e}", best)
    if np.any(v <= 0) or np.any(u <= 0):
        raise ConvergenceError("PF vector of an irreducible block is not positive", best)
    return r, u, v, best


def pf_data(R, tol: float = DEFAULTS.pf_residual_tol, max_iter: int = DEFAULTS.pf_max_iter) -> PFData:
    """Classify ``R`` and compute its PF eigenvalue and vectors.

    The classification is combinatorial: strong components of the support
    graph plus the PF value of each diagonal block, never eigenvector zeros.
    """
    m = as_matrix(R)
    a = m.to_float()
    n = m.n
    cs = strong_components(a)
    rmax = max(cs.per_component_pf)
    rel = DEFAULTS.pf_block_rel_tol
    same_r = all(abs(p - rmax) <= rel * rmax for p in cs.per_component_pf)

    if rmax <= 0 or cs.condensation_edges or not same_r:
        return _degenerate_pf(a, cs)

    if "doubly_stochastic" in m.tags:
        # exact answer, avoids eigensolver noise in kappa = 1/n
        u = np.full(n, 1 / np.sqrt(n))
        cls = IRREDUCIBLE if cs.count == 1 else POSITIVE_PAIR
        return _assemble(1.0, u, u.copy(), cls, cs, _residual(a, 1.0, u, u))

    if cs.count == 1:
        r, u, v, res = _irreducible_pf(a, tol, max_iter)
        u, v = _normalize_pair(u, v)
        return _assemble(r, u, v, IRREDUCIBLE, cs, res)

    u = np.zeros(n)
    v = np.zeros(n)
    worst = 0.0
    for comp in cs.components:
        idx = np.array(comp)
        block = a[np.ix_(idx, idx)]
        if block.shape[0] == 1:
            ub = vb = np.ones(1)
        else:
            _, ub, vb, res = _irreducible_pf(block, tol, max_iter)
            worst = max(worst, res)
        ub, vb = _normalize_pair(ub, vb, len(comp) / n)
        u[idx] = ub
        v[idx] = vb
    return _assemble(rmax, u, v, POSITIVE_PAIR, cs, max(worst, _residual(a, rmax, u, v)))


def _assemble(r, u, v, cls, cs, res) -> PFData:
    uv = u * v
    return PFData(
        r=float(r),
        u=u,
        v=v,
        w=np.sqrt(uv),
        kappa=float(uv.min()),
        normalization=True,
        classification=cls,
        structure=cs,
        residual=float(res),
    )


def _degenerate_pf(a: np.ndarray, cs: ComponentStructure) -> PFData:
    n = a.shape[0]
    r, u, v = _dense_pf(a)
    r = max(r, 0.0)
    zero = DEFAULTS.pf_zero_rel_tol
    u[u < zero * u.max()] = 0.0
    v[v < zero * v.max()] = 0.0
    ip = float(u @ v)
    normalized = ip > 0
    if normalized:
        u, v = _normalize_pair(u, v)
    else:
        u = u / np.linalg.norm(u)
        v = v / np.linalg.norm(v)
    uv = u * v
    res = _residual(a, r, u, v) if r > 0 else 0.0
    return PFData(r, u, v, np.sqrt(uv), float(uv.min()), normalized, DEGENERATE, cs, res)


def balance(R, pf: PFData) -> tuple[NonnegMatrix, np.ndarray]:
    """Diagonal similarity making ``w`` both the left and right PF vector.

    Returns ``(A, w)`` with ``A = D_u^{1/2} D_v^{-1/2} (R/r) D_u^{-1/2} D_v^{1/2}``.
    """
    if not pf.positive or np.any(pf.u <= 0) or np.any(pf.v <= 0):
        raise DegenerateError("balancing needs strictly positive u and v")
    if pf.r <= 0:
        raise DegenerateError("PF eigenvalue is 0")
    m = as_matrix(R)
    if np.array_equal(pf.u, pf.v):
        if m.is_rational and pf.r == 1:
            return m, pf.w.copy()
        return NonnegMatrix(m.to_float() / pf.r), pf.w.copy()
    s = np.sqrt(pf.u / pf.v)
    A = s[:, None] * (m.to_float() / pf.r) / s[None, :]
    return NonnegMatrix(A), pf.w.copy()


def lazify(A, p=Fraction(1, 2)) -> NonnegMatrix:
    """``p I + (1 - p) A``."""
    if not 0 <= p <= 1:
        raise DomainError("p must lie in [0, 1]")
    m = as_matrix(A)
    if m.is_rational:
        p = Fraction(p)
        out = m.entries * (1 - p)
        for i in range(m.n):
            out[i, i] += p
        return NonnegMatrix(out, "rational")
    p = float(p)
    return NonnegMatrix(p * np.eye(m.n) + (1 - p) * m.to_float())


def additive_symmetrize(A) -> NonnegMatrix:
    m = as_matrix(A)
    if m.is_rational:
        return NonnegMatrix((m.entries + m.entries.T) / 2, "rational")
    a = m.to_float()
    return NonnegMatrix((a + a.T) / 2)
