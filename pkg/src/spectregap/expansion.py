"""Edge expansion of single cuts and exact minimization over all cuts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS
from .core import CapacityError, DegenerateError, DomainError, as_array
from .pf import PFData

BRUTE_FORCE = "brute_force"
DEFINITION_ZERO = "definition_zero"
SINGLE_CUT = "single_cut"


@dataclass(frozen=True)
class Cut:
    members: int  # bitmask, bit i set means index i is in S
    weight: float
    phi_S: float

    def indices(self) -> list[int]:
        return [i for i in range(self.members.bit_length()) if self.members >> i & 1]


@dataclass(frozen=True)
class ExpansionResult:
    phi: float
    argmin_cut: Cut | None
    method: str

    def as_dict(self) -> dict:
        cut = self.argmin_cut
        return {
            "phi": self.phi,
            "argmin_bitmask": None if cut is None else cut.members,
            "argmin_members": None if cut is None else cut.indices(),
            "method": self.method,
        }


def to_bitmask(S, n: int) -> int:
    if isinstance(S, Cut):
        mask = S.members
    elif isinstance(S, (int, np.integer)):
        mask = int(S)
    else:
        mask = 0
        for i in S:
            if not 0 <= i < n:
                raise DomainError(f"index {i} out of range")
            mask |= 1 << int(i)
    if mask <= 0 or mask >= (1 << n) - 1:
        raise DomainError("cut must be a proper nonempty subset")
    return mask


def _flow_matrix(R, pf: PFData) -> np.ndarray:
    if not pf.positive:
        raise DegenerateError("no positive PF pair; edge expansion is 0 by definition")
    return pf.u[:, None] * (as_array(R) / pf.r) * pf.v[None, :]


def phi_cut(R, pf: PFData, S) -> float:
    """Expansion of a single cut, with the smaller side's mass as denominator."""
    G = _flow_matrix(R, pf)
    n = G.shape[0]
    mask = to_bitmask(S, n)
    inside = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
    pi = pf.u * pf.v
    flow = G[np.ix_(inside, ~inside)].sum()
    return float(flow / min(pi[inside].sum(), pi[~inside].sum()))


def _subset_tables(G: np.ndarray, pi: np.ndarray):
    """For every S containing index 0: mass leaving S and the mass of S.

    Entry ``t`` describes ``S = {0} | {j : bit j-1 of t}``. Tables grow by
    doubling, one index at a time, so the work is linear in the table size.
    """
    n = G.shape[0]
    rows = G.sum(axis=1)
    sym = G + G.T
    internal = np.array([G[0, 0]])
    out_rows = np.array([rows[0]])
    weight = np.array([pi[0]])
    for k in range(1, n):
        touch = np.array([sym[0, k]])
        for j in range(1, k):
            touch = np.concatenate([touch, touch + sym[j, k]])
        internal = np.concatenate([internal, internal + G[k, k] + touch])
        out_rows = np.concatenate([out_rows, out_rows + rows[k]])
        weight = np.concatenate([weight, weight + pi[k]])
    return out_rows - internal, weight


def phi_exact(R, pf: PFData, n_limit: int = DEFAULTS.phi_n_limit) -> ExpansionResult:
    """Minimum cut expansion by enumerating the ``2^(n-1)`` cuts containing index 0.

    Each cut is compared with its complement, so the reported argmin is the
    side of mass at most one half; ties go to the smallest bitmask.
    """
    n = as_array(R).shape[0]
    if not pf.positive:
        return ExpansionResult(0.0, None, DEFINITION_ZERO)
    if n > n_limit:
        raise CapacityError(
            f"n={n} exceeds n_limit={n_limit}; use the certified bracket from bound_report"
        )
    if n < 2:
        raise DomainError("edge expansion needs n >= 2")
    G = _flow_matrix(R, pf)
    pi = pf.u * pf.v
    total = pi.sum()
    cut, weight = _subset_tables(G, pi)
    cut, weight = cut[:-1], weight[:-1]  # drop S = everything
    cut = np.maximum(cut, 0.0)
    denom = np.minimum(weight, total - weight)
    phis = cut / denom
    best = phis.min()
    tied = np.flatnonzero(phis <= best + 1e-12 * max(best, 1e-300))
    full = (1 << n) - 1
    best_mask, best_w = None, None
    for t in tied:
        mask = (int(t) << 1) | 1
        comp = full ^ mask
        w = float(weight[t])
        if abs(w - (total - w)) <= 1e-12:
            cand, cw = min(mask, comp), w
        elif w < total - w:
            cand, cw = mask, w
        else:
            cand, cw = comp, total - w
        if best_mask is None or cand < best_mask:
            best_mask, best_w = cand, cw
    return ExpansionResult(float(best), Cut(best_mask, best_w, float(best)), BRUTE_FORCE)


def best_single_cut(R, pf: PFData) -> ExpansionResult:
    """Cheapest singleton cut; an upper bound on phi usable at any n."""
    n = as_array(R).shape[0]
    if not pf.positive:
        return ExpansionResult(0.0, None, DEFINITION_ZERO)
    vals = [phi_cut(R, pf, 1 << i) for i in range(n)]
    i = int(np.argmin(vals))
    pi = pf.u * pf.v
    return ExpansionResult(vals[i], Cut(1 << i, float(pi[i]), vals[i]), SINGLE_CUT)


def eulerian_defect(R, pf: PFData) -> float:
    """Infinity norm of ``D_u R D_v 1 - D_v R^T D_u 1`` (R scaled to r = 1)."""
    G = pf.u[:, None] * (as_array(R) / pf.r) * pf.v[None, :]
    return float(np.abs(G.sum(axis=1) - G.sum(axis=0)).max())
