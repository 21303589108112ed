"""Mixing times in the u-weighted l1 sense, their bounds, and canonical paths."""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import InequalityRecord, check, phi_bracket
from .config import DEFAULTS
from .core import DomainError, FormatError, NonnegMatrix, as_array, as_matrix
from .pf import PFData, additive_symmetrize, balance, pf_data
from .spectral import spectral_summary


def _check_eps(eps):
    if not 0 < eps < 0.5:
        raise DomainError("eps must lie in (0, 1/2)")


def mixing_residual(P: np.ndarray, pf: PFData) -> float:
    """``max_i ||D_u (P - v u^T) e_i||_1 / u_i``: the worst start is a basis vector."""
    E = P - np.outer(pf.v, pf.u)
    return float(((pf.u @ np.abs(E)) / pf.u).max())


def mixing_time(R, pf: PFData | None = None, eps: float = DEFAULTS.eps,
                tau_max: int = DEFAULTS.tau_max) -> int | None:
    """Smallest ``tau`` whose residual is at most ``eps``; ``None`` when ``tau_max`` is hit.

    Powers ``1, 2, 4, ...`` locate a qualifying power by squaring, then an
    upward scan from 1 returns the first qualifying ``tau`` (no monotonicity
    assumed).
    """
    _check_eps(eps)
    pf = pf or pf_data(R)
    if not pf.positive or np.any(pf.u <= 0):
        return None
    P = as_array(R) / pf.r
    Q, tau = P, 1
    while mixing_residual(Q, pf) > eps:
        if 2 * tau > tau_max:
            return None
        Q, tau = Q @ Q, 2 * tau
    Q = P
    for t in range(1, tau + 1):
        if mixing_residual(Q, pf) <= eps:
            return t
        Q = Q @ P
    return tau


def matrix_exponential(M, t: float, tol: float = DEFAULTS.expm_tol) -> np.ndarray:
    """``exp(t (M - I))`` as ``e^{-t} exp(t M)`` by scaling and squaring.

    The factor ``e^{-h}`` is folded into each scaled block so nothing overflows
    for large ``t``; every series term is nonnegative for nonnegative ``M``.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    a = as_array(M)
    n = a.shape[0]
    if t == 0:
        return np.eye(n)
    norm = np.abs(a).sum(axis=0).max() * t
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    h = t / 2**s
    X = h * a
    term = np.eye(n)
    total = np.eye(n)
    for i in range(1, 60):
        term = term @ X / i
        total += term
        if np.abs(term).max() <= tol * np.abs(total).max():
            break
    total *= math.exp(-h)
    for _ in range(s):
        total = total @ total
    total[(total < 0) & (total > -1e-14)] = 0.0
    return total


def continuous_mixing_time(R, pf: PFData | None = None, eps: float = DEFAULTS.eps,
                           t_max: float = DEFAULTS.t_max,
                           rel: float = DEFAULTS.bisection_rel) -> float | None:
    """Smallest ``t`` (to relative ``rel``) where ``exp(t (R - I))`` meets the criterion.

    Returns the right end of the final bisection interval, which always
    satisfies the criterion; ``None`` when ``t_max`` is exceeded.
    """
    _check_eps(eps)
    pf = pf or pf_data(R)
    if not pf.positive or np.any(pf.u <= 0):
        return None
    P = as_array(R) / pf.r
    ok = lambda t: mixing_residual(matrix_exponential(P, t), pf) <= eps
    lo, hi = 0.0, 1.0
    while not ok(hi):
        if hi > t_max:
            return None
        lo, hi = hi, 2 * hi
    while hi - lo > rel * hi:
        mid = (lo + hi) / 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True, eq=False)
class MixReport:
    n: int
    epsilon: float
    tau: int | None
    phi_lo: float
    phi_hi: float
    kappa: float
    gap: float
    sigma2: float
    lower_phi: float
    upper_phi: float
    lower_lambda: float
    upper_lambda: float
    upper_sigma: dict
    tau_sym: int | None
    sym_lower: float
    sym_upper: float
    records: dict = field(default_factory=dict)

    @property
    def diverged(self) -> bool:
        return self.tau is None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records.values())

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "tau": self.tau,
            "diverged": self.diverged,
            "phi_bracket": [self.phi_lo, self.phi_hi],
            "kappa": self.kappa,
            "gap": self.gap,
            "sigma2": self.sigma2,
            "lower_phi": self.lower_phi,
            "upper_phi": self.upper_phi,
            "lower_lambda": self.lower_lambda,
            "upper_lambda": self.upper_lambda,
            "upper_sigma": {str(c): v for c, v in self.upper_sigma.items()},
            "tau_sym": self.tau_sym,
            "sym_lower": self.sym_lower,
            "sym_upper": self.sym_upper,
            "records": {k: r.as_dict() for k, r in self.records.items()},
        }


def _safe_div(a, b):
    return a / b if b > 0 else math.inf


def _bracketed(name, lhs_sure, rhs_sure, lhs_weak, rhs_weak) -> InequalityRecord:
    # "sure" uses the phi endpoint that makes the bound hardest to meet
    sure = check(name, lhs_sure, rhs_sure)
    if sure.status == "pass":
        return sure
    weak = check(name, lhs_weak, rhs_weak)
    if weak.status == "fail":
        return weak
    return InequalityRecord(name, weak.lhs, weak.rhs, weak.margin, "indeterminate", "phi only bracketed")


def mixing_bounds(R, pf: PFData | None = None, eps: float = DEFAULTS.eps,
                  tau_max: int = DEFAULTS.tau_max, cs=(1, 2)) -> MixReport:
    """Empirical mixing time of the balanced form next to every bound on it.

    The balanced matrix ``A`` (equal to ``R`` for doubly stochastic input) is
    the one measured, alongside its symmetrization ``(A + A^T)/2``.
    """
    _check_eps(eps)
    m = as_matrix(R)
    pf = pf or pf_data(m)
    n = m.n
    A, w = balance(m, pf)
    apf = pf_data(A)
    spec = spectral_summary(A, w)
    kappa = 1 / n if "doubly_stochastic" in m.tags else pf.kappa
    lo, hi, _ = phi_bracket(A, apf, spec.sigma2)
    gap = spec.spectral_gap
    log_nke = math.log(n / (kappa * eps))

    tau = mixing_time(A, apf, eps, tau_max)
    M = additive_symmetrize(A)
    tau_sym = mixing_time(M, pf_data(M), eps, tau_max)

    lower_phi = _safe_div(0.5 - eps, hi)
    upper_phi = _safe_div(4 * log_nke, lo * lo)
    lower_lambda = _safe_div(0.5 - eps, math.sqrt(max(2 * gap, 0)))
    upper_lambda = _safe_div(20 * (n + math.log(1 / (kappa * eps))), gap)
    log_sig = math.log(math.sqrt(n) / (math.sqrt(kappa) * eps))
    upper_sigma = {c: _safe_div(c * log_sig, 1 - spec.sigma2**c) for c in cs}
    sym_lower = sym_upper = math.nan
    if tau_sym is not None:
        sym_lower = (1 - 2 * eps) / (4 * math.sqrt(log_nke)) * math.sqrt(tau_sym)
        sym_upper = 2 * log_nke / math.log(1 / eps) * tau_sym

    recs: dict[str, InequalityRecord] = {}
    if tau is not None:
        t = float(tau)
        recs["phi_lower"] = _bracketed(
            "phi_lower", math.ceil(_safe_div(0.5 - eps, lo) - 1e-9), t, math.ceil(lower_phi - 1e-9), t)
        recs["phi_upper"] = _bracketed(
            "phi_upper", t, _safe_div(4 * log_nke, hi * hi), t, upper_phi)
        recs["lambda_lower"] = check("lambda_lower", lower_lambda, t)
        recs["lambda_upper"] = check("lambda_upper", t, upper_lambda)
        for c, val in upper_sigma.items():
            recs[f"sigma_upper_c{c}"] = check(f"sigma_upper_c{c}", t, val)
        if tau_sym is not None:
            recs["sym_lower"] = check("sym_lower", sym_lower, t)
            recs["sym_upper"] = check("sym_upper", t, sym_upper)
    return MixReport(n, eps, tau, lo, hi, kappa, gap, spec.sigma2, lower_phi, upper_phi,
                     lower_lambda, upper_lambda, upper_sigma, tau_sym, sym_lower, sym_upper, recs)


def continuous_sandwich(R, pf: PFData | None = None, eps: float = DEFAULTS.eps):
    """``(lower, t, upper)`` for the continuous-time chain; ``t`` is ``None`` on divergence."""
    m = as_matrix(R)
    pf = pf or pf_data(m)
    lo, hi, _ = phi_bracket(m, pf, 0.0)
    kappa = 1 / m.n if "doubly_stochastic" in m.tags else pf.kappa
    t = continuous_mixing_time(m, pf, eps)
    lower = _safe_div(0.5 - eps, hi)
    upper = _safe_div(100 * math.log(m.n / (kappa * eps)), lo * lo)
    return lower, t, upper


# ---------------------------------------------------------------------------
# canonical paths


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    paths: dict  # (u, v) -> list of (x, y) edges

    def to_json(self) -> str:
        return json.dumps({"paths": {f"{a},{b}": [list(e) for e in p] for (a, b), p in sorted(self.paths.items())}})

    @classmethod
    def from_json(cls, text: str) -> "PathEnsemble":
        try:
            doc = json.loads(text)
            paths = {}
            for key, edges in doc["paths"].items():
                a, b = (int(x) for x in key.split(","))
                paths[(a, b)] = [tuple(int(x) for x in e) for e in edges]
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise FormatError(f"bad path ensemble: {exc}") from exc
        return cls(paths)

    @classmethod
    def load(cls, path) -> "PathEnsemble":
        return cls.from_json(Path(path).read_text())


def shortest_paths(M) -> PathEnsemble | None:
    """BFS shortest paths on the support graph; each vertex takes the smallest
    parent index in the previous layer. ``None`` if some pair is unreachable."""
    a = as_array(M)
    n = a.shape[0]
    adj = [np.flatnonzero(a[i] > 0) for i in range(n)]
    paths = {}
    for s in range(n):
        parent = {s: None}
        layer = [s]
        while layer:
            nxt = {}
            for p in layer:  # layer is sorted, so the first hit is the smallest parent
                for q in adj[p]:
                    q = int(q)
                    if q not in parent and q not in nxt:
                        nxt[q] = p
            parent.update(nxt)
            layer = sorted(nxt)
        if len(parent) < n:
            return None
        for t in range(n):
            if t == s:
                continue
            edges = deque()
            x = t
            while parent[x] is not None:
                edges.appendleft((parent[x], x))
                x = parent[x]
            paths[(s, t)] = list(edges)
    return PathEnsemble(paths)


@dataclass(frozen=True)
class PathsBound:
    rho: float
    gap_lower: float
    tau_upper: float
    tau_upper_singular: float

    def as_dict(self) -> dict:
        return {
            "rho": self.rho,
            "gap_lower": self.gap_lower,
            "tau_upper": self.tau_upper,
            "tau_upper_singular": self.tau_upper_singular,
        }


def congestion(M, W: PathEnsemble) -> float:
    a = as_array(M)
    n = a.shape[0]
    load: dict = {}
    for (s, t), edges in W.paths.items():
        if s == t:
            continue
        if not edges or edges[0][0] != s or edges[-1][1] != t:
            raise DomainError(f"path for ({s}, {t}) does not connect its endpoints")
        if any(e[1] != f[0] for e, f in zip(edges, edges[1:])):
            raise DomainError(f"path for ({s}, {t}) is not contiguous")
        for e in edges:
            if a[e] <= 0:
                return math.inf
            load[e] = load.get(e, 0) + len(edges)
    missing = any((s, t) not in W.paths for s in range(n) for t in range(n) if s != t)
    if missing:
        return math.inf
    return max((v / (n * a[e]) for e, v in load.items()), default=0.0)


def canonical_paths_bound(M, W: PathEnsemble | None = None, eps: float = DEFAULTS.eps) -> PathsBound:
    """Congestion ``rho`` of a path system and the bounds it implies.

    ``1/rho`` bounds the spectral gap of symmetric ``M`` from below; the two
    mixing bounds are ``rho ln(n/eps)`` and ``2 rho ln(n/eps)``, the latter
    meant for ``M = A A^T``.
    """
    a = as_array(M)
    n = a.shape[0]
    if W is None:
        W = shortest_paths(a)
    rho = math.inf if W is None else congestion(a, W)
    log = math.log(n / eps)
    rho = float(rho)
    return PathsBound(rho, 0.0 if math.isinf(rho) else 1 / rho, rho * log, 2 * rho * log)
