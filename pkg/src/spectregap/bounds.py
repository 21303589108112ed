"""Two-sided inequalities linking expansion, eigenvalues and singular values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import DEFAULTS
from .core import DomainError, NonnegMatrix, as_array, as_matrix, block_diag, validate
from .expansion import ExpansionResult, best_single_cut, phi_exact
from .pf import DEGENERATE, PFData, additive_symmetrize, balance, pf_data
from .spectral import (
    EXACT_NILPOTENT,
    _householder_complement,
    deflated_exact,
    nilpotency_index,
    spectral_summary,
)
from . import construction

PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"
NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class InequalityRecord:
    """``lhs <= rhs`` with ``margin = rhs - lhs``."""

    name: str
    lhs: float
    rhs: float
    margin: float
    status: str
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status in (PASS, NOT_APPLICABLE, INDETERMINATE)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.status == PASS,
            "status": self.status,
            "note": self.note,
        }


def _slack(lhs, rhs, slack) -> float:
    vals = [1.0] + [abs(x) for x in (lhs, rhs) if math.isfinite(x)]
    return slack * max(vals)


def check(name: str, lhs: float, rhs: float, slack: float = DEFAULTS.inequality_slack, note="") -> InequalityRecord:
    margin = rhs - lhs
    ok = margin >= -_slack(lhs, rhs, slack) or (math.isinf(rhs) and rhs > 0)
    return InequalityRecord(name, float(lhs), float(rhs), float(margin), PASS if ok else FAIL, note)


def check_bracketed(name, bound, lo, hi, side, slack=DEFAULTS.inequality_slack) -> InequalityRecord:
    """Decide ``bound <= phi`` (side='lower') or ``phi <= bound`` (side='upper')
    knowing only ``lo <= phi <= hi``."""
    if lo == hi:
        return check(name, bound, lo) if side == "lower" else check(name, lo, bound)
    if side == "lower":
        sure, refuted = check(name, bound, lo, slack), check(name, bound, hi, slack)
    else:
        sure, refuted = check(name, hi, bound, slack), check(name, lo, bound, slack)
    if sure.status == PASS:
        return sure
    if refuted.status == FAIL:
        return refuted
    return InequalityRecord(name, sure.lhs, sure.rhs, sure.margin, INDETERMINATE, "phi only bracketed")


def not_applicable(name, note) -> InequalityRecord:
    return InequalityRecord(name, math.nan, math.nan, math.nan, NOT_APPLICABLE, note)


@dataclass(frozen=True, eq=False)
class BoundReport:
    n: int
    kappa: float
    classification: str
    phi: float
    phi_lo: float
    phi_hi: float
    phi_method: str
    re_lambda2: float
    mod_lambda_m: float
    sigma2: float
    lambda2_sym: float
    spectrum_method: str
    records: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records.values())

    def failures(self) -> list[InequalityRecord]:
        return [r for r in self.records.values() if r.status == FAIL]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "classification": self.classification,
            "phi": self.phi,
            "phi_bracket": [self.phi_lo, self.phi_hi],
            "phi_method": self.phi_method,
            "re_lambda2": self.re_lambda2,
            "mod_lambda_m": self.mod_lambda_m,
            "sigma2": self.sigma2,
            "lambda2_sym": self.lambda2_sym,
            "spectrum_method": self.spectrum_method,
            "records": {k: r.as_dict() for k, r in self.records.items()},
        }


def symmetric_lambda2(A, w) -> float:
    """Second eigenvalue of ``(A + A^T)/2`` on the complement of ``w``."""
    a = as_array(A)
    M = (a + a.T) / 2
    w = np.asarray(w, float) / np.linalg.norm(w)
    Wp = _householder_complement(w)
    return float(scipy.linalg.eigvalsh(Wp.T @ M @ Wp)[-1])


def phi_bracket(R, pf: PFData, sigma2: float, n_limit: int = DEFAULTS.phi_n_limit):
    """``(lo, hi, method)``: exact when ``n <= n_limit``, else the singular-value
    lower bound and the best singleton cut."""
    n = as_array(R).shape[0]
    if not pf.positive:
        return 0.0, 0.0, "definition_zero"
    if n <= n_limit:
        res = phi_exact(R, pf, n_limit)
        return res.phi, res.phi, res.method
    hi = best_single_cut(R, pf).phi
    return max(0.0, (1 - sigma2) / 2), hi, "bracket"


def bound_report(
    R,
    n_limit: int = DEFAULTS.phi_n_limit,
    slack: float = DEFAULTS.inequality_slack,
    certify: bool | None = None,
    cs=(2, 3, 4),
) -> BoundReport:
    """Evaluate every inequality between phi and the spectral quantities of ``R``."""
    m = as_matrix(R)
    n = m.n
    pf = pf_data(m)
    recs: dict[str, InequalityRecord] = {}

    if pf.classification == DEGENERATE:
        lam2 = _degenerate_lambda2(m, pf)
        gap = 1 - lam2
        recs["fiedler_upper"] = check("fiedler_upper", 0.0, math.sqrt(max(2 * gap, 0.0)), slack)
        for name in ("general_lower", "ds_lower_35n", "modulus_lower", "sigma_lower",
                     "sym_sandwich_lo", "sym_sandwich_hi", "detailed_balance_cheeger"):
            recs[name] = not_applicable(name, "kappa = 0")
        return BoundReport(n, 0.0, pf.classification, 0.0, 0.0, 0.0, "definition_zero",
                           lam2, math.nan, math.nan, math.nan, "eig", recs)

    A, w = balance(m, pf)
    spec = spectral_summary(A, w, certify=certify)
    ds = "doubly_stochastic" in m.tags
    kappa = 1.0 / n if ds else pf.kappa
    L = n + math.log(1 / kappa)
    gap = spec.spectral_gap
    lo, hi, method = phi_bracket(m, pf, spec.sigma2, n_limit)
    lam2_sym = symmetric_lambda2(A, w)

    def lower(name, bound):
        recs[name] = check_bracketed(name, bound, lo, hi, "lower", slack)

    def upper(name, bound):
        recs[name] = check_bracketed(name, bound, lo, hi, "upper", slack)

    upper("fiedler_upper", math.sqrt(max(2 * gap, 0.0)))
    lower("general_lower", gap / (30 * L))
    if ds:
        lower("ds_lower_35n", gap / (35 * n))
    else:
        recs["ds_lower_35n"] = not_applicable("ds_lower_35n", "not doubly stochastic")
    mod = abs(spec.lambda_m)
    lower("modulus_lower", (1 - mod) / (20 * L))
    lower("modulus_lower_15", (1 - mod) / (15 * L))
    lower("sigma_lower", (1 - spec.sigma2) / 2)
    for c in cs:
        lower(f"sigma_lower_c{c}", (1 - spec.sigma2**c) / (2 * c))
    recs["sym_sandwich_lo"] = check("sym_sandwich_lo", (gap / L) ** 2 / 1800, 1 - lam2_sym, slack)
    recs["sym_sandwich_hi"] = check("sym_sandwich_hi", 1 - lam2_sym, gap, slack)

    db = validate(m, pf).detailed_balance_dev
    if db is not None and db <= DEFAULTS.detailed_balance_tol:
        g = 1 - spec.lambda2.real
        lower("detailed_balance_cheeger_lo", g / 2)
        upper("detailed_balance_cheeger_hi", math.sqrt(max(2 * g, 0.0)))
    else:
        recs["detailed_balance_cheeger"] = not_applicable("detailed_balance_cheeger", "no detailed balance")

    phi = lo if lo == hi else math.nan
    return BoundReport(n, kappa, pf.classification, phi, lo, hi, method, spec.lambda2.real, mod,
                       spec.sigma2, lam2_sym, spec.method, recs)


def _degenerate_lambda2(m: NonnegMatrix, pf: PFData) -> float:
    if pf.r <= 0:
        return math.nan
    vals = scipy.linalg.eigvals(m.to_float() / pf.r)
    # drop the eigenvalue matched to the PF root, keep the largest real part
    i = int(np.argmin(np.abs(vals - 1)))
    rest = np.delete(vals, i)
    return float(rest.real.max()) if rest.size else math.nan


# ---------------------------------------------------------------------------
# Gamma witness


@dataclass(frozen=True)
class GammaRecord:
    n: int
    gamma_upper_witness: float
    gamma_lower_bound: float
    phi: float
    phi_method: str
    re_lambda2: float
    lambda2_route: str

    @property
    def inv_sqrt_n(self) -> float:
        return 1 / math.sqrt(self.n)

    def row(self) -> list:
        return [self.n, self.gamma_upper_witness, self.inv_sqrt_n, self.gamma_lower_bound]

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "witness": self.gamma_upper_witness,
            "inv_sqrt_n": self.inv_sqrt_n,
            "inv_35n": self.gamma_lower_bound,
            "phi": self.phi,
            "phi_method": self.phi_method,
            "re_lambda2": self.re_lambda2,
            "lambda2_route": self.lambda2_route,
        }


def certified_rogue_lambda2(n: int) -> tuple[float, str]:
    """Real part of the second eigenvalue of the construction, with its proof route.

    Perfect squares: exact nilpotency of ``A_n - J`` in rational arithmetic.
    Otherwise: the float Schur witness reproduces ``A_n`` and its triangular
    factor has a zero diagonal past the first entry.
    """
    r = math.isqrt(n)
    if r * r == n:
        idx = nilpotency_index(deflated_exact(construction.rogue_matrix(n, "rational")))
        if idx is not None:
            return 0.0, EXACT_NILPOTENT
    U, T = construction.schur_witness(n)
    A = construction.rogue_matrix(n).to_float()
    resid = np.abs(U @ T @ U.T - A).max()
    if resid <= 1e-12 and np.abs(U @ U.T - np.eye(n)).max() <= 1e-12:
        return float(np.diag(T)[1:].max()), "schur_witness"
    s = spectral_summary(construction.rogue_matrix(n))
    return s.lambda2.real, "projected_eig"


def gamma_witness(n: int, n_limit: int = 16) -> GammaRecord:
    """Upper witness for Gamma(n) from the construction, with the ``1/(35n)`` lower bound.

    Beyond ``n_limit`` phi is replaced by the singleton cut value ``b_n``,
    which keeps the witness an upper bound.
    """
    if n < 4:
        raise DomainError("n must be at least 4")
    A = construction.rogue_matrix(n)
    lam2, route = certified_rogue_lambda2(n)
    if n <= n_limit:
        phi, method = phi_exact(A, pf_data(A)).phi, "brute_force"
    else:
        phi, method = float(construction.construction_coefficients(n).b), "single_cut_upper"
    return GammaRecord(n, phi / (1 - lam2), 1 / (35 * n), phi, method, lam2, route)


# ---------------------------------------------------------------------------
# other lemmas


def submultiplicativity_check(R, pf: PFData, k: int, n_limit: int = DEFAULTS.phi_n_limit):
    """``(phi(R^k), k phi(R))``; the first never exceeds the second."""
    if k < 1:
        raise DomainError("k must be positive")
    a = as_array(R) / pf.r
    Rk = np.linalg.matrix_power(a, k)
    unit = PFData(1.0, pf.u, pf.v, pf.w, pf.kappa, pf.normalization, pf.classification, pf.structure, pf.residual)
    phi_k = phi_exact(NonnegMatrix(np.maximum(Rk, 0)), unit, n_limit).phi
    return phi_k, k * phi_exact(NonnegMatrix(a), unit, n_limit).phi


def perturbation_gap_bound(delta: float, n: int, kappa: float) -> float:
    """Largest spectral gap possible after a perturbation of size ``delta``."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    if not 0 < kappa <= 1:
        raise DomainError("kappa must lie in (0, 1]")
    return 30 * delta * (n + math.log(1 / kappa))


def two_block_perturbation(n: int, delta: float):
    """``(A, A0, B)`` with ``A0`` two disjoint uniform blocks and ``A = A0 + delta B``.

    ``B`` swaps mass between the blocks, has norm 1 and kills the uniform vector
    from both sides.
    """
    if n < 2 or n % 2:
        raise DomainError("n must be even and at least 2")
    h = n // 2
    Jh = np.full((h, h), 1 / h)
    A0 = as_array(block_diag(Jh, Jh))
    X = np.block([[np.zeros((h, h)), Jh], [Jh, np.zeros((h, h))]])
    B = (X - A0) / 2
    return NonnegMatrix(A0 + delta * B), NonnegMatrix(A0), B
