"""Acceptance checks, one function per numbered criterion.

Each check returns a :class:`CriterionResult`; ``run_all`` collects them. The
CLI ``verify`` command and ``tests/test_acceptance.py`` both call into here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import construction as con
from .bounds import bound_report, gamma_witness, submultiplicativity_check
from .config import default_seed
from .core import NonnegMatrix, exact_matmul, named_matrix, random_doubly_stochastic, random_positive, validate
from .expansion import phi_cut, phi_exact
from .mixing import canonical_paths_bound, continuous_sandwich, mixing_bounds, mixing_time
from .pf import additive_symmetrize, lazify, pf_data
from .spectral import (
    EXACT_NILPOTENT,
    deflated_exact,
    nilpotency_index,
    spectral_summary,
    triangular_mix_power,
    triangular_mix_power_loose,
    triangular_power_bound,
)

SQUARES = (4, 9, 16, 25, 49, 100)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name} ({self.seconds:.1f}s)"

    def as_dict(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "seconds": self.seconds, "detail": self.detail}


def _timed(number, name):
    def wrap(fn):
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            passed, detail = fn(*args, **kwargs)
            return CriterionResult(number, name, bool(passed), time.perf_counter() - t0, detail)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


# ---------------------------------------------------------------------------
# construction


@_timed(1, "construction_exactness")
def construction_exactness(ns=SQUARES):
    detail = {}
    t0 = time.perf_counter()
    for n in ns:
        A = con.rogue_matrix(n, "rational")
        U, T = con.schur_witness(n, "rational")
        rep = validate(A)
        eye = np.eye(n, dtype=int)
        detail[n] = {
            "doubly_stochastic": rep.row_sum_max_dev == 0 and rep.col_sum_max_dev == 0,
            "unitary": bool((exact_matmul(U, U.T) == eye).all()),
            "reconstruction": bool((exact_matmul(exact_matmul(U, T), U.T) == A.entries).all()),
        }
    elapsed = time.perf_counter() - t0
    ok = all(all(v.values()) for v in detail.values()) and elapsed < 60
    detail["elapsed"] = elapsed
    return ok, detail


@_timed(2, "zero_spectrum_float")
def zero_spectrum(ns=SQUARES, tol=1e-7):
    """Float eigensolver on the float matrix; the exact certificate is reported alongside."""
    detail = {}
    ok = True
    for n in ns:
        s = spectral_summary(con.rogue_matrix(n))
        mod = float(np.abs(s.nontrivial_eigs).max())
        idx = nilpotency_index(deflated_exact(con.rogue_matrix(n, "rational")))
        detail[n] = {"float_max_modulus": mod, "exact_nilpotency_index": idx}
        ok &= mod <= tol
    return ok, detail


@_timed(3, "singular_values")
def singular_values(ns=SQUARES, tol=1e-8):
    detail = {}
    ok = True
    for n in ns:
        sv = scipy.linalg.svdvals(con.rogue_matrix(n).to_float())
        r = 1 - 1 / (math.sqrt(n) + 2)
        want = np.array([1.0] + [r] * (n - 2) + [0.0])
        err = float(np.abs(np.sort(sv)[::-1] - want).max())
        detail[n] = err
        ok &= err <= tol
    return ok, detail


@_timed(4, "expansion_bracket")
def expansion_bracket(small=(4, 9, 16), large=(25, 49, 100), tol=1e-10):
    detail = {}
    ok = True
    for n in small:
        A = con.rogue_matrix(n)
        phi = phi_exact(A, pf_data(A)).phi
        lo, hi = 1 / (6 * math.sqrt(n)), 1 / math.sqrt(n)
        good = lo - tol <= phi <= hi + tol
        detail[n] = {"phi": phi, "range": [lo, hi], "ok": good}
        ok &= good
    for n in large:
        A = con.rogue_matrix(n)
        pf = pf_data(A)
        sigma2 = float(scipy.linalg.svdvals(A.to_float())[1])
        lo = (1 - sigma2) / 2
        b = float(con.construction_coefficients(n).b)
        cut = phi_cut(A, pf, [0])
        good = (
            lo >= 1 / (6 * math.sqrt(n)) - tol
            and b < 1 / math.sqrt(n)
            and abs(cut - b) <= tol
            and lo <= b
        )
        detail[n] = {"bracket": [lo, b], "singleton_cut": cut, "ok": good}
        ok &= good
    return ok, detail


@_timed(5, "gamma_witness")
def gamma_table(ns=SQUARES):
    detail = {}
    ok = True
    for n in ns:
        g = gamma_witness(n)
        good = g.gamma_lower_bound <= g.gamma_upper_witness <= 1 / math.sqrt(n) + 1e-9
        detail[n] = g.as_dict()
        ok &= good
    return ok, detail


@_timed(6, "perturbation_sensitivity")
def sensitivity(ns=(16, 100)):
    detail = {}
    ok = True
    for n in ns:
        Ap = con.perturbed_rogue(n)
        lam2 = spectral_summary(Ap).lambda2
        moved = float(np.abs(Ap.to_float() - con.rogue_matrix(n).to_float()).sum() / 2)
        b = float(con.construction_coefficients(n).b)
        good = abs(lam2 - 1) <= 1e-9 and abs(moved - 2 * b) <= 1e-12 and moved < 2 / math.sqrt(n)
        detail[n] = {"lambda2": [lam2.real, lam2.imag], "moved": moved, "two_b": 2 * b}
        ok &= good
    return ok, detail


# ---------------------------------------------------------------------------
# inequality suites


def random_fixtures(count: int = 200, seed: int | None = None):
    """``count`` doubly stochastic matrices with ``n`` cycling through 3..16,
    each followed by its lazy version, its square, and its symmetrization."""
    base = default_seed() if seed is None else seed
    out = []
    for i in range(count):
        n = 3 + i % 14
        R = random_doubly_stochastic(n, base + i)
        a = R.to_float()
        out += [
            (f"ds{i}", R),
            (f"ds{i}_lazy", lazify(R)),
            (f"ds{i}_sq", NonnegMatrix(a @ a)),
            (f"ds{i}_sym", additive_symmetrize(R)),
        ]
    return out


@_timed(7, "inequality_suite")
def inequality_suite(count=200, seed=None):
    fails = []
    worst = math.inf
    fixtures = random_fixtures(count, seed)
    for name, R in fixtures:
        rep = bound_report(R)
        for rec in rep.records.values():
            if rec.status == "pass":
                worst = min(worst, rec.margin)
        fails += [(name, r.name, r.margin) for r in rep.failures()]
    return not fails, {"fixtures": len(fixtures), "failures": fails[:20], "min_margin": worst}


@_timed(8, "submultiplicativity")
def submultiplicativity(count=200, seed=None, ks=(2, 3, 4)):
    fails = []
    checked = 0
    for name, R in random_fixtures(count, seed):
        pf = pf_data(R)
        for k in ks:
            lhs, rhs = submultiplicativity_check(R, pf, k)
            checked += 1
            if lhs > rhs + 1e-10:
                fails.append((name, k, lhs, rhs))
    return not fails, {"checked": checked, "failures": fails[:20]}


def random_triangular(rng, n, alpha):
    T = np.triu(rng.standard_normal((n, n)), 1)
    T[np.diag_indices(n)] = rng.uniform(-alpha, alpha, n)
    norm = np.linalg.norm(T, 2)
    if norm > 1:
        T /= norm
    return T


@_timed(9, "triangular_bounds")
def triangular_bounds(count=100, seed=None, kmax=50):
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    alphas = (0.0, 0.3, 0.7)
    fails = []
    for i in range(count):
        n = int(rng.integers(1, 9))
        alpha = alphas[i % 3]
        T = random_triangular(rng, n, alpha)
        sigma = max(1.0, np.linalg.norm(T, 2))
        beta = float(np.abs(np.diag(T)).max())
        P = np.eye(n)
        for k in range(1, kmax + 1):
            P = P @ T
            bound = triangular_power_bound(n, sigma, beta, k)
            if np.linalg.norm(P, 2) > bound * (1 + 1e-9) + 1e-12:
                fails.append(("power_bound", i, k))
        for eps in (0.1, 0.01):
            k = triangular_mix_power(n, alpha, eps)
            if k > triangular_mix_power_loose(n, alpha, eps):
                fails.append(("constant_order", i, eps))
            if np.linalg.norm(np.linalg.matrix_power(T, k), 2) > eps:
                fails.append(("mix_power", i, eps))
    return not fails, {"matrices": count, "failures": fails[:20]}


def lazy_fixtures(seed=None):
    base = default_seed() if seed is None else seed
    out = [(f"cycle{n}", lazify(named_matrix("directed_cycle", n))) for n in range(3, 13)]
    out += [(f"ds{n}", lazify(random_doubly_stochastic(n, base + n))) for n in range(3, 13)]
    out += [(f"pos{n}", lazify(random_positive(n, base + n))) for n in range(3, 9)]
    out += [("rogue4", lazify(con.rogue_matrix(4))), ("rogue9", lazify(con.rogue_matrix(9)))]
    out += [("uniform6", named_matrix("uniform_J", 6))]
    return out


@_timed(10, "mixing_sandwiches")
def mixing_sandwiches(seed=None):
    fails = []
    for name, R in lazy_fixtures(seed):
        rep = mixing_bounds(R, eps=0.25)
        if rep.tau is None:
            fails.append((name, "diverged"))
        fails += [(name, r.name, r.lhs, r.rhs) for r in rep.records.values() if r.status == "fail"]
    return not fails, {"failures": fails}


@_timed(11, "construction_mixing_scaling")
def construction_scaling(ns=(16, 64, 256)):
    taus, rhos = {}, {}
    for n in ns:
        A = con.rogue_matrix(n)
        taus[n] = mixing_time(lazify(A), eps=0.25)
        a = A.to_float()
        rhos[n] = canonical_paths_bound(a @ a.T).rho
    if any(t is None for t in taus.values()):
        return False, {"tau": taus}
    ratio = {n: taus[n] / (math.sqrt(n) * math.log(n)) for n in ns}
    C = math.exp(np.mean([math.log(v) for v in ratio.values()]))
    rratio = {n: rhos[n] / math.sqrt(n) for n in ns}
    Cr = math.exp(np.mean([math.log(v) for v in rratio.values()]))
    ok_tau = all(0.5 * C <= v <= 1.5 * C for v in ratio.values())
    ok_rho = all(0.5 * Cr <= v <= 1.5 * Cr for v in rratio.values())
    detail = {"tau": taus, "tau_ratio": ratio, "C": C, "rho": rhos, "rho_ratio": rratio, "C_rho": Cr}
    return ok_tau and ok_rho, detail


def continuous_fixtures(seed=None):
    base = default_seed() if seed is None else seed
    out = [(f"cycle{n}", named_matrix("directed_cycle", n)) for n in range(3, 11)]
    out += [(f"ds{n}", random_doubly_stochastic(n, base + n)) for n in range(3, 11)]
    out += [(f"pos{n}", random_positive(n, base + n)) for n in (4, 7)]
    out += [("uniform5", named_matrix("uniform_J", 5)), ("rogue4", con.rogue_matrix(4)),
            ("rogue9", con.rogue_matrix(9))]
    return out


@_timed(12, "continuous_sandwich")
def continuous_suite(seed=None):
    fails = []
    rows = {}
    for name, R in continuous_fixtures(seed):
        lo, t, hi = continuous_sandwich(R, eps=0.25)
        rows[name] = [lo, t, hi]
        if t is None or not (lo - 1e-9 <= t <= hi + 1e-9):
            fails.append(name)
    return not fails, {"failures": fails, "rows": rows}


@_timed(13, "family_spectra")
def family_spectra(ks=range(1, 7), primes=(5, 7, 11, 13)):
    detail = {"de_bruijn": {}, "klawe_vazirani": {}}
    ok = True
    for k in ks:
        A = con.de_bruijn(k)
        n = 1 << k
        s = spectral_summary(A, certify=True) if n > 1 else None
        mod = float(np.abs(s.nontrivial_eigs).max())
        power_err = float(np.abs(np.linalg.matrix_power(A.to_float(), k) - 1 / n).max())
        good = s.method == EXACT_NILPOTENT and mod <= 1e-7 and power_err <= 1e-12
        lapack = float(np.abs(spectral_summary(A, certify=False).nontrivial_eigs).max())
        detail["de_bruijn"][k] = {"max_modulus": mod, "route": s.method, "float_eig_max_modulus": lapack,
                                  "power_err": power_err, "ok": good}
        ok &= good
    for p in primes:
        mods = np.abs(spectral_summary(con.klawe_vazirani(p)).nontrivial_eigs)
        good = bool(np.all((mods <= 1e-8) | (np.abs(mods - 0.5) <= 1e-8)))
        detail["klawe_vazirani"][p] = {"moduli": sorted(set(np.round(mods, 10).tolist())), "ok": good}
        ok &= good
    return ok, detail


CRITERIA = {
    1: construction_exactness,
    2: zero_spectrum,
    3: singular_values,
    4: expansion_bracket,
    5: gamma_table,
    6: sensitivity,
    7: inequality_suite,
    8: submultiplicativity,
    9: triangular_bounds,
    10: mixing_sandwiches,
    11: construction_scaling,
    12: continuous_suite,
    13: family_spectra,
}


def run_all(quick: bool = False, only=None) -> list[CriterionResult]:
    """Run every criterion; ``quick`` shrinks the random fixture sets."""
    results = []
    for num, fn in CRITERIA.items():
        if only and num not in only:
            continue
        if quick and num in (7, 8):
            results.append(fn(count=40))
        elif quick and num == 9:
            results.append(fn(count=30))
        else:
            results.append(fn())
    return results
