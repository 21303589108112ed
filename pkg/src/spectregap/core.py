"""Dense nonnegative matrices: representation, validation, I/O and fixtures."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import DEFAULTS


class SpectreGapError(Exception):
    """Base class for all library errors."""


class DomainError(SpectreGapError, ValueError):
    pass


class ValidationError(SpectreGapError, ValueError):
    pass


class FormatError(SpectreGapError, ValueError):
    pass


class CapacityError(SpectreGapError):
    pass


class ConvergenceError(SpectreGapError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateError(SpectreGapError):
    pass


FLOAT = "float"
RATIONAL = "rational"


def _is_rational_array(a: np.ndarray) -> bool:
    return a.dtype == object


def to_fractions(a) -> np.ndarray:
    """Exact conversion to an object array of Fractions (floats convert exactly)."""
    a = np.asarray(a.entries if isinstance(a, NonnegMatrix) else a)
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = x if isinstance(x, Fraction) else Fraction(x)
    return out


def _common_denominator(a: np.ndarray) -> int:
    return math.lcm(*(x.denominator for x in a.flat)) if a.size else 1


def _integerize(a: np.ndarray) -> tuple[np.ndarray, int]:
    d = _common_denominator(a)
    ints = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        ints[idx] = x.numerator * (d // x.denominator)
    return ints, d


def exact_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Exact product of two Fraction arrays, done in integers over a common denominator."""
    xi, dx = _integerize(x)
    yi, dy = _integerize(y)
    p = xi.dot(yi)
    d = dx * dy
    out = np.empty(p.shape, dtype=object)
    for idx, v in np.ndenumerate(p):
        out[idx] = Fraction(v, d)
    return out


@dataclass(frozen=True, eq=False)
class NonnegMatrix:
    """Square nonnegative matrix in float64 or exact-rational mode.

    Tags (``doubly_stochastic``, ``lazy``, ``symmetric``) are always recomputed
    from the entries; nothing passed in is trusted.
    """

    entries: np.ndarray
    mode: str = FLOAT
    tags: frozenset = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DomainError(f"expected a nonempty square matrix, got shape {a.shape}")
        if self.mode == RATIONAL or _is_rational_array(a):
            a = to_fractions(a)
            if any(x < 0 for x in a.flat):
                raise ValidationError("negative entry in rational matrix")
            mode = RATIONAL
        elif self.mode == FLOAT:
            a = np.array(a, dtype=float)
            if not np.all(np.isfinite(a)):
                raise ValidationError("non-finite entry")
            if a.min() < -DEFAULTS.clamp_negative:
                i, j = np.unravel_index(np.argmin(a), a.shape)
                raise ValidationError(f"negative entry {a[i, j]!r} at ({i}, {j})")
            a[a < 0] = 0.0
            mode = FLOAT
        else:
            raise DomainError(f"unknown mode {self.mode!r}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "tags", frozenset(_compute_tags(a, mode)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_rational(self) -> bool:
        return self.mode == RATIONAL

    def to_float(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.to_float(), dtype=dtype)

    @property
    def T(self) -> "NonnegMatrix":
        return NonnegMatrix(self.entries.T.copy(), self.mode)

    def as_float(self) -> "NonnegMatrix":
        return self if self.mode == FLOAT else NonnegMatrix(self.to_float())

    def as_rational(self) -> "NonnegMatrix":
        return self if self.mode == RATIONAL else NonnegMatrix(to_fractions(self.entries), RATIONAL)

    def __repr__(self):
        return f"NonnegMatrix(n={self.n}, mode={self.mode}, tags={sorted(self.tags)})"


def _compute_tags(a: np.ndarray, mode: str) -> set:
    tags = set()
    n = a.shape[0]
    if mode == RATIONAL:
        ones = all(sum(a[i, :]) == 1 for i in range(n)) and all(sum(a[:, j]) == 1 for j in range(n))
        sym = all(a[i, j] == a[j, i] for i in range(n) for j in range(i + 1, n))
        lazy = all(a[i, i] >= Fraction(1, 2) for i in range(n))
    else:
        ones = (
            np.abs(a.sum(axis=1) - 1).max() <= DEFAULTS.ds_tol
            and np.abs(a.sum(axis=0) - 1).max() <= DEFAULTS.ds_tol
        )
        sym = np.abs(a - a.T).max() <= DEFAULTS.symmetric_tol
        lazy = bool(np.all(np.diag(a) >= 0.5))
    if ones:
        tags.add("doubly_stochastic")
    if sym:
        tags.add("symmetric")
    if lazy:
        tags.add("lazy")
    return tags


def as_array(R) -> np.ndarray:
    """Float64 view of a NonnegMatrix or array-like."""
    if isinstance(R, NonnegMatrix):
        return R.to_float()
    return np.asarray(R, dtype=float)


def as_matrix(R) -> NonnegMatrix:
    return R if isinstance(R, NonnegMatrix) else NonnegMatrix(np.asarray(R))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    nonneg_ok: bool
    row_sum_max_dev: float
    col_sum_max_dev: float
    lazy_ok: bool
    symmetric_dev: float
    detailed_balance_dev: float | None
    doubly_stochastic_ok: bool
    tol: float

    def as_dict(self) -> dict:
        return {
            "nonneg_ok": self.nonneg_ok,
            "row_sum_max_dev": self.row_sum_max_dev,
            "col_sum_max_dev": self.col_sum_max_dev,
            "lazy_ok": self.lazy_ok,
            "symmetric_dev": self.symmetric_dev,
            "detailed_balance_dev": self.detailed_balance_dev,
            "doubly_stochastic_ok": self.doubly_stochastic_ok,
            "tol": self.tol,
        }


def validate(m, pf=None, tol: float = DEFAULTS.ds_tol) -> ValidationReport:
    """Measure how far ``m`` is from the structural predicates used elsewhere.

    Deviations are exact (then converted to float) for rational matrices.
    ``detailed_balance_dev`` is ``max |D_u R D_v - D_v R^T D_u|`` and is only
    filled when ``pf`` carries strictly positive ``u`` and ``v``.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    m = as_matrix(m)
    a = m.entries
    if m.is_rational:
        n = m.n
        row_dev = float(max(abs(sum(a[i, :]) - 1) for i in range(n)))
        col_dev = float(max(abs(sum(a[:, j]) - 1) for j in range(n)))
        sym_dev = float(max((abs(a[i, j] - a[j, i]) for i in range(n) for j in range(n)), default=0))
        nonneg = all(x >= 0 for x in a.flat)
        lazy = all(a[i, i] >= Fraction(1, 2) for i in range(n))
        exact_zero = row_dev == 0 and col_dev == 0
    else:
        row_dev = float(np.abs(a.sum(axis=1) - 1).max())
        col_dev = float(np.abs(a.sum(axis=0) - 1).max())
        sym_dev = float(np.abs(a - a.T).max())
        nonneg = bool(a.min() >= 0)
        lazy = bool(np.all(np.diag(a) >= 0.5))
        exact_zero = False
    db_dev = None
    if pf is not None and np.all(pf.u > 0) and np.all(pf.v > 0):
        R = m.to_float() / pf.r
        G = pf.u[:, None] * R * pf.v[None, :]
        db_dev = float(np.abs(G - G.T).max())
    return ValidationReport(
        nonneg_ok=nonneg,
        row_sum_max_dev=row_dev,
        col_sum_max_dev=col_dev,
        lazy_ok=lazy,
        symmetric_dev=sym_dev,
        detailed_balance_dev=db_dev,
        doubly_stochastic_ok=exact_zero or (row_dev <= tol and col_dev <= tol),
        tol=tol,
    )


# ---------------------------------------------------------------------------
# serialization


def _fraction_token(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def save_matrix(m, path, format: str = "json") -> None:
    m = as_matrix(m)
    path = Path(path)
    if format == "json":
        if m.is_rational:
            rows = [[[x.numerator, x.denominator] for x in row] for row in m.entries]
        else:
            rows = [[float(x) for x in row] for row in m.entries]
        text = json.dumps({"n": m.n, "mode": m.mode, "rows": rows})
    elif format == "matrix_market":
        lines = ["%%MatrixMarket matrix array real general"]
        if m.is_rational:
            # non-standard extension: exact p/q tokens
            lines.append("% spectregap-mode: rational")
        lines.append(f"{m.n} {m.n}")
        # array format is column-major
        for j in range(m.n):
            for i in range(m.n):
                x = m.entries[i, j]
                lines.append(_fraction_token(x) if m.is_rational else repr(float(x)))
        text = "\n".join(lines) + "\n"
    else:
        raise FormatError(f"unknown format {format!r}")
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _format_from_path(path: Path) -> str:
    return "matrix_market" if path.suffix.lower() in (".mtx", ".mm") else "json"


def load_matrix(path, format: str | None = None) -> NonnegMatrix:
    path = Path(path)
    format = format or _format_from_path(path)
    text = path.read_text()
    if format == "json":
        return _load_json(text)
    if format == "matrix_market":
        return _load_matrix_market(text)
    raise FormatError(f"unknown format {format!r}")


def _load_json(text: str) -> NonnegMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        n = int(doc["n"])
        rows = doc["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"missing or bad field: {exc}") from exc
    mode = doc.get("mode", FLOAT)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise FormatError(f"declared n={n} does not match rows")
    if mode == RATIONAL:
        a = np.empty((n, n), dtype=object)
        for i, row in enumerate(rows):
            for j, pair in enumerate(row):
                a[i, j] = Fraction(int(pair[0]), int(pair[1]))
        return NonnegMatrix(a, RATIONAL)
    if mode != FLOAT:
        raise FormatError(f"unknown mode {mode!r}")
    return NonnegMatrix(np.array(rows, dtype=float))


def _load_matrix_market(text: str) -> NonnegMatrix:
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise FormatError("line 1: missing %%MatrixMarket header")
    header = lines[0].split()
    if len(header) < 5 or header[1].lower() != "matrix":
        raise FormatError("line 1: malformed header")
    layout, field_, symmetry = (h.lower() for h in header[2:5])
    if layout not in ("array", "coordinate") or field_ not in ("real", "integer") or symmetry != "general":
        raise FormatError(f"line 1: unsupported header {' '.join(header[2:5])}")
    rational = False
    body = []
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if s.startswith("%"):
            if "spectregap-mode: rational" in s:
                rational = True
            continue
        if s:
            body.append((lineno, s))
    if not body:
        raise FormatError("missing size line")

    def number(tok, lineno):
        try:
            if rational:
                return Fraction(tok)
            return float(tok)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"line {lineno}: bad number {tok!r}") from exc

    lineno, size = body[0]
    try:
        dims = [int(t) for t in size.split()]
    except ValueError as exc:
        raise FormatError(f"line {lineno}: bad size line") from exc
    nr, nc = dims[0], dims[1]
    if nr != nc:
        raise FormatError(f"line {lineno}: matrix is {nr}x{nc}, not square")
    n = nr
    a = np.zeros((n, n), dtype=object if rational else float)
    if rational:
        a[:, :] = Fraction(0)
    entries = body[1:]
    if layout == "array":
        if len(entries) != n * n:
            raise FormatError(f"expected {n * n} entries, found {len(entries)}")
        for k, (ln, tok) in enumerate(entries):
            a[k % n, k // n] = number(tok, ln)
    else:
        if len(dims) != 3 or len(entries) != dims[2]:
            raise FormatError(f"line {lineno}: entry count mismatch")
        for ln, s in entries:
            parts = s.split()
            if len(parts) != 3:
                raise FormatError(f"line {ln}: expected 'i j value'")
            try:
                i, j = int(parts[0]) - 1, int(parts[1]) - 1
            except ValueError as exc:
                raise FormatError(f"line {ln}: bad index") from exc
            if not (0 <= i < n and 0 <= j < n):
                raise FormatError(f"line {ln}: index out of range")
            a[i, j] = a[i, j] + number(parts[2], ln)
    return NonnegMatrix(a, RATIONAL if rational else FLOAT)


# ---------------------------------------------------------------------------
# fixtures


def named_matrix(kind: str, n: int) -> NonnegMatrix:
    if n < 1:
        raise DomainError("n must be at least 1")
    if kind == "identity":
        return NonnegMatrix(np.eye(n))
    if kind in ("uniform_J", "uniform"):
        return NonnegMatrix(np.full((n, n), 1.0 / n))
    if kind in ("directed_cycle", "cycle"):
        if n < 2:
            raise DomainError("directed_cycle needs n >= 2")
        a = np.zeros((n, n))
        a[np.arange(n), (np.arange(n) + 1) % n] = 1.0
        return NonnegMatrix(a)
    raise DomainError(f"unknown matrix kind {kind!r}")


def sinkhorn(a: np.ndarray, tol: float = DEFAULTS.sinkhorn_tol,
             max_sweeps: int = DEFAULTS.sinkhorn_max_sweeps) -> np.ndarray:
    """Alternate row and column normalization until row sums are within ``tol`` of 1."""
    a = np.array(a, dtype=float)
    for _ in range(max_sweeps):
        a /= a.sum(axis=1, keepdims=True)
        a /= a.sum(axis=0, keepdims=True)
        if np.abs(a.sum(axis=1) - 1).max() <= tol:
            return a
    raise ConvergenceError("Sinkhorn did not converge", np.abs(a.sum(axis=1) - 1).max())


def random_doubly_stochastic(n: int, seed: int = 0, sinkhorn_tol: float = DEFAULTS.sinkhorn_tol) -> NonnegMatrix:
    """Strictly positive doubly stochastic matrix, deterministic in ``(n, seed)``.

    Starts from log-normal weights so the fixtures are far from uniform.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    if sinkhorn_tol <= 0:
        raise DomainError("sinkhorn_tol must be positive")
    rng = np.random.default_rng(seed)
    start = rng.lognormal(mean=0.0, sigma=1.0, size=(n, n))
    return NonnegMatrix(sinkhorn(start, sinkhorn_tol))


def random_positive(n: int, seed: int = 0) -> NonnegMatrix:
    """Strictly positive matrix with no stochastic structure (general-R fixture)."""
    rng = np.random.default_rng(seed)
    return NonnegMatrix(rng.lognormal(mean=0.0, sigma=1.0, size=(n, n)))


def block_diag(*blocks) -> NonnegMatrix:
    import scipy.linalg

    return NonnegMatrix(scipy.linalg.block_diag(*(as_array(b) for b in blocks)))


def scale_to_unit_pf(R, pf) -> NonnegMatrix:
    if pf.r <= 0:
        raise DegenerateError("PF eigenvalue is 0; cannot scale")
    m = as_matrix(R)
    if m.is_rational and isinstance(pf.r, Fraction):
        return NonnegMatrix(m.entries / pf.r, "rational")
    return NonnegMatrix(m.to_float() / pf.r)
