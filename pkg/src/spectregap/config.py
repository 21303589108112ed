"""Default tolerances and limits, kept in one place so the CLI can print them."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Config:
    # core
    clamp_negative: float = 1e-15
    ds_tol: float = 1e-12
    symmetric_tol: float = 1e-12
    sinkhorn_tol: float = 1e-12
    sinkhorn_max_sweeps: int = 100_000

    # pf
    pf_residual_tol: float = 1e-12
    pf_max_iter: int = 100_000
    pf_block_rel_tol: float = 1e-9
    pf_zero_rel_tol: float = 1e-10
    detailed_balance_tol: float = 1e-10

    # expansion
    phi_n_limit: int = 24

    # spectral
    deflation_zero_tol: float = 1e-7

    # bounds
    inequality_slack: float = 1e-9

    # mixing
    eps: float = 0.25
    tau_max: int = 1_000_000
    t_max: float = 1e4
    bisection_rel: float = 1e-3
    expm_tol: float = 1e-15

    seed: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def default_seed() -> int:
    raw = os.environ.get("SPECTREGAP_SEED")
    return int(raw) if raw not in (None, "") else Config.seed


DEFAULTS = Config()
