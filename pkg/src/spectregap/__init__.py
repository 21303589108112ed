"""Edge expansion, nontrivial spectra and mixing times of nonnegative matrices."""

from .config import DEFAULTS, Config
from .core import (
    CapacityError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    FormatError,
    NonnegMatrix,
    SpectreGapError,
    ValidationError,
    ValidationReport,
    load_matrix,
    named_matrix,
    random_doubly_stochastic,
    save_matrix,
    scale_to_unit_pf,
    validate,
)
from .pf import PFData, additive_symmetrize, balance, lazify, pf_data, strong_components
from .expansion import Cut, ExpansionResult, eulerian_defect, phi_cut, phi_exact
from .spectral import (
    SchurFactors,
    SpectralSummary,
    nilpotency_index,
    schur_decompose,
    spectral_summary,
    triangular_mix_power,
    triangular_power_bound,
)
from .construction import (
    construction_coefficients,
    de_bruijn,
    klawe_vazirani,
    perturbed_rogue,
    rogue_matrix,
    schur_witness,
)
from .bounds import (
    BoundReport,
    GammaRecord,
    bound_report,
    gamma_witness,
    perturbation_gap_bound,
    submultiplicativity_check,
)
from .mixing import (
    MixReport,
    PathEnsemble,
    canonical_paths_bound,
    continuous_mixing_time,
    matrix_exponential,
    mixing_bounds,
    mixing_time,
)

__version__ = "0.1.0"
