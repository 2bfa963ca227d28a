"""Exact spin Dirac spectra of lens spaces via affine congruence lattices."""

from .numtheory import NotInvertible, binomial, mod_inverse, units
from .lens import (
    CanonicalKey,
    DimensionTooSmall,
    IsometryWitness,
    LensParams,
    Mismatch,
    NoSpinStructure,
    NotCoprime,
    SpinLabel,
    SpinLensSpace,
    canonical_key,
    find_isometry,
    find_lens_isometry,
    format_spin_lens,
    h_shift,
    make_lens,
    spin_space,
    spin_structures,
)
from .lattice import (
    CongruenceLattice,
    ReducedCountTable,
    apply_norm_isometry,
    clear_caches,
    contains,
    count,
    lattice_of,
    point_level,
    point_neg_parity,
    point_norm2,
    reduced_counts,
    reduced_level_bound,
)
from .spectrum import (
    Eigenvalue,
    LevelMultiplicities,
    dirac_isospectral,
    fingerprint,
    inverse_isospectral,
    multiplicity,
    spectrum_table,
    sphere_multiplicity,
)
from .oracle import (
    ComplexSeries,
    OracleMismatch,
    OracleReport,
    TooLarge,
    brute_counts,
    generating_coeffs,
    half_spin_characters,
    oracle_compare,
    series_multiplicities,
    snap_to_integers,
)
from .search import (
    FORMAT_VERSION,
    CensusResult,
    FormatError,
    IoError,
    IsospectralFamily,
    VerificationFailed,
    VerificationReport,
    enumerate_classes,
    export_csv,
    load_results,
    mirror_pair,
    run_census,
    save_results,
    spin_pair,
    tower_family,
    verify_family,
)

__version__ = "0.1.0"

__all__ = [
    "NotInvertible",
    "binomial",
    "mod_inverse",
    "units",
    "CanonicalKey",
    "DimensionTooSmall",
    "IsometryWitness",
    "LensParams",
    "Mismatch",
    "NoSpinStructure",
    "NotCoprime",
    "SpinLabel",
    "SpinLensSpace",
    "canonical_key",
    "find_isometry",
    "find_lens_isometry",
    "format_spin_lens",
    "h_shift",
    "make_lens",
    "spin_space",
    "spin_structures",
    "CongruenceLattice",
    "ReducedCountTable",
    "apply_norm_isometry",
    "clear_caches",
    "contains",
    "count",
    "lattice_of",
    "point_level",
    "point_neg_parity",
    "point_norm2",
    "reduced_counts",
    "reduced_level_bound",
    "Eigenvalue",
    "LevelMultiplicities",
    "dirac_isospectral",
    "fingerprint",
    "inverse_isospectral",
    "multiplicity",
    "spectrum_table",
    "sphere_multiplicity",
    "ComplexSeries",
    "OracleMismatch",
    "OracleReport",
    "TooLarge",
    "brute_counts",
    "generating_coeffs",
    "half_spin_characters",
    "oracle_compare",
    "series_multiplicities",
    "snap_to_integers",
    "FORMAT_VERSION",
    "CensusResult",
    "FormatError",
    "IoError",
    "IsospectralFamily",
    "VerificationFailed",
    "VerificationReport",
    "enumerate_classes",
    "export_csv",
    "load_results",
    "mirror_pair",
    "run_census",
    "save_results",
    "spin_pair",
    "tower_family",
    "verify_family",
    "__version__",
]
