"""Random-matrix laboratory: GMRES rates, pseudospectra, and spectral sets
for shifted complex Ginibre matrices.

The package is organized around five layers: dense kernels (:mod:`.linalg`),
seeded ensembles (:mod:`.ensembles`), the Krylov solver and its limiting rate
(:mod:`.gmres`), resolvent-norm geometry (:mod:`.spectral_sets`), and
numerical-range / Blaschke-product machinery (:mod:`.crouzeix`).  The command
line front end in :mod:`.cli` reproduces the figure experiments.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.1.0"

from .linalg import (
    NumericalError,
    SingularMatrixError,
    eig_extreme_hermitian,
    eigenvalues,
    hermitian_part,
    matpoly_eval,
    operator_norm,
    shifted_solve,
    sigma_min,
)
from .ensembles import (
    ShiftedSystem,
    derive_seed,
    make_system,
    matrix_from_bytes,
    matrix_to_bytes,
    read_matrix,
    sample_ginibre,
    sample_hessenberg_model,
    write_matrix,
)
from .gmres import (
    ArnoldiFactorization,
    ResidualCurve,
    adversarial_rhs,
    arnoldi,
    gmres_bounds,
    gmres_residuals,
    limiting_rate,
    residual_from_hessenberg,
)
from .spectral_sets import (
    AnnulusProbe,
    EdgeProfile,
    annulus_probe,
    edge_e,
    edge_e_inv,
    edge_f,
    edge_profile,
    hausdorff_to_disk,
    lipschitz_constants,
    pseudospectrum_radius,
    resolvent_norm,
)
from .crouzeix import (
    BlaschkeProduct,
    BoundaryPolygon,
    DefectReport,
    alpha_sweep,
    blaschke_eval_matrix,
    blaschke_eval_scalar,
    cauchy_defect,
    crouzeix_ratio,
    defect_bound,
    numerical_range_boundary,
    spectral_set_constant_estimate,
    write_sweep_csv,
)
from .svg import render_svg

__all__ = [
    "__version__",
    "NumericalError",
    "SingularMatrixError",
    "sigma_min",
    "operator_norm",
    "eigenvalues",
    "eig_extreme_hermitian",
    "hermitian_part",
    "shifted_solve",
    "matpoly_eval",
    "ShiftedSystem",
    "sample_ginibre",
    "sample_hessenberg_model",
    "make_system",
    "derive_seed",
    "matrix_to_bytes",
    "matrix_from_bytes",
    "write_matrix",
    "read_matrix",
    "ArnoldiFactorization",
    "ResidualCurve",
    "arnoldi",
    "gmres_residuals",
    "residual_from_hessenberg",
    "limiting_rate",
    "gmres_bounds",
    "adversarial_rhs",
    "EdgeProfile",
    "AnnulusProbe",
    "edge_e",
    "edge_f",
    "edge_e_inv",
    "edge_profile",
    "resolvent_norm",
    "annulus_probe",
    "pseudospectrum_radius",
    "hausdorff_to_disk",
    "lipschitz_constants",
    "BoundaryPolygon",
    "BlaschkeProduct",
    "DefectReport",
    "numerical_range_boundary",
    "blaschke_eval_scalar",
    "blaschke_eval_matrix",
    "crouzeix_ratio",
    "alpha_sweep",
    "write_sweep_csv",
    "cauchy_defect",
    "defect_bound",
    "spectral_set_constant_estimate",
    "render_svg",
]
