"""Interface Sturm-Liouville problems with rational eigenparameter couplings.

Typical use::

    from herglotz_sl import configs, find_spectrum, ScanOptions
    records = find_spectrum(configs.double_eigenvalue(), ScanOptions(window=(0, 5)))
"""

from . import configs
from .errors import (
    DomainViolation,
    EigensolverFailure,
    EigenvalueLambda,
    HerglotzSLError,
    IntegratorFailure,
    InterlacingViolation,
    MeshTooCoarse,
    NotAPole,
    NumericalFailure,
    PoleEvaluation,
    ProblemValidationError,
    SlopeZero,
    SuspectedDoubleRoot,
)
from .fd import assemble_fd, fd_spectrum, verify_symmetry
from .greens import apply_greens, greens_matrix, greens_value
from .grid import BlockVector, GridFunction, Mesh
from .problem import (
    ClosedFormPotential,
    PiecewiseConstantPotential,
    ProblemSpec,
    SampledPotential,
    ZeroPotential,
)
from .problemfile import load_problem_file
from .rational import EigenparameterCoupling, reciprocal_expansion
from .resolvent import apply_L, domain_residuals, resolvent_apply, round_trip_defect
from .shooting import shoot
from .spectrum import EigenvalueRecord, ScanOptions, find_spectrum
from .transmission import Variant, characteristic, pole_characteristics, transfer_matrix

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
