"""Planar shapes of labelled points treated as pure quantum states."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .shape_core import (  # noqa: E402
    Permutation,
    PointConfig,
    ShapeVector,
    fs_distance,
    normalize,
    overlap,
    permute,
    sphere_coords,
    transition_probability,
    unlabeled_distance,
)
from .eigenshapes import (  # noqa: E402
    CoeffVector,
    DegeneracyInfo,
    EigenBasis,
    basis,
    decompose,
    degeneracy,
    eigenshape,
    superpose,
)
from .dynamics import Hamiltonian, evolve, geometric_phase, period_of  # noqa: E402
from .entangle import BipartiteShape, SchmidtData, combine, is_product, max_collinear, schmidt  # noqa: E402
from .diffusion import DiffusionParams, EnsembleReport, run_ensemble, simulate_trajectory  # noqa: E402
