"""chamberwalk: radial random walks on A_r affine buildings and their chamber-BM limit."""

__version__ = "0.1.0"

from .exactnum import QSqrt
from .rootsys import RankConfig, RootSystem, cone_window, root_system
from .qcount import n_lambda, q_t, q_tilde
from .kernel import (
    StepCounts,
    StepDistribution,
    assemble_kernel,
    doob_transform,
    simple_rw_params,
    spectral_gap,
)
from .spectral import F0Table, f0, macdonald_p, p_n_quadrature
from .walk import bridge_ratio, dp_law, mc_paths, rescale
from .ibm import gue_sampler, ibm_density

__all__ = [
    "F0Table",
    "QSqrt",
    "RankConfig",
    "RootSystem",
    "StepCounts",
    "StepDistribution",
    "__version__",
    "assemble_kernel",
    "bridge_ratio",
    "cone_window",
    "doob_transform",
    "dp_law",
    "f0",
    "gue_sampler",
    "ibm_density",
    "macdonald_p",
    "mc_paths",
    "n_lambda",
    "p_n_quadrature",
    "q_t",
    "q_tilde",
    "rescale",
    "root_system",
    "simple_rw_params",
    "spectral_gap",
]
