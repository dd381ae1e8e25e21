"""Principal roots, sign function and geometric mean of accretive matrices."""
from .errors import *  # noqa: F401,F403
from .generators import GeneratorSpec, fixed_instance, generate
from .harness import ExperimentReport, SuiteConfig, run_suite
from .iterative import (IterationConfig, binomial_method, halley_pth_root, newton_pth_root, newton_sqrt,
                        visser_method)
from .matrix_core import load_matrix, save_matrix
from .mean import MeanResult, geometric_mean, mean_counterexamples, mean_identities, mean_integral
from .roots import RootResult, principal_power, principal_root, riesz_negative_power
from .sign import pth_root_via_sign, sign, sign_block, sign_properties, sylvester_solve
from .spectral import classify, numerical_range
from .traces import IterationTrace

__version__ = "0.1.0"
