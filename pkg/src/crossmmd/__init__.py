"""crossmmd: permutation-free kernel two-sample testing.

The centerpiece is the studentized cross-MMD statistic (sample splitting +
studentization), whose null distribution is standard normal, so the test
threshold is a normal quantile instead of a permutation quantile. Classical
quadratic-time MMD with permutation calibration, block-MMD, and linear-MMD
are included as baselines, plus a Monte Carlo harness for null/type-I/
power/ROC/timing studies.
"""

__version__ = "0.1.0"

from .errors import DataFormatError, DegenerateDataError, InvalidInputError
from .kernels import (FAMILIES, GramBlocks, KernelSpec, as_sample, eval_kernel,
                      eval_kernel_rowwise, gram_matrix, median_auto_gram,
                      median_bandwidth, median_kernel_spec)
from .calibration import (EmpiricalSample, ks_distance, normal_cdf,
                          normal_quantile, predict_perm_power)
from .baselines import (PermutationPlan, TestResult, block_mmd_test, h_mmd,
                        linear_mmd_test, mmd_relabeled, mmd_u_direct,
                        mmd_u_statistic, permutation_test)
from .cross import (CrossMmdResult, SplitPlan, cross_mmd_statistic,
                    split_samples, studentize, xmmd_test, xmmd_test_from_gram)
from .ustat import DegenerateKernel, PhiMatrix, general_cross_t, mmd_kernel, phi_matrix
from .datagen import (DIRICHLET, GAUSSIAN_SHIFT, RNG_ALGORITHM, RngState,
                      SourceSpec, sample, shift_vector)
from .harness import (ExperimentSpec, ResultTable, parse_test_id, read_csv,
                      run, run_bench, run_null_hist, run_power_curve, run_roc,
                      run_type_one_error, write_csv, write_raw_csv,
                      write_roc_points_csv, write_sidecar)
from ._accel import backend_name

__all__ = [
    "__version__", "backend_name",
    "DataFormatError", "DegenerateDataError", "InvalidInputError",
    "FAMILIES", "GramBlocks", "KernelSpec", "as_sample", "eval_kernel",
    "eval_kernel_rowwise", "gram_matrix", "median_auto_gram",
    "median_bandwidth", "median_kernel_spec",
    "EmpiricalSample", "ks_distance", "normal_cdf", "normal_quantile",
    "predict_perm_power",
    "PermutationPlan", "TestResult", "block_mmd_test", "h_mmd",
    "linear_mmd_test", "mmd_relabeled", "mmd_u_direct", "mmd_u_statistic",
    "permutation_test",
    "CrossMmdResult", "SplitPlan", "cross_mmd_statistic", "split_samples",
    "studentize", "xmmd_test", "xmmd_test_from_gram",
    "DegenerateKernel", "PhiMatrix", "general_cross_t", "mmd_kernel",
    "phi_matrix",
    "DIRICHLET", "GAUSSIAN_SHIFT", "RNG_ALGORITHM", "RngState", "SourceSpec",
    "sample", "shift_vector",
    "ExperimentSpec", "ResultTable", "parse_test_id", "read_csv", "run",
    "run_bench", "run_null_hist", "run_power_curve", "run_roc",
    "run_type_one_error", "write_csv", "write_raw_csv",
    "write_roc_points_csv", "write_sidecar",
]
