"""Two-bit dithered covariance estimation."""

from bitcov._backend import NAME as BACKEND
from bitcov.estimators import (
    EstimatorSpec,
    est_adaptive_na,
    est_adaptive_sign,
    est_mb,
    est_na,
    est_pf,
    est_tb,
    estimate,
    estimate_from_quantized,
    sample_cov,
)
from bitcov.linalg import (
    SigmaSpec,
    SymMatrix,
    effective_rank,
    make_sigma,
    max_abs_entry,
    operator_norm,
    sampling_factor,
    sym_eigen,
)
from bitcov.quant import QuantizedBatch, quantize_batch
from bitcov.sampling import SeedSpec, column_max_abs, derive_stream, sample_gaussian

__version__ = "0.1.0"
