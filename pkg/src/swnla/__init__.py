"""Sliding-window sketches for numerical linear algebra."""

from .cov_approx import CovSketchState, cov_ingest, cov_query, decode_bits, encode_bits, round_entry
from .errors import DimensionError, InputError, ResourceError, SwnlaError
from .experiment import Report, run_experiment
from .l1_sliding import (
    L1SamplerState,
    L1SlidingState,
    L1UnboundedSliding,
    l1_leverage_scores,
    l1_sliding_ingest,
    l1_sliding_query,
    well_conditioned_basis,
)
from .linalg import (
    EmbeddingSpec,
    best_rank_k_residual,
    online_ridge_scores,
    psd_dominates,
    ridge_leverage_scores,
    spectral_sandwich,
    two_sided_sandwich,
)
from .lowrank_pcp import EstimateState, PcpState, estimate_ingest, estimate_query, pcp_ingest, pcp_query
from .online_lra import OnlineLraState, online_ingest, online_result
from .oracle import WindowOracle, oracle_metrics
from .reverse_sampler import MetaState, SampledRow, SamplerConfig, downsample, meta_ingest, meta_query
from .smooth_histogram import SmoothHistogram, frobenius_histogram, sh_ingest, sh_query
from .solve import solve_from_sketch
from .spectral_histogram import SpectralHistogram, det_ingest, det_query
from .streams import StreamSpec, generate

__version__ = "0.1.0"
