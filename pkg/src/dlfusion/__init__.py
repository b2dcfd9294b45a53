"""Joint model-parallelism and layer-fusion tuning for a multicore DNN accelerator.

The package predicts inference latency of a layer-fused schedule on a
parametric 32-core accelerator and searches the joint space of fusion
partitions and per-block model parallelism for the lowest-latency plan.
"""

from .codegen import (
    GeneratedProject,
    emit,
    parse_generated,
    render,
    render_template,
)
from .config import CostModelConfig, load_config
from .costmodel import (
    CostBreakdown,
    RedundancyReport,
    SchedulePrediction,
    block_cost,
    block_memory_bytes,
    channel_efficiency,
    halo_redundancy,
    predict_schedule,
    single_core_efficiency,
    tile_grid,
)
from .errors import (
    ConfigError,
    CoverageError,
    DegenerateDataError,
    DLFusionError,
    DomainError,
    EmptyNetworkError,
    EmptySweepError,
    ExistsError,
    InsufficientDataError,
    InvalidStrategyError,
    IoError,
    NoComputeLayerError,
    NonPowerOfTwoError,
    NotComputeLayerError,
    SchemaError,
    SpaceTooLargeError,
    TemplateError,
    ValidationError,
)
from .fusion import ORACLE_LABEL, STRATEGY_LABELS, joint_opt, strategy_schedule
from .ir import (
    ATTACHED_KINDS,
    FIXTURE_NAMES,
    ConvParams,
    FcParams,
    Layer,
    LayerKind,
    NetworkIR,
    compute_layers,
    load_fixture,
    parse_network,
    serialize_network,
    validate_network,
)
from .microbench import (
    SweepSpec,
    best_mp_for_layer,
    generate_sweep,
    sweep_curves,
    synthesize_profiles,
    write_curves,
)
from .mpselect import (
    CalibrationResult,
    MpChoice,
    MpScore,
    ProfileRecord,
    calibrate,
    channel_mp_cap,
    mp_score,
    optimal_mp,
    read_profiles,
    score_to_mp,
    write_profiles,
)
from .opcount import (
    OpCount,
    conv_ops,
    fc_ops,
    format_scientific,
    intensity,
    layer_ops,
    network_ops,
    search_space,
    tensor_bytes,
)
from .schedule import (
    FusionBlock,
    Schedule,
    check_coverage,
    make_block,
    parse_schedule,
    serialize_schedule,
)
from .search import (
    DEFAULT_MP_CHOICES,
    SearchResult,
    SearchSpaceSpec,
    brute_force,
    candidate_count,
    enumerate_partitions,
)

__version__ = "0.1.0"

__all__ = [
    "ATTACHED_KINDS",
    "CalibrationResult",
    "ConfigError",
    "ConvParams",
    "CostBreakdown",
    "CostModelConfig",
    "CoverageError",
    "DEFAULT_MP_CHOICES",
    "DLFusionError",
    "DegenerateDataError",
    "DomainError",
    "IoError",
    "EmptyNetworkError",
    "EmptySweepError",
    "ExistsError",
    "FIXTURE_NAMES",
    "FcParams",
    "FusionBlock",
    "GeneratedProject",
    "InsufficientDataError",
    "InvalidStrategyError",
    "Layer",
    "LayerKind",
    "MpChoice",
    "MpScore",
    "NetworkIR",
    "NoComputeLayerError",
    "NonPowerOfTwoError",
    "NotComputeLayerError",
    "ORACLE_LABEL",
    "OpCount",
    "ProfileRecord",
    "RedundancyReport",
    "STRATEGY_LABELS",
    "Schedule",
    "SchedulePrediction",
    "SchemaError",
    "SearchResult",
    "SearchSpaceSpec",
    "SpaceTooLargeError",
    "SweepSpec",
    "TemplateError",
    "ValidationError",
    "best_mp_for_layer",
    "block_cost",
    "block_memory_bytes",
    "brute_force",
    "calibrate",
    "candidate_count",
    "channel_efficiency",
    "channel_mp_cap",
    "check_coverage",
    "compute_layers",
    "conv_ops",
    "emit",
    "enumerate_partitions",
    "fc_ops",
    "format_scientific",
    "generate_sweep",
    "halo_redundancy",
    "intensity",
    "joint_opt",
    "layer_ops",
    "load_config",
    "load_fixture",
    "make_block",
    "mp_score",
    "network_ops",
    "optimal_mp",
    "parse_generated",
    "parse_network",
    "parse_schedule",
    "predict_schedule",
    "read_profiles",
    "render",
    "render_template",
    "score_to_mp",
    "search_space",
    "serialize_network",
    "serialize_schedule",
    "single_core_efficiency",
    "strategy_schedule",
    "sweep_curves",
    "synthesize_profiles",
    "tensor_bytes",
    "tile_grid",
    "validate_network",
    "write_curves",
    "write_profiles",
]
