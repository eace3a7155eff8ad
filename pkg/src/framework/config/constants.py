"""
CT-GNN toolkit constants and default values.

Hyperparameter rows, optimizer defaults, the starting point of the
sequential search and the ranges it investigates.
"""

from typing import Any, Dict, List

# =============================================================================
# Application Metadata
# =============================================================================

APP_NAME = "ctgnn"
APP_VERSION = "0.1.0"
ENV_PREFIX = "CTGNN_"
ENV_SEPARATOR = "__"

# =============================================================================
# File Format Versions
# =============================================================================

GRAPH_FORMAT_VERSION = 1
CHECKPOINT_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1

# =============================================================================
# Model Defaults
# =============================================================================

GNN_KINDS = ("gcn", "gat")
MODEL_MODES = ("ctgnn", "baseline")
ACTIVATIONS = ("relu", "leaky_relu")

ATTENTION_SLOPE = 0.2

ENCODER_HIDDEN_DIM = 64
ENCODER_OUTPUT_DIM = 64

HYPERPARAMETER_ROWS: Dict[str, Dict[str, Any]] = {
    "gcn": {
        "num_layers": 3,
        "embedding_dim": 512,
        "bottleneck_dim": 32,
        "heads": 1,
        "tau": 0.05,
        "p": 0.2,
    },
    "gat": {
        "num_layers": 1,
        "embedding_dim": 128,
        "bottleneck_dim": 32,
        "heads": 8,
        "tau": 0.65,
        "p": 0.2,
    },
}

# =============================================================================
# Objective Defaults
# =============================================================================

DEFAULT_OMEGA = 0.75
DEFAULT_BETA = 0.9999
DEFAULT_PRIMARY_WEIGHT = 0.90
DEFAULT_THRESHOLD = 0.5
CLASS_WEIGHTING_MODES = ("effective_number", "uniform")

# =============================================================================
# Optimizer Defaults
# =============================================================================

DEFAULT_LEARNING_RATE = 0.1
DEFAULT_MOMENTUM = 0.9
DEFAULT_WEIGHT_DECAY = 1e-4
DEFAULT_BATCH_SIZE = 256
DEFAULT_EPOCHS = 40
DEFAULT_MILESTONES: List[int] = [20, 30]
DEFAULT_LR_FACTOR = 0.01

SELECTION_METRICS = ("delta_mtl", "F2_CIW")

# =============================================================================
# Sequential Search
# =============================================================================

SEARCH_INITIAL_VALUES: Dict[str, Any] = {
    "num_layers": 2,
    "embedding_dim": 256,
    "bottleneck_dim": 32,
    "heads": 8,
    "tau": 0.05,
    "p": 0.2,
    "primary_weight": 0.5,
}

SEARCH_INVESTIGATED_RANGES: Dict[str, List[Any]] = {
    "num_layers": [1, 2, 3],
    "embedding_dim": [128, 256, 512],
    "bottleneck_dim": [16, 32, 64, 128],
    "heads": [1, 2, 4, 8, 16],
    "tau": [0.0, 0.05] + [round(0.15 + 0.1 * i, 2) for i in range(9)],
    "p": [round(0.1 * i, 1) for i in range(1, 10)],
}

SEARCH_STAGES = ("layers_and_width", "bottleneck", "heads", "tau", "p")

# =============================================================================
# Water Level Labels
# =============================================================================

WATER_LEVELS = tuple(range(0, 101, 10))
WATER_SCHEMES = ("binned", "raw")
WATER_BIN_NAMES = ("[0%,5%)", "[5%,15%)", "[15%,30%)", "[30%,100%]")
