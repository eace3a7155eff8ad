"""
CT-GNN configuration models.

Pydantic models for every file-facing configuration block: the run config
(model, objective, optimizer, training and data sections), the synthetic
dataset generator and the sequential search space.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_BETA,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
    DEFAULT_LR_FACTOR,
    DEFAULT_MOMENTUM,
    DEFAULT_OMEGA,
    DEFAULT_PRIMARY_WEIGHT,
    DEFAULT_THRESHOLD,
    DEFAULT_WEIGHT_DECAY,
    ENCODER_HIDDEN_DIM,
    ENCODER_OUTPUT_DIM,
    HYPERPARAMETER_ROWS,
)


class ConfigModel(BaseModel):
    """Base model for all configuration blocks."""

    model_config = ConfigDict(
        extra="forbid",
        validate_assignment=True,
        populate_by_name=True,
    )


class TaskEntry(ConfigModel):
    """One task as written in schema and synthetic generator files."""

    name: str = Field(..., min_length=1)
    kind: Literal["multi_label", "multi_class"]
    classes: List[str] = Field(..., min_length=1)


class ModelSection(ConfigModel):
    """Architecture hyperparameters; unset values come from the row of ``gnn_kind``."""

    gnn_kind: Literal["gcn", "gat"] = "gcn"
    mode: Literal["ctgnn", "baseline"] = "ctgnn"
    num_layers: int = Field(HYPERPARAMETER_ROWS["gcn"]["num_layers"], ge=0)
    embedding_dim: int = Field(HYPERPARAMETER_ROWS["gcn"]["embedding_dim"], ge=1)
    bottleneck_dim: int = Field(HYPERPARAMETER_ROWS["gcn"]["bottleneck_dim"], ge=1)
    heads: int = Field(HYPERPARAMETER_ROWS["gcn"]["heads"], ge=1)
    tau: float = Field(HYPERPARAMETER_ROWS["gcn"]["tau"], ge=0.0, le=1.0)
    tau_overrides: Dict[str, float] = Field(
        default_factory=dict,
        description="Per task-pair thresholds keyed 'row_task:col_task'",
    )
    p: float = Field(HYPERPARAMETER_ROWS["gcn"]["p"], ge=0.0, le=1.0)
    skip: bool = True
    shared_bottleneck: bool = False
    task_decoder_dim: Optional[int] = Field(None, ge=1)
    encoder_hidden_dim: int = Field(ENCODER_HIDDEN_DIM, ge=1)
    encoder_dim: int = Field(ENCODER_OUTPUT_DIM, ge=1)
    activation: Literal["relu", "leaky_relu"] = "relu"

    @model_validator(mode="before")
    @classmethod
    def fill_row_defaults(cls, data: Any) -> Any:
        """Unset hyperparameters take the published row for the chosen GNN kind."""
        if isinstance(data, dict):
            kind = data.get("gnn_kind", "gcn")
            if kind in HYPERPARAMETER_ROWS:
                data = dict(data)
                for key, value in HYPERPARAMETER_ROWS[kind].items():
                    data.setdefault(key, value)
        return data

    @field_validator("tau_overrides")
    @classmethod
    def validate_tau_overrides(cls, value: Dict[str, float]) -> Dict[str, float]:
        for key, tau in value.items():
            if key.count(":") != 1:
                raise ValueError(f"tau override key must be 'row_task:col_task', got {key!r}")
            if not 0.0 <= tau <= 1.0:
                raise ValueError(f"tau override {key!r} outside [0, 1]: {tau}")
        return value

    @model_validator(mode="after")
    def validate_heads(self) -> "ModelSection":
        if self.gnn_kind == "gat" and self.embedding_dim % self.heads != 0:
            raise ValueError(
                f"heads ({self.heads}) must divide embedding_dim ({self.embedding_dim})"
            )
        return self

    def parsed_tau_overrides(self) -> Dict[tuple, float]:
        return {tuple(key.split(":")): tau for key, tau in self.tau_overrides.items()}


class ObjectiveSection(ConfigModel):
    """Loss weighting."""

    omega: float = Field(DEFAULT_OMEGA, ge=0.0, le=1.0)
    task_weights: Optional[Dict[str, float]] = None
    primary_task: Optional[str] = None
    primary_weight: float = Field(DEFAULT_PRIMARY_WEIGHT, ge=0.0, le=1.0)
    class_weighting: Literal["effective_number", "uniform"] = "effective_number"
    beta: float = Field(DEFAULT_BETA, ge=0.0, lt=1.0)
    ciw: Optional[Dict[str, float]] = Field(
        None, description="Class importance weights of the multi-label task, by class name"
    )
    threshold: float = Field(DEFAULT_THRESHOLD, gt=0.0, lt=1.0)

    @field_validator("ciw")
    @classmethod
    def validate_ciw(cls, value: Optional[Dict[str, float]]) -> Optional[Dict[str, float]]:
        if value is not None and any(w <= 0 for w in value.values()):
            raise ValueError("class importance weights must be positive")
        return value


class OptimizerSection(ConfigModel):
    """SGD with momentum and a step schedule."""

    lr: float = Field(DEFAULT_LEARNING_RATE, gt=0.0)
    momentum: float = Field(DEFAULT_MOMENTUM, ge=0.0, lt=1.0)
    weight_decay: float = Field(DEFAULT_WEIGHT_DECAY, ge=0.0)
    milestones: Optional[List[int]] = None
    factor: float = Field(DEFAULT_LR_FACTOR, gt=0.0)

    @field_validator("milestones")
    @classmethod
    def validate_milestones(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError(f"milestones must be strictly increasing: {value}")
        return value


class TrainingSection(ConfigModel):
    epochs: int = Field(DEFAULT_EPOCHS, ge=0)
    batch_size: int = Field(DEFAULT_BATCH_SIZE, ge=1)
    seed: int = Field(0, ge=0)
    selection_metric: Literal["delta_mtl", "F2_CIW"] = "delta_mtl"
    baseline_report: Optional[str] = None


class DataSection(ConfigModel):
    """Dataset locations; relative paths resolve against the config file."""

    schema_path: Optional[str] = Field(None, alias="schema")
    train: Optional[str] = None
    val: Optional[str] = None
    test: Optional[str] = None
    water_task: Optional[str] = Field(
        None, description="Task whose file labels are raw water-level percentages"
    )
    water_scheme: Literal["binned", "raw"] = "binned"


class RunConfig(ConfigModel):
    """Complete description of one training run."""

    model: ModelSection = Field(default_factory=ModelSection)
    objective: ObjectiveSection = Field(default_factory=ObjectiveSection)
    optimizer: OptimizerSection = Field(default_factory=OptimizerSection)
    training: TrainingSection = Field(default_factory=TrainingSection)
    data: DataSection = Field(default_factory=DataSection)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)

    def resolve_paths(self, base_dir: Path) -> "RunConfig":
        """Anchor relative data and report paths at ``base_dir``."""

        def anchor(value: Optional[str]) -> Optional[str]:
            if value is None or Path(value).is_absolute():
                return value
            return str(base_dir / value)

        data = self.data.model_copy(
            update={
                "schema_path": anchor(self.data.schema_path),
                "train": anchor(self.data.train),
                "val": anchor(self.data.val),
                "test": anchor(self.data.test),
            }
        )
        training = self.training.model_copy(
            update={"baseline_report": anchor(self.training.baseline_report)}
        )
        return self.model_copy(update={"data": data, "training": training})


class SyntheticSpec(ConfigModel):
    """Parameters of the correlated multi-task synthetic generator."""

    tasks: List[TaskEntry] = Field(..., min_length=1)
    contexts: int = Field(4, ge=1)
    rho: float = Field(0.9, ge=0.0, le=1.0)
    noise: float = Field(1.0, ge=0.0)
    feature_dim: int = Field(16, ge=1)
    n_records: int = Field(1000, ge=0)
    seed: int = Field(0, ge=0)
    context_weights: Optional[List[float]] = None
    context_tables: Optional[Dict[str, List[List[float]]]] = Field(
        None,
        description="Per task, K rows of class probabilities (multi_class) "
        "or per-class inclusion probabilities (multi_label)",
    )
    marginals: Optional[Dict[str, List[float]]] = None

    def schema_dict(self) -> Dict[str, Any]:
        return {"tasks": [t.model_dump() for t in self.tasks]}


class SearchSpace(ConfigModel):
    """Candidate values per search stage; an absent key skips its stage."""

    num_layers: Optional[List[int]] = None
    embedding_dim: Optional[List[int]] = None
    bottleneck_dim: Optional[List[int]] = None
    heads: Optional[List[int]] = None
    tau: Optional[List[float]] = None
    p: Optional[List[float]] = None
