"""Encoder stub, cross-task GNN decoder, baseline heads and predictions."""

from .bundle import ModelBundle, build_model
from .decoder import BaselineHeads, CtgnnDecoder, expected_decoder_parameter_count
from .encoder import EncoderStub, Linear
from .output import TaskOutput, predict

__all__ = [
    "BaselineHeads",
    "CtgnnDecoder",
    "EncoderStub",
    "Linear",
    "ModelBundle",
    "TaskOutput",
    "build_model",
    "expected_decoder_parameter_count",
    "predict",
]
