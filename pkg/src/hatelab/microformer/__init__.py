from .checkpoint import load_adapters, load_checkpoint, save_adapters, save_checkpoint
from .config import ModelConfig
from .lora import DEFAULT_TARGETS, attach_lora, merge_lora
from .model import (
    TransformerClassifier,
    forward_logits,
    init_model,
    loss_and_grads,
    pad_batch,
    total_parameters,
    trainable_parameters,
)
from .train import TrainReport, predict, train
from .vocab import WordTokenizer

__all__ = [
    "ModelConfig",
    "TransformerClassifier",
    "WordTokenizer",
    "TrainReport",
    "DEFAULT_TARGETS",
    "attach_lora",
    "merge_lora",
    "forward_logits",
    "init_model",
    "loss_and_grads",
    "pad_batch",
    "predict",
    "train",
    "total_parameters",
    "trainable_parameters",
    "save_checkpoint",
    "load_checkpoint",
    "save_adapters",
    "load_adapters",
]
