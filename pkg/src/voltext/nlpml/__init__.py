from voltext.nlpml.checkpoint import load_checkpoint, save_checkpoint
from voltext.nlpml.input import MAX_LEN, PAD_TOKEN, SentenceMatrix, build_day_input, multi_day_input
from voltext.nlpml.model import (
    AdamHyper,
    CnnConfig,
    NlpModelParams,
    adam_step,
    backward_batch,
    conv_valid,
    forward,
    forward_batch,
    input_gradient,
    input_gradient_batch,
    loss_batch,
    resolve_batch,
)
from voltext.nlpml.training import retrain_steps, train_model, train_rolling

__all__ = [
    "AdamHyper",
    "CnnConfig",
    "MAX_LEN",
    "NlpModelParams",
    "PAD_TOKEN",
    "SentenceMatrix",
    "adam_step",
    "backward_batch",
    "build_day_input",
    "conv_valid",
    "forward",
    "forward_batch",
    "input_gradient",
    "input_gradient_batch",
    "load_checkpoint",
    "loss_batch",
    "multi_day_input",
    "resolve_batch",
    "retrain_steps",
    "save_checkpoint",
    "train_model",
    "train_rolling",
]
