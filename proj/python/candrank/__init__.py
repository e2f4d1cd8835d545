"""Consensus ranking and contrastive training for summary candidates."""

from ._candrank import (
    CandrankError,
    ToyModel,
    brio_score,
    combined_loss,
    composite_rouge,
    consensus_score,
    ctr_loss,
    ctr_loss_grad,
    diverse_beam_search,
    f_value,
    grad_check,
    init_model,
    make_vocabulary,
    margin,
    rank,
    rouge_l,
    rouge_n,
    simulate,
    tokenize,
    train,
)

__all__ = [
    "CandrankError",
    "ToyModel",
    "brio_score",
    "combined_loss",
    "composite_rouge",
    "consensus_score",
    "ctr_loss",
    "ctr_loss_grad",
    "diverse_beam_search",
    "f_value",
    "grad_check",
    "init_model",
    "make_vocabulary",
    "margin",
    "rank",
    "rouge_l",
    "rouge_n",
    "simulate",
    "tokenize",
    "train",
]
