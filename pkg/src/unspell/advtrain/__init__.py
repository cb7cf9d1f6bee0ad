"""Adversarial (and supervised) training of the recogniser against a character-sequence discriminator."""

from .losses import d_loss, g_loss
from .loop import (
    EvalResult,
    RunResult,
    TrainConfig,
    build_bundle,
    evaluate_bundle,
    fingerprint,
    predict,
    run_seeds,
    run_training,
    train_run,
)
from .runlog import RunLog
from .steps import OptStates, d_phase, frozen, g_phase, supervised_step, train_step

__all__ = [
    "d_loss", "g_loss", "train_step", "d_phase", "g_phase", "supervised_step", "OptStates", "frozen",
    "TrainConfig", "RunLog", "RunResult", "EvalResult", "evaluate_bundle", "predict", "fingerprint",
    "run_seeds", "build_bundle", "train_run", "run_training",
]
