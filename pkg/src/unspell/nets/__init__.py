"""Recogniser, discriminator and character embedding."""

from .checkpoint import load_checkpoint, read_manifest, save_checkpoint
from .config import DiscriminatorConfig, RecogniserConfig
from .models import (
    Discriminator,
    ModelBundle,
    Recogniser,
    check_simplex,
    discriminator_forward,
    discriminator_map,
    embed_strings,
    recogniser_forward,
    skip_rnn,
)
from .receptive import column_window, receptive_field, stack_rf

__all__ = [
    "RecogniserConfig", "DiscriminatorConfig", "Recogniser", "Discriminator", "ModelBundle",
    "recogniser_forward", "skip_rnn", "embed_strings", "discriminator_forward", "discriminator_map",
    "check_simplex", "receptive_field", "column_window", "stack_rf",
    "save_checkpoint", "load_checkpoint", "read_manifest",
]
