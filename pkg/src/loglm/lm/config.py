"""Model and training configuration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModelConfig:
    """Architecture hyperparameters of the decoder-only key model."""

    n_layers: int
    n_heads: int
    d_model: int
    d_ff: int
    max_context: int
    vocab_size: int
    precision: str = "f32"  # "f32" | "f64"
    rope_theta: float = 10000.0
    norm_eps: float = 1e-5
    # Debug downgrade: learned positional embeddings + plain ReLU feed-forward
    # instead of rotary positions + gated feed-forward.
    classic_blocks: bool = False

    def __post_init__(self) -> None:
        if self.d_model % self.n_heads != 0:
            raise ValueError("d_model must be divisible by n_heads")
        if self.vocab_size < 2:
            raise ValueError("vocab_size must be >= 2")
        if self.max_context < 2:
            raise ValueError("max_context must be >= 2")
        if self.n_layers < 1 or self.d_ff < 1:
            raise ValueError("n_layers and d_ff must be >= 1")
        if self.precision not in ("f32", "f64"):
            raise ValueError("precision must be 'f32' or 'f64'")

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float64 if self.precision == "f64" else np.float32)


def toy_config(vocab_size: int, max_context: int = 128, **overrides) -> ModelConfig:
    """Small profile used by tests and the synthetic experiments."""
    params = dict(
        n_layers=2, n_heads=2, d_model=32, d_ff=64, max_context=max_context, vocab_size=vocab_size
    )
    params.update(overrides)
    return ModelConfig(**params)


def paper_profile(vocab_size: int, max_context: int = 128, **overrides) -> ModelConfig:
    """The full-scale profile: 18 layers, 12 heads, model width 60."""
    params = dict(
        n_layers=18, n_heads=12, d_model=60, d_ff=160, max_context=max_context, vocab_size=vocab_size
    )
    params.update(overrides)
    return ModelConfig(**params)


@dataclass(frozen=True)
class TrainConfig:
    """Next-key training hyperparameters."""

    learning_rate: float = 1e-3
    batch_size: int = 32
    epochs: int = 100
    seed: int = 0
    optimizer: str = "adam"  # "adam" | "sgd"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError("optimizer must be 'adam' or 'sgd'")
