from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import ConfigError

POOL_FACTOR = 16  # four 2x2 max-pools


@dataclass(frozen=True)
class RecogniserConfig:
    n: int
    K: int
    channels: int = 3
    blocks: int = 4
    convs_per_block: int = 2
    filters: int = 32
    kernel: int = 3
    leaky_slope: float = 0.2
    feature_dim: int = 32
    skip_rnn: int | None = None  # LSTM hidden width, or None for the plain recogniser

    def __post_init__(self):
        if self.n < 1 or self.K < 2:
            raise ConfigError("recogniser needs n >= 1 and K >= 2")
        if self.blocks != 4:
            raise ConfigError("the recogniser has four pooling blocks (width n*16 maps to n positions)")
        if self.feature_dim != self.filters:
            raise ConfigError("feature_dim must equal the number of filters")
        if self.kernel % 2 == 0:
            raise ConfigError("kernel must be odd")
        if self.skip_rnn is not None and self.skip_rnn < 1:
            raise ConfigError("skip_rnn hidden width must be positive")

    @property
    def width(self) -> int:
        return self.n * POOL_FACTOR

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RecogniserConfig":
        return cls(**d)


@dataclass(frozen=True)
class DiscriminatorConfig:
    K: int
    n: int
    embed_dim: int = 256
    layers: int = 5
    filters: int = 512
    kernel: int = 5
    leaky_slope: float = 0.2

    def __post_init__(self):
        if self.kernel % 2 == 0:
            raise ConfigError("discriminator kernel must be odd")
        if self.layers < 1:
            raise ConfigError("discriminator needs at least one layer")

    @classmethod
    def synthetic(cls, K: int, n: int) -> "DiscriminatorConfig":
        return cls(K, n)

    @classmethod
    def real(cls, K: int, n: int) -> "DiscriminatorConfig":
        return cls(K, n, layers=8, kernel=11)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DiscriminatorConfig":
        return cls(**d)
