"""Architecture descriptors, layer-shape inference and parameter counts."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from ..errors import ShapeError


class ArchKind(enum.Enum):
    CNN_RAND = "cnn-rand"
    CNN_RAND_SIMPLIFIED = "cnn-rand-simplified"
    LSTM = "lstm"
    MEAN_POOL = "meanpool"

    @property
    def is_cnn(self) -> bool:
        return self in (ArchKind.CNN_RAND, ArchKind.CNN_RAND_SIMPLIFIED)


@dataclass(frozen=True)
class ArchitectureDescriptor:
    kind: ArchKind
    embedding_dim: int
    filter_sizes: tuple[int, ...] = ()
    filters_per_size: int = 0
    dropout_embed: float = 0.0
    dropout_penultimate: float = 0.0
    dense_dim: int = 0
    lstm_units: int = 0

    @classmethod
    def default(cls, kind: ArchKind, **overrides) -> "ArchitectureDescriptor":
        base = _DEFAULTS[kind]
        if "filter_sizes" in overrides:
            overrides["filter_sizes"] = tuple(overrides["filter_sizes"])
        return replace(base, **overrides)

    def with_(self, **changes) -> "ArchitectureDescriptor":
        if "filter_sizes" in changes:
            changes["filter_sizes"] = tuple(changes["filter_sizes"])
        return replace(self, **changes)


_DEFAULTS = {
    ArchKind.CNN_RAND: ArchitectureDescriptor(
        ArchKind.CNN_RAND, 50, (3, 4, 5), 100, dropout_embed=0.5, dense_dim=50),
    ArchKind.CNN_RAND_SIMPLIFIED: ArchitectureDescriptor(
        ArchKind.CNN_RAND_SIMPLIFIED, 20, (3, 8), 10, dropout_embed=0.5,
        dropout_penultimate=0.8, dense_dim=50),
    ArchKind.LSTM: ArchitectureDescriptor(
        ArchKind.LSTM, 32, dropout_embed=0.2, dropout_penultimate=0.2, lstm_units=100),
    ArchKind.MEAN_POOL: ArchitectureDescriptor(ArchKind.MEAN_POOL, 20),
}


@dataclass(frozen=True)
class LayerShape:
    name: str
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if any(d <= 0 for d in self.dims):
            raise ShapeError(f"layer {self.name!r} has non-positive shape {self.dims}")


def conv_pool_sizes(length: int, filter_size: int) -> tuple[int, int]:
    """Convolution output length (valid, stride 1) and its size after pool-2."""
    conv = length - filter_size + 1
    return conv, conv // 2


def infer_shapes(arch: ArchitectureDescriptor, max_length: int, vocab_size: int) -> list[LayerShape]:
    L, E = max_length, arch.embedding_dim
    if L < 1:
        raise ShapeError(f"max_length must be positive, got {L}")
    shapes = [LayerShape("input", (L,)), LayerShape("embedding", (L, E))]
    if arch.kind is ArchKind.MEAN_POOL:
        return shapes + [LayerShape("mean", (E,)), LayerShape("output", (1,))]
    if arch.kind is ArchKind.LSTM:
        return shapes + [LayerShape("lstm", (arch.lstm_units,)), LayerShape("output", (1,))]

    if L < max(arch.filter_sizes):
        raise ShapeError(f"max_length {L} is shorter than filter size {max(arch.filter_sizes)}")
    K = arch.filters_per_size
    concat = 0
    for f in arch.filter_sizes:
        conv, pooled = conv_pool_sizes(L, f)
        if pooled < 1:
            raise ShapeError(f"filter size {f} leaves nothing to pool at max_length {L}")
        shapes += [
            LayerShape(f"conv_{f}", (conv, K)),
            LayerShape(f"pool_{f}", (pooled, K)),
            LayerShape(f"flatten_{f}", (pooled * K,)),
        ]
        concat += pooled * K
    return shapes + [
        LayerShape("concat", (concat,)),
        LayerShape("dense", (arch.dense_dim,)),
        LayerShape("output", (1,)),
    ]


def count_parameters(arch: ArchitectureDescriptor, max_length: int, vocab_size: int) -> int:
    E = arch.embedding_dim
    total = vocab_size * E
    if arch.kind is ArchKind.MEAN_POOL:
        return total + (E + 1)
    if arch.kind is ArchKind.LSTM:
        U = arch.lstm_units
        return total + 4 * (U * (E + U) + U) + (U + 1)
    shapes = {s.name: s.dims for s in infer_shapes(arch, max_length, vocab_size)}
    K = arch.filters_per_size
    for f in arch.filter_sizes:
        total += f * E * K + K
    concat = shapes["concat"][0]
    total += (concat + 1) * arch.dense_dim
    total += arch.dense_dim + 1
    return total
