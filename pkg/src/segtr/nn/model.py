"""Numpy classifiers with hand-written reverse-mode gradients.

Two trainable architectures:

* mean-pool: embedding -> masked mean over non-PAD positions -> logistic output
* CNN (CNN-rand and its simplified variant): embedding -> dropout ->
  per filter size [valid conv, ReLU, max-pool 2, flatten] -> concat ->
  dropout -> sigmoid dense -> logistic output

PAD positions are zeroed after the embedding lookup, so the PAD row never
influences an output. Dropout is inverted; eval mode never touches an RNG.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ConfigError, InputError, NumericalError
from .arch import ArchKind, ArchitectureDescriptor, infer_shapes

EMBED_INIT = 0.05


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _fan_in_uniform(rng, fan_in, shape):
    limit = np.sqrt(3.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


def _dropout_mask(rng, shape, rate):
    keep = 1.0 - rate
    return (rng.random(shape) < keep) / keep


class Classifier:
    """Parameters plus the architecture needed to run them.

    ``params`` maps names to float64 arrays; :meth:`forward` and
    :meth:`backward` work on padded id matrices of shape ``(batch, L)``.
    """

    def __init__(self, arch: ArchitectureDescriptor, max_length: int, vocab_size: int,
                 params: dict[str, np.ndarray] | None = None, seed: int = 0, pad_id: int = 0):
        if arch.kind is ArchKind.LSTM:
            raise ConfigError("the LSTM architecture is a descriptor only and cannot be trained")
        self.arch = arch
        self.max_length = max_length
        self.vocab_size = vocab_size
        self.pad_id = pad_id
        self.shapes = infer_shapes(arch, max_length, vocab_size)
        self.params = params if params is not None else self._init(np.random.default_rng(seed))

    @property
    def kind(self) -> ArchKind:
        return self.arch.kind

    def _init(self, rng) -> dict[str, np.ndarray]:
        a = self.arch
        E = a.embedding_dim
        p = {"embedding": rng.uniform(-EMBED_INIT, EMBED_INIT, size=(self.vocab_size, E))}
        if a.kind is ArchKind.MEAN_POOL:
            p["out_w"] = _fan_in_uniform(rng, E, (E,))
            p["out_b"] = np.zeros(1)
            return p
        K = a.filters_per_size
        for f in a.filter_sizes:
            p[f"conv{f}_w"] = _fan_in_uniform(rng, f * E, (f, E, K))
            p[f"conv{f}_b"] = np.zeros(K)
        concat = next(s.dims[0] for s in self.shapes if s.name == "concat")
        p["dense_w"] = _fan_in_uniform(rng, concat, (concat, a.dense_dim))
        p["dense_b"] = np.zeros(a.dense_dim)
        p["out_w"] = _fan_in_uniform(rng, a.dense_dim, (a.dense_dim,))
        p["out_b"] = np.zeros(1)
        return p

    def copy(self) -> "Classifier":
        return Classifier(self.arch, self.max_length, self.vocab_size,
                          {k: v.copy() for k, v in self.params.items()}, pad_id=self.pad_id)

    def dense_weight_names(self) -> list[str]:
        return [n for n in ("dense_w", "out_w") if n in self.params]

    # forward / backward

    def _check_ids(self, ids):
        ids = np.asarray(ids)
        if ids.ndim != 2 or ids.shape[1] != self.max_length:
            raise InputError(f"expected ids of shape (batch, {self.max_length}), got {ids.shape}")
        if ids.size and (ids.min() < 0 or ids.max() >= self.vocab_size):
            raise InputError(f"token id outside [0, {self.vocab_size})")
        return ids

    def forward(self, ids, train: bool = False, rng=None):
        """Return ``(logits, cache)``; ``train`` enables dropout drawn from ``rng``."""
        ids = self._check_ids(ids)
        if self.kind is ArchKind.MEAN_POOL:
            return self._forward_mean(ids, train, rng)
        return self._forward_cnn(ids, train, rng)

    def backward(self, cache, dlogits) -> dict[str, np.ndarray]:
        if self.kind is ArchKind.MEAN_POOL:
            return self._backward_mean(cache, dlogits)
        return self._backward_cnn(cache, dlogits)

    def _embed(self, ids, train, rng, rate):
        mask = (ids != self.pad_id).astype(float)
        emb = self.params["embedding"][ids] * mask[..., None]
        drop = None
        if train and rate > 0:
            drop = _dropout_mask(rng, emb.shape, rate)
            emb = emb * drop
        return emb, mask, drop

    def _scatter_embedding(self, ids, demb, mask, drop):
        if drop is not None:
            demb = demb * drop
        demb = demb * mask[..., None]
        grad = np.zeros_like(self.params["embedding"])
        np.add.at(grad, ids.reshape(-1), demb.reshape(-1, demb.shape[-1]))
        return grad

    def _forward_mean(self, ids, train, rng):
        p = self.params
        emb, mask, drop = self._embed(ids, train, rng, self.arch.dropout_embed)
        counts = np.maximum(mask.sum(axis=1), 1.0)
        pooled = emb.sum(axis=1) / counts[:, None]
        logits = pooled @ p["out_w"] + p["out_b"][0]
        return logits, (ids, mask, drop, counts, pooled)

    def _backward_mean(self, cache, dz):
        ids, mask, drop, counts, pooled = cache
        p = self.params
        g = {"out_w": pooled.T @ dz, "out_b": np.array([dz.sum()])}
        dpooled = dz[:, None] * p["out_w"][None, :]
        demb = np.broadcast_to((dpooled / counts[:, None])[:, None, :],
                               ids.shape + (dpooled.shape[1],))
        g["embedding"] = self._scatter_embedding(ids, demb, mask, drop)
        return g

    def _forward_cnn(self, ids, train, rng):
        p, a = self.params, self.arch
        B = ids.shape[0]
        emb, mask, drop_e = self._embed(ids, train, rng, a.dropout_embed)
        branches = []
        flats = []
        for f in a.filter_sizes:
            win = sliding_window_view(emb, f, axis=1)          # (B, T, E, f)
            conv = np.einsum("btef,fek->btk", win, p[f"conv{f}_w"]) + p[f"conv{f}_b"]
            act = np.maximum(conv, 0.0)
            T, K = act.shape[1], act.shape[2]
            P = T // 2
            pairs = act[:, : 2 * P].reshape(B, P, 2, K)
            arg = pairs.argmax(axis=2)
            pooled = np.take_along_axis(pairs, arg[:, :, None, :], axis=2)[:, :, 0, :]
            flats.append(pooled.reshape(B, P * K))
            branches.append((f, win, conv, arg, T, P, K))
        concat = np.concatenate(flats, axis=1)
        drop_p = None
        if train and a.dropout_penultimate > 0:
            drop_p = _dropout_mask(rng, concat.shape, a.dropout_penultimate)
            concat = concat * drop_p
        hidden = sigmoid(concat @ p["dense_w"] + p["dense_b"])
        logits = hidden @ p["out_w"] + p["out_b"][0]
        return logits, (ids, mask, drop_e, branches, concat, drop_p, hidden)

    def _backward_cnn(self, cache, dz):
        ids, mask, drop_e, branches, concat, drop_p, hidden = cache
        p = self.params
        B, L = ids.shape
        g = {"out_w": hidden.T @ dz, "out_b": np.array([dz.sum()])}
        dh = dz[:, None] * p["out_w"][None, :] * hidden * (1.0 - hidden)
        g["dense_w"] = concat.T @ dh
        g["dense_b"] = dh.sum(axis=0)
        dconcat = dh @ p["dense_w"].T
        if drop_p is not None:
            dconcat = dconcat * drop_p
        demb = np.zeros((B, L, p["embedding"].shape[1]))
        offset = 0
        for f, win, conv, arg, T, P, K in branches:
            dpooled = dconcat[:, offset: offset + P * K].reshape(B, P, 1, K)
            offset += P * K
            dpairs = np.zeros((B, P, 2, K))
            np.put_along_axis(dpairs, arg[:, :, None, :], dpooled, axis=2)
            dact = np.zeros((B, T, K))
            dact[:, : 2 * P] = dpairs.reshape(B, 2 * P, K)
            dconv = dact * (conv > 0)
            g[f"conv{f}_w"] = np.einsum("btef,btk->fek", win, dconv)
            g[f"conv{f}_b"] = dconv.sum(axis=(0, 1))
            dwin = np.einsum("btk,fek->btef", dconv, p[f"conv{f}_w"])
            for j in range(f):
                demb[:, j: j + T, :] += dwin[:, :, :, j]
        g["embedding"] = self._scatter_embedding(ids, demb, mask, drop_e)
        return g


def as_id_matrix(batch) -> np.ndarray:
    """Accept an id matrix or a list of encoded sequences."""
    if isinstance(batch, np.ndarray):
        return batch
    return np.array([s.ids for s in batch], dtype=np.int64).reshape(len(batch), -1)


def forward(model: Classifier, batch, train: bool = False, rng=None) -> np.ndarray:
    """Probabilities for a batch; ``train=True`` applies dropout from ``rng``."""
    if train and rng is None:
        raise ConfigError("train-mode forward needs a seeded RNG")
    logits, _ = model.forward(as_id_matrix(batch), train=train, rng=rng)
    return sigmoid(logits)


def bce_from_logits(logits, labels):
    return np.logaddexp(0.0, logits) - labels * logits


def loss_and_gradients(model: Classifier, batch, labels, l2: float = 0.0, train: bool = False,
                       rng=None):
    """Mean binary cross-entropy plus ``l2 * ||dense weights||^2`` and its gradients."""
    ids = as_id_matrix(batch)
    y = np.asarray(labels, dtype=float)
    logits, cache = model.forward(ids, train=train, rng=rng)
    n = len(y)
    loss = float(bce_from_logits(logits, y).mean())
    penalty_names = model.dense_weight_names()
    if l2:
        loss += l2 * sum(float(np.sum(model.params[k] ** 2)) for k in penalty_names)
    if not np.isfinite(loss):
        worst = float(np.max(np.abs(logits))) if logits.size else float("nan")
        raise NumericalError(f"non-finite loss {loss!r} (max |logit| = {worst!r})")
    grads = model.backward(cache, (sigmoid(logits) - y) / n)
    if l2:
        for k in penalty_names:
            grads[k] = grads[k] + 2.0 * l2 * model.params[k]
    return loss, grads
