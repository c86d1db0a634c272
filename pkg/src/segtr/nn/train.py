"""Mini-batch gradient descent with best-model snapshots and early stopping."""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import InputError, NumericalError, ShapeError, TrainingDiverged
from ..text import graphemes
from .arch import ArchKind, ArchitectureDescriptor
from .model import Classifier, bce_from_logits, loss_and_gradients

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 5
    batch_size: int = 64
    learning_rate: float = 0.1
    seed: int = 0
    min_delta: float = 0.001
    patience: int = 2
    l2: float = 0.0
    early_stop_monitor: str = "val_loss"
    best_save_monitor: str = "val_accuracy"

    @classmethod
    def for_arch(cls, kind: ArchKind, **overrides) -> "TrainConfig":
        if kind.is_cnn:
            base = cls(max_epochs=200, patience=20, learning_rate=0.05)
        else:
            base = cls(max_epochs=5, patience=2, learning_rate=0.1)
        return replace(base, **overrides)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float


@dataclass
class TrainHistory:
    epochs: list[EpochRecord] = field(default_factory=list)
    save_epoch: int = 0
    stopped_early: bool = False

    @property
    def epoch_count(self) -> int:
        return len(self.epochs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "val_loss", "val_accuracy"])
        for e in self.epochs:
            w.writerow([e.epoch, repr(e.train_loss), repr(e.val_loss), repr(e.val_accuracy)])
        return buf.getvalue()


class EarlyStopping:
    """Stop once the monitored loss fails to improve by ``min_delta`` ``patience`` times in a row."""

    def __init__(self, min_delta: float = 0.001, patience: int = 2):
        self.min_delta = min_delta
        self.patience = patience
        self.best = math.inf
        self.wait = 0

    def update(self, value: float) -> bool:
        if value < self.best - self.min_delta:
            self.best = value
            self.wait = 0
            return False
        self.wait += 1
        return self.wait >= self.patience


class BestModelSave:
    """Keep a snapshot whenever the monitored accuracy strictly improves."""

    def __init__(self):
        self.best = -math.inf
        self.epoch = 0
        self.snapshot = None

    def update(self, epoch: int, value: float, params: dict[str, np.ndarray]) -> bool:
        if value > self.best:
            self.best = value
            self.epoch = epoch
            self.snapshot = {k: v.copy() for k, v in params.items()}
            return True
        return False


def evaluate(model: Classifier, ids, labels, batch_size: int = 512):
    """Validation loss and accuracy (threshold 0.5 on the sigmoid) in eval mode."""
    labels = np.asarray(labels, dtype=float)
    total, correct = 0.0, 0
    for start in range(0, len(labels), batch_size):
        logits, _ = model.forward(ids[start: start + batch_size])
        y = labels[start: start + batch_size]
        total += float(bce_from_logits(logits, y).sum())
        # sigmoid(z) > 0.5 exactly when z > 0
        correct += int(np.sum((logits > 0) == (y == 1)))
    n = len(labels)
    return total / n, correct / n


def train(model: Classifier, train_ids, train_labels, val_ids, val_labels, cfg: TrainConfig):
    """Train in place and return ``(best_model, history)``.

    The returned model carries the parameters of the epoch with the best
    validation accuracy; ``history.save_epoch`` is that epoch (1-based).
    """
    train_ids = np.asarray(train_ids)
    val_ids = np.asarray(val_ids)
    train_labels = np.asarray(train_labels, dtype=float)
    if len(train_labels) == 0 or len(val_labels) == 0:
        raise InputError("training and validation partitions must be non-empty")

    rng = np.random.default_rng(cfg.seed)
    stopper = EarlyStopping(cfg.min_delta, cfg.patience)
    saver = BestModelSave()
    history = TrainHistory()
    n = len(train_labels)

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        try:
            for start in range(0, n, cfg.batch_size):
                idx = order[start: start + cfg.batch_size]
                loss, grads = loss_and_gradients(
                    model, train_ids[idx], train_labels[idx], cfg.l2, train=True, rng=rng)
                for name, g in grads.items():
                    model.params[name] -= cfg.learning_rate * g
                total += loss * len(idx)
            val_loss, val_acc = evaluate(model, val_ids, val_labels)
            if not np.isfinite(val_loss):
                raise NumericalError(f"non-finite validation loss at epoch {epoch}")
        except NumericalError as exc:
            history.save_epoch = saver.epoch
            raise TrainingDiverged(f"epoch {epoch}: {exc}", history) from exc

        history.epochs.append(EpochRecord(epoch, total / n, val_loss, val_acc))
        saver.update(epoch, val_acc, model.params)
        log.debug("epoch %d train_loss=%.4f val_loss=%.4f val_acc=%.4f",
                  epoch, total / n, val_loss, val_acc)
        if stopper.update(val_loss):
            history.stopped_early = True
            break

    history.save_epoch = saver.epoch
    best = model.copy()
    best.params = saver.snapshot
    return best, history


# grid search

DEFAULT_FILTER_SETS = ((3, 4, 5), (10, 16, 22), (16, 22, 27), (22, 27, 33))
DEFAULT_DROPOUTS = (0.4, 0.5, 0.6)
DEFAULT_L2S = (0.0, 0.001, 0.01, 0.1)


@dataclass(frozen=True)
class SweepGrid:
    filter_sizes: tuple[tuple[int, ...], ...] = DEFAULT_FILTER_SETS
    dropouts: tuple[float, ...] = DEFAULT_DROPOUTS
    l2s: tuple[float, ...] = DEFAULT_L2S

    def points(self):
        """Cartesian product in grid order, duplicates dropped with a warning."""
        seen = set()
        out = []
        dupes = 0
        for fs, d, l2 in itertools.product(self.filter_sizes, self.dropouts, self.l2s):
            key = (tuple(fs), float(d), float(l2))
            if key in seen:
                dupes += 1
                continue
            seen.add(key)
            out.append(key)
        if dupes:
            log.warning("dropped %d duplicate grid point(s)", dupes)
        return out


SWEEP_HEADER = ["filter_sizes", "dropout", "l2", "val_accuracy", "epochs"]


@dataclass
class SweepRow:
    filter_sizes: tuple[int, ...]
    dropout: float
    l2: float
    val_accuracy: float
    epochs: int


def hyperparameter_sweep(base: ArchitectureDescriptor, grid: SweepGrid, train_ids, train_labels,
                         val_ids, val_labels, cfg: TrainConfig, vocab_size: int,
                         init_seed: int = 0) -> list[SweepRow]:
    """Train one model per grid point, all from the same seeds.

    Points whose largest filter does not fit the sequence length are skipped.
    """
    max_length = np.asarray(train_ids).shape[1]
    rows = []
    for fs, dropout, l2 in grid.points():
        arch = base.with_(filter_sizes=fs, dropout_embed=dropout)
        try:
            model = Classifier(arch, max_length, vocab_size, seed=init_seed)
        except ShapeError as exc:
            log.warning("skipping filter sizes %s: %s", fs, exc)
            continue
        _, hist = train(model, train_ids, train_labels, val_ids, val_labels, replace(cfg, l2=l2))
        best_acc = max(e.val_accuracy for e in hist.epochs)
        rows.append(SweepRow(fs, dropout, l2, best_acc, hist.epoch_count))
    return rows


def sweep_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([" ".join(map(str, r.filter_sizes)), r.dropout, r.l2,
                    f"{r.val_accuracy:.4f}", r.epochs])
    return buf.getvalue()


def average_chars_per_word(words) -> float:
    words = list(words)
    if not words:
        return 0.0
    return sum(len(graphemes(w)) for w in words) / len(words)
