"""Memory formulas, timing stamps and the per-experiment report row."""

from __future__ import annotations

import csv
import io
import os
import time
from dataclasses import dataclass, fields

from .errors import InputError, ParseError, StateError
from .nn.arch import ArchKind, ArchitectureDescriptor, count_parameters
from .segment import SegmentationMethod


def mem_cnn(v: int, l: int) -> int:
    _check_sizes(v, l)
    return 50 * v + 500 * l + 3121


def mem_lstm(v: int, l: int) -> int:
    _check_sizes(v, l)
    return 32 * v + 53301


def _check_sizes(v, l):
    if v < 0 or l < 0:
        raise InputError(f"vocabulary and length must be non-negative, got v={v}, l={l}")


def actual_train_duration(t_training: float, epoch_count: int, save_epoch: int) -> float:
    """Training time up to the saved epoch, assuming equal-cost epochs."""
    if epoch_count <= 0:
        raise InputError(f"epoch count must be positive, got {epoch_count}")
    if not 1 <= save_epoch <= epoch_count:
        raise InputError(f"save epoch {save_epoch} outside [1, {epoch_count}]")
    if save_epoch == epoch_count:
        return t_training
    return t_training * save_epoch / epoch_count


def total_eval_duration(t_pp: float, t_eval: float) -> float:
    if t_pp < 0 or t_eval < 0:
        raise InputError("durations must be non-negative")
    return t_pp + t_eval


def mem_estimate(arch: ArchitectureDescriptor, vocab_size: int, max_length: int) -> int:
    """Memory units for an architecture.

    The CNN and LSTM kinds use the fixed published formulas. The mean-pool
    baseline has no published formula, so its exact parameter count is used.
    """
    if arch.kind.is_cnn:
        return mem_cnn(vocab_size, max_length)
    if arch.kind is ArchKind.LSTM:
        return mem_lstm(vocab_size, max_length)
    return count_parameters(arch, max_length, vocab_size)


class Stopwatch:
    """Four monotonic stamps: start, preprocessing done, training done, evaluation done."""

    def __init__(self, clock=time.monotonic):
        self._clock = clock
        self.stamps: list[float] = []
        self.wall_start: float | None = None

    def stamp(self) -> float:
        if len(self.stamps) == 4:
            raise StateError("stopwatch already holds t0..t3")
        if not self.stamps:
            self.wall_start = time.time()
        t = self._clock()
        self.stamps.append(t)
        return t

    @property
    def complete(self) -> bool:
        return len(self.stamps) == 4

    def durations(self) -> tuple[float, float, float]:
        if not self.complete:
            raise StateError(f"stopwatch has {len(self.stamps)} of 4 stamps")
        t0, t1, t2, t3 = self.stamps
        return t1 - t0, t2 - t1, t3 - t2


REPORT_HEADER = [
    "no", "dataset", "segmentation", "train", "validation", "test", "batch_size", "vocabulary",
    "max_review_length", "t_pp", "t_training", "t_eval", "score", "mv_score", "epoch_count",
    "save_epoch", "t_atd", "t_te", "mem_estimate",
]
TIMING_COLUMNS = ("t_pp", "t_training", "t_eval", "t_atd", "t_te")


@dataclass(frozen=True)
class ExperimentRecord:
    no: int
    dataset: str
    segmentation: SegmentationMethod
    train: int
    validation: int
    test: int
    batch_size: int
    vocabulary: int
    max_review_length: int
    t_pp: float
    t_training: float
    t_eval: float
    score: float
    mv_score: float
    epoch_count: int
    save_epoch: int
    mem_estimate: int

    def __post_init__(self):
        if min(self.t_pp, self.t_training, self.t_eval) < 0:
            raise InputError("durations must be non-negative")
        if not 1 <= self.save_epoch <= self.epoch_count:
            raise InputError(f"save epoch {self.save_epoch} outside [1, {self.epoch_count}]")
        if self.vocabulary < 2:
            raise InputError("vocabulary must hold at least PAD and UNK")
        for s in (self.score, self.mv_score):
            if not 0.0 <= s <= 1.0:
                raise InputError(f"score {s!r} outside [0, 1]")

    @property
    def t_atd(self) -> float:
        return actual_train_duration(self.t_training, self.epoch_count, self.save_epoch)

    @property
    def t_te(self) -> float:
        return total_eval_duration(self.t_pp, self.t_eval)

    def row(self) -> list[str]:
        out = []
        for name in REPORT_HEADER:
            value = getattr(self, name)
            if isinstance(value, SegmentationMethod):
                out.append(value.value)
            elif isinstance(value, float):
                out.append(repr(value))
            else:
                out.append(str(value))
        return out


@dataclass(frozen=True)
class RunConfig:
    no: int
    dataset: str
    segmentation: SegmentationMethod
    batch_size: int
    arch: ArchitectureDescriptor


@dataclass(frozen=True)
class RunResults:
    train: int
    validation: int
    test: int
    vocabulary: int
    max_review_length: int
    score: float
    mv_score: float
    epoch_count: int
    save_epoch: int


def record_experiment(stopwatch: Stopwatch, config: RunConfig, results: RunResults) -> ExperimentRecord:
    t_pp, t_training, t_eval = stopwatch.durations()
    return ExperimentRecord(
        no=config.no,
        dataset=config.dataset,
        segmentation=config.segmentation,
        train=results.train,
        validation=results.validation,
        test=results.test,
        batch_size=config.batch_size,
        vocabulary=results.vocabulary,
        max_review_length=results.max_review_length,
        t_pp=t_pp,
        t_training=t_training,
        t_eval=t_eval,
        score=results.score,
        mv_score=results.mv_score,
        epoch_count=results.epoch_count,
        save_epoch=results.save_epoch,
        mem_estimate=mem_estimate(config.arch, results.vocabulary, results.max_review_length),
    )


def _parse_record(row: dict[str, str]) -> ExperimentRecord:
    kwargs = {}
    for f in fields(ExperimentRecord):
        raw = row[f.name]
        if f.name == "segmentation":
            kwargs[f.name] = SegmentationMethod(raw)
        elif f.name == "dataset":
            kwargs[f.name] = raw
        elif f.type in ("float", float):
            kwargs[f.name] = float(raw)
        else:
            kwargs[f.name] = int(raw)
    rec = ExperimentRecord(**kwargs)
    for derived in ("t_atd", "t_te"):
        if repr(getattr(rec, derived)) != row[derived]:
            raise ValueError(f"column {derived} does not match its recomputation")
    return rec


def read_report(path) -> list[ExperimentRecord]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return out
        if header != REPORT_HEADER:
            raise ParseError("unexpected report header", path, 1)
        for lineno, values in enumerate(reader, 2):
            if len(values) != len(REPORT_HEADER):
                raise ParseError(f"expected {len(REPORT_HEADER)} columns, got {len(values)}", path, lineno)
            try:
                out.append(_parse_record(dict(zip(REPORT_HEADER, values))))
            except (ValueError, KeyError) as exc:
                raise ParseError(str(exc), path, lineno) from None
    return out


def next_run_number(path) -> int:
    if not os.path.exists(path):
        return 1
    return len(read_report(path)) + 1


def append_report(path, record: ExperimentRecord):
    """Append one row, writing the header first when the file is new or empty."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    if not fresh:
        with open(path, encoding="utf-8", newline="") as fh:
            header = next(csv.reader(fh), None)
        if header != REPORT_HEADER:
            raise ParseError("unexpected report header", path, 1)
    with open(path, "a", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if fresh:
            w.writerow(REPORT_HEADER)
        w.writerow(record.row())


def format_report(records, with_timings: bool = True) -> str:
    """Render rows as CSV text; ``with_timings=False`` blanks the clock-dependent columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for rec in records:
        row = rec.row()
        if not with_timings:
            row = ["" if name in TIMING_COLUMNS else v for name, v in zip(REPORT_HEADER, row)]
        w.writerow(row)
    return buf.getvalue()
