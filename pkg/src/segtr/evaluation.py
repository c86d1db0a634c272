"""Sentence scoring, review-level voting, histograms and the CLT check."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .corpus import Polarity
from .errors import InputError, ParseError

THRESHOLD = 0.5
N_BINS = 50


@dataclass(frozen=True)
class Prediction:
    review_id: int
    sentence_index: int
    label: Polarity
    score: float

    def __post_init__(self):
        if not (math.isfinite(self.score) and 0.0 <= self.score <= 1.0):
            raise InputError(f"prediction score {self.score!r} outside [0, 1]")


@dataclass(frozen=True)
class ReviewScore:
    review_id: int
    mean_score: float
    sentence_count: int
    predicted: Polarity
    label: Polarity

    @property
    def correct(self) -> bool:
        return self.predicted == self.label


def predict_label(score: float, threshold: float = THRESHOLD) -> Polarity:
    # strictly greater: a mean of exactly 0.5 counts as negative
    return Polarity.POSITIVE if score > threshold else Polarity.NEGATIVE


def sentence_accuracy(preds: list[Prediction], threshold: float = THRESHOLD) -> float:
    if not preds:
        raise InputError("accuracy is undefined for an empty prediction list")
    hits = sum((p.score > threshold) == (p.label == Polarity.POSITIVE) for p in preds)
    return hits / len(preds)


def majority_vote(preds: list[Prediction]) -> list[ReviewScore]:
    """Review decisions from the mean of each review's sentence scores.

    Output is ordered by review id.
    """
    groups: dict[int, list[Prediction]] = defaultdict(list)
    for p in preds:
        groups[p.review_id].append(p)
    out = []
    for rid in sorted(groups):
        members = groups[rid]
        labels = {p.label for p in members}
        if len(labels) != 1:
            raise InputError(f"review {rid} has sentences with conflicting labels")
        # fsum keeps the mean independent of sentence order
        mean = math.fsum(p.score for p in members) / len(members)
        out.append(ReviewScore(rid, mean, len(members), predict_label(mean), labels.pop()))
    return out


def review_accuracy(scores: list[ReviewScore]) -> float:
    if not scores:
        raise InputError("accuracy is undefined for an empty review list")
    return sum(s.correct for s in scores) / len(scores)


def overlap_ratio(accuracy: float) -> float:
    if not 0.0 <= accuracy <= 1.0:
        raise InputError(f"accuracy {accuracy!r} outside [0, 1]")
    return 1.0 - accuracy


@dataclass(frozen=True)
class Histogram:
    bin_edges: tuple[float, ...]
    counts_neg: tuple[int, ...]
    counts_pos: tuple[int, ...]

    def to_csv(self) -> str:
        lines = ["bin_lo,bin_hi,neg_count,pos_count"]
        for i in range(len(self.counts_neg)):
            lo, hi = self.bin_edges[i], self.bin_edges[i + 1]
            lines.append(f"{lo:.2f},{hi:.2f},{self.counts_neg[i]},{self.counts_pos[i]}")
        return "\n".join(lines) + "\n"


def histogram(scores, bins: int = N_BINS) -> Histogram:
    """Per-class score histogram over [0, 1]; a score of 1.0 lands in the last bin.

    Accepts :class:`Prediction` or :class:`ReviewScore` items.
    """
    edges = np.linspace(0.0, 1.0, bins + 1)
    by_class = {Polarity.NEGATIVE: [], Polarity.POSITIVE: []}
    for item in scores:
        value = item.score if isinstance(item, Prediction) else item.mean_score
        by_class[Polarity(item.label)].append(value)
    neg, _ = np.histogram(by_class[Polarity.NEGATIVE], bins=edges)
    pos, _ = np.histogram(by_class[Polarity.POSITIVE], bins=edges)
    return Histogram(tuple(edges.tolist()), tuple(int(c) for c in neg), tuple(int(c) for c in pos))


@dataclass(frozen=True)
class CltResult:
    group_size: int
    trials: int
    population_mean: float
    sigma_population: float
    sigma_means: float
    sigma_predicted: float
    mean_of_means: float

    @property
    def relative_error(self) -> float:
        if self.sigma_predicted == 0:
            return 0.0 if self.sigma_means == 0 else math.inf
        return abs(self.sigma_means - self.sigma_predicted) / self.sigma_predicted


def clt_check(population_scores, group_size: int, trials: int = 10000, seed: int = 0) -> CltResult:
    """Compare the spread of resampled group means with sigma / sqrt(n).

    ``trials`` groups of ``group_size`` scores are drawn with replacement.
    Both standard deviations are population (ddof=0) values.
    """
    pop = np.asarray(population_scores, dtype=float)
    if group_size < 1:
        raise InputError(f"group size must be >= 1, got {group_size}")
    if trials < 1000:
        raise InputError(f"at least 1000 trials are required, got {trials}")
    if pop.size == 0:
        raise InputError("population is empty")
    rng = np.random.default_rng(seed)
    # shifting by one member leaves every sigma unchanged and keeps a constant population exactly at 0
    shift = pop[0]
    centred = pop - shift
    draws = rng.choice(centred, size=(trials, group_size), replace=True)
    means = draws.mean(axis=1)
    sigma0 = float(centred.std())
    return CltResult(
        group_size=group_size,
        trials=trials,
        population_mean=float(shift + centred.mean()),
        sigma_population=sigma0,
        sigma_means=float(means.std()),
        sigma_predicted=sigma0 / math.sqrt(group_size),
        mean_of_means=float(shift + means.mean()),
    )


def write_predictions(path, preds: list[Prediction]):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in preds:
            fh.write(f"{p.review_id}\t{p.sentence_index}\t{int(p.label)}\t{p.score:.4f}\n")


def read_predictions(path) -> list[Prediction]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            try:
                rid, idx, label, score = parts
                out.append(Prediction(int(rid), int(idx), Polarity(int(label)), float(score)))
            except (ValueError, InputError) as exc:
                raise ParseError(f"bad prediction row: {exc}", path, lineno) from None
    return out
