"""Review corpora: ingestion, sentence records, statistics and splits."""

from __future__ import annotations

import enum
import logging
import math
import random
import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable

from .errors import InputError, InsufficientDataError, ParseError
from .text import tokenize_words, word_tokens, is_punct_token

log = logging.getLogger(__name__)


class Polarity(enum.IntEnum):
    NEGATIVE = 0
    POSITIVE = 1


class RatingScheme(enum.Enum):
    MOVIE_REVIEWS = "movie"
    PRODUCT_REVIEWS = "product"


EXCLUDED = None


@dataclass(frozen=True)
class Review:
    id: int
    label: Polarity
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise InputError(f"review {self.id} has empty text")


@dataclass(frozen=True)
class SentenceRecord:
    review_id: int
    index: int
    text: str
    label: Polarity


@dataclass(frozen=True)
class DatasetStats:
    vocab_size: int
    avg_sentence_length: float
    max_review_size: int


@dataclass(frozen=True)
class SplitSpec:
    train_ratio: float = 0.8
    val_ratio: float = 0.1
    test_ratio: float = 0.1
    seed: int = 0

    def __post_init__(self):
        ratios = (self.train_ratio, self.val_ratio, self.test_ratio)
        if any(r <= 0 for r in ratios):
            raise InputError(f"split ratios must be positive, got {ratios}")
        if abs(sum(ratios) - 1.0) > 1e-9:
            raise InputError(f"split ratios must sum to 1, got {sum(ratios)!r}")


def map_rating_to_polarity(rating, scheme: RatingScheme) -> Polarity | None:
    """Map a star rating to a polarity; ``None`` marks a neutral (excluded) review.

    Movie reviews use a 0.5-5.0 scale in half steps: up to 2.0 is negative,
    2.5-3.5 neutral, 4.0 and above positive. Product reviews use integer
    1-5 ratings where 1-3 is negative.
    """
    try:
        r = Decimal(str(rating))
    except InvalidOperation:
        raise InputError(f"rating {rating!r} is not a number") from None
    if scheme is RatingScheme.MOVIE_REVIEWS:
        if r < Decimal("0.5") or r > 5 or (r * 2) % 1 != 0:
            raise InputError(f"movie rating {rating!r} outside 0.5-5.0 in 0.5 steps")
        if r <= 2:
            return Polarity.NEGATIVE
        if r <= Decimal("3.5"):
            return EXCLUDED
        return Polarity.POSITIVE
    if scheme is RatingScheme.PRODUCT_REVIEWS:
        if r < 1 or r > 5 or r % 1 != 0:
            raise InputError(f"product rating {rating!r} outside integer 1-5")
        return Polarity.NEGATIVE if r <= 3 else Polarity.POSITIVE
    raise InputError(f"unknown rating scheme {scheme!r}")


# Split after a run of terminators that is followed by whitespace. A period
# between digits is never followed by whitespace, so decimals stay intact.
_SENTENCE_BREAK = re.compile(r"(?<=[.!?…])\s+")


def normalize_text(text: str) -> str:
    return " ".join(text.split())


def split_sentences(review: Review) -> list[SentenceRecord]:
    text = normalize_text(review.text)
    parts = [p for p in _SENTENCE_BREAK.split(text) if p]
    if not parts:
        parts = [text]
    return [SentenceRecord(review.id, i, p, review.label) for i, p in enumerate(parts)]


def nearest_rank_percentile(values: Iterable[int], percentile: float) -> int:
    ordered = sorted(values)
    if not ordered:
        raise InputError("percentile of an empty collection")
    if not 0 < percentile <= 1:
        raise InputError(f"percentile must be in (0, 1], got {percentile}")
    # round() absorbs float noise such as 0.995 * 1000 = 994.9999999999999
    rank = max(1, math.ceil(round(percentile * len(ordered), 9)))
    return ordered[rank - 1]


def count_words(text: str) -> int:
    return len(word_tokens(text))


def _chunk_tokens(tokens: list[str], limit: int) -> list[list[str]]:
    chunks: list[list[str]] = [[]]
    words = 0
    for tok in tokens:
        if not is_punct_token(tok):
            if words == limit:
                chunks.append([])
                words = 0
            words += 1
        chunks[-1].append(tok)
    return [c for c in chunks if c]


def break_long_sentences(
    sentences: list[SentenceRecord], percentile: float = 0.995, cutoff: int | None = None
) -> list[SentenceRecord]:
    """Chunk sentences longer than the length percentile into windows.

    ``cutoff`` overrides the percentile computation, which lets the value
    learned on a training partition be applied to held-out partitions.
    Punctuation rides along with the window it follows and does not count
    toward its length. Chunk texts are the space-joined word tokens.
    """
    if not sentences:
        return []
    limit = cutoff
    if limit is None:
        limit = nearest_rank_percentile((count_words(s.text) for s in sentences), percentile)
    limit = max(limit, 1)

    out: list[SentenceRecord] = []
    next_index: dict[int, int] = {}
    for s in sentences:
        if count_words(s.text) <= limit:
            pieces = [s.text]
        else:
            pieces = [" ".join(c) for c in _chunk_tokens(tokenize_words(s.text), limit)]
        for piece in pieces:
            idx = next_index.get(s.review_id, 0)
            out.append(SentenceRecord(s.review_id, idx, piece, s.label))
            next_index[s.review_id] = idx + 1
    return out


def compute_stats(reviews: list[Review]) -> DatasetStats:
    if not reviews:
        return DatasetStats(0, 0.0, 0)
    vocab: set[str] = set()
    sentence_lengths = []
    max_review = 0
    for review in reviews:
        words = word_tokens(review.text)
        vocab.update(words)
        max_review = max(max_review, len(words))
        sentence_lengths.extend(count_words(s.text) for s in split_sentences(review))
    avg = sum(sentence_lengths) / len(sentence_lengths) if sentence_lengths else 0.0
    return DatasetStats(len(vocab), avg, max_review)


def split_dataset(reviews: list[Review], spec: SplitSpec):
    """Shuffle reviews (seeded) and cut them into train/val/test lists.

    Validation and test sizes are ``floor(n * ratio)``; the remainder goes
    to train. Input order does not matter: reviews are sorted by id first.
    """
    n = len(reviews)
    if n < 3:
        raise InsufficientDataError(f"need at least 3 reviews to split, got {n}")
    n_val = math.floor(n * spec.val_ratio + 1e-9)
    n_test = math.floor(n * spec.test_ratio + 1e-9)
    n_train = n - n_val - n_test
    ordered = sorted(reviews, key=lambda r: r.id)
    random.Random(spec.seed).shuffle(ordered)
    return ordered[:n_train], ordered[n_train:n_train + n_val], ordered[n_train + n_val:]


def sentences_of(reviews: Iterable[Review]) -> list[SentenceRecord]:
    out = []
    for r in reviews:
        out.extend(split_sentences(r))
    return out


def parse_label(field: str, scheme: RatingScheme | None):
    if field in ("0", "1"):
        return Polarity(int(field))
    if field.startswith("r:"):
        if scheme is None:
            raise InputError("rating label requires a rating scheme")
        return map_rating_to_polarity(field[2:], scheme)
    raise InputError(f"label must be 0, 1 or r:<rating>, got {field!r}")


def read_corpus(path, scheme: RatingScheme | None = None, lenient: bool = False) -> list[Review]:
    """Read a ``label<TAB>text`` corpus. Review ids are 1-based line numbers.

    Neutral ratings are dropped. Malformed lines raise :class:`ParseError`
    unless ``lenient`` is set, in which case they are logged and skipped.
    """
    reviews = []
    bad = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            try:
                label_field, sep, text = line.partition("\t")
                if not sep:
                    raise InputError("missing TAB between label and text")
                label = parse_label(label_field.strip(), scheme)
                if label is EXCLUDED:
                    continue
                reviews.append(Review(lineno, label, text))
            except InputError as exc:
                if not lenient:
                    raise ParseError(str(exc), path, lineno) from None
                bad += 1
                log.warning("%s:%d: skipped: %s", path, lineno, exc)
    if bad:
        log.warning("%s: skipped %d malformed line(s)", path, bad)
    return reviews


def write_corpus(path, reviews: Iterable[Review]):
    with open(path, "w", encoding="utf-8") as fh:
        for r in reviews:
            fh.write(f"{int(r.label)}\t{normalize_text(r.text)}\n")


def format_stats(stats: DatasetStats, csv: bool = False) -> str:
    if csv:
        return f"{stats.vocab_size},{stats.avg_sentence_length:.4f},{stats.max_review_size}\n"
    return (
        f"vocab_size\t{stats.vocab_size}\n"
        f"avg_sentence_length\t{stats.avg_sentence_length:.4f}\n"
        f"max_review_size\t{stats.max_review_size}\n"
    )
