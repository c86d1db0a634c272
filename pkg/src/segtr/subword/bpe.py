"""Byte-pair encoding without an end-of-word marker.

Training counts adjacent symbol pairs inside words only, weighted by word
frequency, and greedily merges the most frequent pair. Ties go to the
lexicographically smallest ``(left, right)``. A pair must occur at least
twice to be merged, and training stops before the token set would exceed
the vocabulary limit.
"""

from __future__ import annotations

import bisect
import enum
import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from ..errors import ConfigError, InputError, ParseError
from ..text import UNK_TOKEN, graphemes
from .chars import SubwordToken

MIN_PAIR_FREQUENCY = 2
_HEADER = "#bpe v1 limit="
_CHARS = "#chars"


class Residue(enum.Enum):
    DISCARD = "discard"
    UNK = "unk"


@dataclass(frozen=True)
class BpeModel:
    vocab_limit: int
    merges: tuple[tuple[str, str], ...]
    alphabet: frozenset[str]
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def tokens(self) -> frozenset[str]:
        return self.alphabet | {left + right for left, right in self.merges}

    @cached_property
    def ranks(self) -> dict[tuple[str, str], tuple[int, ...]]:
        """Every position of each pair in the merge list (a pair can recur)."""
        ranks = defaultdict(list)
        for i, pair in enumerate(self.merges):
            ranks[pair].append(i)
        return {pair: tuple(r) for pair, r in ranks.items()}

    def encode_word(self, word: str) -> tuple[str, ...]:
        cached = self._cache.get(word)
        if cached is None:
            cached = self._cache[word] = tuple(_apply_merges(graphemes(word), self.ranks))
        return cached


def merge_pair(seq: list[str], left: str, right: str) -> list[str]:
    """Replace every non-overlapping ``left right`` occurrence, scanning left to right."""
    out = []
    i = 0
    n = len(seq)
    while i < n:
        if i + 1 < n and seq[i] == left and seq[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


def _apply_merges(seq: list[str], ranks: dict[tuple[str, str], tuple[int, ...]]) -> list[str]:
    # Same result as replaying every merge in recorded order: merges whose
    # pair is absent are no-ops, so jumping to the smallest present rank
    # above the last applied one skips nothing.
    last = -1
    while len(seq) > 1:
        best = None
        for pair in zip(seq, seq[1:]):
            positions = ranks.get(pair)
            if positions is None:
                continue
            k = bisect.bisect_right(positions, last)
            if k < len(positions) and (best is None or positions[k] < best):
                best = positions[k]
                best_pair = pair
        if best is None:
            break
        seq = merge_pair(seq, *best_pair)
        last = best
    return seq


def bpe_train(word_tokens, vocab_limit: int) -> BpeModel:
    if vocab_limit < 1:
        raise ConfigError(f"vocab_limit must be positive, got {vocab_limit}")
    freqs = Counter(word_tokens)
    if not freqs:
        raise InputError("cannot train BPE on an empty corpus")

    words = sorted(freqs)
    seqs = [graphemes(w) for w in words]
    weights = [freqs[w] for w in words]
    alphabet = frozenset(g for seq in seqs for g in seq)
    if vocab_limit < len(alphabet):
        raise ConfigError(
            f"vocab_limit {vocab_limit} is below the {len(alphabet)} distinct characters"
        )

    pair_counts: dict[tuple[str, str], int] = defaultdict(int)
    where: dict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, seq in enumerate(seqs):
        for pair in zip(seq, seq[1:]):
            pair_counts[pair] += weights[idx]
            where[pair].add(idx)
    heap = [(-c, left, right) for (left, right), c in pair_counts.items()]
    heapq.heapify(heap)

    tokens = set(alphabet)
    merges = []
    while heap:
        neg, left, right = heapq.heappop(heap)
        count = pair_counts.get((left, right), 0)
        if count != -neg:
            continue  # stale entry; the current count has its own entry
        if count < MIN_PAIR_FREQUENCY:
            break
        product = left + right
        if product not in tokens and len(tokens) >= vocab_limit:
            break
        merges.append((left, right))
        tokens.add(product)

        touched = set()
        for idx in where.pop((left, right), ()):
            seq = seqs[idx]
            new = merge_pair(seq, left, right)
            if len(new) == len(seq):
                continue
            w = weights[idx]
            for pair in zip(seq, seq[1:]):
                pair_counts[pair] -= w
                touched.add(pair)
            for pair in zip(new, new[1:]):
                pair_counts[pair] += w
                where[pair].add(idx)
                touched.add(pair)
            seqs[idx] = new
        for pair in touched:
            c = pair_counts[pair]
            if c > 0:
                heapq.heappush(heap, (-c, *pair))
            else:
                del pair_counts[pair]
                where.pop(pair, None)

    return BpeModel(vocab_limit, tuple(merges), alphabet)


def bpe_encode(model: BpeModel, word_tokens, on_residue: Residue = Residue.DISCARD) -> list[SubwordToken]:
    """Encode words by replaying the model's merges.

    Characters the model never saw are dropped, or replaced by ``<UNK>``
    when ``on_residue`` is :attr:`Residue.UNK`.
    """
    out = []
    vocab = model.tokens
    for i, word in enumerate(word_tokens):
        for piece in model.encode_word(word):
            if piece in vocab:
                out.append(SubwordToken(piece, i))
            elif on_residue is Residue.UNK:
                out.append(SubwordToken(UNK_TOKEN, i))
    return out


def save_bpe(model: BpeModel, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{_HEADER}{model.vocab_limit}\n")
        fh.write(" ".join([_CHARS, *sorted(model.alphabet)]) + "\n")
        for left, right in model.merges:
            fh.write(f"{left} {right}\n")


def load_bpe(path) -> BpeModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith(_HEADER):
        raise ParseError(f"missing '{_HEADER}<N>' header", path, 1)
    try:
        limit = int(lines[0][len(_HEADER):])
    except ValueError:
        raise ParseError("vocabulary limit is not an integer", path, 1) from None
    if len(lines) < 2 or lines[1].split(" ")[0] != _CHARS:
        raise ParseError(f"missing '{_CHARS}' line", path, 2)
    alphabet = frozenset(c for c in lines[1].split(" ")[1:] if c)
    merges = []
    for lineno, line in enumerate(lines[2:], 3):
        parts = line.split(" ")
        if len(parts) != 2 or not all(parts):
            raise ParseError("merge line must be 'left right'", path, lineno)
        merges.append((parts[0], parts[1]))
    return BpeModel(limit, tuple(merges), alphabet)
