"""Segmentation method registry, vocabulary building and id encoding."""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import ConfigError, InputError, ParseError
from .morphdict import MorphDictionary, MorphVariant, segment_morph
from .subword import BpeModel, Residue, bpe_encode, segment_characters, syllabify_word
from .text import PAD_TOKEN, UNK_TOKEN, graphemes, tokenize_words

log = logging.getLogger(__name__)

__all__ = [
    "SegmentationMethod", "SegmenterDeps", "segment", "Vocabulary", "build_vocabulary",
    "EncodedSequence", "encode", "encode_all", "decode", "tokenize_words",
    "PAD_TOKEN", "UNK_TOKEN",
]


class SegmentationMethod(enum.Enum):
    WORD_TOKEN = "word-token"
    LEMMA = "lemma"
    LEMMA_SUFFIX = "lemma-suffix"
    LEMMA_SUFFIX_META = "lemma-suffix-meta"
    STEM = "stem"
    STEM_SUFFIX = "stem-suffix"
    STEM_SUFFIX_META = "stem-suffix-meta"
    TOKEN_META = "token-meta"
    CHARACTER = "character"
    SYLLABLE = "syllable"
    BPE_1K = "bpe-1k"
    BPE_5K = "bpe-5k"
    BPE_30K = "bpe-30k"
    HYBRID = "hybrid"

    @property
    def morph_variant(self) -> MorphVariant | None:
        return _MORPH.get(self)

    @property
    def needs_dictionary(self) -> bool:
        return self in _MORPH or self is SegmentationMethod.HYBRID

    @property
    def bpe_limit(self) -> int | None:
        return _BPE_LIMITS.get(self)


_MORPH = {
    SegmentationMethod.LEMMA: MorphVariant.LEMMA,
    SegmentationMethod.LEMMA_SUFFIX: MorphVariant.LEMMA_SUFFIX,
    SegmentationMethod.LEMMA_SUFFIX_META: MorphVariant.LEMMA_SUFFIX_META,
    SegmentationMethod.STEM: MorphVariant.STEM,
    SegmentationMethod.STEM_SUFFIX: MorphVariant.STEM_SUFFIX,
    SegmentationMethod.STEM_SUFFIX_META: MorphVariant.STEM_SUFFIX_META,
    SegmentationMethod.TOKEN_META: MorphVariant.TOKEN_META,
}
_BPE_LIMITS = {
    SegmentationMethod.BPE_1K: 1000,
    SegmentationMethod.BPE_5K: 5000,
    SegmentationMethod.BPE_30K: 30000,
}


@dataclass(frozen=True)
class SegmenterDeps:
    dictionary: MorphDictionary | None = None
    bpe_models: Mapping[SegmentationMethod, BpeModel] = field(default_factory=dict)
    residue: Residue = Residue.DISCARD


def segment(method: SegmentationMethod, text: str, deps: SegmenterDeps | None = None) -> list[str]:
    deps = deps or SegmenterDeps()
    words = tokenize_words(text)
    if method is SegmentationMethod.WORD_TOKEN:
        return words
    if method.needs_dictionary:
        if deps.dictionary is None:
            raise ConfigError(f"segmentation method {method.value!r} requires a morphological dictionary")
        if method is SegmentationMethod.HYBRID:
            out = []
            for w in words:
                if deps.dictionary.is_known(w):
                    out.append(w)
                else:
                    out.extend(graphemes(w))
            return out
        return segment_morph(deps.dictionary, method.morph_variant, words)
    if method is SegmentationMethod.CHARACTER:
        return [t.text for t in segment_characters(words)]
    if method is SegmentationMethod.SYLLABLE:
        return [s for w in words for s in syllabify_word(w)]
    if method.bpe_limit is not None:
        model = deps.bpe_models.get(method)
        if model is None:
            raise ConfigError(f"segmentation method {method.value!r} requires a trained BPE model")
        pieces = [t.text for t in bpe_encode(model, words, deps.residue)]
        if words and not pieces:
            return [UNK_TOKEN]
        return pieces
    raise ConfigError(f"unsupported segmentation method {method!r}")


@dataclass(frozen=True)
class Vocabulary:
    """Token to id map; id 0 is ``<PAD>`` and id 1 is ``<UNK>``."""

    token_to_id: dict[str, int]
    frequencies: dict[str, int]
    min_frequency: int = 3
    pad_id: int = 0
    unk_id: int = 1

    def __len__(self):
        return len(self.token_to_id)

    def __contains__(self, token):
        return token in self.token_to_id

    @property
    def id_to_token(self) -> list[str]:
        inv = [""] * len(self.token_to_id)
        for tok, i in self.token_to_id.items():
            inv[i] = tok
        return inv

    def save(self, path):
        inv = self.id_to_token
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"#vocab v1 min_freq={self.min_frequency}\n")
            for i, tok in enumerate(inv):
                fh.write(f"{tok}\t{i}\t{self.frequencies.get(tok, 0)}\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        prefix = "#vocab v1 min_freq="
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if not header.startswith(prefix):
                raise ParseError(f"missing '{prefix}<k>' header", path, 1)
            min_freq = int(header[len(prefix):])
            token_to_id, freqs = {}, {}
            for lineno, line in enumerate(fh, 2):
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 3:
                    raise ParseError("expected token<TAB>id<TAB>frequency", path, lineno)
                tok, i, f = parts[0], int(parts[1]), int(parts[2])
                if i != len(token_to_id):
                    raise ParseError(f"ids must be contiguous, expected {len(token_to_id)}", path, lineno)
                token_to_id[tok] = i
                if tok not in (PAD_TOKEN, UNK_TOKEN):
                    freqs[tok] = f
        if token_to_id.get(PAD_TOKEN) != 0 or token_to_id.get(UNK_TOKEN) != 1:
            raise ParseError("PAD and UNK must have ids 0 and 1", path)
        return cls(token_to_id, freqs, min_freq)


def build_vocabulary(segmented_corpus: Iterable[Iterable[str]], min_frequency: int = 3) -> Vocabulary:
    counts: Counter[str] = Counter()
    for tokens in segmented_corpus:
        counts.update(tokens)
    for reserved in (PAD_TOKEN, UNK_TOKEN):
        counts.pop(reserved, None)
    kept = sorted(
        (tok for tok, c in counts.items() if c >= min_frequency),
        key=lambda t: (-counts[t], t),
    )
    token_to_id = {PAD_TOKEN: 0, UNK_TOKEN: 1}
    for tok in kept:
        token_to_id[tok] = len(token_to_id)
    return Vocabulary(token_to_id, {t: counts[t] for t in kept}, min_frequency)


@dataclass(frozen=True)
class EncodedSequence:
    ids: tuple[int, ...]
    true_length: int
    review_id: int = -1
    sentence_index: int = -1
    truncated: bool = False


def encode(vocab: Vocabulary, tokens, max_length: int, review_id: int = -1,
           sentence_index: int = -1) -> EncodedSequence:
    if max_length < 1:
        raise InputError(f"max_length must be >= 1, got {max_length}")
    ids = [vocab.token_to_id.get(t, vocab.unk_id) for t in tokens]
    truncated = len(ids) > max_length
    ids = ids[:max_length]
    true_length = len(ids)
    ids.extend([vocab.pad_id] * (max_length - true_length))
    return EncodedSequence(tuple(ids), true_length, review_id, sentence_index, truncated)


def encode_all(vocab: Vocabulary, records, max_length: int) -> list[EncodedSequence]:
    """Encode ``(review_id, sentence_index, tokens)`` triples; logs truncations."""
    out = [encode(vocab, toks, max_length, rid, idx) for rid, idx, toks in records]
    n_truncated = sum(s.truncated for s in out)
    if n_truncated:
        log.warning("%d sequence(s) longer than %d were truncated", n_truncated, max_length)
    return out


def decode(vocab: Vocabulary, seq: EncodedSequence) -> list[str]:
    inv = vocab.id_to_token
    return [inv[i] for i in seq.ids[: seq.true_length]]
