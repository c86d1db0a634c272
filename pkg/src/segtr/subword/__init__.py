"""Sub-word segmentation: byte-pair encoding, characters and syllables."""

from .bpe import BpeModel, Residue, bpe_encode, bpe_train, load_bpe, save_bpe
from .chars import SubwordToken, segment_characters
from .syllable import (
    CONSONANTS,
    IRREGULAR_FORMS,
    REGULAR_FORMS,
    VOWELS,
    syllable_form,
    syllabify_word,
)

__all__ = [
    "BpeModel", "Residue", "bpe_encode", "bpe_train", "load_bpe", "save_bpe",
    "SubwordToken", "segment_characters",
    "CONSONANTS", "IRREGULAR_FORMS", "REGULAR_FORMS", "VOWELS", "syllable_form", "syllabify_word",
]
