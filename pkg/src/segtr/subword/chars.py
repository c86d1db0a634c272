from __future__ import annotations

from dataclasses import dataclass

from ..errors import InputError
from ..text import graphemes


@dataclass(frozen=True)
class SubwordToken:
    text: str
    word_index: int

    def __post_init__(self):
        if not self.text:
            raise InputError("subword token text must be non-empty")


def segment_characters(word_tokens) -> list[SubwordToken]:
    """One token per extended grapheme, tagged with the index of its word."""
    return [
        SubwordToken(g, i)
        for i, word in enumerate(word_tokens)
        for g in graphemes(word)
    ]
