"""Turkish-aware casing and the word tokenizer used by every other module."""

import unicodedata

import regex

PAD_TOKEN = "<PAD>"
UNK_TOKEN = "<UNK>"

_TR_UPPER = str.maketrans({"I": "ı", "İ": "i"})
_GRAPHEME = regex.compile(r"\X")


def turkish_lower(text: str) -> str:
    """Lowercase with Turkish dotted/dotless i rules (I -> ı, İ -> i)."""
    return text.translate(_TR_UPPER).lower()


def is_punct_char(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def is_punct_token(token: str) -> bool:
    return bool(token) and all(is_punct_char(c) for c in token)


def graphemes(text: str) -> list[str]:
    """Split into extended grapheme clusters."""
    return _GRAPHEME.findall(text)


def tokenize_words(text: str) -> list[str]:
    """Lowercase ``text`` and split it into word and punctuation tokens.

    Every Unicode punctuation character becomes a standalone token, so
    ``"ulaştı,"`` yields ``["ulaştı", ","]`` and ``"..."`` yields three
    ``"."`` tokens.
    """
    tokens = []
    for chunk in turkish_lower(text).split():
        current = []
        for ch in chunk:
            if is_punct_char(ch):
                if current:
                    tokens.append("".join(current))
                    current = []
                tokens.append(ch)
            else:
                current.append(ch)
        if current:
            tokens.append("".join(current))
    return tokens


def word_tokens(text: str) -> list[str]:
    """Tokens of ``text`` excluding pure punctuation; the unit of word counts."""
    return [t for t in tokenize_words(text) if not is_punct_token(t)]
