"""Rule-based Turkish syllabifier.

Every syllable holds exactly one vowel. Between two vowels, the last
consonant of the cluster opens the next syllable and the rest close the
previous one. Consonants before the first vowel and after the last one
stay with the first and last syllable respectively, which is how typos and
onomatopoeia such as ``trren`` or ``üfff`` survive as single syllables.
"""

from __future__ import annotations

import re

VOWELS = frozenset("aeıioöuü")
CONSONANTS = frozenset("bcçdfgğhjklmnprsştvyz")

REGULAR_FORMS = ("V", "VC", "CV", "CVC", "VCC", "CCV", "CVCC", "CCVC")
IRREGULAR_FORMS = {
    "C{C+}V": re.compile(r"CC+V"),
    "C{C+}VC": re.compile(r"CC+VC"),
    "VC{C+}": re.compile(r"VCC+"),
    "CVC{C+}": re.compile(r"CVCC+"),
    "C{C+}VC{C+}": re.compile(r"CC+VCC+"),
}


def syllabify_word(word: str) -> list[str]:
    vowel_positions = [i for i, ch in enumerate(word) if ch in VOWELS]
    if not vowel_positions:
        return [word]
    cuts = []
    for left, right in zip(vowel_positions, vowel_positions[1:]):
        # right - left - 1 consonants sit between the two vowels
        cuts.append(right if right - left == 1 else right - 1)
    bounds = [0, *cuts, len(word)]
    return [word[a:b] for a, b in zip(bounds, bounds[1:])]


def shape(syllable: str) -> str:
    """CV skeleton; any non-vowel counts as a consonant."""
    return "".join("V" if ch in VOWELS else "C" for ch in syllable)


def syllable_form(syllable: str) -> str | None:
    """Name of the regular or irregular form the syllable matches.

    Returns ``None`` for vowel-free pass-through tokens such as punctuation.
    """
    if not any(ch in VOWELS for ch in syllable):
        return None
    skeleton = shape(syllable)
    if skeleton in REGULAR_FORMS:
        return skeleton
    for name, pattern in IRREGULAR_FORMS.items():
        if pattern.fullmatch(skeleton):
            return name
    return None
