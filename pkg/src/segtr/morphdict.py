"""Dictionary-backed morphological segmentations.

Each surface form maps to one precomputed analysis holding the token lists
for all seven variants. Words missing from the dictionary are treated as
unknown: lemma/stem variants pass them through, meta variants emit ``Unk``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from .errors import ParseError
from .text import turkish_lower

log = logging.getLogger(__name__)

UNK_TAG = "Unk"


class MorphVariant(enum.Enum):
    LEMMA = "lemma"
    LEMMA_SUFFIX = "lemma_suffix"
    LEMMA_SUFFIX_META = "lemma_meta"
    STEM = "stem"
    STEM_SUFFIX = "stem_suffix"
    STEM_SUFFIX_META = "stem_meta"
    TOKEN_META = "token_meta"


META_VARIANTS = frozenset(
    {MorphVariant.LEMMA_SUFFIX_META, MorphVariant.STEM_SUFFIX_META, MorphVariant.TOKEN_META}
)

# column order of the dictionary TSV after surface and known
COLUMNS = (
    "lemma", "lemma_suffix", "lemma_meta", "stem", "stem_suffix", "stem_meta", "token_meta",
)


@dataclass(frozen=True)
class MorphEntry:
    surface: str
    known: bool
    lemma: tuple[str, ...]
    lemma_suffix: tuple[str, ...]
    lemma_meta: tuple[str, ...]
    stem: tuple[str, ...]
    stem_suffix: tuple[str, ...]
    stem_meta: tuple[str, ...]
    token_meta: tuple[str, ...]

    @classmethod
    def unknown(cls, surface: str) -> "MorphEntry":
        word = (surface,)
        unk = (UNK_TAG,)
        return cls(surface, False, word, word, unk, word, word, unk, unk)

    def tokens(self, variant: MorphVariant) -> tuple[str, ...]:
        return getattr(self, variant.value)


@dataclass(frozen=True)
class MorphDictionary:
    entries: dict[str, MorphEntry] = field(default_factory=dict)
    duplicates: int = 0

    def __len__(self):
        return len(self.entries)

    def __contains__(self, surface):
        return turkish_lower(surface) in self.entries

    def lookup(self, surface: str) -> MorphEntry:
        entry = self.entries.get(turkish_lower(surface))
        return entry if entry is not None else MorphEntry.unknown(surface)

    def is_known(self, surface: str) -> bool:
        return self.lookup(surface).known


def _parse_row(cols: list[str], path, lineno) -> MorphEntry:
    if len(cols) != 9:
        raise ParseError(f"expected 9 TAB-separated columns, got {len(cols)}", path, lineno)
    surface, known_flag = cols[0], cols[1]
    if not surface or any(c.isspace() for c in surface):
        raise ParseError(f"invalid surface {surface!r}", path, lineno)
    if known_flag not in ("0", "1"):
        raise ParseError(f"known flag must be 0 or 1, got {known_flag!r}", path, lineno)
    if known_flag == "0":
        return MorphEntry.unknown(surface)
    lists = []
    for name, raw in zip(COLUMNS, cols[2:]):
        toks = tuple(raw.split(" ")) if raw else ()
        if not toks or any(not t for t in toks):
            raise ParseError(f"column {name!r} empty or malformed for known entry", path, lineno)
        lists.append(toks)
    entry = MorphEntry(surface, True, *lists)
    if entry.lemma_suffix[0] != entry.lemma[0] or entry.stem_suffix[0] != entry.stem[0]:
        raise ParseError("suffix column must start with the lemma/stem token", path, lineno)
    return entry


def load_dictionary(path) -> MorphDictionary:
    """Load the 9-column dictionary TSV. Later duplicate surfaces win."""
    entries: dict[str, MorphEntry] = {}
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line:
                continue
            entry = _parse_row(line.split("\t"), path, lineno)
            key = turkish_lower(entry.surface)
            if key in entries:
                duplicates += 1
            entries[key] = entry
    if duplicates:
        log.warning("%s: %d duplicate surface(s), last occurrence kept", path, duplicates)
    return MorphDictionary(entries, duplicates)


def write_dictionary(path, dictionary: MorphDictionary):
    with open(path, "w", encoding="utf-8") as fh:
        for entry in dictionary.entries.values():
            if entry.known:
                cols = [" ".join(entry.tokens(MorphVariant(c))) for c in COLUMNS]
                fh.write("\t".join([entry.surface, "1", *cols]) + "\n")
            else:
                fh.write("\t".join([entry.surface, "0"] + [""] * 7) + "\n")


def segment_morph(dictionary: MorphDictionary, variant: MorphVariant, word_tokens) -> list[str]:
    out: list[str] = []
    for word in word_tokens:
        out.extend(dictionary.lookup(word).tokens(variant))
    return out
