"""Deterministic toy review corpus whose polarity is readable from token presence.

Every sentence carries at least one cue word of its review's polarity and no
cue word of the other, so a bag-of-tokens linear model separates the classes.
"""

from __future__ import annotations

import random

from .corpus import Polarity, Review

POSITIVE_CUES = (
    "harika", "güzel", "mükemmel", "başarılı", "keyifli", "sevdim",
    "muhteşem", "tavsiye", "eğlenceli", "kaliteli", "şahane", "beğendim",
)
NEGATIVE_CUES = (
    "berbat", "kötü", "sıkıcı", "rezalet", "vasat", "beğenmedim",
    "hayal", "kırıklığı", "pişman", "bozuk", "yavaş", "gereksiz",
)
FILLER = (
    "film", "ürün", "kitap", "bu", "bir", "çok", "ve", "ama", "gerçekten",
    "oyuncu", "senaryo", "kargo", "fiyat", "paket", "hikaye", "sonu", "bence",
    "biraz", "daha", "olarak", "için", "gibi", "yine", "hem", "de", "kadar",
    "zaman", "ilk", "son", "yer", "müzik", "renk", "boyut", "kullanım",
)
END_MARKS = (".", "!", "?")

DEFAULT_SIZE = 500
DEFAULT_SEED = 2024


def _sentence(rng: random.Random, cues) -> str:
    n_cues = rng.randint(1, 2)
    n_fill = rng.randint(3, 8)
    words = [rng.choice(cues) for _ in range(n_cues)] + [rng.choice(FILLER) for _ in range(n_fill)]
    rng.shuffle(words)
    return " ".join(words) + " " + rng.choice(END_MARKS)


def generate_reviews(n: int = DEFAULT_SIZE, seed: int = DEFAULT_SEED) -> list[Review]:
    """``n`` reviews of 2 to 5 sentences, labels alternating so the classes balance."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        label = Polarity.POSITIVE if i % 2 == 0 else Polarity.NEGATIVE
        cues = POSITIVE_CUES if label is Polarity.POSITIVE else NEGATIVE_CUES
        text = " ".join(_sentence(rng, cues) for _ in range(rng.randint(2, 5)))
        out.append(Review(i + 1, label, text))
    return out
