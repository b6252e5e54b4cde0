"""Loaders for the three lexicon file formats.

Stopwords: one lemma per line, `#` comments allowed.
Synonyms: `word<TAB>synset_id`; two words are synonyms iff they share a synset id.
Emotions: `word<TAB>category<TAB>0|1` with categories = eight emotions plus
positive/negative valence (the NRC-style layout).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

EMOTIONS = (
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
)

VALENCE_CATEGORIES = ("positive", "negative")


def load_stopwords(path) -> set[str]:
    words: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            words.add(line.lower())
    return words


def default_stopwords() -> set[str]:
    """The English stopword list shipped with the package."""
    text = resources.files("tfmnet.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return {w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#")}


@dataclass
class SynonymLexicon:
    """word -> synset ids; pairs sharing a synset are synonyms."""

    synsets: dict[str, frozenset[str]] = field(default_factory=dict)

    def are_synonyms(self, a: str, b: str) -> bool:
        if a == b:
            return False
        sa = self.synsets.get(a)
        sb = self.synsets.get(b)
        return bool(sa and sb and sa & sb)

    @classmethod
    def from_file(cls, path) -> "SynonymLexicon":
        raw: dict[str, set[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                word, _, synset = line.partition("\t")
                word = word.strip().lower()
                synset = synset.strip()
                if word and synset:
                    raw.setdefault(word, set()).add(synset)
        return cls({w: frozenset(s) for w, s in raw.items()})


@dataclass
class EmotionLexicon:
    """word -> subset of the eight emotions."""

    emotions: dict[str, frozenset[str]] = field(default_factory=dict)

    def emotions_of(self, word: str) -> frozenset[str]:
        return self.emotions.get(word, frozenset())

    def emotion_bearing_words(self) -> list[str]:
        """Distinct words with at least one emotion, in sorted order."""
        return sorted(w for w, e in self.emotions.items() if e)

    @classmethod
    def from_file(cls, path) -> "EmotionLexicon":
        emo, _ = _read_nrc(path)
        return cls(emo)


@dataclass
class ValenceLexicon:
    """word -> positive | negative | neutral."""

    valence: dict[str, str] = field(default_factory=dict)

    def valence_of(self, word: str) -> str:
        return self.valence.get(word, "neutral")

    @classmethod
    def from_file(cls, path) -> "ValenceLexicon":
        """Reads either the NRC layout or a two-column `word<TAB>valence` file."""
        _, val = _read_nrc(path)
        return cls(val)


def _read_nrc(path):
    emo_raw: dict[str, set[str]] = {}
    val_raw: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) == 3:
                word, category, flag = fields
                if flag.strip() != "1":
                    continue
            elif len(fields) == 2:
                word, category = fields
            else:
                continue
            word = word.strip().lower()
            category = category.strip().lower()
            if category in EMOTIONS:
                emo_raw.setdefault(word, set()).add(category)
            elif category in VALENCE_CATEGORIES:
                val_raw.setdefault(word, set()).add(category)
    emotions = {w: frozenset(s) for w, s in emo_raw.items()}
    # a word flagged both positive and negative is treated as neutral
    valence = {w: next(iter(s)) for w, s in val_raw.items() if len(s) == 1}
    return emotions, valence
