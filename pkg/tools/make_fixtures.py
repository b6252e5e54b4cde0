#!/usr/bin/env python3
"""Generate the deterministic end-to-end fixture bundle.

Writes, under the output directory (default ``fixtures/`` next to the
repository root):

* ``corpus/child01.conllu`` .. ``child10.conllu`` — ten template-built
  interview transcripts with hand-specified dependency trees, age/sex
  comment metadata, multiword-token and empty-node lines for parser
  exercise, and a guaranteed emotional-word supply;
* ``emotions.tsv`` — an NRC-style word/category/flag lexicon covering the
  corpus vocabulary plus lexicon-only entries so the sampling pool is
  larger than any transcript's emotional word count;
* ``synonyms.tsv`` — word/synset pairs, with at least one synonym pair
  co-occurring inside a transcript;
* ``targets.csv`` — three score columns derived from transcript content
  plus seeded noise;
* ``config.toml`` — a pipeline configuration wired to the above with
  relative paths and grids small enough for a fast full run.

Rerunning with the same seed reproduces every file byte for byte.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

# ---------------------------------------------------------------------------
# vocabulary

# lemma -> (emotion categories, valence) used for both the lexicon file and
# the target construction below. Valence "" means no valence rows.
EMOTION_WORDS = {
    "happy": (("joy",), "positive"),
    "glad": (("joy",), "positive"),
    "smile": (("joy",), "positive"),
    "laugh": (("joy", "surprise"), "positive"),
    "party": (("joy", "anticipation"), "positive"),
    "sunshine": (("joy",), "positive"),
    "sad": (("sadness",), "negative"),
    "cry": (("sadness",), "negative"),
    "lonely": (("sadness",), "negative"),
    "lost": (("sadness", "fear"), "negative"),
    "sick": (("sadness", "disgust"), "negative"),
    "scared": (("fear",), "negative"),
    "afraid": (("fear",), "negative"),
    "dark": (("fear", "sadness"), "negative"),
    "monster": (("fear",), "negative"),
    "storm": (("fear", "surprise"), "negative"),
    "angry": (("anger",), "negative"),
    "shout": (("anger",), "negative"),
    "fight": (("anger", "fear"), "negative"),
    "yucky": (("disgust",), "negative"),
    "mess": (("disgust",), "negative"),
    "friend": (("trust", "joy"), "positive"),
    "mother": (("trust",), "positive"),
    "teacher": (("trust",), ""),
    "hug": (("trust", "joy"), "positive"),
    "hope": (("anticipation",), "positive"),
    "wait": (("anticipation",), ""),
    "tomorrow": (("anticipation",), ""),
    "surprise": (("surprise",), ""),
}

# lexicon-only entries: never appear in the corpus, but widen the pool the
# null model samples from.
EXTRA_LEXICON = {
    "delight": (("joy",), "positive"),
    "cheer": (("joy",), "positive"),
    "bliss": (("joy",), "positive"),
    "grief": (("sadness",), "negative"),
    "sorrow": (("sadness",), "negative"),
    "weep": (("sadness",), "negative"),
    "terror": (("fear",), "negative"),
    "dread": (("fear", "anticipation"), "negative"),
    "panic": (("fear",), "negative"),
    "rage": (("anger",), "negative"),
    "fury": (("anger",), "negative"),
    "grudge": (("anger",), "negative"),
    "filth": (("disgust",), "negative"),
    "rot": (("disgust",), "negative"),
    "loyal": (("trust",), "positive"),
    "faith": (("trust", "anticipation"), "positive"),
    "astonish": (("surprise",), ""),
    "startle": (("surprise", "fear"), ""),
    "eager": (("anticipation", "joy"), "positive"),
    "yearn": (("anticipation", "sadness"), ""),
}

SYNSETS = [
    ("happy", "feeling.glad.01"),
    ("glad", "feeling.glad.01"),
    ("sad", "feeling.down.01"),
    ("lonely", "feeling.down.01"),
    ("scared", "feeling.afraid.01"),
    ("afraid", "feeling.afraid.01"),
    ("house", "place.home.01"),
    ("home", "place.home.01"),
    ("friend", "person.pal.01"),
    ("pal", "person.pal.01"),
    ("big", "size.large.01"),
    ("large", "size.large.01"),
]

NOUNS = ["dog", "cat", "ball", "school", "garden", "book", "game", "house",
         "home", "brother", "sister", "teacher", "friend", "mother", "park",
         "monster", "storm", "party", "mess", "surprise"]
VERBS = ["play", "run", "see", "like", "want", "find", "chase", "break",
         "help", "shout", "cry", "laugh", "smile", "hug", "fight", "wait"]
ADJS = ["happy", "sad", "scared", "angry", "lonely", "glad", "big", "small",
        "dark", "yucky", "sick", "afraid", "lost"]

NEGATIVE = {w for w, (_, val) in EMOTION_WORDS.items() if val == "negative"}
FEARSAD = {w for w, (cats, _) in EMOTION_WORDS.items()
           if "fear" in cats or "sadness" in cats}


# ---------------------------------------------------------------------------
# sentence templates
#
# Each builder returns a list of (surface, lemma, upos, head, deprel)
# tuples with 1-based head indices; 0 marks the root.

def t_svo(n1, v, n2):
    return [
        ("The", "the", "DET", 2, "det"),
        (n1, n1, "NOUN", 3, "nsubj"),
        (v + "s", v, "VERB", 0, "root"),
        ("the", "the", "DET", 5, "det"),
        (n2, n2, "NOUN", 3, "obj"),
        (".", ".", "PUNCT", 3, "punct"),
    ]


def t_feel(a1, a2):
    return [
        ("I", "i", "PRON", 2, "nsubj"),
        ("feel", "feel", "VERB", 0, "root"),
        (a1, a1, "ADJ", 2, "xcomp"),
        ("and", "and", "CCONJ", 5, "cc"),
        (a2, a2, "ADJ", 3, "conj"),
        ("today", "today", "NOUN", 2, "obl"),
        (".", ".", "PUNCT", 2, "punct"),
    ]


def t_like(n):
    return [
        ("I", "i", "PRON", 2, "nsubj"),
        ("like", "like", "VERB", 0, "root"),
        ("my", "my", "PRON", 4, "nmod"),
        (n, n, "NOUN", 2, "obj"),
        ("a", "a", "DET", 6, "det"),
        ("lot", "lot", "NOUN", 2, "obl"),
        (".", ".", "PUNCT", 2, "punct"),
    ]


def t_think(n, v):
    return [
        ("I", "i", "PRON", 2, "nsubj"),
        ("think", "think", "VERB", 0, "root"),
        ("that", "that", "SCONJ", 6, "mark"),
        ("the", "the", "DET", 5, "det"),
        (n, n, "NOUN", 6, "nsubj"),
        (v + "s", v, "VERB", 2, "ccomp"),
        (".", ".", "PUNCT", 2, "punct"),
    ]


def t_when(n, v, a):
    return [
        ("When", "when", "ADV", 4, "mark"),
        ("the", "the", "DET", 3, "det"),
        (n, n, "NOUN", 4, "nsubj"),
        (v + "s", v, "VERB", 8, "advcl"),
        (",", ",", "PUNCT", 8, "punct"),
        ("I", "i", "PRON", 8, "nsubj"),
        ("am", "be", "AUX", 8, "cop"),
        (a, a, "ADJ", 0, "root"),
        (".", ".", "PUNCT", 8, "punct"),
    ]


def t_we(v, n):
    return [
        ("We", "we", "PRON", 2, "nsubj"),
        (v, v, "VERB", 0, "root"),
        ("with", "with", "ADP", 5, "case"),
        ("the", "the", "DET", 5, "det"),
        (n, n, "NOUN", 2, "obl"),
        ("!", "!", "PUNCT", 2, "punct"),
    ]


def t_hope(v, n):
    return [
        ("I", "i", "PRON", 2, "nsubj"),
        ("hope", "hope", "VERB", 0, "root"),
        ("to", "to", "PART", 4, "mark"),
        (v, v, "VERB", 2, "xcomp"),
        ("tomorrow", "tomorrow", "NOUN", 4, "obl"),
        ("with", "with", "ADP", 8, "case"),
        ("my", "my", "PRON", 8, "nmod"),
        (n, n, "NOUN", 4, "obl"),
        (".", ".", "PUNCT", 2, "punct"),
    ]


def t_isick():
    # the long-range filler sentence: subject and complement sit far apart
    # in the surface string but two steps apart in the tree.
    return [
        ("today", "today", "NOUN", 3, "obl"),
        ("I", "i", "PRON", 3, "nsubj"),
        ("feel", "feel", "VERB", 0, "root"),
        ("so", "so", "ADV", 13, "advmod"),
        ("much", "much", "ADV", 13, "advmod"),
        ("very", "very", "ADV", 13, "advmod"),
        ("—", "—", "PUNCT", 13, "punct"),
        ("well", "well", "INTJ", 3, "discourse"),
        (",", ",", "PUNCT", 8, "punct"),
        ("you", "you", "PRON", 11, "nsubj"),
        ("know", "know", "VERB", 3, "parataxis"),
        ("—", "—", "PUNCT", 13, "punct"),
        ("sick", "sick", "ADJ", 3, "xcomp"),
        ("!", "!", "PUNCT", 3, "punct"),
    ]


def t_dont(v, n):
    """Includes a multiword-token range line when serialised."""
    return [
        ("I", "i", "PRON", 4, "nsubj"),
        ("do", "do", "AUX", 4, "aux"),
        ("not", "not", "PART", 4, "advmod"),
        (v, v, "VERB", 0, "root"),
        ("the", "the", "DET", 6, "det"),
        (n, n, "NOUN", 4, "obj"),
        (".", ".", "PUNCT", 4, "punct"),
    ]


def pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def build_transcript(rng, index: int):
    """Return (sentences, lemma_counts) for one synthetic interview."""
    sentences = [t_feel(pick(rng, ADJS), pick(rng, ADJS))]
    n_extra = int(rng.integers(7, 12))
    for _ in range(n_extra):
        roll = rng.random()
        if roll < 0.22:
            sentences.append(t_svo(pick(rng, NOUNS), pick(rng, VERBS), pick(rng, NOUNS)))
        elif roll < 0.40:
            sentences.append(t_feel(pick(rng, ADJS), pick(rng, ADJS)))
        elif roll < 0.52:
            sentences.append(t_like(pick(rng, NOUNS)))
        elif roll < 0.64:
            sentences.append(t_think(pick(rng, NOUNS), pick(rng, VERBS)))
        elif roll < 0.76:
            sentences.append(t_when(pick(rng, NOUNS), pick(rng, VERBS), pick(rng, ADJS)))
        elif roll < 0.88:
            sentences.append(t_we(pick(rng, VERBS), pick(rng, NOUNS)))
        else:
            sentences.append(t_hope(pick(rng, VERBS), pick(rng, NOUNS)))
    if index == 4:
        sentences.append(t_isick())
    if index == 6:
        sentences.append(t_dont(pick(rng, VERBS), pick(rng, NOUNS)))
    if index == 2:
        # make sure one transcript holds a co-occurring synonym pair
        sentences.append(t_svo("house", "see", "home"))
        sentences.append(t_like("pal"))

    counts: dict[str, int] = {}
    for sent in sentences:
        for _, lemma, upos, _, _ in sent:
            if upos != "PUNCT":
                counts[lemma] = counts.get(lemma, 0) + 1
    return sentences, counts


def serialise(tid: str, age: float, sex: str, sentences, contraction_at: int | None,
              empty_node_at: int | None) -> str:
    lines = [f"# newdoc id = {tid}", f"# age = {age}", f"# sex = {sex}"]
    for s_idx, sent in enumerate(sentences, start=1):
        lines.append(f"# sent_id = {tid}-s{s_idx}")
        for t_idx, (surface, lemma, upos, head, deprel) in enumerate(sent, start=1):
            if contraction_at == s_idx and surface == "do":
                # a multiword range line ahead of its parts, as UD writes "don't"
                lines.append(f"{t_idx}-{t_idx + 1}\tdon't\t_\t_\t_\t_\t_\t_\t_\t_")
            lines.append(f"{t_idx}\t{surface}\t{lemma}\t{upos}\t_\t_\t{head}\t{deprel}\t_\t_")
        if empty_node_at == s_idx:
            lines.append("3.1\tmissing\tmiss\tVERB\t_\t_\t_\t_\t_\t_")
        lines.append("")
    return "\n".join(lines) + "\n"


def write_corpus(out: Path, rng) -> dict[str, dict]:
    corpus_dir = out / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    info: dict[str, dict] = {}
    for i in range(10):
        tid = f"child{i + 1:02d}"
        sentences, counts = build_transcript(rng, i)
        age = round(float(rng.uniform(6.0, 16.0)), 1)
        sex = "f" if i % 2 == 0 else "m"
        text = serialise(
            tid, age, sex, sentences,
            contraction_at=len(sentences) if i == 6 else None,
            empty_node_at=2 if i == 8 else None,
        )
        (corpus_dir / f"{tid}.conllu").write_text(text, encoding="utf-8")
        info[tid] = {"age": age, "sex": sex, "counts": counts}
    return info


def write_lexicons(out: Path) -> None:
    rows = []
    for word in sorted(set(EMOTION_WORDS) | set(EXTRA_LEXICON)):
        cats, valence = (EMOTION_WORDS.get(word) or EXTRA_LEXICON[word])
        for cat in sorted(cats):
            rows.append(f"{word}\t{cat}\t1")
        if valence:
            rows.append(f"{word}\t{valence}\t1")
    # a word flagged in both valence directions reads as neutral downstream
    rows.append("surprise\tpositive\t1")
    rows.append("surprise\tnegative\t1")
    (out / "emotions.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    syn = [f"{w}\t{sid}" for w, sid in SYNSETS]
    (out / "synonyms.tsv").write_text("\n".join(syn) + "\n", encoding="utf-8")


def write_targets(out: Path, info: dict[str, dict], rng) -> None:
    lines = ["transcript_id,social_maladjustment,specific_internalising,neurodevelopmental_risk"]
    for tid in sorted(info):
        counts = info[tid]["counts"]
        total = sum(counts.values())
        neg = sum(c for w, c in counts.items() if w in NEGATIVE)
        fearsad = sum(c for w, c in counts.items() if w in FEARSAD)
        soc = 42.0 + 65.0 * neg / total + float(rng.normal(0.0, 2.0))
        intern = 40.0 + 70.0 * fearsad / total + float(rng.normal(0.0, 2.5))
        neuro = 45.0 + 30.0 * neg / total + 0.12 * len(counts) + float(rng.normal(0.0, 3.0))
        lines.append(f"{tid},{soc:.1f},{intern:.1f},{neuro:.1f}")
    (out / "targets.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


CONFIG_TOML = """\
# End-to-end fixture configuration: ten small transcripts, trimmed grids.
corpus_dir = "corpus"
targets_csv = "targets.csv"
emotion_lexicon = "emotions.tsv"
synonym_lexicon = "synonyms.tsv"
out_dir = "out"

k = 4
synonym_scope = "present"
community_method = "greedy"
n_samples = 200
seed = 7
cv_k = 2
n_perm = 3
delta = 0.01
n_shuffles = 1

[gbm_grid]
n_estimators = [10, 25]
learning_rate = [0.3]
max_depth = [2, 3]
max_features = ["none"]
subsample = [1.0]
loss = ["squared"]

[rfr_grid]
n_estimators = [10]
max_depth = [3, "none"]
max_features = ["sqrt"]
max_leaf_nodes = ["none"]
criterion = ["squared_error"]
"""


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "fixtures"),
                        help="output directory (default: fixtures/ beside tools/)")
    parser.add_argument("--seed", type=int, default=11, help="generator seed")
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    info = write_corpus(out, rng)
    write_lexicons(out)
    write_targets(out, info, rng)
    (out / "config.toml").write_text(CONFIG_TOML, encoding="utf-8")
    print(f"fixture bundle written to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
