"""Emotion z-scores against a repeated-sampling lexicon null model.

A transcript's words are matched against the emotion lexicon; for each of
the eight emotions the observed count is standardized against the counts
obtained by repeatedly drawing the same number of emotion-bearing words
from the lexicon at random.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import MMismatch, MTooLarge
from .lexicons import EMOTIONS, EmotionLexicon

SIGNIFICANCE_Z = 1.96

_CHUNK_ROWS = 2048


def count_emotions(words: Iterable[str], lex: EmotionLexicon) -> tuple[dict[str, int], int]:
    """Observed emotion counts over word tokens, with multiplicity.

    Returns (counts, M) where M is the number of tokens carrying at least
    one emotion and counts[e] the number of tokens carrying emotion e.
    """
    counts = {e: 0 for e in EMOTIONS}
    m = 0
    for w in words:
        emos = lex.emotions_of(w)
        if not emos:
            continue
        m += 1
        for e in emos:
            counts[e] += 1
    return counts, m


@dataclass(frozen=True)
class NullModel:
    """Mean/SD of per-emotion counts under random draws of M lexicon words."""

    m: int
    n_samples: int
    seed: int
    with_replacement: bool
    stats: Mapping[str, tuple[float, float]]


def null_model(
    m: int,
    lex: EmotionLexicon,
    n_samples: int = 1000,
    seed: int = 0,
    with_replacement: bool = False,
) -> NullModel:
    """Sampling distribution of emotion counts for draws of ``m`` words.

    Each of ``n_samples`` iterations draws ``m`` words uniformly from the
    distinct emotion-bearing lexicon entries (without replacement unless
    ``with_replacement``) and counts each emotion; the returned stats are
    the sample mean and standard deviation of those counts.
    """
    if m < 1:
        raise ValueError("null model needs m >= 1")
    if n_samples < 100:
        raise ValueError("null model needs at least 100 samples")
    population = lex.emotion_bearing_words()
    d = len(population)
    if not with_replacement and m > d:
        raise MTooLarge(
            f"cannot draw {m} distinct words from a lexicon with {d} emotion-bearing entries"
        )
    membership = np.zeros((d, len(EMOTIONS)), dtype=np.float64)
    for i, w in enumerate(population):
        for e in lex.emotions_of(w):
            membership[i, EMOTIONS.index(e)] = 1.0

    rng = np.random.default_rng(seed)
    totals = np.zeros(len(EMOTIONS))
    sq_totals = np.zeros(len(EMOTIONS))
    done = 0
    while done < n_samples:
        rows = min(_CHUNK_ROWS, n_samples - done)
        if with_replacement:
            idx = rng.integers(0, d, size=(rows, m))
        elif m == d:
            idx = np.tile(np.arange(d), (rows, 1))
        else:
            u = rng.random((rows, d))
            idx = np.argpartition(u, m, axis=1)[:, :m]
        draw_counts = membership[idx].sum(axis=1)  # (rows, 8)
        totals += draw_counts.sum(axis=0)
        sq_totals += (draw_counts**2).sum(axis=0)
        done += rows
    means = totals / n_samples
    variances = np.maximum(sq_totals / n_samples - means**2, 0.0)
    sds = np.sqrt(variances)
    stats = {e: (float(means[i]), float(sds[i])) for i, e in enumerate(EMOTIONS)}
    return NullModel(
        m=m,
        n_samples=n_samples,
        seed=seed,
        with_replacement=with_replacement,
        stats=stats,
    )


def z_scores(
    counts: Mapping[str, int], m: int, null: NullModel
) -> tuple[dict[str, float], dict[str, bool], set[str]]:
    """Standardize observed counts against the null model.

    Returns (z, significant, degenerate): z-scores, the |Z| > 1.96 flags,
    and the set of emotions whose null SD was zero (their Z is pinned to 0).
    """
    if null.m != m:
        raise MMismatch(f"null model was built for M={null.m}, counts have M={m}")
    z: dict[str, float] = {}
    significant: dict[str, bool] = {}
    degenerate: set[str] = set()
    for e in EMOTIONS:
        mean, sd = null.stats[e]
        if sd == 0.0:
            z[e] = 0.0
            degenerate.add(e)
        else:
            z[e] = (counts[e] - mean) / sd
        significant[e] = abs(z[e]) > SIGNIFICANCE_Z
    return z, significant, degenerate


@dataclass(frozen=True)
class EmotionProfile:
    """Per-transcript emotion counts and z-scores."""

    counts: Mapping[str, int]
    m_emotional: int
    z_scores: Mapping[str, float]
    significant: Mapping[str, bool]
    degenerate: frozenset = field(default_factory=frozenset)
    n_samples: int = 0
    seed: int = 0

    def z_vector(self) -> list[float]:
        return [self.z_scores[e] for e in EMOTIONS]


def profile_words(
    words: Iterable[str],
    lex: EmotionLexicon,
    n_samples: int = 1000,
    seed: int = 0,
    with_replacement: bool = False,
) -> EmotionProfile:
    """count_emotions + null_model + z_scores in one call.

    A transcript with no emotion-bearing words (M = 0) has no sampling
    null; its z-scores are all 0 and every emotion is flagged degenerate.
    """
    counts, m = count_emotions(words, lex)
    if m == 0:
        return EmotionProfile(
            counts=counts,
            m_emotional=0,
            z_scores={e: 0.0 for e in EMOTIONS},
            significant={e: False for e in EMOTIONS},
            degenerate=frozenset(EMOTIONS),
            n_samples=n_samples,
            seed=seed,
        )
    null = null_model(m, lex, n_samples=n_samples, seed=seed, with_replacement=with_replacement)
    z, sig, degen = z_scores(counts, m, null)
    return EmotionProfile(
        counts=counts,
        m_emotional=m,
        z_scores=z,
        significant=sig,
        degenerate=frozenset(degen),
        n_samples=n_samples,
        seed=seed,
    )
