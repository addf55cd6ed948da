"""Sense selection by cosine similarity of article and gloss term vectors."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal

from .assignments import VSM, SenseAssignment
from .wiki_ingest import Article, clean_text, first_section
from .wordnet_store import WordNet, Synset

Mode = Literal["whole", "first_section"]
Weighting = Literal["raw", "tfidf"]


class NotInWordNetError(LookupError):
    pass


@dataclass(frozen=True)
class TermVector:
    counts: dict[str, float]
    norm: float = field(init=False)
    norm_sq: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        sq = sum(c * c for c in self.counts.values())
        object.__setattr__(self, "norm_sq", sq)
        object.__setattr__(self, "norm", math.sqrt(sq))

    def __len__(self) -> int:
        return len(self.counts)

    def scaled(self, k: int) -> "TermVector":
        return TermVector({t: c * k for t, c in self.counts.items()})


def vectorize(tokens: Iterable[str]) -> TermVector:
    """Raw term counts."""
    return TermVector(dict(Counter(tokens)))


def _dot(v1: TermVector, v2: TermVector) -> float:
    a, b = (v1.counts, v2.counts) if len(v1) <= len(v2) else (v2.counts, v1.counts)
    return sum(c * b[t] for t, c in a.items() if t in b)


def cosine(v1: TermVector, v2: TermVector) -> float:
    """Cosine of the angle between two count vectors; 0 when either is empty."""
    if not v1.norm_sq or not v2.norm_sq:
        return 0.0
    value = _dot(v1, v2) / math.sqrt(v1.norm_sq * v2.norm_sq)
    return min(1.0, max(0.0, value))


def _rank_key(v1: TermVector, v2: TermVector):
    """Monotone in cosine; exact (squared, rational) for integer counts so
    argmax decisions do not drift under rescaling."""
    if not v1.norm_sq or not v2.norm_sq:
        return 0
    dot = _dot(v1, v2)
    if isinstance(dot, int) and isinstance(v1.norm_sq, int) and isinstance(v2.norm_sq, int):
        return Fraction(dot * dot, v1.norm_sq * v2.norm_sq)
    return cosine(v1, v2)


class VsmDisambiguator:
    """Picks the sense whose gloss vector is closest to the article vector.

    Gloss vectors are cached per synset. With ``weighting="tfidf"`` both
    sides are reweighted by inverse document frequency over all glosses.
    """

    def __init__(self, wn: WordNet, stoplist: Iterable[str] = (), mode: Mode = "whole",
                 gloss_examples: bool = True, weighting: Weighting = "raw"):
        if mode not in ("whole", "first_section"):
            raise ValueError(f"unknown mode {mode!r}")
        if weighting not in ("raw", "tfidf"):
            raise ValueError(f"unknown weighting {weighting!r}")
        self.wn = wn
        self.stoplist = frozenset(stoplist)
        self.mode = mode
        self.gloss_examples = gloss_examples
        self.weighting = weighting
        self._gloss_cache: dict[int, TermVector] = {}
        self._idf: dict[str, float] | None = None

    def _weight(self, vec: TermVector) -> TermVector:
        if self.weighting == "raw":
            return vec
        if self._idf is None:
            df: Counter[str] = Counter()
            for syn in self.wn.synsets.values():
                df.update(set(clean_text(syn.gloss_text(self.gloss_examples), self.stoplist)))
            n = len(self.wn.synsets)
            self._idf = {t: math.log((1 + n) / (1 + d)) + 1 for t, d in df.items()}
            self._idf_default = math.log(1 + n) + 1
        return TermVector({t: c * self._idf.get(t, self._idf_default) for t, c in vec.counts.items()})

    def gloss_vector(self, synset: Synset) -> TermVector:
        vec = self._gloss_cache.get(synset.offset)
        if vec is None:
            vec = self._weight(vectorize(clean_text(synset.gloss_text(self.gloss_examples), self.stoplist)))
            self._gloss_cache[synset.offset] = vec
        return vec

    def article_vector(self, article: Article) -> TermVector:
        text = article.raw_text if self.mode == "whole" else first_section(article)
        return self._weight(vectorize(clean_text(text, self.stoplist, article.lang)))

    def assign(self, article: Article, lemma: str, article_vec: TermVector | None = None) -> SenseAssignment:
        senses = self.wn.senses_of(lemma)
        if not senses:
            raise NotInWordNetError(f"{lemma!r} not in WordNet")
        vec = self.article_vector(article) if article_vec is None else article_vec
        scored = []
        for rank, syn in enumerate(senses):
            gvec = self.gloss_vector(syn)
            scored.append((_rank_key(vec, gvec), -rank, cosine(vec, gvec), syn))
        scored.sort(key=lambda s: (s[0], s[1]), reverse=True)
        best = scored[0]
        runner_up = scored[1][2] if len(scored) > 1 else None
        if best[0] == 0:
            first = senses[0]
            return SenseAssignment(article.title, lemma, first.offset, VSM, 0.0, runner_up, ("degenerate",))
        if runner_up is not None:
            runner_up = min(runner_up, best[2])  # float rounding guard
        return SenseAssignment(article.title, lemma, best[3].offset, VSM, best[2], runner_up)


def vsm_assign(article: Article, lemma: str, wn: WordNet, stoplist: Iterable[str] = (),
               mode: Mode = "whole", **kwargs) -> SenseAssignment:
    return VsmDisambiguator(wn, stoplist, mode=mode, **kwargs).assign(article, lemma)
