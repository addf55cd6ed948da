"""Sense selection by matching Wikipedia categories against WordNet neighbourhoods.

For every candidate sense the lemmas of its hypernym and hyponym closures
are compared with three groups of strings derived from the article's
category neighbourhood:

1. the article's own category names,
2. the names of those categories' parent categories,
3. the titles of the other pages filed under the article's categories.

The sense with the most distinct matched lemmas wins; ties go to the sense
with more matches in earlier groups, then to the lower WordNet sense
number. No match at all means no assignment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .assignments import MCAT, SenseAssignment
from .wiki_ingest import Article, ArticleStore
from .wordnet_store import WordNet, title_to_lemma

DEFAULT_DEPTH = 3

_PREPOSITIONS = frozenset({"of", "in", "from", "by", "for", "on", "at", "with", "about"})
_WORD_RE = re.compile(r"[^\W_]+(?:[-'][^\W_]+)*")


@dataclass
class CategoryNeighborhood:
    article_title: str
    categories: list[str] = field(default_factory=list)
    category_members: dict[str, set[str]] = field(default_factory=dict)
    parent_categories: dict[str, set[str]] = field(default_factory=dict)
    missing: int = 0

    def parent_names(self) -> list[str]:
        out: dict[str, None] = {}
        for cat in self.categories:
            for parent in sorted(self.parent_categories.get(cat, ())):
                out.setdefault(parent, None)
        return list(out)

    def member_titles(self) -> list[str]:
        out: dict[str, None] = {}
        for cat in self.categories:
            for member in sorted(self.category_members.get(cat, ())):
                out.setdefault(member, None)
        return list(out)


def build_neighborhood(article: Article, en_store: ArticleStore) -> CategoryNeighborhood:
    hood = CategoryNeighborhood(article.title, list(article.categories))
    for cat in article.categories:
        page = en_store.category_page(cat)
        if page is None:
            hood.missing += 1
            hood.category_members[cat] = set()
            hood.parent_categories[cat] = set()
            continue
        members = set(en_store.category_members(cat))
        members.discard(article.title)
        hood.category_members[cat] = members
        hood.parent_categories[cat] = set(page.categories)
    return hood


def _singulars(word: str) -> list[str]:
    out = [word]
    if len(word) > 3 and word.endswith("ies"):
        out.append(word[:-3] + "y")
    if len(word) > 2 and word.endswith("es"):
        out.append(word[:-2])
    if len(word) > 1 and word.endswith("s") and not word.endswith("ss"):
        out.append(word[:-1])
    return out


def name_variants(name: str) -> set[str]:
    """Lemma-style strings (lowercase, underscores) a category or title may denote.

    The full phrase, its head noun (the word before the first preposition,
    else the last word) and its last word, each also with naive plural
    stripping applied to its final word.
    """
    words = _WORD_RE.findall(title_to_lemma(name).lower())
    if not words:
        return set()
    phrases = [words, words[-1:]]
    for i, w in enumerate(words):
        if w in _PREPOSITIONS and i > 0:
            phrases.append(words[i - 1:i])
            break
    out: set[str] = set()
    for phrase in phrases:
        stem = phrase[:-1]
        for last in _singulars(phrase[-1]):
            out.add("_".join(stem + [last]))
    return out


def neighbourhood_lemmas(wn: WordNet, offset: int, depth: int) -> set[str]:
    related = wn.hypernym_closure(offset, depth) + wn.hyponym_closure(offset, depth)
    return {lemma for o in related for lemma in wn.synsets[o].lemmas}


def pass_strings(hood: CategoryNeighborhood) -> tuple[set[str], set[str], set[str]]:
    def variants(names):
        out: set[str] = set()
        for n in names:
            out |= name_variants(n)
        return out

    return variants(hood.categories), variants(hood.parent_names()), variants(hood.member_titles())


def mcat_assign(article: Article, lemma: str, neighborhood: CategoryNeighborhood,
                wn: WordNet, depth: int = DEFAULT_DEPTH) -> SenseAssignment | None:
    if depth < 1:
        raise ValueError("depth must be positive")
    senses = wn.senses_of(lemma)
    if not senses or not neighborhood.categories:
        return None
    groups = pass_strings(neighborhood)
    scored = []
    for rank, syn in enumerate(senses):
        lemmas = neighbourhood_lemmas(wn, syn.offset, depth)
        matched = [lemmas & g for g in groups]
        total = len(set().union(*matched))
        key = (total, len(matched[0]), len(matched[1]), len(matched[2]), -rank)
        scored.append((key, syn, matched))
    scored.sort(key=lambda s: s[0], reverse=True)
    (total, *_), syn, matched = scored[0]
    if total == 0:
        return None
    runner_up = float(scored[1][0][0]) if len(scored) > 1 else None
    flags = tuple(f"pass{i + 1}" for i, m in enumerate(matched) if m)
    return SenseAssignment(article.title, lemma, syn.offset, MCAT, float(total), runner_up, flags)
