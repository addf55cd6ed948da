"""Comparable corpus from lead sections and thesaurus coverage over it."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from .thesaurus import LANG_ORDER, ThesaurusEntry, split_sentences
from .wiki_ingest import ArticleStore, first_section, strip_markup, tokenize
from .wordnet_store import lemma_key, title_to_lemma


@dataclass
class ComparableCorpus:
    sentences: list[tuple[str, int, str]] = field(default_factory=list)
    type_set: dict[str, set[str]] = field(default_factory=lambda: {code: set() for code in LANG_ORDER})

    def count(self, lang: str | None = None) -> int:
        return sum(1 for s in self.sentences if lang is None or s[0] == lang)


@dataclass(frozen=True)
class Coverage:
    lang: str
    types: int
    matched: int
    ratio: float
    phrase_lemmas: int = 0
    phrase_matched: int = 0

    def as_dict(self) -> dict:
        return dict(vars(self))


def build_corpus(thesaurus: Iterable[ThesaurusEntry], stores: Mapping[str, ArticleStore],
                 stoplist: Iterable[str] = ()) -> ComparableCorpus:
    """Sentences of the lead section of every thesaurus article, per language.

    An article shared by several entries contributes its sentences once.
    """
    stop = frozenset(stoplist)
    corpus = ComparableCorpus()
    seen: set[tuple[str, str]] = set()
    for entry in thesaurus:
        en_article = stores["en"].get(entry.en.lemma)
        if en_article is None:
            continue
        for code in LANG_ORDER:
            store = stores.get(code)
            article = store.get(entry.lang(code).lemma) if store is not None else None
            if article is None or article.is_redirect or (code, article.title) in seen:
                continue
            seen.add((code, article.title))
            for sentence in split_sentences(strip_markup(first_section(article), code)):
                corpus.sentences.append((code, en_article.page_id, sentence))
                corpus.type_set[code].update(t for t in tokenize(sentence) if t not in stop)
    return corpus


def thesaurus_keys(thesaurus: Iterable[ThesaurusEntry], lang: str = "en") -> set[str]:
    """Lookup-normalized lemmas of one language."""
    return {lemma_key(title_to_lemma(e.lang(lang).lemma)) for e in thesaurus}


def coverage(corpus: ComparableCorpus, thesaurus: Iterable[ThesaurusEntry], lang: str = "en") -> Coverage:
    """Share of the corpus word types of ``lang`` that are thesaurus lemmas."""
    keys = thesaurus_keys(thesaurus, lang)
    types = corpus.type_set.get(lang, set())
    matched = len(types & keys)
    phrases = sorted(k for k in keys if "_" in k)
    text = "\n".join(s for code, _, s in corpus.sentences if code == lang).lower()
    phrase_matched = sum(
        1 for k in phrases
        if re.search(r"(?<!\w)" + r"\s+".join(map(re.escape, k.split("_"))) + r"(?!\w)", text)
    )
    ratio = matched / len(types) if types else 0.0
    return Coverage(lang, len(types), matched, ratio, len(phrases), phrase_matched)


def coverage_report(corpus: ComparableCorpus, thesaurus: list[ThesaurusEntry]) -> dict[str, Coverage]:
    return {code: coverage(corpus, thesaurus, code) for code in LANG_ORDER}


def write_corpus(corpus: ComparableCorpus, fp: IO[str]) -> None:
    fp.write("lang\ten_page_id\tsentence\n")
    for lang, page_id, sentence in corpus.sentences:
        fp.write(f"{lang}\t{page_id}\t{' '.join(sentence.split())}\n")


def format_coverage(report: Mapping[str, Coverage]) -> str:
    lines = []
    for code, cov in report.items():
        lines.append(f"{code}: {cov.matched}/{cov.types} word types covered ({cov.ratio * 100:.2f}%); "
                     f"multiword lemmas found {cov.phrase_matched}/{cov.phrase_lemmas}")
    return "\n".join(lines) + "\n"


def coverage_json(report: Mapping[str, Coverage], corpus: ComparableCorpus) -> str:
    en = report["en"]
    payload = {
        "types": en.types,
        "matched": en.matched,
        "ratio": en.ratio,
        "sentences": {code: corpus.count(code) for code in LANG_ORDER},
        "per_language": {code: cov.as_dict() for code, cov in report.items()},
    }
    return json.dumps(payload, ensure_ascii=False, sort_keys=True)
