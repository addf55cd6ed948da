"""English-Spanish-Japanese title tuples from interlanguage links."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import IO, Iterable

from .wiki_ingest import Article, ArticleStore, RedirectError, resolve_redirect

log = logging.getLogger(__name__)

TARGET_LANGS = ("es", "ja")
TUPLE_COLUMNS = ("en_title", "es_title", "ja_title", "en_page_id")


@dataclass(frozen=True, order=True)
class TranslationTuple:
    en_title: str
    es_title: str
    ja_title: str
    en_page_id: int


@dataclass(frozen=True)
class PartialTuple:
    """An English article that failed the three-way alignment, with the reason."""

    en_title: str
    es_title: str | None
    ja_title: str | None
    en_page_id: int
    reason: str


@dataclass
class TupleStats:
    candidates: int = 0
    tuples: int = 0
    skipped_disambiguation: int = 0
    missing_link: int = 0
    unresolved_target: int = 0
    backlinked_es: int = 0
    backlinked_ja: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(vars(self))


def extract_langlinks(article: Article) -> dict[str, str]:
    """Interlanguage links filtered to the other two thesaurus languages."""
    wanted = TARGET_LANGS if article.lang == "en" else ("en",)
    return {code: title for code, title in article.langlinks.items() if code in wanted}


def _canonical(title: str, store: ArticleStore) -> str | None:
    try:
        resolved = resolve_redirect(title, store)
    except RedirectError as exc:
        log.debug("%s: %s", store.lang, exc)
        return None
    art = store.get(resolved)
    if art is None or art.is_redirect or art.is_category_page:
        return None
    return art.title


def build_tuples(en_store: ArticleStore, es_store: ArticleStore, ja_store: ArticleStore,
                 partials: list[PartialTuple] | None = None,
                 stats: TupleStats | None = None) -> list[TranslationTuple]:
    """Aligned title tuples sorted by English title.

    An English article contributes only when it links to both languages and
    both targets resolve to real articles. Rejected articles with at least
    one link are appended to ``partials`` when given.
    """
    stats = stats if stats is not None else TupleStats()
    stores = {"es": es_store, "ja": ja_store}
    out: list[TranslationTuple] = []
    for art in en_store.articles():
        links = extract_langlinks(art)
        if not links:
            continue
        stats.candidates += 1
        if art.is_disambiguation:
            stats.skipped_disambiguation += 1
            continue
        resolved = {code: _canonical(links[code], stores[code]) if code in links else None
                    for code in TARGET_LANGS}
        if any(code not in links for code in TARGET_LANGS):
            stats.missing_link += 1
            reason = "missing_link"
        elif any(v is None for v in resolved.values()):
            stats.unresolved_target += 1
            reason = "unresolved_target"
        else:
            out.append(TranslationTuple(art.title, resolved["es"], resolved["ja"], art.page_id))
            for code in TARGET_LANGS:
                foreign = stores[code].get(resolved[code])
                if foreign is not None and _links_back(foreign, art, en_store):
                    setattr(stats, f"backlinked_{code}", getattr(stats, f"backlinked_{code}") + 1)
            continue
        if partials is not None:
            partials.append(PartialTuple(art.title, resolved["es"] or links.get("es"),
                                         resolved["ja"] or links.get("ja"), art.page_id, reason))
    out.sort()
    stats.tuples = len(out)
    if partials is not None:
        partials.sort(key=lambda p: p.en_title)
    return out


def _links_back(foreign: Article, en_article: Article, en_store: ArticleStore) -> bool:
    back = foreign.langlinks.get("en")
    if back is None:
        return False
    return _canonical(back, en_store) == en_article.title


def write_tuples(tuples: Iterable[TranslationTuple], fp: IO[str]) -> None:
    writer = csv.writer(fp, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE, escapechar="\\")
    writer.writerow(TUPLE_COLUMNS)
    for t in tuples:
        writer.writerow((t.en_title, t.es_title, t.ja_title, t.en_page_id))


def write_partials(partials: Iterable[PartialTuple], fp: IO[str]) -> None:
    writer = csv.writer(fp, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE, escapechar="\\")
    writer.writerow(("en_title", "es_title", "ja_title", "en_page_id", "reason"))
    for p in partials:
        writer.writerow((p.en_title, p.es_title or "", p.ja_title or "", p.en_page_id, p.reason))


def read_tuples(fp: IO[str]) -> list[TranslationTuple]:
    reader = csv.reader(fp, delimiter="\t", quoting=csv.QUOTE_NONE, escapechar="\\")
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != TUPLE_COLUMNS:
        raise ValueError(f"unexpected tuples header {header!r}")
    return [TranslationTuple(en, es, ja, int(pid)) for en, es, ja, pid in reader]
