"""Wikipedia dump ingestion: article store, wikitext cleaning, redirects.

Two input formats are understood by :func:`parse_dump`:

* MediaWiki ``pages-articles`` XML exports (``page/title``, ``page/ns``,
  ``page/id``, ``page/redirect``, ``revision/text``);
* line-oriented JSON records ``{"title", "lang", "text", "id"}``, which is
  also the format written by :func:`write_store_dump`.
"""

from __future__ import annotations

import bz2
import gzip
import io
import json
import logging
import re
import xml.parsers.expat
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

log = logging.getLogger(__name__)

LANGS = ("en", "es", "ja")

NS_MAIN = 0
NS_CATEGORY = 14

MAX_REDIRECT_DEPTH = 16

DEFAULT_STOPLIST = Path(__file__).parent / "data" / "stopwords_en.txt"

# Namespace prefixes (lowercased) per language; anything else with a colon
# is a main-namespace title such as "Star Wars: Episode I".
_CATEGORY_PREFIXES = {
    "en": ("category",),
    "es": ("categoría", "categoria", "category"),
    "ja": ("category", "カテゴリ"),
}
_FILE_PREFIXES = ("file", "image", "media", "archivo", "imagen", "ファイル", "画像")
_OTHER_PREFIXES = (
    "talk", "user", "user talk", "wikipedia", "wikipedia talk", "file talk",
    "mediawiki", "mediawiki talk", "template", "template talk", "help",
    "help talk", "category talk", "portal", "portal talk", "special",
    "module", "draft", "project",
    # es
    "discusión", "usuario", "usuaria", "usuario discusión", "plantilla",
    "plantilla discusión", "ayuda", "wikiproyecto", "anexo", "especial",
    "categoría discusión", "archivo discusión",
    # ja
    "ノート", "利用者", "利用者‐会話", "利用者-会話", "wikipedia‐ノート",
    "テンプレート", "template‐ノート", "ヘルプ", "ポータル", "特別",
    "プロジェクト", "カテゴリ‐ノート", "ファイル‐ノート",
)

_REDIRECT_RE = re.compile(
    r"^\s*#\s*(?:redirect|redirección|redireccion|転送)\s*:?\s*\[\[([^\]|#]*)",
    re.IGNORECASE,
)
_LANGLINK_RE = re.compile(r"\[\[([a-z]{2,3}(?:-[a-z]+)*):([^\]|\[]+)(?:\|[^\]\[]*)?\]\]")
_HEADING_RE = re.compile(r"^={2,}[^=\n].*?={2,}[ \t]*$", re.MULTILINE)
_DISAMBIG_TEMPLATE_RE = re.compile(
    r"\{\{\s*(?:[^{}|]*disambig[^{}|]*|desambiguaci[oó]n|aimai|曖昧さ回避|dab)\s*(?:\|[^{}]*)?\}\}",
    re.IGNORECASE,
)


class DumpParseError(ValueError):
    """Malformed dump input; ``offset`` is the byte position of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class RedirectError(LookupError):
    pass


class RedirectCycleError(RedirectError):
    def __init__(self, cycle: list[str]):
        super().__init__("redirect cycle: " + " -> ".join(cycle))
        self.cycle = cycle


class RedirectDepthError(RedirectError):
    pass


class UnresolvedRedirectError(RedirectError):
    pass


def normalize_title(title: str) -> str:
    """Underscores become spaces, runs of whitespace collapse, ends stripped.

    The case of the first character is preserved.
    """
    return " ".join(title.replace("_", " ").split())


def _split_prefix(title: str) -> tuple[str, str] | None:
    if ":" not in title:
        return None
    prefix, rest = title.split(":", 1)
    return prefix.strip().lower(), rest.strip()


def namespace_of(title: str, lang: str) -> int | None:
    """Namespace of a title judged by prefix: 0, 14, or None for skipped ones."""
    parts = _split_prefix(title)
    if parts is None:
        return NS_MAIN
    prefix, _ = parts
    if prefix in _CATEGORY_PREFIXES.get(lang, ("category",)):
        return NS_CATEGORY
    if prefix in _FILE_PREFIXES or prefix in _OTHER_PREFIXES:
        return None
    return NS_MAIN


@dataclass
class Article:
    page_id: int
    title: str
    lang: str
    raw_text: str
    redirect_to: str | None = None
    categories: list[str] = field(default_factory=list)
    langlinks: dict[str, str] = field(default_factory=dict)
    namespace: int = NS_MAIN

    @property
    def is_redirect(self) -> bool:
        return self.redirect_to is not None

    @property
    def is_category_page(self) -> bool:
        return self.namespace == NS_CATEGORY

    @property
    def category_name(self) -> str:
        """Bare category name of a category page ("Category:Birds" -> "Birds")."""
        if not self.is_category_page:
            raise ValueError(f"{self.title!r} is not a category page")
        return normalize_title(self.title.split(":", 1)[1])

    @property
    def is_disambiguation(self) -> bool:
        if "disambiguation" in self.title.lower():
            return True
        return bool(_DISAMBIG_TEMPLATE_RE.search(self.raw_text))


@dataclass
class ParseStats:
    parsed: int = 0
    skipped: int = 0
    duplicates: int = 0
    redirects: int = 0
    category_pages: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(vars(self))


class ArticleStore:
    """Articles of one language keyed by normalized title.

    Category pages live in the same mapping under their full title and are
    also reachable by bare category name through :meth:`category_page`.
    Construction mutates; treat the store as read-only afterwards.
    """

    def __init__(self, lang: str):
        if lang not in LANGS:
            raise ValueError(f"unsupported language {lang!r}")
        self.lang = lang
        self.by_title: dict[str, Article] = {}
        self.redirect_map: dict[str, str] = {}
        self.stats = ParseStats()
        self._category_pages: dict[str, Article] = {}
        self._members: dict[str, list[str]] | None = None

    def __len__(self) -> int:
        return len(self.by_title)

    def __iter__(self) -> Iterator[Article]:
        return iter(self.by_title.values())

    def __contains__(self, title: str) -> bool:
        return self.get(title) is not None

    def add(self, article: Article) -> bool:
        """Insert an article; a duplicate title keeps the first and returns False."""
        if article.title in self.by_title:
            log.warning("%s: duplicate title %r (page %d) ignored", self.lang, article.title, article.page_id)
            self.stats.duplicates += 1
            return False
        self.by_title[article.title] = article
        if article.redirect_to is not None:
            self.redirect_map[article.title] = article.redirect_to
            self.stats.redirects += 1
        if article.is_category_page:
            self._category_pages.setdefault(article.category_name, article)
            self.stats.category_pages += 1
        self._members = None
        return True

    def get(self, title: str) -> Article | None:
        """Look up by title; falls back to an uppercased first letter."""
        title = normalize_title(title)
        art = self.by_title.get(title)
        if art is None and title and not title[0].isupper():
            art = self.by_title.get(title[0].upper() + title[1:])
        return art

    def articles(self) -> Iterator[Article]:
        """Main-namespace, non-redirect articles in insertion order."""
        for art in self.by_title.values():
            if art.namespace == NS_MAIN and not art.is_redirect:
                yield art

    def category_page(self, name: str) -> Article | None:
        name = normalize_title(name)
        page = self._category_pages.get(name)
        if page is None and name and not name[0].isupper():
            page = self._category_pages.get(name[0].upper() + name[1:])
        return page

    def category_members(self, name: str) -> list[str]:
        """Titles filed under a category: links listed on its page plus pages
        (articles and subcategories) that declare the category themselves."""
        page = self.category_page(name)
        if page is None:
            return []
        if self._members is None:
            self._members = self._build_member_index()
        out = dict.fromkeys(_page_links(page.raw_text, self.lang))
        out.update(dict.fromkeys(self._members.get(page.category_name, ())))
        return list(out)

    def _build_member_index(self) -> dict[str, list[str]]:
        index: dict[str, list[str]] = {}
        for art in self.by_title.values():
            if art.is_redirect:
                continue
            member = art.category_name if art.is_category_page else art.title
            for cat in art.categories:
                page = self.category_page(cat)
                key = page.category_name if page is not None else cat
                index.setdefault(key, []).append(member)
        return index


# ---------------------------------------------------------------------------
# Wikitext field extraction


def parse_redirect(raw_text: str) -> str | None:
    m = _REDIRECT_RE.match(raw_text)
    if not m:
        return None
    target = normalize_title(m.group(1))
    return target or None


def parse_categories(raw_text: str, lang: str) -> list[str]:
    prefixes = "|".join(re.escape(p) for p in _CATEGORY_PREFIXES.get(lang, ("category",)))
    pattern = re.compile(r"\[\[\s*(?:" + prefixes + r")\s*:([^\]|\[]+)(?:\|[^\]\[]*)?\]\]", re.IGNORECASE)
    out: dict[str, None] = {}
    for m in pattern.finditer(raw_text):
        name = normalize_title(m.group(1))
        if name:
            out.setdefault(name, None)
    return list(out)


def parse_langlinks(raw_text: str, own_lang: str) -> dict[str, str]:
    """All ``[[xx:Title]]`` markers, first occurrence per code, own language excluded."""
    links: dict[str, str] = {}
    for m in _LANGLINK_RE.finditer(raw_text):
        code, title = m.group(1), normalize_title(m.group(2))
        if code == own_lang or not title or code in links:
            continue
        if m.start() > 0 and raw_text[m.start() - 1] == ":":
            continue
        links[code] = title
    return links


def _page_links(raw_text: str, lang: str) -> list[str]:
    """Plain wiki links on a page (no namespaced targets, no language links)."""
    out: dict[str, None] = {}
    for m in re.finditer(r"\[\[([^\[\]|]+)(?:\|[^\[\]]*)?\]\]", raw_text):
        target = m.group(1).split("#", 1)[0]
        if target.startswith(":"):
            target = target[1:]
        target = normalize_title(target)
        if not target or _LANGLINK_RE.fullmatch(m.group(0)):
            continue
        if namespace_of(target, lang) != NS_MAIN:
            continue
        out.setdefault(target, None)
    return list(out)


def make_article(page_id: int, title: str, lang: str, text: str,
                 namespace: int | None = None, redirect: str | None = None) -> Article | None:
    """Build an Article from raw page fields; None when the namespace is skipped."""
    title = normalize_title(title)
    if not title:
        return None
    ns_from_title = namespace_of(title, lang)
    if namespace is None:
        namespace = ns_from_title
    elif namespace == NS_CATEGORY and ns_from_title != NS_CATEGORY:
        # category page whose title uses an unknown localized prefix
        namespace = NS_CATEGORY
    if namespace not in (NS_MAIN, NS_CATEGORY):
        return None
    redirect_to = parse_redirect(text)
    if redirect_to is None and redirect:
        redirect_to = normalize_title(redirect) or None
    if redirect_to is not None:
        return Article(page_id, title, lang, text, redirect_to=redirect_to, namespace=namespace)
    return Article(
        page_id, title, lang, text,
        categories=parse_categories(text, lang),
        langlinks=parse_langlinks(text, lang),
        namespace=namespace,
    )


# ---------------------------------------------------------------------------
# Dump parsing


def open_dump(path: str | Path) -> IO[bytes]:
    path = str(path)
    if path.endswith(".bz2"):
        return bz2.open(path, "rb")
    if path.endswith(".gz"):
        return gzip.open(path, "rb")
    return open(path, "rb")


class _XmlPageHandler:
    """Collects page records from expat callbacks."""

    _FIELDS = {"title", "ns", "id", "text"}

    def __init__(self) -> None:
        self.pages: list[dict] = []
        self._stack: list[str] = []
        self._page: dict | None = None
        self._buf: list[str] | None = None

    def start(self, name: str, attrs: dict) -> None:
        name = name.rsplit(" ", 1)[-1]
        parent = self._stack[-1] if self._stack else None
        self._stack.append(name)
        if name == "page":
            self._page = {}
        elif self._page is not None:
            if name == "redirect":
                self._page["redirect"] = attrs.get("title", "")
            elif name in self._FIELDS and (parent == "page" or (name == "text" and parent == "revision")):
                # page/id only: revision/id and contributor/id are ignored
                if name not in self._page:
                    self._buf = []

    def end(self, name: str) -> None:
        name = name.rsplit(" ", 1)[-1]
        self._stack.pop()
        if name == "page":
            if self._page is not None:
                self.pages.append(self._page)
            self._page = None
        elif self._buf is not None and self._page is not None and name in self._FIELDS:
            self._page[name] = "".join(self._buf)
            self._buf = None

    def chars(self, data: str) -> None:
        if self._buf is not None:
            self._buf.append(data)


def _iter_xml_pages(stream: IO[bytes]) -> Iterator[dict]:
    handler = _XmlPageHandler()
    parser = xml.parsers.expat.ParserCreate(namespace_separator=" ")
    parser.StartElementHandler = handler.start
    parser.EndElementHandler = handler.end
    parser.CharacterDataHandler = handler.chars
    parser.buffer_text = True
    try:
        while True:
            chunk = stream.read(1 << 16)
            parser.Parse(chunk, not chunk)
            yield from handler.pages
            handler.pages.clear()
            if not chunk:
                break
    except xml.parsers.expat.ExpatError as exc:
        raise DumpParseError(f"malformed XML: {xml.parsers.expat.ErrorString(exc.code)}",
                             parser.ErrorByteIndex) from None


def _iter_jsonl_pages(stream: IO[bytes]) -> Iterator[dict]:
    offset = 0
    for line in stream:
        start, offset = offset, offset + len(line)
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise DumpParseError(f"malformed JSON record: {exc}", start) from None
        if not isinstance(rec, dict) or "title" not in rec:
            raise DumpParseError("record lacks a title", start)
        yield rec


def iter_pages(stream: IO[bytes]) -> Iterator[dict]:
    """Raw page records from either dump format (sniffed from the first byte)."""
    buffered = stream if isinstance(stream, io.BufferedReader) else io.BufferedReader(stream)  # type: ignore[arg-type]
    head = buffered.peek(64).lstrip(b"\xef\xbb\xbf \t\r\n")
    if not head:
        return iter(())
    if head.startswith(b"<"):
        return _iter_xml_pages(buffered)
    return _iter_jsonl_pages(buffered)


def parse_dump(dump_stream: IO[bytes], lang: str) -> ArticleStore:
    """Parse a dump byte stream into an :class:`ArticleStore` for ``lang``."""
    store = ArticleStore(lang)
    stats = store.stats
    for rec in iter_pages(dump_stream):
        rec_lang = rec.get("lang", lang)
        if rec_lang != lang:
            log.warning("record %r has lang %r, expected %r; skipped", rec.get("title"), rec_lang, lang)
            stats.skipped += 1
            continue
        try:
            page_id = int(rec.get("id", 0))
        except (TypeError, ValueError):
            page_id = 0
        if page_id <= 0:
            log.warning("%s: page %r has no positive id; skipped", lang, rec.get("title"))
            stats.skipped += 1
            continue
        ns = rec.get("ns")
        article = make_article(
            page_id, str(rec["title"]), lang, str(rec.get("text") or ""),
            namespace=int(ns) if ns not in (None, "") else None,
            redirect=rec.get("redirect"),
        )
        if article is None:
            stats.skipped += 1
            continue
        if store.add(article):
            stats.parsed += 1
    log.info("%s: parsed %d pages, skipped %d", lang, stats.parsed, stats.skipped)
    return store


def load_store(path: str | Path, lang: str) -> ArticleStore:
    with open_dump(path) as fh:
        return parse_dump(fh, lang)


def write_store_dump(store: ArticleStore, fp: IO[str]) -> None:
    """Serialize the store as JSON lines that :func:`parse_dump` reads back."""
    for art in store.by_title.values():
        rec = {"id": art.page_id, "title": art.title, "lang": art.lang, "ns": art.namespace,
               "text": art.raw_text}
        if art.redirect_to is not None:
            rec["redirect"] = art.redirect_to
        fp.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Redirects and sections


def resolve_redirect(title: str, store: ArticleStore, max_depth: int = MAX_REDIRECT_DEPTH) -> str:
    """Follow redirects from ``title`` to a non-redirect article.

    A title that is not a redirect (including one absent from the store)
    comes back normalized. Raises :class:`RedirectCycleError`,
    :class:`RedirectDepthError` or :class:`UnresolvedRedirectError`.
    """
    current = normalize_title(title)
    art = store.get(current)
    if art is not None:
        current = art.title
    seen = [current]
    while art is not None and art.redirect_to is not None:
        target = art.redirect_to
        nxt = store.get(target)
        if nxt is None:
            raise UnresolvedRedirectError(f"unresolved redirect: {current!r} -> {target!r}")
        if nxt.title in seen:
            raise RedirectCycleError(seen[seen.index(nxt.title):] + [nxt.title])
        if len(seen) > max_depth:
            raise RedirectDepthError(f"redirect chain from {seen[0]!r} exceeds depth {max_depth}")
        seen.append(nxt.title)
        current, art = nxt.title, nxt
    return current


def first_section(article: Article) -> str:
    """Text before the first ``== heading ==`` line; all of it if there is none."""
    m = _HEADING_RE.search(article.raw_text)
    return article.raw_text if m is None else article.raw_text[:m.start()]


# ---------------------------------------------------------------------------
# Cleaning


def _remove_nested(text: str, opener: str, closer: str) -> str:
    """Drop balanced ``opener ... closer`` spans; an unbalanced opener stays literal."""
    out: list[str] = []
    depth = 0
    i = 0
    start_of_span = 0
    n = len(text)
    while i < n:
        if text.startswith(opener, i):
            if depth == 0:
                start_of_span = i
            depth += 1
            i += len(opener)
        elif depth and text.startswith(closer, i):
            depth -= 1
            i += len(closer)
        else:
            if depth == 0:
                out.append(text[i])
            i += 1
    if depth:
        out.append(text[start_of_span:])
    return "".join(out)


def _replace_link(m: re.Match, lang: str) -> str:
    inner = m.group(1)
    target, _, label = inner.partition("|")
    leading_colon = target.startswith(":")
    target_clean = target.lstrip(":").strip()
    parts = _split_prefix(target_clean)
    if parts is not None:
        prefix, _ = parts
        if prefix in _FILE_PREFIXES:
            return ""
        if not leading_colon:
            if prefix in _CATEGORY_PREFIXES.get(lang, ("category",)) or prefix in ("category",):
                return ""
            if re.fullmatch(r"[a-z]{2,3}(?:-[a-z]+)*", prefix):
                return ""
    if label:
        return label
    return target_clean.split("#", 1)[0]


def strip_markup(raw_text: str, lang: str = "en", drop_asides: bool = True) -> str:
    """Reduce wikitext to plain text.

    Removes comments, references, tables, templates, file links, category
    and language links, HTML tags, heading fences, emphasis quotes, list
    markers and, with ``drop_asides``, parenthesized asides.
    """
    text = re.sub(r"<!--.*?(?:-->|$)", " ", raw_text, flags=re.DOTALL)
    text = re.sub(r"<ref[^>/]*/>", " ", text, flags=re.IGNORECASE)
    text = re.sub(r"<(ref|math|gallery|timeline)\b[^>]*>.*?</\1\s*>", " ", text, flags=re.DOTALL | re.IGNORECASE)
    text = _remove_nested(text, "{|", "|}")
    text = _remove_nested(text, "{{", "}}")
    text = re.sub(r"</?[A-Za-z][^<>]*>", " ", text)
    # innermost links first so captions nested inside file links collapse
    link_re = re.compile(r"\[\[([^\[\]]*)\]\]")
    while True:
        new = link_re.sub(lambda m: _replace_link(m, lang), text)
        if new == text:
            break
        text = new
    text = re.sub(r"\[(?:https?|ftp)://[^\s\]]*\s*([^\]]*)\]", r"\1", text)
    text = re.sub(r"(?:https?|ftp)://\S+", " ", text)
    text = re.sub(r"^(=+)\s*(.*?)\s*\1\s*$", r"\2", text, flags=re.MULTILINE)
    text = re.sub(r"'{2,}", "", text)
    text = re.sub(r"^[*#:;]+\s*", "", text, flags=re.MULTILINE)
    text = re.sub(r"__[A-Z]+__", " ", text)
    text = text.replace("&nbsp;", " ")
    if drop_asides:
        while True:
            new = re.sub(r"（[^（）]*）", "", re.sub(r"\([^()]*\)", " ", text))
            if new == text:
                break
            text = new
    text = re.sub(r"[\"“”„«»]", " ", text)
    lines = (" ".join(line.split()) for line in text.split("\n"))
    text = "\n".join(lines)
    text = re.sub(r" +([.,;:!?。、])", r"\1", text)
    return text.strip()


_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def clean_text(raw_text: str, stoplist: Iterable[str] = (), lang: str = "en") -> list[str]:
    """Lowercased word tokens of ``raw_text`` with markup and stopwords removed."""
    stop = stoplist if isinstance(stoplist, (set, frozenset)) else set(stoplist)
    return [tok for tok in tokenize(strip_markup(raw_text, lang)) if tok not in stop]


def read_stoplist(lines: Iterable[str]) -> frozenset[str]:
    words = set()
    for line in lines:
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.add(line)
    return frozenset(words)


def load_stoplist(path: str | Path | None = None) -> frozenset[str]:
    """Stopwords from a UTF-8 file (one per line, ``#`` comments); the bundled
    English list when ``path`` is None."""
    if path is None:
        path = DEFAULT_STOPLIST
    with open(path, encoding="utf-8") as fh:
        return read_stoplist(fh)
