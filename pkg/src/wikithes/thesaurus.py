"""Assembly of the trilingual thesaurus from aligned tuples and sense assignments."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import IO, Iterable, Mapping

from .assignments import MCAT, VSM, SenseAssignment
from .tuple_extractor import TranslationTuple
from .wiki_ingest import Article, ArticleStore, first_section, strip_markup
from .wordnet_store import WordNet, title_to_lemma

MONOSEMOUS = "MONOSEMOUS"
UNMATCHED = "UNMATCHED"
METHODS = (VSM, MCAT, MONOSEMOUS, UNMATCHED)
LANG_ORDER = ("en", "es", "ja")

THESAURUS_COLUMNS = (
    "entry_id", "pos", "method", "synset_offset",
    "en_lemma", "en_sense", "es_lemma", "es_sense", "ja_lemma", "ja_sense",
    "en_def", "es_def", "ja_def",
)


@dataclass
class LangEntry:
    lemma: str
    sense_number: int = 0
    definition: str | None = None


@dataclass
class ThesaurusEntry:
    entry_id: str
    pos: str
    en: LangEntry
    es: LangEntry
    ja: LangEntry
    synset_offset: int | None = None
    method: str = UNMATCHED

    def lang(self, code: str) -> LangEntry:
        return getattr(self, code)


def entry_id(n: int) -> str:
    return f"T{n:07d}"


def combine_assignments(vsm: SenseAssignment | None, mcat: SenseAssignment | None) -> SenseAssignment:
    """The MCAT assignment when there is one, otherwise the VSM one."""
    if mcat is not None:
        return mcat
    if vsm is not None:
        return vsm
    raise ValueError("no sense assignment to combine")


def assign_target_senses(entries: list[ThesaurusEntry]) -> list[ThesaurusEntry]:
    """Number repeated lemmas 1, 2, 3, ... per language in entry_id order.

    English entries tied to a synset already carry its WordNet rank and are
    left alone.
    """
    counters: dict[tuple[str, str], int] = {}
    for entry in sorted(entries, key=lambda e: e.entry_id):
        for code in LANG_ORDER:
            le = entry.lang(code)
            if code == "en" and entry.synset_offset is not None and le.sense_number > 0:
                continue
            key = (code, le.lemma)
            counters[key] = counters.get(key, 0) + 1
            le.sense_number = counters[key]
    return entries


_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+|(?<=。)")


def split_sentences(text: str) -> list[str]:
    out = []
    for line in text.split("\n"):
        for piece in _SENTENCE_SPLIT_RE.split(line):
            piece = piece.strip()
            if piece:
                out.append(piece)
    return out


def _definition_pattern(title: str, lang: str) -> re.Pattern:
    subject = r"\s+".join(re.escape(w) for w in title_to_lemma(title).split())
    if lang == "en":
        return re.compile(rf"^(?:(?:the|a|an)\s+)?{subject}(?:e?s)?\s+(?:is\s+an?\b|are\b)", re.IGNORECASE)
    if lang == "es":
        return re.compile(rf"^(?:(?:el|la|los|las|lo|un|una)\s+)?{subject}(?:e?s)?\s+es\s+una?\b", re.IGNORECASE)
    if lang == "ja":
        return re.compile(rf"^{subject}\s*[はが].*である", re.IGNORECASE)
    raise ValueError(f"unsupported language {lang!r}")


def extract_definition(article: Article | None, lang: str) -> str | None:
    """First copula sentence of the lead section, else its first sentence."""
    if article is None or not article.raw_text.strip():
        return None
    sentences = split_sentences(strip_markup(first_section(article), lang))
    if not sentences:
        return None
    pattern = _definition_pattern(article.title, lang)
    for sentence in sentences:
        if pattern.search(sentence):
            return sentence
    return sentences[0]


def build_thesaurus(tuples: Iterable[TranslationTuple], wn: WordNet,
                    vsm_results: Mapping[str, SenseAssignment],
                    mcat_results: Mapping[str, SenseAssignment],
                    stores: Mapping[str, ArticleStore] | None = None) -> list[ThesaurusEntry]:
    """One entry per tuple, sorted by entry_id (English title order).

    ``vsm_results`` and ``mcat_results`` are keyed by English title.
    """
    entries = []
    for n, t in enumerate(sorted(tuples, key=lambda t: t.en_title), 1):
        titles = {"en": t.en_title, "es": t.es_title, "ja": t.ja_title}
        langs = {}
        for code, title in titles.items():
            definition = None
            if stores is not None and code in stores:
                definition = extract_definition(stores[code].get(title), code)
            langs[code] = LangEntry(title, 0, definition)
        lemma = title_to_lemma(t.en_title)
        senses = wn.senses_of(lemma)
        offset: int | None = None
        if not senses:
            method = UNMATCHED
        elif len(senses) == 1:
            method, offset = MONOSEMOUS, senses[0].offset
        else:
            try:
                chosen = combine_assignments(vsm_results.get(t.en_title), mcat_results.get(t.en_title))
            except ValueError:
                raise ValueError(f"polysemous title {t.en_title!r} has no sense assignment") from None
            method, offset = chosen.method, chosen.synset_offset
        if offset is not None:
            langs["en"].sense_number = wn.sense_number(lemma, offset)
        entries.append(ThesaurusEntry(entry_id(n), "n", langs["en"], langs["es"], langs["ja"], offset, method))
    return assign_target_senses(entries)


# ---------------------------------------------------------------------------
# Serialization


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def _unescape(value: str) -> str:
    return re.sub(r"\\(.)", lambda m: _UNESCAPES.get(m.group(1), m.group(1)), value)


def entry_record(entry: ThesaurusEntry) -> dict[str, str | int | None]:
    rec: dict[str, str | int | None] = {
        "entry_id": entry.entry_id,
        "pos": entry.pos,
        "method": entry.method,
        "synset_offset": None if entry.synset_offset is None else f"{entry.synset_offset:08d}",
    }
    for code in LANG_ORDER:
        le = entry.lang(code)
        rec[f"{code}_lemma"] = le.lemma
        rec[f"{code}_sense"] = le.sense_number
    for code in LANG_ORDER:
        rec[f"{code}_def"] = entry.lang(code).definition
    return rec


def write_thesaurus(entries: Iterable[ThesaurusEntry], fp: IO[str], fmt: str = "tsv") -> None:
    if fmt == "tsv":
        fp.write("\t".join(THESAURUS_COLUMNS) + "\n")
        for entry in entries:
            rec = entry_record(entry)
            fp.write("\t".join(_escape("" if rec[c] is None else str(rec[c])) for c in THESAURUS_COLUMNS) + "\n")
    elif fmt == "jsonl":
        for entry in entries:
            fp.write(json.dumps(entry_record(entry), ensure_ascii=False) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _from_record(rec: Mapping) -> ThesaurusEntry:
    def lang(code):
        d = rec.get(f"{code}_def")
        return LangEntry(rec[f"{code}_lemma"], int(rec[f"{code}_sense"]), d if d not in ("", None) else None)

    offset = rec.get("synset_offset")
    return ThesaurusEntry(rec["entry_id"], rec["pos"], lang("en"), lang("es"), lang("ja"),
                          int(offset) if offset not in ("", None) else None, rec["method"])


def read_thesaurus(fp: IO[str], fmt: str = "tsv") -> list[ThesaurusEntry]:
    if fmt == "jsonl":
        return [_from_record(json.loads(line)) for line in fp if line.strip()]
    if fmt != "tsv":
        raise ValueError(f"unknown format {fmt!r}")
    header = fp.readline().rstrip("\n").split("\t")
    if tuple(header) != THESAURUS_COLUMNS:
        raise ValueError(f"unexpected thesaurus header {header!r}")
    out = []
    for line in fp:
        line = line.rstrip("\n")
        if not line:
            continue
        fields = [_unescape(v) for v in line.split("\t")]
        out.append(_from_record(dict(zip(THESAURUS_COLUMNS, fields))))
    return out
