"""Builders for small in-memory WordNet and Wikipedia stores used by the tests."""

from __future__ import annotations

import io
import json
from pathlib import Path

from wikithes.wiki_ingest import ArticleStore, parse_dump
from wikithes.wordnet_store import WordNet, load_wordnet

GOLDEN = Path(__file__).parent / "golden"


def wordnet_lines(synsets, senses=None):
    """Index and data lines for ``synsets``: a list of (offset, lemmas, hypernyms, gloss).

    ``senses`` maps lemma -> offsets in sense order; by default the order in
    which synsets are listed. Hyponym pointers are left out on purpose so
    the loader has to symmetrize.
    """
    data = []
    order: dict[str, list[int]] = {}
    for offset, lemmas, hypers, gloss in synsets:
        words = " ".join(f"{w} 0" for w in lemmas)
        ptrs = "".join(f" @ {h:08d} n 0000" for h in hypers)
        data.append(f"{offset:08d} 03 n {len(lemmas):02x} {words} {len(hypers):03d}{ptrs} | {gloss}")
        for w in lemmas:
            order.setdefault(w.lower(), []).append(offset)
    if senses:
        order.update(senses)
    index = []
    for lemma in sorted(order):
        offs = order[lemma]
        index.append(f"{lemma} n {len(offs)} 1 @ {len(offs)} 0 " + " ".join(f"{o:08d}" for o in offs))
    return index, data


def make_wordnet(synsets, senses=None, **kwargs) -> WordNet:
    index, data = wordnet_lines(synsets, senses)
    return load_wordnet(index, data, **kwargs)


def jsonl_bytes(lang: str, pages) -> bytes:
    """Fixture-format dump; ``pages`` is a list of (title, text) pairs."""
    lines = [json.dumps({"id": i, "title": t, "lang": lang, "text": x}, ensure_ascii=False)
             for i, (t, x) in enumerate(pages, 1)]
    return ("\n".join(lines) + "\n").encode("utf-8")


def make_store(lang: str, pages) -> ArticleStore:
    return parse_dump(io.BytesIO(jsonl_bytes(lang, pages)), lang)


def output_tree(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}
