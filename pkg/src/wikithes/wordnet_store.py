"""Reader for the WordNet noun database files (``index.noun`` / ``data.noun``).

Only hypernym (``@``) and hyponym (``~``) pointers are kept; both directions
are made symmetric at load time and the hypernym graph is checked for
cycles.
"""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Literal

log = logging.getLogger(__name__)

HYPERNYM = "@"
HYPONYM = "~"
INSTANCE_HYPERNYM = "@i"
INSTANCE_HYPONYM = "~i"

_EXAMPLES_RE = re.compile(r';?\s*"[^"]*"')


class WordNetLoadError(ValueError):
    pass


@dataclass
class Synset:
    offset: int
    pos: str
    lemmas: list[str]
    gloss: str
    hypernyms: list[int] = field(default_factory=list)
    hyponyms: list[int] = field(default_factory=list)

    def gloss_text(self, examples: bool = True) -> str:
        """The gloss, optionally without its quoted example sentences."""
        if examples:
            return self.gloss
        return _EXAMPLES_RE.sub("", self.gloss).strip(" ;")


@dataclass
class SenseIndex:
    entries: dict[tuple[str, str], list[int]] = field(default_factory=dict)

    def get(self, lemma: str, pos: str = "n") -> list[int]:
        return self.entries.get((lemma, pos), [])


def lemma_key(word: str) -> str:
    """WordNet lookup form: lowercase with spaces as underscores."""
    return "_".join(word.lower().split())


def title_to_lemma(title: str) -> str:
    """Drop a trailing parenthesized qualifier: "Java (island)" -> "Java"."""
    return re.sub(r"\s*\([^()]*\)\s*$", "", title).strip() or title


def _lines(stream: IO[bytes] | IO[str] | Iterable) -> Iterable[tuple[int, str]]:
    for lineno, line in enumerate(stream, 1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield lineno, line.rstrip("\r\n")


def _parse_index(stream, name: str) -> tuple[SenseIndex, int]:
    index = SenseIndex()
    ignored = 0
    for lineno, line in _lines(stream):
        if not line.strip() or line.startswith("  "):
            continue
        toks = line.split()
        try:
            lemma, pos = toks[0], toks[1]
            synset_cnt = int(toks[2])
            p_cnt = int(toks[3])
            expected = 4 + p_cnt + 2 + synset_cnt
            if len(toks) != expected or synset_cnt < 1:
                raise ValueError(f"expected {expected} fields, got {len(toks)}")
            offsets = [int(t) for t in toks[expected - synset_cnt:]]
        except (IndexError, ValueError) as exc:
            raise WordNetLoadError(f"{name}:{lineno}: malformed index line: {exc}") from None
        if pos != "n":
            ignored += 1
            continue
        key = (lemma.lower(), pos)
        if key in index.entries:
            raise WordNetLoadError(f"{name}:{lineno}: duplicate index entry {lemma!r}")
        index.entries[key] = offsets
    return index, ignored


def _parse_data(stream, name: str, pointer_symbols: dict[str, str]) -> tuple[dict[int, Synset], int]:
    synsets: dict[int, Synset] = {}
    ignored = 0
    for lineno, line in _lines(stream):
        if not line.strip() or line.startswith("  "):
            continue
        body, bar, gloss = line.partition(" | ")
        if not bar:
            body = body.rstrip()
            if body.endswith(" |"):
                body, gloss = body[:-2], ""
            else:
                raise WordNetLoadError(f"{name}:{lineno}: malformed data line: missing gloss separator")
        toks = body.split()
        try:
            offset = int(toks[0])
            ss_type = toks[2]
            w_cnt = int(toks[3], 16)
            words = [toks[4 + 2 * i] for i in range(w_cnt)]
            p_pos = 4 + 2 * w_cnt
            p_cnt = int(toks[p_pos])
            pointers = []
            for i in range(p_cnt):
                sym, target, tpos, srctrg = toks[p_pos + 1 + 4 * i: p_pos + 5 + 4 * i]
                if len(srctrg) != 4:
                    raise ValueError(f"bad source/target field {srctrg!r}")
                pointers.append((sym, int(target), tpos))
            if w_cnt < 1:
                raise ValueError("synset without words")
        except (IndexError, ValueError) as exc:
            raise WordNetLoadError(f"{name}:{lineno}: malformed data line: {exc}") from None
        if ss_type != "n":
            ignored += 1
            continue
        if offset in synsets:
            raise WordNetLoadError(f"{name}:{lineno}: duplicate synset offset {offset:08d}")
        lemmas: list[str] = []
        for w in words:
            w = re.sub(r"\([a-z]+\)$", "", w).lower()
            if w not in lemmas:
                lemmas.append(w)
        syn = Synset(offset, "n", lemmas, gloss.strip())
        for sym, target, tpos in pointers:
            role = pointer_symbols.get(sym)
            if role is None or tpos != "n":
                continue
            links = syn.hypernyms if role == HYPERNYM else syn.hyponyms
            if target not in links:
                links.append(target)
        synsets[offset] = syn
    return synsets, ignored


def _symmetrize(synsets: dict[int, Synset]) -> None:
    for syn in synsets.values():
        for target in syn.hypernyms + syn.hyponyms:
            if target not in synsets:
                raise WordNetLoadError(f"dangling pointer from {syn.offset:08d} to offset {target:08d}")
    for syn in list(synsets.values()):
        for h in syn.hypernyms:
            other = synsets[h]
            if syn.offset not in other.hyponyms:
                other.hyponyms.append(syn.offset)
        for h in syn.hyponyms:
            other = synsets[h]
            if syn.offset not in other.hypernyms:
                other.hypernyms.append(syn.offset)


def _check_acyclic(synsets: dict[int, Synset]) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(synsets, WHITE)
    for root in synsets:
        if color[root] != WHITE:
            continue
        color[root] = GREY
        stack = [(root, iter(synsets[root].hypernyms))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
            elif color[nxt] == GREY:
                path = [n for n, _ in stack]
                cycle = path[path.index(nxt):] + [nxt]
                raise WordNetLoadError("hypernym cycle: " + " -> ".join(f"{o:08d}" for o in cycle))
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(synsets[nxt].hypernyms)))


class WordNet:
    """Noun senses, glosses and the hypernym/hyponym graph. Read-only after load."""

    def __init__(self, index: SenseIndex, synsets: dict[int, Synset]):
        self.index = index
        self.synsets = synsets

    def __len__(self) -> int:
        return len(self.synsets)

    def synset(self, offset: int) -> Synset:
        try:
            return self.synsets[offset]
        except KeyError:
            raise KeyError(f"unknown synset offset {offset}") from None

    def senses_of(self, lemma: str) -> list[Synset]:
        return [self.synsets[o] for o in self.index.get(lemma_key(lemma))]

    def is_polysemous(self, lemma: str) -> bool:
        return len(self.index.get(lemma_key(lemma))) > 1

    def sense_number(self, lemma: str, offset: int) -> int:
        """1-based WordNet rank of ``offset`` among the senses of ``lemma``."""
        return self.index.get(lemma_key(lemma)).index(offset) + 1

    def closure(self, offset: int, max_depth: int,
                direction: Literal["hypernyms", "hyponyms"] = "hypernyms") -> list[int]:
        """Synsets reachable within ``max_depth`` edges, breadth-first, start excluded."""
        if offset not in self.synsets:
            raise KeyError(f"unknown synset offset {offset}")
        if max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        seen = {offset}
        order: list[int] = []
        frontier = deque([(offset, 0)])
        while frontier:
            node, depth = frontier.popleft()
            if depth == max_depth:
                continue
            for nxt in getattr(self.synsets[node], direction):
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
                    frontier.append((nxt, depth + 1))
        return order

    def hypernym_closure(self, offset: int, max_depth: int) -> list[int]:
        return self.closure(offset, max_depth, "hypernyms")

    def hyponym_closure(self, offset: int, max_depth: int) -> list[int]:
        return self.closure(offset, max_depth, "hyponyms")


def load_wordnet(index_stream, data_stream, *, instance_pointers: bool = False) -> WordNet:
    """Build a :class:`WordNet` from index and data streams (bytes or text lines).

    With ``instance_pointers`` the ``@i``/``~i`` instance links are folded into
    the hypernym/hyponym graph as well.
    """
    symbols = {HYPERNYM: HYPERNYM, HYPONYM: HYPONYM}
    if instance_pointers:
        symbols.update({INSTANCE_HYPERNYM: HYPERNYM, INSTANCE_HYPONYM: HYPONYM})
    index, ignored_idx = _parse_index(index_stream, getattr(index_stream, "name", "index"))
    synsets, ignored_data = _parse_data(data_stream, getattr(data_stream, "name", "data"), symbols)
    if ignored_idx or ignored_data:
        log.warning("ignored %d non-noun index lines and %d non-noun synsets", ignored_idx, ignored_data)
    for (lemma, _), offsets in index.entries.items():
        for o in offsets:
            if o not in synsets:
                raise WordNetLoadError(f"index entry {lemma!r} lists unknown offset {o:08d}")
    _symmetrize(synsets)
    _check_acyclic(synsets)
    return WordNet(index, synsets)


def load_wordnet_files(index_path: str | Path, data_path: str | Path, **kwargs) -> WordNet:
    with open(index_path, "rb") as idx, open(data_path, "rb") as data:
        return load_wordnet(idx, data, **kwargs)
