"""Sense assignments shared by both disambiguators, and their TSV dump."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable

VSM = "VSM"
MCAT = "MCAT"

ASSIGNMENT_COLUMNS = ("en_title", "lemma", "synset_offset", "method", "score", "runner_up", "flags")


@dataclass(frozen=True)
class SenseAssignment:
    en_title: str
    lemma: str
    synset_offset: int
    method: str
    score: float
    runner_up_score: float | None = None
    flags: tuple[str, ...] = ()

    @property
    def degenerate(self) -> bool:
        return "degenerate" in self.flags


def _fmt_score(method: str, value: float | None) -> str:
    if value is None:
        return ""
    if method == MCAT:
        return str(int(value))
    return f"{value:.6f}"


def write_assignments(assignments: Iterable[SenseAssignment], fp: IO[str]) -> None:
    writer = csv.writer(fp, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE, escapechar="\\")
    writer.writerow(ASSIGNMENT_COLUMNS)
    for a in sorted(assignments, key=lambda a: (a.en_title, a.method)):
        writer.writerow((a.en_title, a.lemma, f"{a.synset_offset:08d}", a.method,
                         _fmt_score(a.method, a.score), _fmt_score(a.method, a.runner_up_score),
                         ",".join(a.flags)))


def read_assignments(fp: IO[str]) -> list[SenseAssignment]:
    reader = csv.reader(fp, delimiter="\t", quoting=csv.QUOTE_NONE, escapechar="\\")
    header = next(reader, None)
    if header is None:
        return []
    if tuple(header) != ASSIGNMENT_COLUMNS:
        raise ValueError(f"unexpected assignment header {header!r}")
    out = []
    for title, lemma, offset, method, score, runner_up, flags in reader:
        out.append(SenseAssignment(
            title, lemma, int(offset), method, float(score),
            float(runner_up) if runner_up else None,
            tuple(flags.split(",")) if flags else (),
        ))
    return out
