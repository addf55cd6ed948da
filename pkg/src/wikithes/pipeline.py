"""Stage sequencing, artifact files and input-hash caching."""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from . import corpus_eval
from .assignments import SenseAssignment, read_assignments, write_assignments
from .mcat import build_neighborhood, mcat_assign
from .thesaurus import build_thesaurus, read_thesaurus, write_thesaurus
from .tuple_extractor import (PartialTuple, TupleStats, build_tuples, read_tuples, write_partials,
                              write_tuples)
from .vsm import VsmDisambiguator
from .wiki_ingest import DEFAULT_STOPLIST, LANGS, ArticleStore, load_store, load_stoplist, write_store_dump
from .wordnet_store import WordNet, lemma_key, load_wordnet_files, title_to_lemma

log = logging.getLogger(__name__)

STAGES = ("ingest", "tuples", "wsd", "build", "eval")
DATA_ENV = "WIKITHES_DATA"
FIXTURE_DIR = Path(__file__).parent / "data" / "fixture"
MANIFEST = "manifest.json"


class PipelineError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    en_dump: Path
    es_dump: Path
    ja_dump: Path
    wordnet_index: Path
    wordnet_data: Path
    out_dir: Path
    stoplist: Path | None = None
    vsm_mode: str = "whole"
    mcat_depth: int = 3
    gloss_examples: bool = True
    weighting: str = "raw"
    fmt: str = "tsv"
    jobs: int = 1

    def dump(self, lang: str) -> Path:
        return getattr(self, f"{lang}_dump")

    def validate(self) -> None:
        paths = [self.en_dump, self.es_dump, self.ja_dump, self.wordnet_index, self.wordnet_data]
        if self.stoplist is not None:
            paths.append(self.stoplist)
        missing = [str(p) for p in paths if not Path(p).is_file()]
        if missing:
            raise PipelineError("input file(s) not found: " + ", ".join(missing))
        if self.mcat_depth < 1:
            raise PipelineError("mcat_depth must be at least 1")
        if self.vsm_mode not in ("whole", "first_section"):
            raise PipelineError(f"unknown vsm mode {self.vsm_mode!r}")
        if self.weighting not in ("raw", "tfidf"):
            raise PipelineError(f"unknown weighting {self.weighting!r}")
        if self.fmt not in ("tsv", "jsonl"):
            raise PipelineError(f"unknown format {self.fmt!r}")
        if self.jobs < 1:
            raise PipelineError("jobs must be at least 1")

    @classmethod
    def from_data_dir(cls, data_dir: str | Path | None, out_dir: str | Path, **overrides) -> "PipelineConfig":
        """Default input locations inside ``data_dir`` (or $WIKITHES_DATA, or the bundled fixture)."""
        if data_dir is None:
            data_dir = os.environ.get(DATA_ENV) or FIXTURE_DIR
        data_dir = Path(data_dir)

        def find(*names: str) -> Path:
            for name in names:
                if (data_dir / name).is_file():
                    return data_dir / name
            return data_dir / names[0]

        kwargs = {f"{lang}_dump": find(f"{lang}wiki.xml", f"{lang}wiki.xml.bz2", f"{lang}wiki.xml.gz",
                                       f"{lang}.jsonl") for lang in LANGS}
        kwargs.update(wordnet_index=find("index.noun"), wordnet_data=find("data.noun"))
        stop = data_dir / "stopwords.txt"
        kwargs["stoplist"] = stop if stop.is_file() else None
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(out_dir=Path(out_dir), **kwargs)


@dataclass
class StageReport:
    stage: str
    status: str  # "ran", "cached" or "error"
    stats: dict = field(default_factory=dict)
    message: str = ""

    def line(self) -> str:
        parts = [f"{self.stage}: {self.status}"]
        parts += [f"{k}={v}" for k, v in self.stats.items() if not isinstance(v, dict)]
        if self.message:
            parts.append(self.message)
        return " ".join(parts)


def _sha(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# WSD worker (module level so it can run in a process pool)

_WSD_CONTEXT: dict = {}


def _wsd_init(en_store: ArticleStore, wn: WordNet, stoplist: frozenset, config: PipelineConfig) -> None:
    _WSD_CONTEXT.update(store=en_store, wn=wn, config=config,
                        vsm=VsmDisambiguator(wn, stoplist, mode=config.vsm_mode,
                                             gloss_examples=config.gloss_examples,
                                             weighting=config.weighting))


def _wsd_one(title: str) -> tuple[SenseAssignment, SenseAssignment | None]:
    ctx = _WSD_CONTEXT
    article = ctx["store"].get(title)
    lemma = lemma_key(title_to_lemma(title))
    vsm = ctx["vsm"].assign(article, lemma)
    hood = build_neighborhood(article, ctx["store"])
    mcat = mcat_assign(article, lemma, hood, ctx["wn"], ctx["config"].mcat_depth)
    return vsm, mcat


class Pipeline:
    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out = Path(config.out_dir)
        self._stores: dict[str, ArticleStore] = {}
        self._wn: WordNet | None = None
        self._stoplist: frozenset[str] | None = None
        self.artifacts: dict[str, tuple[str, ...]] = {
            "ingest": tuple(f"store_{lang}.jsonl" for lang in LANGS) + ("ingest_stats.json",),
            "tuples": ("tuples.tsv", "partial_tuples.tsv", "tuples_stats.json"),
            "wsd": ("assignments.tsv", "wsd_stats.json"),
            "build": (self.thesaurus_name, "build_stats.json"),
            "eval": ("corpus.tsv", "coverage.txt", "coverage.json"),
        }
        self.requires: dict[str, tuple[str, ...]] = {
            "ingest": (),
            "tuples": tuple(f"store_{lang}.jsonl" for lang in LANGS),
            "wsd": ("store_en.jsonl", "tuples.tsv"),
            "build": tuple(f"store_{lang}.jsonl" for lang in LANGS) + ("tuples.tsv", "assignments.tsv"),
            "eval": tuple(f"store_{lang}.jsonl" for lang in LANGS) + (self.thesaurus_name,),
        }

    @property
    def thesaurus_name(self) -> str:
        return f"thesaurus.{self.config.fmt}"

    def _producer(self, artifact: str) -> str:
        for stage, names in self.artifacts.items():
            if artifact in names:
                return stage
        raise KeyError(artifact)

    # -- shared inputs -----------------------------------------------------

    @property
    def stoplist(self) -> frozenset[str]:
        if self._stoplist is None:
            self._stoplist = load_stoplist(self.config.stoplist)
        return self._stoplist

    @property
    def wordnet(self) -> WordNet:
        if self._wn is None:
            self._wn = load_wordnet_files(self.config.wordnet_index, self.config.wordnet_data)
        return self._wn

    def store(self, lang: str) -> ArticleStore:
        if lang not in self._stores:
            self._stores[lang] = load_store(self.out / f"store_{lang}.jsonl", lang)
        return self._stores[lang]

    def _external_inputs(self, stage: str) -> list[Path]:
        c = self.config
        stop = [c.stoplist if c.stoplist is not None else DEFAULT_STOPLIST]
        return {
            "ingest": [c.en_dump, c.es_dump, c.ja_dump],
            "tuples": [],
            "wsd": [c.wordnet_index, c.wordnet_data] + stop,
            "build": [c.wordnet_index, c.wordnet_data],
            "eval": stop,
        }[stage]

    def _params(self, stage: str) -> dict:
        c = self.config
        return {
            "wsd": {"vsm_mode": c.vsm_mode, "mcat_depth": c.mcat_depth,
                    "gloss_examples": c.gloss_examples, "weighting": c.weighting},
            "build": {"fmt": c.fmt},
            "eval": {"fmt": c.fmt},
        }.get(stage, {})

    def _stage_key(self, stage: str) -> str:
        h = hashlib.sha256()
        h.update(stage.encode())
        h.update(json.dumps(self._params(stage), sort_keys=True).encode())
        for p in self._external_inputs(stage):
            h.update(_sha(Path(p)).encode())
        for name in self.requires[stage]:
            h.update(name.encode())
            h.update(_sha(self.out / name).encode())
        return h.hexdigest()

    # -- manifest ----------------------------------------------------------

    def _load_manifest(self) -> dict:
        path = self.out / MANIFEST
        if not path.is_file():
            return {}
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            return {}

    def _is_cached(self, manifest: dict, stage: str, key: str) -> bool:
        rec = manifest.get(stage)
        if not rec or rec.get("key") != key:
            return False
        for name, digest in rec.get("outputs", {}).items():
            path = self.out / name
            if not path.is_file() or _sha(path) != digest:
                return False
        return set(rec.get("outputs", {})) == set(self.artifacts[stage])

    # -- stages ------------------------------------------------------------

    def _ingest(self) -> dict:
        stats = {}
        for lang in LANGS:
            store = load_store(self.config.dump(lang), lang)
            with open(self.out / f"store_{lang}.jsonl", "w", encoding="utf-8", newline="\n") as fh:
                write_store_dump(store, fh)
            stats[lang] = store.stats.as_dict()
            self._stores.pop(lang, None)
        _write_json(self.out / "ingest_stats.json", stats)
        return {f"{lang}_articles": stats[lang]["parsed"] for lang in LANGS}

    def _tuples(self) -> dict:
        partials: list[PartialTuple] = []
        stats = TupleStats()
        tuples = build_tuples(self.store("en"), self.store("es"), self.store("ja"), partials, stats)
        with open(self.out / "tuples.tsv", "w", encoding="utf-8", newline="\n") as fh:
            write_tuples(tuples, fh)
        with open(self.out / "partial_tuples.tsv", "w", encoding="utf-8", newline="\n") as fh:
            write_partials(partials, fh)
        _write_json(self.out / "tuples_stats.json", stats.as_dict())
        return {"tuples": stats.tuples, "partial": len(partials)}

    def _read_tuples(self):
        with open(self.out / "tuples.tsv", encoding="utf-8", newline="") as fh:
            return read_tuples(fh)

    def _wsd(self) -> dict:
        tuples = self._read_tuples()
        wn = self.wordnet
        en = self.store("en")
        counts = {"tuples": len(tuples), "in_wordnet": 0, "monosemous": 0, "polysemous": 0,
                  "multiword_titles": 0, "multiword_in_wordnet": 0}
        polysemous = []
        for t in tuples:
            lemma = title_to_lemma(t.en_title)
            n = len(wn.senses_of(lemma))
            multi = len(lemma.split()) > 1
            counts["multiword_titles"] += multi
            if n:
                counts["in_wordnet"] += 1
                counts["multiword_in_wordnet"] += multi
            if n == 1:
                counts["monosemous"] += 1
            elif n > 1:
                counts["polysemous"] += 1
                polysemous.append(t.en_title)
        args = (en, wn, self.stoplist, self.config)
        if self.config.jobs > 1 and len(polysemous) > 1:
            with ProcessPoolExecutor(self.config.jobs, initializer=_wsd_init, initargs=args) as pool:
                results = list(pool.map(_wsd_one, polysemous, chunksize=16))
        else:
            _wsd_init(*args)
            results = [_wsd_one(title) for title in polysemous]
        assignments = []
        for vsm, mcat in results:
            assignments.append(vsm)
            if mcat is not None:
                assignments.append(mcat)
        counts["vsm_assigned"] = len(results)
        counts["vsm_degenerate"] = sum(v.degenerate for v, _ in results)
        counts["mcat_assigned"] = sum(m is not None for _, m in results)
        counts["mcat_vsm_disagree"] = sum(m is not None and m.synset_offset != v.synset_offset
                                          for v, m in results)
        with open(self.out / "assignments.tsv", "w", encoding="utf-8", newline="\n") as fh:
            write_assignments(assignments, fh)
        _write_json(self.out / "wsd_stats.json", counts)
        return {k: counts[k] for k in ("polysemous", "vsm_assigned", "mcat_assigned")}

    def _build(self) -> dict:
        tuples = self._read_tuples()
        with open(self.out / "assignments.tsv", encoding="utf-8", newline="") as fh:
            assignments = read_assignments(fh)
        vsm = {a.en_title: a for a in assignments if a.method == "VSM"}
        mcat = {a.en_title: a for a in assignments if a.method == "MCAT"}
        stores = {lang: self.store(lang) for lang in LANGS}
        entries = build_thesaurus(tuples, self.wordnet, vsm, mcat, stores)
        with open(self.out / self.thesaurus_name, "w", encoding="utf-8", newline="\n") as fh:
            write_thesaurus(entries, fh, self.config.fmt)
        methods: dict[str, int] = {}
        for e in entries:
            methods[e.method] = methods.get(e.method, 0) + 1
        stats = {"entries": len(entries), "methods": dict(sorted(methods.items()))}
        _write_json(self.out / "build_stats.json", stats)
        return {"entries": len(entries), **{m.lower(): n for m, n in sorted(methods.items())}}

    def _eval(self) -> dict:
        with open(self.out / self.thesaurus_name, encoding="utf-8", newline="") as fh:
            entries = read_thesaurus(fh, self.config.fmt)
        stores = {lang: self.store(lang) for lang in LANGS}
        corpus = corpus_eval.build_corpus(entries, stores, self.stoplist)
        report = corpus_eval.coverage_report(corpus, entries)
        with open(self.out / "corpus.tsv", "w", encoding="utf-8", newline="\n") as fh:
            corpus_eval.write_corpus(corpus, fh)
        _write_text(self.out / "coverage.txt", corpus_eval.format_coverage(report))
        _write_text(self.out / "coverage.json", corpus_eval.coverage_json(report, corpus) + "\n")
        en = report["en"]
        return {"sentences": len(corpus.sentences), "types": en.types, "matched": en.matched,
                "ratio": round(en.ratio, 6)}

    # -- driver ------------------------------------------------------------

    def run(self, stages: Iterable[str] = STAGES) -> tuple[int, list[StageReport]]:
        wanted = set(stages)
        unknown = wanted - set(STAGES)
        if unknown:
            raise PipelineError(f"unknown stage(s): {', '.join(sorted(unknown))}")
        self.config.validate()
        self.out.mkdir(parents=True, exist_ok=True)
        manifest = self._load_manifest()
        runners: dict[str, Callable[[], dict]] = {
            "ingest": self._ingest, "tuples": self._tuples, "wsd": self._wsd,
            "build": self._build, "eval": self._eval,
        }
        reports: list[StageReport] = []
        for stage in STAGES:
            if stage not in wanted:
                continue
            missing = [n for n in self.requires[stage] if not (self.out / n).is_file()]
            if missing:
                msg = f"missing upstream artifact {missing[0]}; run stage '{self._producer(missing[0])}' first"
                reports.append(StageReport(stage, "error", message=msg))
                break
            try:
                key = self._stage_key(stage)
                if self._is_cached(manifest, stage, key):
                    reports.append(StageReport(stage, "cached"))
                    continue
                stats = runners[stage]()
            except Exception as exc:  # noqa: BLE001 - reported with stage context
                log.debug("stage %s failed", stage, exc_info=True)
                reports.append(StageReport(stage, "error", message=f"{type(exc).__name__}: {exc}"))
                break
            manifest[stage] = {"key": key,
                               "outputs": {n: _sha(self.out / n) for n in self.artifacts[stage]}}
            _write_json(self.out / MANIFEST, manifest)
            reports.append(StageReport(stage, "ran", stats))
        status = 1 if any(r.status == "error" for r in reports) else 0
        return status, reports


def run(config: PipelineConfig, stages: Iterable[str] = STAGES) -> tuple[int, list[StageReport]]:
    return Pipeline(config).run(stages)
