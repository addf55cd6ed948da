import json
import shutil

import pytest

from helpers import GOLDEN, output_tree
from wikithes.cli import main
from wikithes.pipeline import DATA_ENV, FIXTURE_DIR, STAGES, PipelineConfig, PipelineError, run
from wikithes.thesaurus import read_thesaurus


def _config(out, **kw):
    return PipelineConfig.from_data_dir(FIXTURE_DIR, out, **kw)


def _statuses(reports):
    return {r.stage: r.status for r in reports}


def test_full_run_reports_counts(tmp_path):
    status, reports = run(_config(tmp_path))
    assert status == 0
    assert [r.stage for r in reports] == list(STAGES)
    by_stage = {r.stage: r.stats for r in reports}
    assert by_stage["tuples"]["tuples"] == 8
    assert by_stage["wsd"] == {"polysemous": 4, "vsm_assigned": 4, "mcat_assigned": 3}
    for name in ("thesaurus.tsv", "assignments.tsv", "coverage.txt", "coverage.json", "corpus.tsv",
                 "tuples_stats.json", "wsd_stats.json", "build_stats.json", "manifest.json"):
        assert (tmp_path / name).is_file(), name


def test_eval_without_thesaurus_is_a_dependency_error(tmp_path):
    status, reports = run(_config(tmp_path), ["eval"])
    assert status == 1
    assert reports[-1].status == "error" and "run stage 'ingest' first" in reports[-1].message
    run(_config(tmp_path), ["ingest"])
    status, reports = run(_config(tmp_path), ["eval"])
    assert status == 1
    assert "thesaurus.tsv" in reports[0].message and "run stage 'build' first" in reports[0].message


def test_rerun_is_cached_and_identical(tmp_path):
    run(_config(tmp_path))
    before = output_tree(tmp_path)
    status, reports = run(_config(tmp_path))
    assert status == 0
    assert set(_statuses(reports).values()) == {"cached"}
    assert output_tree(tmp_path) == before


def test_parameter_change_invalidates_downstream_only(tmp_path):
    run(_config(tmp_path))
    for params in ({"mcat_depth": 1}, {"vsm_mode": "first_section", "gloss_examples": False}):
        before = (tmp_path / "assignments.tsv").read_bytes()
        _, reports = run(_config(tmp_path, **params))
        statuses = _statuses(reports)
        assert statuses["ingest"] == statuses["tuples"] == "cached"
        assert statuses["wsd"] == "ran"
        # downstream keys hash upstream contents, so identical assignments stay cached
        changed = (tmp_path / "assignments.tsv").read_bytes() != before
        assert statuses["build"] == ("ran" if changed else "cached")


def test_input_change_and_tampering_rerun(tmp_path):
    data = tmp_path / "data"
    shutil.copytree(FIXTURE_DIR, data)
    out = tmp_path / "out"
    run(PipelineConfig.from_data_dir(data, out))
    with open(data / "ja.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps({"id": 999, "title": "新記事", "lang": "ja", "text": "本文。"}, ensure_ascii=False) + "\n")
    _, reports = run(PipelineConfig.from_data_dir(data, out))
    assert _statuses(reports)["ingest"] == "ran"
    # the new page changes no tuple, so tuples.tsv is unchanged but its stage still reruns
    assert _statuses(reports)["tuples"] == "ran"
    (out / "coverage.txt").write_text("edited\n")
    _, reports = run(PipelineConfig.from_data_dir(data, out))
    assert _statuses(reports)["eval"] == "ran" and _statuses(reports)["build"] == "cached"
    assert (out / "coverage.txt").read_text() != "edited\n"


def test_jsonl_format(tmp_path):
    status, _ = run(_config(tmp_path, fmt="jsonl"))
    assert status == 0
    with open(tmp_path / "thesaurus.jsonl", encoding="utf-8") as fh:
        entries = read_thesaurus(fh, "jsonl")
    with open(GOLDEN / "thesaurus.tsv", encoding="utf-8") as fh:
        assert entries == read_thesaurus(fh)


def test_parallel_wsd_matches_serial(tmp_path):
    run(_config(tmp_path / "serial"))
    run(_config(tmp_path / "parallel", jobs=2))
    for name in ("assignments.tsv", "thesaurus.tsv"):
        assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "parallel" / name).read_bytes()


def test_config_validation(tmp_path):
    with pytest.raises(PipelineError, match="not found"):
        run(_config(tmp_path, en_dump=tmp_path / "nope.xml"))
    with pytest.raises(PipelineError, match="mcat_depth"):
        run(_config(tmp_path, mcat_depth=0))
    with pytest.raises(PipelineError, match="unknown stage"):
        run(_config(tmp_path), ["ingest", "train"])


def test_module_errors_carry_stage_context(tmp_path):
    index, data = tmp_path / "index.noun", tmp_path / "data.noun"
    index.write_text("thing n 1 1 @ 1 0 00000001\n")
    data.write_text("00000001 03 n 01 thing 0 001 @ 00000999 n 0000 | dangling\n")
    status, reports = run(_config(tmp_path / "out", wordnet_index=index, wordnet_data=data))
    assert status == 1
    assert reports[-1].stage == "wsd"
    assert "WordNetLoadError" in reports[-1].message and "00000999" in reports[-1].message


def test_data_dir_from_environment(tmp_path, monkeypatch):
    data = tmp_path / "data"
    shutil.copytree(FIXTURE_DIR, data)
    monkeypatch.setenv(DATA_ENV, str(data))
    cfg = PipelineConfig.from_data_dir(None, tmp_path / "out")
    assert cfg.en_dump == data / "enwiki.xml"
    assert cfg.wordnet_index == data / "index.noun"
    monkeypatch.delenv(DATA_ENV)
    assert PipelineConfig.from_data_dir(None, tmp_path / "out").es_dump == FIXTURE_DIR / "es.jsonl"


def test_cli_end_to_end(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "--stages", "ingest,tuples"]) == 0
    out = capsys.readouterr().out
    assert "ingest: ran" in out and "tuples: ran tuples=8" in out
    assert main(["--out", str(tmp_path), "--stages", "build"]) == 1
    assert "run stage 'wsd' first" in capsys.readouterr().err
    assert main(["--out", str(tmp_path), "--format", "jsonl", "--mcat-depth", "2",
                 "--vsm-mode", "first_section", "--no-gloss-examples"]) == 0
    assert (tmp_path / "thesaurus.jsonl").is_file()


def test_cli_argument_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as err:
        main(["--out", str(tmp_path), "--stages", "ingest,nope"])
    assert err.value.code == 2
    assert main(["--out", str(tmp_path), "--mcat-depth", "0"]) == 2
    assert "mcat_depth" in capsys.readouterr().err
