import pytest

from wikithes.pipeline import FIXTURE_DIR
from wikithes.wiki_ingest import load_stoplist, load_store
from wikithes.wordnet_store import load_wordnet_files


@pytest.fixture(scope="session")
def fixture_wn():
    return load_wordnet_files(FIXTURE_DIR / "index.noun", FIXTURE_DIR / "data.noun")


@pytest.fixture(scope="session")
def fixture_stores():
    return {
        "en": load_store(FIXTURE_DIR / "enwiki.xml", "en"),
        "es": load_store(FIXTURE_DIR / "es.jsonl", "es"),
        "ja": load_store(FIXTURE_DIR / "ja.jsonl", "ja"),
    }


@pytest.fixture(scope="session")
def stoplist():
    return load_stoplist()


_CRITERIA: dict[int, tuple[str, bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        number, text = marker.args
        _CRITERIA[number] = (text, report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        text, passed = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if passed else 'FAIL'}: {text}")
