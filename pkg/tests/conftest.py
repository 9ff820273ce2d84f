import re
import sys
from pathlib import Path

import pytest

from suite_paths import FIXTURES

sys.path.insert(0, str(Path(__file__).parent))

_CRITERION = re.compile(r"test_([ps]\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per release criterion covered by an acceptance test."""
    results: dict[str, tuple[bool, str]] = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "acceptance" not in nodeid:
                continue
            m = _CRITERION.match(nodeid.rsplit("::", 1)[-1])
            if m is None:
                continue
            crit = m.group(1).upper()
            ok = outcome == "passed"
            if crit in results and not results[crit][0]:
                continue  # a recorded failure is never overwritten
            results[crit] = (ok, m.group(2).replace("_", " "))
    if results:
        terminalreporter.section("acceptance criteria")
        for crit in sorted(results):
            ok, label = results[crit]
            terminalreporter.write_line(f"{crit} {'PASS' if ok else 'FAIL'} - {label}")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus_store():
    from asymgauge.corpus_index import build_index, read_corpus_dir

    return build_index(read_corpus_dir(FIXTURES / "corpus"))
