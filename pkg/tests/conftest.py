"""Shared fixtures and the acceptance summary printed at the end of a run."""
import os
import subprocess
import sys
import time

import pytest

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    _ACCEPTANCE[props["criterion"]] = (props["title"], report.outcome, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome, detail = _ACCEPTANCE[number]
        tag = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"[{tag}] {number:2d}. {title}: {detail}")


@pytest.fixture
def criterion(request, record_property):
    """Register the test as an acceptance criterion; returns a detail setter."""
    mark = request.node.get_closest_marker("criterion")
    record_property("criterion", mark.args[0])
    record_property("title", mark.args[1])

    def detail(text):
        record_property("detail", text)
        print(f"criterion {mark.args[0]}: {text}")
    return detail


class ScenarioRuns:
    """Runs a CLI scenario in fresh interpreters, once per (threads, repeat)."""

    THREADS = (1, 4)
    REPEATS = 2

    def __init__(self, root):
        self.root = root
        self.cache = {}

    def get(self, scenario, preset=None):
        key = (scenario, preset)
        if key not in self.cache:
            runs = []
            for threads in self.THREADS:
                for rep in range(self.REPEATS):
                    out = os.path.join(self.root, f"{scenario}-{preset or 'default'}-t{threads}-{rep}")
                    cmd = [sys.executable, "-m", "twistlab.cli", scenario, "--out", out, "-q"]
                    if preset:
                        cmd += ["--config", preset]
                    env = dict(os.environ, TWISTLAB_THREADS=str(threads))
                    t0 = time.perf_counter()
                    proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
                    runs.append({"threads": threads, "out": out, "code": proc.returncode,
                                 "seconds": time.perf_counter() - t0, "stderr": proc.stderr})
            self.cache[key] = runs
        return self.cache[key]


@pytest.fixture(scope="session")
def scenario_runs(tmp_path_factory):
    return ScenarioRuns(str(tmp_path_factory.mktemp("scenario_runs")))
