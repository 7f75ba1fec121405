import time

import pytest

from sentinel.config import Config
from sentinel.pipeline import run_scenario
from sentinel.scenario import builtin_scenario, builtin_scenarios, derive_events

NOISE = {"mock.jitter_px": 2, "mock.miss_rate": 0.05, "mock.fp_rate": 0.02}

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


def run_suite(embedder, noise=None, seed=0):
    out = {}
    for name in builtin_scenarios():
        sc = builtin_scenario(name)
        cfg = Config()
        cfg.identity.embedder = embedder
        if noise:
            cfg.update(noise)
        t0 = time.perf_counter()
        events, pipe = run_scenario(sc, cfg, seed=seed)
        out[name] = {"scenario": sc, "events": events, "gt": derive_events(sc, cfg.own), "pipe": pipe,
                     "seconds": time.perf_counter() - t0}
    return out


@pytest.fixture(scope="session")
def oracle_suite():
    return run_suite("oracle")


@pytest.fixture(scope="session")
def noisy_suite():
    return run_suite("histogram", NOISE, seed=0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
