from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from levelgas.config import RunConfig, apply_overrides, load_config
from levelgas.runner import run_config

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


def pinned(name: str, *overrides: str) -> RunConfig:
    return apply_overrides(load_config(CONFIGS / f"{name}.json"), list(overrides))


@pytest.fixture(scope="session")
def noiseless_cfg() -> RunConfig:
    return pinned("ising_noiseless")


@pytest.fixture(scope="session")
def wiener_cfg() -> RunConfig:
    return pinned("ising_wiener")


@pytest.fixture(scope="session")
def noiseless_run(noiseless_cfg):
    return run_config(noiseless_cfg)


@pytest.fixture(scope="session")
def wiener_run(wiener_cfg):
    return run_config(wiener_cfg, keep_noise=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def noiseless_oracle(noiseless_cfg):
    from levelgas.runner import oracle_compare

    return oracle_compare(noiseless_cfg)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
