import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pvextract.data import IVDataset, load_benchmark
from pvextract.model import OperatingCondition

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def rtc():
    return load_benchmark("rtc_france")


@pytest.fixture(scope="session")
def pw():
    return load_benchmark("photowatt_pwp201")


@pytest.fixture
def tiny():
    """Three-point dataset for fast optimiser tests."""
    return IVDataset("tiny", np.array([0.0, 0.3, 0.5]), np.array([0.76, 0.74, 0.5]),
                     OperatingCondition.from_celsius(33.0))


# ---------------------------------------------------------------------------
# acceptance ledger: each acceptance test records one line, printed at the end
# ---------------------------------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    def record(key, passed, detail):
        _ACCEPTANCE[key] = (bool(passed), detail)
        print(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")
    return record


def _sort_key(key):
    head = key.rstrip("abcdefgh")
    return (int(head), key)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=_sort_key):
        passed, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>3s}: {'PASS' if passed else 'FAIL'}  {detail}")
