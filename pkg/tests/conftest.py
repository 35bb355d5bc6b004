import numpy as np
import pytest

from nse import datasets
from nse.pvalues import PValueSet

_ACCEPTANCE: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id): acceptance criterion this test checks")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _ACCEPTANCE.setdefault(mark.args[0], []).append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        outs = _ACCEPTANCE[key]
        if "failed" in outs:
            status = "FAIL"
        elif all(o == "skipped" for o in outs):
            status = "SKIP"
        else:
            status = "PASS"
        n_fail = outs.count("failed")
        n_skip = outs.count("skipped")
        terminalreporter.write_line(
            f"{key}: {status}  ({len(outs)} checks, {n_fail} failed, {n_skip} skipped)"
        )


@pytest.fixture(scope="session")
def hedenfalk():
    if not datasets.is_available("hedenfalk"):
        pytest.skip("Hedenfalk p-values not provided (set NSE_HEDENFALK_PATH or NSE_DATA_DIR)")
    return datasets.load_dataset("hedenfalk")


@pytest.fixture(scope="session")
def diz():
    # bundled by design, so absence is a failure rather than a skip
    return datasets.load_dataset("diz")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def summary_surrogate(m: int, n_leq_001: int, n_leq_005: int, n_above_half: int) -> PValueSet:
    """A p-value set with prescribed counts at 0.01, 0.05 and above 0.5.

    Storey-based and SGoF decisions depend on the data only through these
    counts, so published rejection numbers can be checked against it.
    """
    a = np.linspace(0.0001, 0.0099, n_leq_001)
    b = np.linspace(0.011, 0.049, n_leq_005 - n_leq_001)
    c = np.linspace(0.06, 0.49, m - n_leq_005 - n_above_half)
    d = np.linspace(0.51, 0.99, n_above_half)
    return PValueSet(np.concatenate([a, b, c, d]))
