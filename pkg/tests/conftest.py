import numpy as np
import pytest
from hypothesis import settings

from hofa.arith import build_sieve

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_ACCEPTANCE: dict[int, list[tuple[str, str]]] = {}


@pytest.fixture(scope="session")
def sieve():
    return build_sieve(200_000)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _ACCEPTANCE.setdefault(int(marker.args[0]), []).append((item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[num]
        overall = "PASS" if all(s == "PASS" for _, s in parts) else "FAIL"
        detail = ", ".join(f"{name}={s}" for name, s in parts)
        tr.write_line(f"criterion {num:2d}: {overall}  [{detail}]")
