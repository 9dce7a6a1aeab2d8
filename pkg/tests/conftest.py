import numpy as np
import pytest

from ekgseq import EkgGenerator, build_view

# first 30 canonical terms, the fixed golden list
GOLDEN30 = (
    1, 2, 4, 6, 3, 9, 12, 8, 10, 5,
    15, 18, 14, 7, 21, 24, 16, 20, 22, 11,
    33, 27, 30, 25, 35, 28, 26, 13, 39, 36,
)

N_BIG = 1_000_100  # slack past 1e6 so at-the-end index searches stay in range

_acceptance_log = []


@pytest.fixture(scope="session")
def canon_gen():
    """Shared canonical-rule generator holding a bit over 1e6 terms."""
    gen = EkgGenerator()
    gen.generate_count(N_BIG)
    return gen


@pytest.fixture(scope="session")
def big_terms(canon_gen):
    return canon_gen.generate_count(N_BIG)


@pytest.fixture(scope="session")
def ft(canon_gen):
    return canon_gen.factors


@pytest.fixture(scope="session")
def terms_1e5(big_terms):
    return big_terms[:100_000]


@pytest.fixture(scope="session")
def view_1e6(big_terms):
    return build_view(big_terms, 10**6)


@pytest.fixture(scope="session")
def view_700k(big_terms):
    return build_view(big_terms, 700_000)


@pytest.fixture(scope="session")
def golden30():
    arr = np.array(GOLDEN30, dtype=np.int64)
    arr.flags.writeable = False
    return arr


@pytest.fixture
def acceptance():
    """Recorder for acceptance-gate results; prints one line per criterion
    into the terminal summary and fails the test on a red criterion."""

    def check(name: str, ok: bool, detail: str = ""):
        _acceptance_log.append((name, bool(ok), detail))
        suffix = f" [{detail}]" if detail else ""
        print(f"{'PASS' if ok else 'FAIL'}: {name}{suffix}")
        assert ok, f"acceptance criterion failed: {name}{suffix}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_log:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _acceptance_log:
        suffix = f" [{detail}]" if detail else ""
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}: {name}{suffix}")
