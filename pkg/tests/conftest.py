from contextlib import contextmanager

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def brute_antichains(n, leq, allowed=None):
    """All antichains of a poset on range(n) given a <= predicate, by exhaustion."""
    elems = [e for e in range(n) if allowed is None or e in allowed]
    out = []

    def grow(start, chosen):
        out.append(tuple(chosen))
        for k in range(start, len(elems)):
            e = elems[k]
            if all(not leq(a, e) and not leq(e, a) for a in chosen):
                chosen.append(e)
                grow(k + 1, chosen)
                chosen.pop()

    grow(0, [])
    return out


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("weak-cache")


_ACCEPTANCE: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion as PASS or FAIL."""

    @contextmanager
    def record(k: int, title: str):
        try:
            yield
        except BaseException:
            _ACCEPTANCE[k] = (title, False)
            print(f"criterion {k:2}: FAIL  {title}")
            raise
        _ACCEPTANCE[k] = (title, True)
        print(f"criterion {k:2}: PASS  {title}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2}: {'PASS' if ok else 'FAIL'}  {title}")
