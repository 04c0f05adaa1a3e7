import pytest

from pzf.graphs import build_graph


@pytest.fixture(scope="session")
def graph():
    cache = {}

    def get(spec):
        if spec not in cache:
            cache[spec] = build_graph(spec)
        return cache[spec]

    return get


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def report(request):
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def add(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return add


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0].rstrip("ab"))):
            terminalreporter.write_line(line)
