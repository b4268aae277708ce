import sys

import pytest

from oscspec.generators import GeneratorSet


@pytest.fixture(scope="session")
def gens():
    return GeneratorSet.build(12)


@pytest.fixture(scope="session")
def tree(gens):
    return gens.tree


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
