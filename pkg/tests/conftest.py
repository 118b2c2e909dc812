import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from supverma import verma as vm  # noqa: E402
from supverma.cartan_witt import build_W  # noqa: E402

CONFIGS = [(3, 1, 1, (1,)), (5, 1, 1, (1,)), (3, 2, 1, (1, 1))]
SMALL = (3, 1, 1, (1,))


@functools.lru_cache(maxsize=None)
def algebra(p, k, l, m):
    return build_W(p, k, l, m)


@functools.lru_cache(maxsize=None)
def module(cfg, name):
    return vm.builtin_module(algebra(*cfg), name)


@functools.lru_cache(maxsize=None)
def induced(cfg, name, s=1):
    return vm.induce(vm.twist(module(cfg, name), s))


@functools.lru_cache(maxsize=None)
def coinduced(cfg, name):
    return vm.coinduce(module(cfg, name))


@pytest.fixture
def W113():
    return algebra(*SMALL)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, name = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {name}")
